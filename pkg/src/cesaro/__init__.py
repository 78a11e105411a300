"""Generalized Cesaro operators C_t on finite truncations of sequence space.

Float (complex128) and exact rational arithmetic, closed-form eigenvectors,
inverse and resolvent solvers, norm bounds and ergodic diagnostics.
"""

from .operators import (
    NotInRangeError,
    OperatorSpec,
    OpKind,
    SingularResolventError,
    apply,
    apply_inverse_Ct,
    apply_resolvent,
    materialize,
    solve_I_minus_Ct,
)
from .sequence import INF, LadderSpec, Mode, Sequence, SpaceKind, SpaceSpec, majorant, norm

__all__ = [
    "INF",
    "LadderSpec",
    "Mode",
    "NotInRangeError",
    "OpKind",
    "OperatorSpec",
    "Sequence",
    "SingularResolventError",
    "SpaceKind",
    "SpaceSpec",
    "apply",
    "apply_inverse_Ct",
    "apply_resolvent",
    "majorant",
    "materialize",
    "norm",
    "solve_I_minus_Ct",
]

__version__ = "0.1.0"
