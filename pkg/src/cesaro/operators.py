"""Triangular realizations of the generalized Cesaro operators.

Every forward operator here (``C_t``, the diagonal ``D_phi``, shift powers
``S^m`` and the shift series ``R_t``) is lower triangular, so applying it to
the first ``N`` coordinates of a sequence gives exactly the first ``N``
coordinates of the image. The dual ``C'_t`` is upper triangular; it is only
exact for inputs regarded as finitely supported inside their truncation.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Union

import numpy as np
from scipy.signal import lfilter

from .sequence import Mode, Sequence, to_fraction

__all__ = [
    "OpKind",
    "OperatorSpec",
    "SingularResolventError",
    "NotInRangeError",
    "DEFAULT_SINGULAR_TOL",
    "apply",
    "apply_adjoint",
    "apply_inverse_Ct",
    "apply_resolvent",
    "resolvent_residual",
    "solve_I_minus_Ct",
    "materialize",
    "dual_preimage",
    "dual_tail_bound",
]

DEFAULT_SINGULAR_TOL = 1e-12


class OpKind(str, Enum):
    CT = "Ct"
    DPHI = "Dphi"
    SHIFT = "Shift"
    RT = "Rt"
    CT_DUAL = "CtDual"


class SingularResolventError(ValueError):
    """nu sits on (or too close to) a diagonal entry 1/(n+1)."""

    def __init__(self, nu, n: int):
        super().__init__(f"nu={nu} coincides with the diagonal entry 1/{n + 1} (n={n})")
        self.nu = nu
        self.n = n


class NotInRangeError(ValueError):
    """The right-hand side has a nonzero 0-th coordinate, so I - C_t cannot reach it."""


def _check_t(t, allow_one: bool):
    if t < 0 or t > 1:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    if t == 1 and not allow_one:
        raise ValueError("t = 1 is not allowed here (formula requires t < 1)")


@dataclass(frozen=True)
class OperatorSpec:
    """Which operator to apply. ``t`` is ignored by Dphi and Shift; ``m`` is the shift power."""

    kind: OpKind
    t: Union[float, Fraction] = 0
    m: int = 1

    def __post_init__(self):
        kind = OpKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind in (OpKind.CT, OpKind.CT_DUAL, OpKind.RT):
            _check_t(self.t, allow_one=kind is not OpKind.RT)
        if kind is OpKind.SHIFT and self.m < 0:
            raise ValueError("shift power must be nonnegative")

    @classmethod
    def cesaro(cls, t) -> "OperatorSpec":
        return cls(OpKind.CT, t=t)

    @classmethod
    def diagonal(cls) -> "OperatorSpec":
        return cls(OpKind.DPHI)

    @classmethod
    def shift(cls, m: int = 1) -> "OperatorSpec":
        return cls(OpKind.SHIFT, m=m)

    @classmethod
    def shift_series(cls, t) -> "OperatorSpec":
        return cls(OpKind.RT, t=t)

    @classmethod
    def dual(cls, t) -> "OperatorSpec":
        return cls(OpKind.CT_DUAL, t=t)


def _weights(N: int) -> np.ndarray:
    return np.arange(1, N + 1, dtype=float)


def _scalar_t(t, exact: bool):
    return to_fraction(t) if exact else float(t)


# --- float kernels ----------------------------------------------------------

def _ct_float(a: np.ndarray, t: float) -> np.ndarray:
    # s_n = t s_{n-1} + x_n is the weighted row sum of C_t
    return lfilter([1.0], [1.0, -t], a) / _weights(a.size)


def _ct_dual_float(a: np.ndarray, t: float) -> np.ndarray:
    b = (a / _weights(a.size))[::-1]
    return lfilter([1.0], [1.0, -t], b)[::-1]


def _rt_float(a: np.ndarray, t: float) -> np.ndarray:
    # R_t = sum_k t^k S^k, summed shift by shift
    out = a.copy()
    coef = 1.0
    for k in range(1, a.size):
        coef *= t
        if coef == 0.0:
            break
        out[k:] += coef * a[:-k]
    return out


def _rt_adjoint_float(a: np.ndarray, t: float) -> np.ndarray:
    out = a.copy()
    coef = 1.0
    for k in range(1, a.size):
        coef *= t
        if coef == 0.0:
            break
        out[:-k] += coef * a[k:]
    return out


def _shift_float(a: np.ndarray, m: int) -> np.ndarray:
    out = np.zeros_like(a)
    if m < a.size:
        out[m:] = a[: a.size - m]
    return out


def _backshift_float(a: np.ndarray, m: int) -> np.ndarray:
    out = np.zeros_like(a)
    if m < a.size:
        out[: a.size - m] = a[m:]
    return out


# --- exact kernels ----------------------------------------------------------

def _ct_exact(c, t):
    out, s = [], Fraction(0)
    for n, v in enumerate(c):
        s = t * s + v
        out.append(s / (n + 1))
    return tuple(out)


def _ct_dual_exact(c, t):
    N = len(c)
    out = [Fraction(0)] * N
    b = Fraction(0)
    for i in range(N - 1, -1, -1):
        b = c[i] / (i + 1) + t * b
        out[i] = b
    return tuple(out)


def _rt_exact(c, t):
    N = len(c)
    out = list(c)
    coef = Fraction(1)
    for k in range(1, N):
        coef *= t
        if coef == 0:
            break
        for n in range(k, N):
            out[n] += coef * c[n - k]
    return tuple(out)


def _rt_adjoint_exact(c, t):
    N = len(c)
    out = list(c)
    coef = Fraction(1)
    for k in range(1, N):
        coef *= t
        if coef == 0:
            break
        for n in range(N - k):
            out[n] += coef * c[n + k]
    return tuple(out)


def apply(op: OperatorSpec, x: Sequence) -> Sequence:
    """Apply ``op`` to the truncation ``x``; the result has the same length."""
    N = len(x)
    if x.exact:
        c = x.coords
        t = _scalar_t(op.t, True)
        if op.kind is OpKind.CT:
            out = _ct_exact(c, t)
        elif op.kind is OpKind.DPHI:
            out = tuple(v / (n + 1) for n, v in enumerate(c))
        elif op.kind is OpKind.SHIFT:
            m = min(op.m, N)
            out = (Fraction(0),) * m + c[: N - m]
        elif op.kind is OpKind.RT:
            out = _rt_exact(c, t)
        else:
            out = _ct_dual_exact(c, t)
        return Sequence(out, Mode.EXACT)

    a = np.array(x.coords)
    t = _scalar_t(op.t, False)
    if op.kind is OpKind.CT:
        out = _ct_float(a, t)
    elif op.kind is OpKind.DPHI:
        out = a / _weights(N)
    elif op.kind is OpKind.SHIFT:
        out = _shift_float(a, op.m)
    elif op.kind is OpKind.RT:
        out = _rt_float(a, t)
    else:
        out = _ct_dual_float(a, t)
    return Sequence(out, Mode.FLOAT)


def apply_adjoint(op: OperatorSpec, x: Sequence) -> Sequence:
    """Apply the transpose of the N-truncated matrix of ``op`` (real t)."""
    if op.kind is OpKind.CT:
        return apply(OperatorSpec.dual(op.t), x)
    if op.kind is OpKind.CT_DUAL:
        return apply(OperatorSpec.cesaro(op.t), x)
    if op.kind is OpKind.DPHI:
        return apply(op, x)
    N = len(x)
    if x.exact:
        c = x.coords
        if op.kind is OpKind.SHIFT:
            m = min(op.m, N)
            return Sequence(c[m:] + (Fraction(0),) * m, Mode.EXACT)
        return Sequence(_rt_adjoint_exact(c, to_fraction(op.t)), Mode.EXACT)
    a = np.array(x.coords)
    if op.kind is OpKind.SHIFT:
        return Sequence(_backshift_float(a, op.m), Mode.FLOAT)
    return Sequence(_rt_adjoint_float(a, float(op.t)), Mode.FLOAT)


def apply_inverse_Ct(y: Sequence, t) -> Sequence:
    """Solve ``C_t x = y`` via ``x_n = (n+1) y_n - n t y_{n-1}`` (``y_{-1} = 0``)."""
    _check_t(t, allow_one=True)
    if y.exact:
        t = to_fraction(t)
        c = y.coords
        out = [c[0]] + [(n + 1) * c[n] - n * t * c[n - 1] for n in range(1, len(c))]
        return Sequence(tuple(out), Mode.EXACT)
    a = np.array(y.coords)
    n = np.arange(a.size, dtype=float)
    out = (n + 1) * a
    out[1:] -= n[1:] * float(t) * a[:-1]
    return Sequence(out, Mode.FLOAT)


def _check_nu(nu, N: int, exact: bool, tol: float):
    if exact:
        for n in range(N):
            if nu == Fraction(1, n + 1):
                raise SingularResolventError(nu, n)
        return
    band = tol * max(1.0, abs(nu))
    # only the diagonal entries near nu can violate the band
    if nu.imag != 0 and abs(nu.imag) >= band:
        return
    diag = 1.0 / _weights(N)
    dist = np.abs(diag - nu)
    n = int(np.argmin(dist))
    if dist[n] < band:
        raise SingularResolventError(nu, n)


def _resolvent_substitution_float(y: np.ndarray, t: float, nu: complex) -> np.ndarray:
    N = y.size
    x = np.empty(N, dtype=np.complex128)
    s = 0.0 + 0.0j
    for n in range(N):
        h = n + 1.0
        x[n] = (y[n] - t * s / h) / (1.0 / h - nu)
        s = t * s + x[n]
    return x


def _resolvent_substitution_exact(y, t, nu):
    out = []
    s = Fraction(0)
    for n, v in enumerate(y):
        h = n + 1
        xn = (v - t * s / h) / (Fraction(1, h) - nu)
        out.append(xn)
        s = t * s + xn
    return tuple(out)


def _resolvent_closed_form_float(y: np.ndarray, t: float, nu: complex) -> np.ndarray:
    # coefficient of y_j in x_n (j < n):
    #   (-1)^(n-j) nu^(n-j-1) t^(n-j) / ((n+1) prod_{i=j..n} (1/(i+1) - nu))
    # built by walking j downward from n-1 with ratio (-nu t)/d_j
    N = y.size
    d = 1.0 / _weights(N) - nu
    x = np.empty(N, dtype=np.complex128)
    ratio = (-nu * t) / d
    for n in range(N):
        val = y[n] / d[n]
        if n >= 1:
            lead = -t / ((n + 1) * d[n] * d[n - 1])
            coefs = np.empty(n, dtype=np.complex128)
            coefs[0] = lead
            if n >= 2:
                coefs[1:] = lead * np.cumprod(ratio[n - 2::-1])
            # coefs[k-1] multiplies y_{n-k}
            val += np.dot(coefs, y[n - 1::-1])
        x[n] = val
    return x


def _resolvent_closed_form_exact(y, t, nu):
    N = len(y)
    d = [Fraction(1, i + 1) - nu for i in range(N)]
    out = []
    for n in range(N):
        val = y[n] / d[n]
        if n >= 1:
            coef = -t / ((n + 1) * d[n] * d[n - 1])
            val += coef * y[n - 1]
            for j in range(n - 2, -1, -1):
                coef *= -nu * t / d[j]
                val += coef * y[j]
        out.append(val)
    return tuple(out)


def apply_resolvent(y: Sequence, t, nu, method: str = "substitution",
                    tol: float = DEFAULT_SINGULAR_TOL) -> Sequence:
    """Solve ``(C_t - nu I) x = y`` on the truncation.

    ``method="substitution"`` runs forward substitution on the lower
    triangular system, carrying the weighted row sum so each row costs O(1).
    ``method="closed-form"`` evaluates the explicit coordinate law, which is
    O(N^2) and kept as a cross-check. ``nu`` must stay farther than
    ``tol * max(1, |nu|)`` from every diagonal entry ``1/(n+1)``, ``n < N``
    (exact equality in exact mode).
    """
    _check_t(t, allow_one=False)
    if method not in ("substitution", "closed-form"):
        raise ValueError(f"unknown resolvent method {method!r}")
    N = len(y)
    if y.exact:
        if isinstance(nu, complex):
            if nu.imag != 0:
                raise TypeError("exact mode supports real rational nu only")
            raise TypeError("exact mode needs a rational nu, not a complex float")
        t, nu = to_fraction(t), to_fraction(nu)
        _check_nu(nu, N, True, tol)
        solver = _resolvent_substitution_exact if method == "substitution" else _resolvent_closed_form_exact
        return Sequence(solver(y.coords, t, nu), Mode.EXACT)
    nu = complex(nu)
    _check_nu(nu, N, False, tol)
    solver = _resolvent_substitution_float if method == "substitution" else _resolvent_closed_form_float
    return Sequence(solver(np.array(y.coords), float(t), nu), Mode.FLOAT)


def resolvent_residual(x: Sequence, y: Sequence, t, nu) -> float:
    """Relative sup-norm residual ``||(C_t - nu I) x - y||_inf / ||y||_inf``."""
    if x.exact:
        nu = to_fraction(nu)
        cx = apply(OperatorSpec.cesaro(t), x).coords
        r = max(abs(a - nu * b - c) for a, b, c in zip(cx, x.coords, y.coords))
        scale = max(abs(c) for c in y.coords)
        return float(r / scale) if scale else float(r)
    cx = apply(OperatorSpec.cesaro(t), x).coords
    r = float(np.max(np.abs(cx - complex(nu) * x.coords - y.coords)))
    scale = float(np.max(np.abs(y.coords)))
    return r / scale if scale else r


def solve_I_minus_Ct(y: Sequence, t, tol: float = DEFAULT_SINGULAR_TOL) -> Sequence:
    """Return ``w`` with ``w_0 = 0`` and ``(I - C_t) w = y``.

    The range of ``I - C_t`` is the set of sequences with vanishing 0-th
    coordinate; other inputs raise :class:`NotInRangeError`.
    """
    _check_t(t, allow_one=False)
    N = len(y)
    if y.exact:
        t = to_fraction(t)
        c = y.coords
        if c[0] != 0:
            raise NotInRangeError(f"y_0 = {c[0]} is nonzero; not in the range of I - C_t")
        w = [Fraction(0)]
        s = Fraction(0)
        for n in range(1, N):
            wn = ((n + 1) * c[n] + t * s) / n
            w.append(wn)
            s = t * s + wn
        return Sequence(tuple(w), Mode.EXACT)
    a = np.array(y.coords)
    scale = max(1.0, float(np.max(np.abs(a))))
    if abs(a[0]) > tol * scale:
        raise NotInRangeError(f"|y_0| = {abs(a[0]):.3g} exceeds tolerance; not in the range of I - C_t")
    t = float(t)
    w = np.zeros(N, dtype=np.complex128)
    s = 0.0 + 0.0j
    for n in range(1, N):
        w[n] = ((n + 1) * a[n] + t * s) / n
        s = t * s + w[n]
    return Sequence(w, Mode.FLOAT)


def materialize(t, N: int, mode: Union[Mode, str] = Mode.FLOAT):
    """Dense N x N lower triangular matrix of C_t: entry (n, i) = t^(n-i)/(n+1).

    Float mode returns a float64 ndarray; exact mode a tuple of row tuples
    of Fractions.
    """
    _check_t(t, allow_one=True)
    if N < 1:
        raise ValueError("N must be positive")
    if Mode(mode) is Mode.EXACT:
        t = to_fraction(t)
        powers = [t**k for k in range(N)]
        zero = Fraction(0)
        return tuple(
            tuple(powers[n - i] / (n + 1) if i <= n else zero for i in range(N))
            for n in range(N)
        )
    t = float(t)
    n = np.arange(N)
    diff = n[:, None] - n[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        mat = np.where(diff >= 0, np.power(t, np.maximum(diff, 0)), 0.0)
    return mat / (n + 1.0)[:, None]


def dual_preimage(w: Sequence, t) -> Sequence:
    """Recover ``z`` from ``w = C'_t z`` via ``z_i = (i+1)(w_i - t w_{i+1})``.

    Uses ``w_N = 0``, i.e. ``z`` finitely supported inside the truncation.
    """
    N = len(w)
    if w.exact:
        t = to_fraction(t)
        c = w.coords + (Fraction(0),)
        return Sequence(tuple((i + 1) * (c[i] - t * c[i + 1]) for i in range(N)), Mode.EXACT)
    a = np.append(np.array(w.coords), 0.0)
    return Sequence(_weights(N) * (a[:-1] - float(t) * a[1:]), Mode.FLOAT)


def dual_tail_bound(y: Sequence, t, i: int) -> float:
    """Bound on what a genuine tail beyond the truncation could add to ``(C'_t y)_i``.

    For a tail bounded by ``max_k |y_k|`` the missing part of row ``i`` is at
    most ``max|y| t^(N-i) / ((N+1)(1-t))``.
    """
    t = float(t)
    if t >= 1:
        return float("inf")
    N = len(y)
    big = float(max(abs(complex(v)) for v in y.coords)) if y.exact else float(np.max(np.abs(y.coords)))
    return big * t ** (N - i) / ((N + 1) * (1 - t))
