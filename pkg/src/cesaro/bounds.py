"""Operator-norm estimates on truncations, checked against closed-form bounds.

Exact operator norms for general p (and for the ces/d_p norms) have no
finite algorithm. What is computed here is a certified lower bound: the
largest ratio ``||T x|| / ||x||`` seen over a fixed candidate set. The
closed-form values are upper bounds (or limits) and a claim is violated
only when an observed ratio exceeds its bound beyond rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional

import numpy as np

from .operators import OperatorSpec, apply, apply_adjoint, materialize
from .sequence import INF, Sequence, SpaceKind, SpaceSpec, norm_array

__all__ = [
    "Verdict",
    "BoundReport",
    "l1_opnorm",
    "l1_opnorm_formula",
    "lp_lower_formula",
    "dual_linf_opnorm",
    "candidate_vectors",
    "trial_ratios",
    "opnorm_estimate",
    "power_iteration_l2",
    "hardy_estimate",
    "shift_dp_report",
    "bound_suite",
]

REL_TOL = 1e-12
BASIS_PROBES = 32


class Verdict(str, Enum):
    HOLDS = "holds"
    VIOLATED = "violated"
    PROGRESS = "asymptotic-progress"


@dataclass(frozen=True)
class BoundReport:
    """One claim evaluated on a truncation.

    ``margin`` is positive when the claim holds: ``bound - observed`` for an
    upper bound, ``observed - bound`` for a lower bound.
    """

    claim: str
    t: float
    p: float
    N: int
    trials: int
    seed: Optional[int]
    observed: float
    bound: float
    margin: float
    verdict: Verdict

    def as_dict(self) -> dict:
        return {
            "claim": self.claim,
            "t": self.t,
            "p": self.p,
            "N": self.N,
            "trials": self.trials,
            "seed": self.seed,
            "observed": self.observed,
            "bound": self.bound,
            "margin": self.margin,
            "verdict": self.verdict.value,
        }


def _upper(claim, t, p, N, trials, seed, observed, bound) -> BoundReport:
    ok = observed <= bound * (1 + REL_TOL) + REL_TOL
    return BoundReport(claim, t, p, N, trials, seed, observed, bound, bound - observed,
                       Verdict.HOLDS if ok else Verdict.VIOLATED)


def _lower(claim, t, p, N, trials, seed, observed, bound) -> BoundReport:
    ok = observed >= bound * (1 - REL_TOL) - REL_TOL
    return BoundReport(claim, t, p, N, trials, seed, observed, bound, observed - bound,
                       Verdict.HOLDS if ok else Verdict.VIOLATED)


def l1_opnorm_formula(t: float) -> float:
    """``(1/t) log(1/(1-t))``, the ℓ^1 operator norm of C_t (1 at t = 0)."""
    if t == 0:
        return 1.0
    return -math.log1p(-t) / t


def lp_lower_formula(t: float, p: float, N: Optional[int] = None) -> float:
    """ℓ^p norm of the first column ``(t^n/(n+1))``; truncated to N terms if given."""
    if N is None:
        # terms below 1e-300 are irrelevant at double precision
        N = 1 if t == 0 else int(min(1e7, 1 + 700 / max(-math.log(t), 1e-12) / p + 10))
    col = float(t) ** np.arange(N) / np.arange(1, N + 1)
    return float(np.sum(col**p) ** (1 / p))


def l1_opnorm(t: float, N: int) -> float:
    """Maximum absolute column sum of the N-truncated matrix of C_t."""
    if not 0 < t < 1:
        raise ValueError("l1_opnorm needs 0 < t < 1")
    cols = np.abs(materialize(t, N)).sum(axis=0)
    return float(cols.max())


def dual_linf_opnorm(t: float, N: int) -> float:
    """Maximum absolute row sum of the N-truncated dual matrix (sup-norm operator norm)."""
    if not 0 <= t < 1:
        raise ValueError("dual_linf_opnorm needs 0 <= t < 1")
    rows = apply(OperatorSpec.dual(t), Sequence(np.ones(N))).coords
    return float(np.max(np.abs(rows)))


def candidate_vectors(N: int, trials: int, seed: int) -> Iterator[np.ndarray]:
    """Basis probes e_0..e_31, then per trial a uniform [-1, 1] vector and its absolute value."""
    for k in range(min(N, BASIS_PROBES)):
        e = np.zeros(N)
        e[k] = 1.0
        yield e
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        v = rng.uniform(-1.0, 1.0, N)
        yield v
        yield np.abs(v)


def _check_space(space: SpaceSpec):
    if space.kind not in (SpaceKind.LP, SpaceKind.CES, SpaceKind.DP):
        raise ValueError("operator norms are estimated for lp, ces and dp only")


def trial_ratios(op: OperatorSpec, space: SpaceSpec, N: int, trials: int, seed: int,
                 extra: Optional[list] = None) -> np.ndarray:
    """``||op x|| / ||x||`` over the candidate set (plus any ``extra`` vectors)."""
    _check_space(space)
    vecs = list(candidate_vectors(N, trials, seed)) + list(extra or [])
    out = np.empty(len(vecs))
    for i, v in enumerate(vecs):
        img = apply(op, Sequence(v)).coords
        out[i] = norm_array(np.abs(img), space) / norm_array(np.abs(v), space)
    return out


def power_iteration_l2(op: OperatorSpec, N: int, rtol: float = 1e-10, max_iter: int = 100_000) -> float:
    """Largest singular value of the truncation via power iteration on ``T^T T``.

    Starts from the all-ones vector and stops once the relative increment of
    the ratio ``||T v|| / ||v||`` drops below ``rtol``. Every iterate is a
    genuine ratio, so the result is a lower bound.
    """
    v = np.ones(N) / math.sqrt(N)
    est = 0.0
    for _ in range(max_iter):
        w = apply(op, Sequence(v)).coords
        new = float(np.linalg.norm(w))
        g = apply_adjoint(op, Sequence(w)).coords.real
        gn = float(np.linalg.norm(g))
        if gn == 0.0:
            return new
        v = g / gn
        if abs(new - est) <= rtol * new:
            return max(new, est)
        est = max(est, new)
    return est


def opnorm_estimate(op: OperatorSpec, space: SpaceSpec, N: int, trials: int, seed: int) -> float:
    """Certified lower bound on the operator norm of the N-truncation.

    Maximum ratio over the candidate set; for ℓ^2 the power-iteration value is
    included as well.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    best = float(trial_ratios(op, space, N, trials, seed).max())
    if space.kind is SpaceKind.LP and space.p == 2:
        best = max(best, power_iteration_l2(op, N))
    return best


def hardy_estimate(p: float, N: int, trials: int = 0, seed: int = 42) -> float:
    """Lower bound for the ℓ^p norm of the classical Cesaro operator on N coordinates.

    For p = 2 this is power iteration; otherwise the candidate set plus the
    near-extremal profiles ``(n+1)^(-1/p)`` and ``(n+1)^(-s)`` for s just
    above ``1/p``.
    """
    op = OperatorSpec.cesaro(1.0)
    space = SpaceSpec.lp(p)
    if p == 2:
        est = power_iteration_l2(op, N)
        if trials:
            est = max(est, float(trial_ratios(op, space, N, trials, seed).max()))
        return est
    n = np.arange(1, N + 1, dtype=float)
    profiles = [n ** (-1.0 / p)] + [n ** (-(1.0 / p) * (1 + eps)) for eps in (0.01, 0.05, 0.1, 0.3)]
    return float(trial_ratios(op, space, N, max(trials, 1), seed, extra=profiles).max())


def shift_dp_report(m: int, p: float, N: int, trials: int, seed: int) -> tuple:
    """Shift powers in d_p: ratio at e_0 versus ``(m+1)^(1/p)``.

    Returns ``(e0_report, max_report)``: the first checks equality at e_0, the
    second that no candidate exceeds the value.
    """
    if N <= m:
        raise ValueError("truncation must exceed the shift power")
    op = OperatorSpec.shift(m)
    space = SpaceSpec.dp(p)
    target = (m + 1) ** (1.0 / p)
    ratios = trial_ratios(op, space, N, trials, seed)
    at_e0 = float(ratios[0])
    dev = abs(at_e0 - target)
    eq = BoundReport("shift-dp-norm-at-e0", 0.0, p, N, trials, seed, at_e0, target,
                     1e-12 * target - dev, Verdict.HOLDS if dev <= 1e-12 * target else Verdict.VIOLATED)
    return eq, _upper("shift-dp-norm", 0.0, p, N, trials, seed, float(ratios.max()), target)


def _conj(p: float) -> float:
    return INF if p == 1 else p / (p - 1)


def bound_suite(t: float, p: float, N: int, trials: int, seed: int,
                hardy: bool = True) -> list:
    """Evaluate every norm claim for one (t, p, N) configuration.

    Claims: ℓ^1 column-sum formula (t > 0), ℓ^p upper bound and first-column
    lower bound, the ces(p) bound ``min{1/(1-t), p'}``, the d_p bound
    ``(1-t)^(-1-1/p)``, the dual sup-norm bound ``1/(1-t)``, and (with
    ``hardy``) progress of the classical Cesaro ℓ^p norm towards ``p'``.
    """
    if not 0 <= t < 1:
        raise ValueError("bound_suite needs t in [0, 1)")
    if not 1 < p < INF:
        raise ValueError("bound_suite needs 1 < p < inf")
    op = OperatorSpec.cesaro(t)
    reports = []
    if t > 0:
        reports.append(_upper("l1-column-sum", t, 1.0, N, 0, None, l1_opnorm(t, N), l1_opnorm_formula(t)))

    lp_est = opnorm_estimate(op, SpaceSpec.lp(p), N, trials, seed)
    reports.append(_upper("lp-upper", t, p, N, trials, seed, lp_est, l1_opnorm_formula(t) ** (1 / p)))
    reports.append(_lower("lp-first-column-lower", t, p, N, trials, seed, lp_est, lp_lower_formula(t, p, N)))
    reports.append(_upper("lp-lower-le-upper", t, p, N, 0, None,
                          lp_lower_formula(t, p), l1_opnorm_formula(t) ** (1 / p)))

    ces_est = float(trial_ratios(op, SpaceSpec.ces(p), N, trials, seed).max())
    reports.append(_upper("ces-upper", t, p, N, trials, seed, ces_est, min(1 / (1 - t), _conj(p))))

    dp_est = float(trial_ratios(op, SpaceSpec.dp(p), N, trials, seed).max())
    reports.append(_upper("dp-upper", t, p, N, trials, seed, dp_est, (1 - t) ** (-1 - 1 / p)))

    reports.append(_upper("dual-sup-upper", t, INF, N, 0, None, dual_linf_opnorm(t, N), 1 / (1 - t)))

    if hardy:
        # p = 2 is pure power iteration, with no random trials
        h_trials, h_seed = (0, None) if p == 2 else (trials, seed)
        h = hardy_estimate(p, N, h_trials, seed)
        target = _conj(p)
        ok = h <= target + 1e-9
        reports.append(BoundReport("hardy-lp-progress", 1.0, p, N, h_trials, h_seed, h, target, target - h,
                                   Verdict.PROGRESS if ok else Verdict.VIOLATED))
    return reports
