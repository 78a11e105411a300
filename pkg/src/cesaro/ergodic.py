"""Orbits, Cesaro means and the limit projection of C_t."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .operators import OperatorSpec, apply
from .sequence import Sequence, SpaceSpec, norm, to_fraction

__all__ = [
    "ErgodicTrace",
    "power_orbit",
    "cesaro_means",
    "running_means",
    "limit_projection",
    "power_bounded_shadow",
    "fit_log_rate",
    "ergodic_report",
]


def power_orbit(x: Sequence, t, n_max: int) -> list:
    """``[C_t x, C_t^2 x, ..., C_t^{n_max} x]`` by repeated application."""
    if n_max < 1:
        raise ValueError("n_max must be positive")
    op = OperatorSpec.cesaro(t)
    orbit = []
    cur = x
    for _ in range(n_max):
        cur = apply(op, cur)
        orbit.append(cur)
    return orbit


def running_means(orbit: list) -> list:
    """Means of the first n orbit elements for n = 1 .. len(orbit)."""
    means = []
    total = None
    for n, y in enumerate(orbit, start=1):
        total = y if total is None else total + y
        means.append(total.scale(Fraction(1, n) if y.exact else 1.0 / n))
    return means


def cesaro_means(x: Sequence, t, n: int) -> Sequence:
    """``(1/n) sum_{m=1}^{n} C_t^m x``."""
    return running_means(power_orbit(x, t, n))[-1]


def limit_projection(x: Sequence, t) -> Sequence:
    """Projection onto the fixed line ``span{(t^k)}`` along ``{y : y_0 = 0}``.

    Since ``x - x_0 (t^k)`` has vanishing 0-th coordinate, the projection is
    ``x_0 (t^k)_{k<N}``.
    """
    if t < 0 or t >= 1:
        raise ValueError(f"the limit projection needs t in [0, 1), got {t}")
    geo = Sequence.geometric(t, len(x), x.mode)
    return geo.scale(x.coords[0])


def power_bounded_shadow(x: Sequence, orbit: list) -> bool:
    """``r_n(C_t^m x) <= r_n(x)`` for every orbit element and every n < N.

    ``r_n`` is the running maximum of |x_0|, ..., |x_n|; float comparisons
    allow a relative slack of 1e-12.
    """
    if x.exact:
        ref = _running_max(x.abs())
        return all(all(a <= b for a, b in zip(_running_max(y.abs()), ref)) for y in orbit)
    ref = np.maximum.accumulate(np.abs(x.coords))
    slack = 1e-12 * max(float(ref[-1]), 1e-300)
    return all(bool(np.all(np.maximum.accumulate(np.abs(y.coords)) <= ref + slack)) for y in orbit)


def _running_max(vals):
    out, run = [], None
    for v in vals:
        run = v if run is None else max(run, v)
        out.append(run)
    return out


def fit_log_rate(steps: list, errors: list, floor: float = 0.0) -> Optional[float]:
    """Least-squares slope of ``log(error)`` against step.

    Errors at or below ``floor`` (exact zeros, rounding noise) are dropped and
    the fit uses the final half of what remains. Returns None when fewer than
    two usable points remain.
    """
    usable = [(s, e) for s, e in zip(steps, errors) if e > floor]
    pts = [(s, math.log(e)) for s, e in usable[len(usable) // 2:]]
    if len(pts) < 2:
        return None
    xs = np.array([p[0] for p in pts], dtype=float)
    ys = np.array([p[1] for p in pts])
    slope, _ = np.polyfit(xs, ys, 1)
    return float(slope)


@dataclass
class ErgodicTrace:
    """Per-step distances to the limit (t < 1) or raw norms (t = 1).

    ``fitted_rate`` is the least-squares slope of log error per step; for
    geometric decay at ratio r it approaches ``log r``. It is a diagnostic
    only and is None for raw traces.
    """

    t: object
    N: int
    space: SpaceSpec
    steps: list
    iterate_errors: list
    mean_errors: list
    fitted_rate: Optional[float]
    raw: bool
    power_bounded: bool
    sup_iterate_norm: float

    def as_dict(self) -> dict:
        return {
            "t": self.t,
            "N": self.N,
            "raw": self.raw,
            "steps": list(self.steps),
            "iterate_errors": list(self.iterate_errors),
            "mean_errors": list(self.mean_errors),
            "fitted_rate": self.fitted_rate,
            "power_bounded": self.power_bounded,
            "sup_iterate_norm": self.sup_iterate_norm,
        }


def ergodic_report(x: Sequence, t, n_max: int, space: Optional[SpaceSpec] = None) -> ErgodicTrace:
    """Track ``C_t^n x`` and the Cesaro means for ``n = 1 .. n_max``.

    For ``t < 1`` the errors are measured against the limit projection. At
    ``t = 1`` no limit exists in general, so the trace holds raw norms and
    no rate is fitted.
    """
    space = SpaceSpec.lp(math.inf) if space is None else space
    if x.exact:
        t = to_fraction(t)
    orbit = power_orbit(x, t, n_max)
    means = running_means(orbit)
    steps = list(range(1, n_max + 1))
    raw = t == 1
    if raw:
        it = [norm(y, space) for y in orbit]
        me = [norm(y, space) for y in means]
        rate = None
    else:
        P = limit_projection(x, t)
        it = [norm(y - P, space) for y in orbit]
        me = [norm(y - P, space) for y in means]
        # below a few hundred ulps of the data the errors are rounding noise
        floor = 0.0 if x.exact else 256 * np.finfo(float).eps * max(float(norm(x, space)), float(norm(P, space)))
        rate = fit_log_rate(steps, [float(e) for e in it], floor)
    sup_norm = max(float(norm(y, space)) for y in orbit)
    return ErgodicTrace(
        t=t,
        N=len(x),
        space=space,
        steps=steps,
        iterate_errors=it,
        mean_errors=me,
        fitted_rate=rate,
        raw=raw,
        power_bounded=power_bounded_shadow(x, orbit),
        sup_iterate_norm=sup_norm,
    )
