"""Invariant suites for each module, run by ``cesaro verify``.

Each suite returns a list of :class:`Check` records. Sizes are fixed per
suite so a run is reproducible; only the trial count and seed of the
randomized checks are configurable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import bounds, ergodic, operators, spectral
from .operators import OperatorSpec, apply
from .sequence import (
    INF,
    LadderSpec,
    Mode,
    Sequence,
    SpaceSpec,
    ladder_norms,
    majorant,
    norm,
    ratio_beta,
)

__all__ = ["Check", "SUITES", "run_suite", "run_suites"]


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    value: object = None
    threshold: object = None

    def as_dict(self) -> dict:
        return {
            "suite": self.suite,
            "check": self.name,
            "passed": self.passed,
            "value": self.value,
            "threshold": self.threshold,
        }


def _rel_sup(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(b))), 1e-300)
    return float(np.max(np.abs(a - b))) / scale


def _random(rng, N: int) -> Sequence:
    return Sequence(rng.uniform(-1.0, 1.0, N))


def _random_exact(rng, N: int) -> Sequence:
    return Sequence.of([Fraction(int(v), 97) for v in rng.integers(-97, 98, N)], Mode.EXACT)


def core_suite(trials: int, seed: int) -> list:
    out = []
    add = lambda name, ok, value=None, thr=None: out.append(Check("core", name, bool(ok), value, thr))
    rng = np.random.default_rng(seed)

    add("majorant-example", majorant(Sequence.of([1, 3, 2, 0], Mode.EXACT)) == Sequence.of([3, 3, 2, 0], Mode.EXACT))
    add("majorant-basis", majorant(Sequence.basis(2, 4, Mode.EXACT)) == Sequence.of([1, 1, 1, 0], Mode.EXACT))

    worst_minimal = True
    worst_order = 0.0
    worst_rn = True
    for _ in range(trials):
        x = _random(rng, 64)
        xh = np.abs(majorant(x).coords)
        # any nonincreasing dominating y is >= the suffix maximum
        y = np.maximum.accumulate((np.abs(x.coords) + rng.uniform(0, 0.1, 64))[::-1])[::-1]
        worst_minimal &= bool(np.all(y >= xh))
        for p in (1.0, 1.5, 2.0, 4.0):
            worst_order = max(worst_order, norm(x, SpaceSpec.lp(p)) - norm(x, SpaceSpec.dp(p)))
        for n in (0, 10, 63):
            worst_rn &= norm(x, SpaceSpec.omega(n)) == norm(Sequence.of(x.abs(), x.mode), SpaceSpec.omega(n))
    add("majorant-minimality", worst_minimal)
    add("lp-le-dp", worst_order <= 1e-12, worst_order, 1e-12)
    add("omega-seminorm-of-abs", worst_rn)

    x = _random(rng, 64)
    mono = True
    for fam in (SpaceSpec.lp, SpaceSpec.ces, SpaceSpec.dp):
        vals = [norm(x, fam(p)) for p in (1.0, 1.25, 1.5, 2.0, 3.0, 4.0)]
        mono &= all(b <= a * (1 + 1e-12) for a, b in zip(vals, vals[1:]))
    add("norm-nonincreasing-in-p", mono)

    dev = max(abs(norm(Sequence.basis(m, 32), SpaceSpec.dp(p)) - (m + 1) ** (1 / p))
              for m in range(16) for p in (1.5, 2.0, 4.0))
    add("dp-norm-of-basis", dev <= 1e-12, dev, 1e-12)

    lad = ladder_norms(Sequence.of([1, 1]), LadderSpec(1.0, "plus", "lp", 2))
    dev = max(abs(lad[0] - 2**0.5), abs(lad[1] - 2 ** (2 / 3)))
    add("ladder-closed-form", dev <= 1e-15, dev, 1e-15)
    lad = ladder_norms(_random(rng, 64), LadderSpec(1.0, "plus", "ces", 12))
    add("plus-ladder-nondecreasing", all(b >= a * (1 - 1e-12) for a, b in zip(lad, lad[1:])))

    beta = ratio_beta(Sequence.geometric(0.7, 64), 16)
    add("ratio-beta-geometric", abs(beta - 0.7) <= 1e-12, beta, 0.7)

    xe = _random_exact(rng, 32)
    add("exact-l1-is-fraction", isinstance(norm(xe, SpaceSpec.lp(1)), Fraction))
    add("exact-sup-is-fraction", isinstance(norm(xe, SpaceSpec.lp(INF)), Fraction))
    return out


def operators_suite(trials: int, seed: int) -> list:
    out = []
    add = lambda name, ok, value=None, thr=None: out.append(Check("operators", name, bool(ok), value, thr))
    rng = np.random.default_rng(seed)
    N = 256

    # lower triangularity: a prefix of the image depends only on the prefix
    x = _random(rng, N)
    ok = True
    for op in (OperatorSpec.cesaro(0.7), OperatorSpec.diagonal(), OperatorSpec.shift(3), OperatorSpec.shift_series(0.7)):
        full = apply(op, x).coords
        for M in (1, 17, 100):
            ok &= bool(np.array_equal(apply(op, x.truncate(M)).coords, full[:M]))
    add("truncation-exactness", ok)

    fact = inv = mat = rng0 = 0.0
    M = operators.materialize(0.7, N)
    for _ in range(trials):
        x = _random(rng, N)
        for t in (0.3, 0.7):
            ct = apply(OperatorSpec.cesaro(t), x).coords
            dr = apply(OperatorSpec.diagonal(), apply(OperatorSpec.shift_series(t), x)).coords
            fact = max(fact, _rel_sup(dr, ct))
            back = operators.apply_inverse_Ct(Sequence(ct), t).coords
            inv = max(inv, _rel_sup(back, x.coords))
            rng0 = max(rng0, abs(ct[0] - x.coords[0]))
        mat = max(mat, _rel_sup(M @ x.coords, apply(OperatorSpec.cesaro(0.7), x).coords))
    add("factorization-float", fact <= 1e-13, fact, 1e-13)
    add("inverse-roundtrip", inv <= 1e-12, inv, 1e-12)
    add("range-first-coordinate", rng0 == 0.0, rng0, 0.0)
    add("matrix-agreement", mat <= 1e-13, mat, 1e-13)

    xe = _random_exact(rng, 48)
    t = Fraction(1, 2)
    lhs = apply(OperatorSpec.cesaro(t), xe)
    rhs = apply(OperatorSpec.diagonal(), apply(OperatorSpec.shift_series(t), xe))
    add("factorization-exact", lhs == rhs)

    ok = True
    Ne = 24
    for n in range(Ne - 1):
        d = Sequence.basis(n, Ne, Mode.EXACT) - Sequence.basis(n + 1, Ne, Mode.EXACT).scale(t)
        ok &= apply(OperatorSpec.cesaro(t), d) == Sequence.basis(n, Ne, Mode.EXACT).scale(Fraction(1, n + 1))
    add("basis-difference-eigenrelation", ok)

    res = cf = 0.0
    for _ in range(max(1, trials // 4)):
        y = _random(rng, N)
        for tt in (0.0, 0.5, 0.9):
            for nu in (2.0, -1.0, 0.4 + 0.3j):
                xs = operators.apply_resolvent(y, tt, nu)
                res = max(res, operators.resolvent_residual(xs, y, tt, nu))
                xc = operators.apply_resolvent(y.truncate(48), tt, nu, method="closed-form")
                cf = max(cf, _rel_sup(xc.coords, xs.coords[:48]))
    add("resolvent-residual", res <= 1e-10, res, 1e-10)
    add("resolvent-closed-form-agreement", cf <= 1e-10, cf, 1e-10)

    ye = _random_exact(rng, 24)
    xs = operators.apply_resolvent(ye, t, Fraction(3, 7))
    xc = operators.apply_resolvent(ye, t, Fraction(3, 7), method="closed-form")
    add("resolvent-exact-agreement", xs == xc and operators.resolvent_residual(xs, ye, t, Fraction(3, 7)) == 0)

    z = Sequence.of([v for v in _random_exact(rng, 20).coords] + [0] * 4, Mode.EXACT)
    add("dual-injectivity", operators.dual_preimage(apply(OperatorSpec.dual(t), z), t) == z)

    w0 = _random(rng, N).coords.copy()
    w0[0] = 0.0
    yv = Sequence(w0) - apply(OperatorSpec.cesaro(0.5), Sequence(w0))
    back = operators.solve_I_minus_Ct(yv, 0.5).coords
    dev = _rel_sup(back, w0)
    add("range-solver-roundtrip", dev <= 1e-10, dev, 1e-10)

    y = Sequence.of([Fraction((1 + (-1) ** n) // 2, n + 1) for n in range(1024)], Mode.EXACT)
    x = operators.apply_inverse_Ct(y, 1)
    add("c1-alternating-witness", x == Sequence.of([(-1) ** n for n in range(1024)], Mode.EXACT))
    return out


def spectral_suite(trials: int, seed: int) -> list:
    out = []
    add = lambda name, ok, value=None, thr=None: out.append(Check("spectral", name, bool(ok), value, thr))

    for t in (0.0, 0.3, 0.7, 0.95):
        rep = spectral.verify_spectrum(t, 2048, cap=21)
        add(f"eigen-residual-t={t}", rep.max_residual <= 1e-12 and rep.diagonal_matches, rep.max_residual, 1e-12)
    rep = spectral.verify_spectrum(Fraction(1, 2), 64, Mode.EXACT, cap=21)
    add("eigen-residual-exact", rep.max_residual == 0 and rep.diagonal_matches, rep.max_residual, 0)

    dims = [spectral.kernel_dimension(t, m, 64) for t in (0.3, 0.7) for m in range(6)]
    add("kernel-dimension-one", all(d == 1 for d in dims), max(dims), 1)

    t = Fraction(1, 2)
    N = 16
    ok = True
    for m in range(8):
        x = spectral.eigvec_x(m, t, N, mode=Mode.EXACT)
        for n in range(8):
            val = spectral.pairing(spectral.dual_eigvec_z(n, t, N, Mode.EXACT), x)
            ok &= (val == 0) if m != n else (val != 0)
    add("biorthogonality-exact", ok)

    ok = True
    for n in range(11):
        z = spectral.dual_eigvec_z(n, t, 16, Mode.EXACT)
        ok &= apply(OperatorSpec.dual(t), z) == z.scale(Fraction(1, n + 1))
    add("dual-eigen-equation-exact", ok)

    add("binomial-identity", all(spectral.binom_identity_check(n) for n in range(31)), 30, None)

    x = spectral.c1_dual_eigvec(2, 100_000)
    r = spectral.c1_dual_residual(x, 2, upto=50_000)
    add("c1-dual-residual", r <= 1e-6, r, 1e-6)

    a = spectral.eigvec_x(3, 0.6, 64, alpha=2 - 1j).coords
    b = spectral.eigvec_x(3, 0.6, 64).coords
    add("scale-equivariance", np.allclose(a, (2 - 1j) * b, rtol=1e-15, atol=0))
    return out


def ergodic_suite(trials: int, seed: int) -> list:
    out = []
    add = lambda name, ok, value=None, thr=None: out.append(Check("ergodic", name, bool(ok), value, thr))
    rng = np.random.default_rng(seed)

    tr = ergodic.ergodic_report(Sequence.basis(0, 256), 0.5, 60)
    add("iterate-limit", tr.iterate_errors[-1] <= 1e-10, tr.iterate_errors[-1], 1e-10)
    add("mean-limit", tr.mean_errors[-1] <= 1e-2, tr.mean_errors[-1], 1e-2)
    tail = tr.mean_errors[-20:]
    add("mean-error-nonincreasing", all(b <= a for a, b in zip(tail, tail[1:])))
    add("power-bounded-shadow", tr.power_bounded)
    add("fitted-rate-near-log-half", tr.fitted_rate is not None and abs(tr.fitted_rate - math.log(0.5)) <= 0.1,
        tr.fitted_rate, math.log(0.5))

    ok = True
    for _ in range(max(1, trials // 10)):
        x = _random(rng, 128)
        for t in (0.0, 0.3, 0.9):
            ok &= ergodic.power_bounded_shadow(x, ergodic.power_orbit(x, t, 20))
    add("power-bounded-random", ok)

    xe = _random_exact(rng, 16)
    orbit = ergodic.power_orbit(xe, Fraction(1, 3), 8)
    means = ergodic.running_means(orbit)
    ok = True
    for n in range(2, 9):
        lhs = orbit[n - 1].scale(Fraction(1, n))
        rhs = means[n - 1] - means[n - 2].scale(Fraction(n - 1, n))
        ok &= lhs == rhs
    add("mean-power-identity-exact", ok)

    P = ergodic.limit_projection(xe, Fraction(1, 3))
    add("projection-idempotent", ergodic.limit_projection(P, Fraction(1, 3)) == P and P.coords[0] == xe.coords[0])
    return out


def bounds_suite(trials: int, seed: int) -> list:
    out = []
    add = lambda name, ok, value=None, thr=None: out.append(Check("bounds", name, bool(ok), value, thr))

    d1 = abs(bounds.l1_opnorm(0.5, 64) - 2 * math.log(2))
    d2 = abs(bounds.l1_opnorm(0.9, 512) - math.log(10) / 0.9)
    add("l1-formula-t=0.5", d1 <= 1e-12, d1, 1e-12)
    add("l1-formula-t=0.9", d2 <= 1e-10, d2, 1e-10)

    # the estimator and the dense column sum add the same terms in a different order
    est = bounds.opnorm_estimate(OperatorSpec.cesaro(0.5), SpaceSpec.lp(1), 64, max(trials, 1), seed)
    col = bounds.l1_opnorm(0.5, 64)
    add("l1-extremality", abs(est - col) <= 4 * np.finfo(float).eps * col, est, col)

    violated = []
    for t in (0.0, 0.3, 0.7, 0.95):
        for p in (1.5, 2.0, 4.0):
            for rep in bounds.bound_suite(t, p, 256, max(trials, 1), seed, hardy=False):
                if rep.verdict is bounds.Verdict.VIOLATED:
                    violated.append(f"{rep.claim}@t={t},p={p}")
    add("bound-sweep-no-violations", not violated, len(violated), 0)

    worst = 0.0
    ok = True
    for m in range(17):
        for p in (1.5, 2.0, 4.0):
            eq, mx = bounds.shift_dp_report(m, p, 64, max(trials, 1), seed)
            worst = max(worst, abs(eq.observed - eq.bound))
            ok &= eq.verdict is bounds.Verdict.HOLDS and mx.verdict is bounds.Verdict.HOLDS
    add("shift-dp-norms", ok, worst, 1e-12)

    ests = [bounds.hardy_estimate(2, N) for N in (128, 256, 512)]
    add("hardy-nondecreasing", all(b >= a for a, b in zip(ests, ests[1:])) and ests[-1] <= 2 + 1e-9, ests[-1], 2.0)
    return out


SUITES: dict = {
    "core": core_suite,
    "operators": operators_suite,
    "spectral": spectral_suite,
    "ergodic": ergodic_suite,
    "bounds": bounds_suite,
}


def run_suite(name: str, trials: int = 20, seed: int = 42) -> list:
    fn: Callable = SUITES[name]
    return fn(trials, seed)


def run_suites(name: str = "all", trials: int = 20, seed: int = 42) -> list:
    names = list(SUITES) if name == "all" else [name]
    checks = []
    for n in names:
        checks.extend(run_suite(n, trials, seed))
    return checks
