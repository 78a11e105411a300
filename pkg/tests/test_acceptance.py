"""Acceptance criteria, each at its stated tolerance.

Every test records one ``PASS``/``FAIL`` line; the lines are printed as a
block at the end of the pytest run and by ``python tests/test_acceptance.py``.
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from cesaro.bounds import Verdict, bound_suite, hardy_estimate, l1_opnorm, shift_dp_report
from cesaro.cli import main
from cesaro.ergodic import ergodic_report, power_bounded_shadow, power_orbit
from cesaro.operators import (
    OperatorSpec,
    apply,
    apply_inverse_Ct,
    apply_resolvent,
    resolvent_residual,
)
from cesaro.sequence import Mode, Sequence
from cesaro.spectral import (
    binom_identity_check,
    dual_eigvec_z,
    eigen_residual,
    eigvec_x,
    kernel_dimension,
)

RESULTS = {}


def record(number, title, ok, detail):
    RESULTS[number] = f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {detail}"
    print(RESULTS[number])
    assert ok, RESULTS[number]


def rel_sup(a, b):
    return float(np.max(np.abs(a - b))) / float(np.max(np.abs(b)))


def test_01_eigen_equation():
    worst = 0.0
    for t in (0.0, 0.3, 0.7, 0.95):
        for m in range(21):
            worst = max(worst, eigen_residual(eigvec_x(m, t, 2048), t, 1 / (m + 1)))
    exact = [eigen_residual(eigvec_x(m, Fraction(1, 2), 256, mode=Mode.EXACT), Fraction(1, 2), Fraction(1, m + 1))
             for m in range(21)]
    ok = worst <= 1e-12 and all(r == 0 for r in exact)
    record(1, "eigen-equation", ok, f"float max residual {worst:.3g} (<= 1e-12), exact residuals all zero: {all(r == 0 for r in exact)}")


def displayed_terms(y, t, nu, n):
    d = lambda j: 1.0 / j - nu
    out = y[n] / d(n + 1)
    if n >= 1:
        out -= t * y[n - 1] / ((n + 1) * d(n + 1) * d(n))
    if n >= 2:
        out += nu * t**2 * y[n - 2] / ((n + 1) * d(n + 1) * d(n) * d(n - 1))
    if n >= 3:
        out -= nu**2 * t**3 * y[n - 3] / ((n + 1) * d(n + 1) * d(n) * d(n - 1) * d(n - 2))
    return out


def test_02_inverse_and_resolvent_roundtrips():
    rng = np.random.default_rng(2024)
    ys = [rng.uniform(-1, 1, 1024) for _ in range(100)]
    inv = res = shown = general = 0.0
    for y in ys:
        seq = Sequence(y)
        for t in (0.0, 0.5, 0.9, 1.0):
            back = apply(OperatorSpec.cesaro(t), apply_inverse_Ct(seq, t)).coords
            inv = max(inv, rel_sup(back, y))
        for t in (0.0, 0.5, 0.9):
            for nu in (2.0, -1.0, 0.4 + 0.3j):
                x = apply_resolvent(seq, t, nu)
                res = max(res, resolvent_residual(x, seq, t, nu))
                xc = apply_resolvent(seq, t, nu, method="closed-form").coords
                general = max(general, rel_sup(xc, x.coords))
                for n in range(4):
                    ref = displayed_terms(y, t, nu, n)
                    shown = max(shown, abs(xc[n] - ref) / max(1.0, abs(ref)), abs(x.coords[n] - ref) / max(1.0, abs(ref)))
    ok = inv <= 1e-12 and res <= 1e-10 and shown <= 1e-10 and general <= 1e-10
    record(2, "inverse/resolvent roundtrips", ok,
           f"inverse {inv:.3g} (<= 1e-12), resolvent {res:.3g} (<= 1e-10), "
           f"displayed terms {shown:.3g}, general law vs substitution {general:.3g} (<= 1e-10)")


def test_03_alternating_witness(tmp_path, capsys):
    import json

    path = tmp_path / "y.json"
    path.write_text(json.dumps(["0" if n % 2 else f"1/{n + 1}" for n in range(1024)]), encoding="utf-8")
    code = main(["inverse", "--t", "1", "--input", str(path)])
    seq = json.loads(capsys.readouterr().out)["result"]["sequence"]
    dev = max(abs(v - (-1) ** n) for n, v in enumerate(seq))
    ok = code == 0 and len(seq) == 1024 and dev <= 1e-13
    record(3, "C_1 inverse witness", ok, f"max |x_n - (-1)^n| = {dev:.3g} over N=1024 (<= 1e-13), exit {code}")


def test_04_factorization():
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(100):
        x = Sequence(rng.uniform(-1, 1, 1024))
        for t in (0.3, 0.7):
            lhs = apply(OperatorSpec.cesaro(t), x).coords
            rhs = apply(OperatorSpec.diagonal(), apply(OperatorSpec.shift_series(t), x)).coords
            worst = max(worst, rel_sup(rhs, lhs))
    xe = Sequence.of([Fraction(int(v), 101) for v in rng.integers(-100, 101, 256)], Mode.EXACT)
    exact = all(
        apply(OperatorSpec.cesaro(t), xe) == apply(OperatorSpec.diagonal(), apply(OperatorSpec.shift_series(t), xe))
        for t in (Fraction(3, 10), Fraction(7, 10))
    )
    record(4, "factorization C_t = D_phi R_t", worst <= 1e-13 and exact,
           f"float {worst:.3g} (<= 1e-13), exact equality {exact}")


def test_05_l1_norm_formula():
    d1 = abs(l1_opnorm(0.5, 64) - 2 * math.log(2))
    d2 = abs(l1_opnorm(0.9, 512) - math.log(10) / 0.9)
    record(5, "l1 norm formula", d1 <= 1e-12 and d2 <= 1e-10, f"|err| {d1:.3g} (<= 1e-12), {d2:.3g} (<= 1e-10)")


def test_06_hardy_asymptotic():
    Ns = (512, 1024, 2048, 4096)
    ests = [hardy_estimate(2, N) for N in Ns]
    monotone = all(b >= a for a, b in zip(ests, ests[1:]))
    in_band = 1.90 <= ests[-1] <= 2.0
    record(6, "Hardy asymptotic", monotone and in_band,
           f"estimates {', '.join(f'{e:.5f}' for e in ests)}; nondecreasing {monotone}; "
           f"N=4096 value in [1.90, 2.0]: {in_band}")


def test_07_bound_sweep():
    violated = []
    count = 0
    for t in (0.0, 0.3, 0.7, 0.95):
        for p in (1.5, 2.0, 4.0):
            for N in (256, 1024):
                for rep in bound_suite(t, p, N, 200, 42, hardy=False):
                    count += 1
                    if rep.verdict is Verdict.VIOLATED:
                        violated.append(f"{rep.claim}(t={t},p={p},N={N})")
    record(7, "bound sweep", not violated, f"{count} reports, violated: {violated or 'none'}")


def test_08_shift_dp_norms():
    worst = 0.0
    exceed = []
    for m in range(17):
        for p in (1.5, 2.0, 4.0):
            eq, mx = shift_dp_report(m, p, 256, 200, 42)
            worst = max(worst, abs(eq.observed - eq.bound))
            if mx.verdict is not Verdict.HOLDS:
                exceed.append((m, p))
    record(8, "shift d_p norms", worst <= 1e-12 and not exceed,
           f"max |ratio(e_0) - (m+1)^(1/p)| = {worst:.3g} (<= 1e-12), trials exceeding: {exceed or 'none'}")


def test_09_identity_and_dual_eigen_equation():
    ident = all(binom_identity_check(n) for n in range(31))
    t = Fraction(1, 2)
    dual = all(
        apply(OperatorSpec.dual(t), dual_eigvec_z(n, t, mode=Mode.EXACT))
        == dual_eigvec_z(n, t, mode=Mode.EXACT).scale(Fraction(1, n + 1))
        for n in range(11)
    )
    record(9, "binomial identity and dual eigen-equation", ident and dual,
           f"identity n<=30: {ident}; dual eigen-equation n<=10 exact: {dual}")


def test_10_ergodic_limit():
    x = Sequence.basis(0, 256)
    tr = ergodic_report(x, 0.5, 60)
    it, me = tr.iterate_errors[-1], tr.mean_errors[-1]
    tail = tr.mean_errors[-20:]
    mono = all(b <= a for a, b in zip(tail, tail[1:]))
    shadow = power_bounded_shadow(x, power_orbit(x, 0.5, 60))
    ok = it <= 1e-10 and me <= 1e-2 and mono and shadow
    record(10, "ergodic limit", ok,
           f"iterate error {it:.3g} (<= 1e-10), mean error {me:.3g} (<= 1e-2), "
           f"mean nonincreasing over last 20: {mono}, power-bounded shadow: {shadow}")


def test_11_kernel_dimension():
    dims = {(t, m): kernel_dimension(t, m, 128) for t in (0.3, 0.7) for m in range(11)}
    bad = {k: v for k, v in dims.items() if v != 1}
    record(11, "kernel dimension", not bad, f"{len(dims)} cases, dimension != 1: {bad or 'none'}")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
