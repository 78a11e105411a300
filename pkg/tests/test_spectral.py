import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cesaro.operators import OperatorSpec, apply, materialize
from cesaro.sequence import Mode, Sequence
from cesaro.spectral import (
    binom_identity_check,
    binomial_row,
    c1_dual_decay,
    c1_dual_eigvec,
    c1_dual_residual,
    dual_eigvec_z,
    eigen_residual,
    eigvec_x,
    kernel_dimension,
    lambda_set,
    pairing,
    verify_spectrum,
)


def test_lambda_set():
    assert lambda_set(1) == [1.0]
    assert lambda_set(3) == [1.0, 0.5, 1 / 3]
    assert lambda_set(5, Mode.EXACT) == [Fraction(1, k) for k in range(1, 6)]
    with pytest.raises(ValueError):
        lambda_set(0)


@given(st.integers(min_value=0, max_value=200))
def test_binomial_row_matches_math_comb(n):
    assert binomial_row(n) == [math.comb(n, k) for k in range(n + 1)]


def test_eigvec_examples():
    assert np.allclose(eigvec_x(0, 0.5, 4).coords, [1, 0.5, 0.25, 0.125])
    assert np.allclose(eigvec_x(1, 0.5, 5).coords, [0, 1, 1, 0.75, 0.5])
    assert np.array_equal(eigvec_x(2, 0, 5).coords, [0, 0, 1, 0, 0])
    with pytest.raises(ValueError):
        eigvec_x(4, 0.5, 4)


@given(st.integers(min_value=0, max_value=30), st.sampled_from([0.1, 0.5, 0.95, 1.0]))
def test_eigvec_coordinates_against_math_comb(m, t):
    N = m + 400
    x = eigvec_x(m, t, N).coords.real
    for k in (0, 1, 7, 99, 399):
        oracle = math.comb(m + k, k) * t**k
        assert math.isclose(x[m + k], oracle, rel_tol=1e-13) or (oracle < 1e-290)


def test_eigvec_large_binomials_do_not_overflow():
    # C(2047, 2027) overflows a float; the product with t^k does not
    x = eigvec_x(20, 0.3, 2048).coords.real
    assert np.all(np.isfinite(x))
    k = 2027
    oracle = math.exp(math.lgamma(2048) - math.lgamma(21) - math.lgamma(k + 1) + k * math.log(0.3))
    assert math.isclose(x[-1], oracle, rel_tol=1e-9)


@given(st.integers(min_value=0, max_value=20), st.sampled_from([0.0, 0.3, 0.7, 0.95]))
def test_eigen_equation_float(m, t):
    x = eigvec_x(m, t, 512)
    assert eigen_residual(x, t, 1 / (m + 1)) <= 1e-12


def test_eigen_equation_exact():
    t = Fraction(1, 2)
    for m in range(8):
        x = eigvec_x(m, t, 64, mode=Mode.EXACT)
        assert apply(OperatorSpec.cesaro(t), x) == x.scale(Fraction(1, m + 1))


def test_scale_equivariance():
    a = eigvec_x(3, 0.4, 40, alpha=-2 + 1j).coords
    b = eigvec_x(3, 0.4, 40).coords
    assert np.allclose(a, (-2 + 1j) * b, rtol=1e-15, atol=0)
    ea = eigvec_x(3, Fraction(2, 5), 20, alpha=Fraction(-7, 3), mode=Mode.EXACT)
    eb = eigvec_x(3, Fraction(2, 5), 20, mode=Mode.EXACT)
    assert ea == eb.scale(Fraction(-7, 3))


def test_dual_eigvec_examples():
    assert np.array_equal(dual_eigvec_z(0, 0.5).coords, [1])
    assert np.allclose(dual_eigvec_z(1, 0.5).coords, [-0.5, 1])
    assert np.allclose(dual_eigvec_z(2, 0.5).coords, [0.25, -1, 1])
    with pytest.raises(ValueError):
        dual_eigvec_z(2, 1.0)


def test_dual_eigen_equation_exact():
    t = Fraction(1, 2)
    for n in range(11):
        for N in (n + 1, n + 5):
            z = dual_eigvec_z(n, t, N, Mode.EXACT)
            assert apply(OperatorSpec.dual(t), z) == z.scale(Fraction(1, n + 1))


def test_biorthogonality_exact():
    t = Fraction(1, 3)
    N = 14
    for m in range(7):
        x = eigvec_x(m, t, N, mode=Mode.EXACT)
        for n in range(7):
            val = pairing(dual_eigvec_z(n, t, N, Mode.EXACT), x)
            if m == n:
                assert val == 1
            else:
                assert val == 0


def test_c1_dual_examples():
    assert c1_dual_eigvec(1, 6, Mode.EXACT) == Sequence.basis(0, 6, Mode.EXACT)
    two = c1_dual_eigvec(2, 5, Mode.EXACT)
    assert two.coords == (1, Fraction(1, 2), Fraction(3, 8), Fraction(5, 16), Fraction(35, 128))
    e0 = Sequence.basis(0, 6)
    assert np.allclose(apply(OperatorSpec.dual(1), e0).coords, e0.coords)
    with pytest.raises(ValueError):
        c1_dual_eigvec(0, 5)


def test_c1_dual_product_formula_against_direct_product():
    z = 1.5 - 0.5j
    x = c1_dual_eigvec(z, 50).coords
    for i in (1, 10, 49):
        direct = np.prod([1 - 1 / (z * (h + 1)) for h in range(i)])
        assert abs(x[i] - direct) <= 1e-14 * abs(direct)


def test_c1_dual_residual_with_tail_estimate():
    x = c1_dual_eigvec(2, 100_000)
    assert c1_dual_residual(x, 2, upto=50_000) <= 1e-6
    # without the tail the truncation error dominates
    assert c1_dual_residual(x, 2, upto=50_000, tail=False) > 1e-4


def test_c1_dual_decay_diagnostic():
    inside = c1_dual_decay(c1_dual_eigvec(1.2, 20_000), 2.0, 1.2)
    assert inside["in_open_disk"]
    assert inside["fitted_exponent"] == pytest.approx(1 / 1.2, rel=1e-3)
    assert inside["verdict"] == "consistent with membership"
    edge = c1_dual_decay(c1_dual_eigvec(2, 20_000), 2.0, 2)
    assert not edge["in_open_disk"]
    assert edge["verdict"] == "inconclusive"


def test_binomial_identity():
    assert binom_identity_check(0)
    assert math.comb(3, 2) - math.comb(3, 3) == math.comb(2, 1)
    assert all(binom_identity_check(n) for n in range(31))


def test_verify_spectrum_float():
    rep = verify_spectrum(0, 100)
    assert rep.max_residual == 0
    rep = verify_spectrum(0.95, 2048, cap=21)
    assert rep.max_residual <= 1e-12
    assert rep.diagonal_matches
    assert rep.eigenvalues[-1] == 0
    assert all(b < a for a, b in zip(rep.eigenvalues, rep.eigenvalues[1:]))
    assert rep.label == "d1"


def test_verify_spectrum_exact():
    rep = verify_spectrum(Fraction(1, 2), 64, Mode.EXACT)
    assert rep.max_residual == 0
    assert all(r == 0 for r in rep.residuals)
    assert rep.diagonal_matches
    assert rep.cap == 32


def test_verify_spectrum_at_one_is_omega_only():
    rep = verify_spectrum(1, 64, cap=8)
    assert rep.label == "omega-only"
    assert rep.max_residual <= 1e-12


@pytest.mark.parametrize("t", [0.3, 0.7])
def test_kernel_dimension_is_one(t):
    for m in range(11):
        assert kernel_dimension(t, m, 128) == 1


def test_kernel_dimension_exact_and_null_vector():
    t = Fraction(1, 2)
    for m in range(4):
        assert kernel_dimension(t, m, 16, Mode.EXACT) == 1
        # the eigenvector spans the kernel of the truncated matrix
        M = np.array(materialize(float(t), 16)) - np.eye(16) / (m + 1)
        assert np.allclose(M @ eigvec_x(m, 0.5, 16).coords.real, 0, atol=1e-14)
