import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cesaro.ergodic import (
    cesaro_means,
    ergodic_report,
    fit_log_rate,
    limit_projection,
    power_bounded_shadow,
    power_orbit,
    running_means,
)
from cesaro.operators import OperatorSpec, apply, materialize
from cesaro.sequence import Mode, Sequence, SpaceSpec

vectors = st.lists(st.floats(min_value=-10, max_value=10, allow_nan=False), min_size=1, max_size=50)


def test_orbit_examples():
    e0 = Sequence.basis(0, 5)
    assert all(np.array_equal(y.coords, e0.coords) for y in power_orbit(e0, 0, 4))
    e1 = Sequence.basis(1, 5)
    for n, y in enumerate(power_orbit(e1, 0, 6), start=1):
        assert np.array_equal(y.coords, e1.coords / 2**n)
    with pytest.raises(ValueError):
        power_orbit(e0, 0.5, 0)


def test_orbit_matches_dense_matrix_power():
    x = np.random.default_rng(1).uniform(-1, 1, 40)
    orbit = power_orbit(Sequence(x), 0.6, 12)
    M = np.linalg.matrix_power(materialize(0.6, 40), 12)
    assert np.allclose(orbit[-1].coords, M @ x, rtol=1e-12, atol=1e-14)


def test_mean_examples():
    x = Sequence.of([3.0, 1.0, -2.0])
    assert np.array_equal(cesaro_means(x, 0.4, 1).coords, apply(OperatorSpec.cesaro(0.4), x).coords)
    e1 = Sequence.basis(1, 3, Mode.EXACT)
    assert cesaro_means(e1, 0, 2) == e1.scale(Fraction(3, 8))


def test_mean_power_identity_exact():
    t = Fraction(2, 5)
    x = Sequence.of([Fraction(k - 3, k + 2) for k in range(12)], Mode.EXACT)
    orbit = power_orbit(x, t, 10)
    means = running_means(orbit)
    for n in range(2, 11):
        assert orbit[n - 1].scale(Fraction(1, n)) == means[n - 1] - means[n - 2].scale(Fraction(n - 1, n))


def test_projection_examples():
    assert np.allclose(limit_projection(Sequence.of([3, 7, -2]), 0.5).coords, [3, 1.5, 0.75])
    assert np.array_equal(limit_projection(Sequence.of([0, 7, -2]), 0.5).coords, [0, 0, 0])
    geo = Sequence.geometric(Fraction(1, 3), 6, Mode.EXACT)
    assert limit_projection(geo, Fraction(1, 3)) == geo
    with pytest.raises(ValueError):
        limit_projection(geo, 1)


def test_projection_against_iteration():
    # the iteration is the oracle for the closed form
    x = Sequence.of([3, 7, -2])
    assert np.allclose(power_orbit(x, 0.5, 60)[-1].coords, limit_projection(x, 0.5).coords, atol=1e-12)


@given(vectors, st.sampled_from([0.0, 0.25, 0.5, 0.9]))
def test_projection_idempotent(v, t):
    x = Sequence.of(v)
    P = limit_projection(x, t)
    assert np.array_equal(limit_projection(P, t).coords, P.coords)
    assert P.coords[0] == x.coords[0]


@settings(max_examples=40)
@given(vectors, st.sampled_from([0.0, 0.3, 0.7, 0.95]))
def test_power_bounded_shadow_on_random_orbits(v, t):
    x = Sequence.of(v)
    assert power_bounded_shadow(x, power_orbit(x, t, 15))


def test_fit_log_rate():
    steps = list(range(1, 41))
    errs = [5 * 0.3**n for n in steps]
    assert fit_log_rate(steps, errs) == pytest.approx(math.log(0.3), rel=1e-10)
    assert fit_log_rate([1, 2], [0.0, 0.0]) is None
    # points at or under the floor are ignored
    noisy = errs[:20] + [1e-30] * 20
    assert fit_log_rate(steps, noisy, floor=1e-25) == pytest.approx(math.log(0.3), rel=1e-10)


def test_report_limit_law():
    tr = ergodic_report(Sequence.basis(0, 256), 0.5, 60)
    assert len(tr.steps) == len(tr.iterate_errors) == len(tr.mean_errors) == 60
    assert all(e >= 0 for e in tr.iterate_errors + tr.mean_errors)
    assert tr.iterate_errors[-1] <= 1e-10
    assert tr.mean_errors[-1] <= 1e-2
    assert tr.power_bounded
    # diagnostic: subdominant eigenvalue 1/2
    assert abs(tr.fitted_rate - math.log(0.5)) <= 0.1


def test_report_diagonal_case_exact():
    tr = ergodic_report(Sequence.basis(1, 6, Mode.EXACT), 0, 10)
    assert tr.iterate_errors == [Fraction(1, 2**n) for n in range(1, 11)]


def test_report_at_one_is_raw():
    tr = ergodic_report(Sequence.basis(0, 4096), 1, 5)
    assert tr.raw and tr.fitted_rate is None
    assert tr.iterate_errors == [1.0] * 5
    tr2 = ergodic_report(Sequence.basis(0, 64), 1, 3, SpaceSpec.lp(2))
    assert tr2.iterate_errors[0] == pytest.approx(math.sqrt(sum(1 / k**2 for k in range(1, 65))))
