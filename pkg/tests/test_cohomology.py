import numpy as np
import pytest
from hypothesis import given

from analysis import cohomology
from analysis.circle_fourier import GridFunction, constant, derivative, from_function, grid_points, random_band_limited
from analysis.errors import NotACocycle, NotSkew
from analysis.cohomology import TwoCochain
from conftest import band_limited, coefficient_vectors

N = 64


@pytest.fixture
def trig():
    x = grid_points(N)
    return GridFunction(np.cos(x)), GridFunction(np.sin(x))


def test_coboundary_of_constant(trig):
    """dm for m = c: gamma(cos, sin) = 2 pi c"""
    cos, sin = trig
    gamma = cohomology.coboundary_1(constant(1.5, N))
    assert gamma(cos, sin) == pytest.approx(2 * np.pi * 1.5, rel=1e-13)
    assert gamma(sin, cos) == pytest.approx(-2 * np.pi * 1.5, rel=1e-13)


def test_coboundary_applied_to_one():
    """(dm)(1) = m_x"""
    m = random_band_limited(N, 5) + 0.2
    gamma = cohomology.coboundary_1(m)
    np.testing.assert_allclose(gamma.apply(constant(1.0, N)).samples, derivative(m).samples, atol=1e-12)


def test_coboundary_of_zero_is_zero(trig):
    cos, sin = trig
    assert cohomology.coboundary_1(constant(0.0, N))(cos, sin) == 0.0


@given(coefficient_vectors)
def test_coboundary_is_a_cocycle(coeffs):
    """d(dm) = 0"""
    m = band_limited(coeffs, n=N, mean=0.3)
    assert cohomology.cocycle_residual_2(cohomology.coboundary_1(m)) <= 1e-9


def test_virasoro_values(trig):
    cos, sin = trig
    assert cohomology.virasoro(sin, cos) == pytest.approx(-2 * np.pi, rel=1e-13)
    assert cohomology.virasoro(cos, sin) == pytest.approx(2 * np.pi, rel=1e-13)
    u = random_band_limited(N, 3)
    assert abs(cohomology.virasoro(u, u)) <= 1e-10
    x = grid_points(N)
    assert abs(cohomology.virasoro(cos, GridFunction(np.sin(2 * x)))) <= 1e-12


def test_virasoro_cochain_is_a_cocycle():
    """K = D^3 satisfies the cocycle condition and pairs as -vir / 2"""
    gamma = TwoCochain.virasoro(N)
    assert cohomology.cocycle_residual_2(gamma) <= 1e-9
    u, v = random_band_limited(N, 1), random_band_limited(N, 2)
    assert gamma(u, v) == pytest.approx(-0.5 * cohomology.virasoro(u, v), rel=1e-10)
    assert gamma(u, v) == pytest.approx(-gamma(v, u), rel=1e-10)


def test_higher_order_cochains_are_not_cocycles():
    x = grid_points(N)
    fifth = TwoCochain.from_operator([0.0, 0.0, 0.0, 0.0, 0.0, 1.0], N)
    assert fifth.order == 5
    assert cohomology.cocycle_residual_2(fifth) >= 1e-2
    variable = TwoCochain.from_operator([0.0, 0.0, 0.0, GridFunction(1.0 + 0.5 * np.sin(x))], N)
    assert cohomology.cocycle_residual_2(variable) >= 1e-2
    with pytest.raises(NotACocycle):
        cohomology.classify_cocycle(fifth)


def test_symmetric_operator_is_not_a_cochain():
    with pytest.raises(NotSkew):
        TwoCochain.from_operator([0.0, 0.0, 1.0], N)


def test_cochains_are_antisymmetrized():
    """Building from a non-skew K keeps (K - K*)/2"""
    x = grid_points(N)
    a = GridFunction(1.0 + 0.5 * np.cos(x))
    gamma = TwoCochain.from_operator([0.0, a], N)
    u, v = random_band_limited(N, 8), random_band_limited(N, 9)
    assert gamma(u, v) == pytest.approx(-gamma(v, u), abs=1e-10)
    assert gamma.adjoint()(u, v) == pytest.approx(gamma(v, u), abs=1e-10)


def test_commutator_decomposition():
    x = grid_points(N)
    u = GridFunction(np.cos(x))
    W, c = cohomology.decompose_commutators(u)
    np.testing.assert_allclose(W.samples, np.sin(x), atol=1e-13)
    assert c == pytest.approx(0.0, abs=1e-15)

    u = GridFunction(2.0 + np.sin(3 * x))
    W, c = cohomology.decompose_commutators(u)
    np.testing.assert_allclose(W.samples, -np.cos(3 * x) / 3.0, atol=1e-13)
    assert c == pytest.approx(2.0)
    assert cohomology.commutator_certificate(u, W, c) <= 1e-10

    W, c = cohomology.decompose_commutators(constant(1.0, N))
    assert W.max_abs() <= 1e-15 and c == pytest.approx(1.0)


@pytest.mark.parametrize("lam", [0.0, 1.0, 5.0, -2.5])
def test_classify_recovers_lambda_and_m(lam):
    """lambda D^3 + d cos x classifies as (lambda, cos x)"""
    m = from_function(np.cos, N)
    gamma = TwoCochain.virasoro(N, lam) + cohomology.coboundary_1(m)
    fit_lam, fit_m, residual = cohomology.classify_cocycle(gamma)
    assert fit_lam == pytest.approx(lam, abs=1e-8)
    assert (fit_m - m).max_abs() <= 1e-8
    assert residual <= 1e-8


def test_lambda_is_invariant_under_coboundaries():
    gamma = TwoCochain.virasoro(N, 3.0) + cohomology.coboundary_1(random_band_limited(N, 2, modes=4) + 0.7)
    lam_1, m_1, _ = cohomology.classify_cocycle(gamma)
    shifted = gamma + cohomology.coboundary_1(random_band_limited(N, 3, modes=4) - 0.4)
    lam_2, m_2, _ = cohomology.classify_cocycle(shifted)
    assert lam_1 == pytest.approx(3.0, abs=1e-8)
    assert lam_2 == pytest.approx(lam_1, abs=1e-8)
    assert m_1.mean() == pytest.approx(0.7, abs=1e-8)
    assert m_2.mean() == pytest.approx(0.3, abs=1e-8)


def test_first_cohomology_is_trivial():
    witness = cohomology.first_cohomology_witness(modes=6)
    assert witness['dimension'] == 0
    assert witness['smallest_singular_value'] > 1e-6


def test_coefficient_defects():
    m = random_band_limited(N, 4, modes=4) + 0.5
    good = TwoCochain.virasoro(N, 2.0) + cohomology.coboundary_1(m)
    defects = cohomology.cocycle_coefficient_defects(good)
    assert max(defects.values()) <= 1e-10
    fifth = TwoCochain.from_operator([0.0, 0.0, 0.0, 0.0, 0.0, 1.0], N)
    assert cohomology.cocycle_coefficient_defects(fifth)['beyond_third_order'] == pytest.approx(1.0)


def test_cochain_algebra_and_serialization():
    m = random_band_limited(N, 6, modes=4)
    gamma = TwoCochain.virasoro(N, 2.0) + cohomology.coboundary_1(m)
    assert gamma.order == 3
    assert gamma.coefficient(3).samples[0] == pytest.approx(2.0)
    assert gamma.coefficient(7).max_abs() == 0.0
    difference = gamma - gamma
    u, v = random_band_limited(N, 1), random_band_limited(N, 2)
    assert abs(difference(u, v)) <= 1e-12
    restored = TwoCochain.from_dict(gamma.to_dict())
    assert restored(u, v) == pytest.approx(gamma(u, v), abs=1e-10)
    assert TwoCochain.zero(N)(u, v) == 0.0
