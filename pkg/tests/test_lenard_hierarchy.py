import numpy as np
import pytest

from analysis import lenard_hierarchy
from analysis.circle_fourier import dealiased_product, random_band_limited
from analysis.errors import IndexOutOfRange, LadderBreak, SingularSymbol, UnsupportedLevel
from analysis.functionals import fd_gradient, gradient_symmetry_residual
from analysis.lie_ops import InertiaOperator, relative_difference
from analysis.verification import long_wave_state
from config.presets import NOT_GRADIENT_TOL


def test_burgers_coefficients():
    """c_0..c_3 = 1, 1/2, 1/2, 5/8"""
    got = [lenard_hierarchy.burgers_coefficient(k) for k in range(4)]
    assert got == pytest.approx([1.0, 0.5, 0.5, 0.625])


def test_burgers_hamiltonians_match_closed_form(burgers):
    """H_k = c_{k-1} int m^k for k = 1..5 at seed 42"""
    m = random_band_limited(128, 42)
    result = lenard_hierarchy.generate(burgers, m, depth=5)
    assert result.depth == 5 and result.complete
    for lvl in result.levels:
        reference = lenard_hierarchy.burgers_closed_form(lvl.k - 1, m)
        error = lenard_hierarchy.oracle_error(lvl.H_value, reference)
        assert error <= 1e-9, f"H_{lvl.k}: {lvl.H_value} vs {reference}"


def test_burgers_gradients_are_powers(burgers, base_point):
    """G_3 = (3/2) m^2 for A = I"""
    result = lenard_hierarchy.generate(burgers, base_point, depth=3)
    expected = 1.5 * dealiased_product(base_point.samples, base_point.samples)
    np.testing.assert_allclose(result.level(3).G.samples, expected, atol=1e-11)
    np.testing.assert_allclose(result.level(1).G.samples, 1.0)


def test_camassa_holm_hamiltonians_match_explicit_forms(camassa_holm, base_point):
    result = lenard_hierarchy.generate(camassa_holm, base_point, depth=5)
    for k in (1, 2, 3):
        error = lenard_hierarchy.oracle_error(result.level(k).H_value, lenard_hierarchy.ch_explicit(k, base_point))
        assert error <= 1e-9, f"H_{k}"


def test_second_gradient_is_velocity(camassa_holm, base_point):
    """G_2 = A^{-1} m"""
    result = lenard_hierarchy.generate(camassa_holm, base_point, depth=2)
    np.testing.assert_allclose(result.level(2).G.samples, camassa_holm.invert_array(base_point.samples), atol=1e-12)


@pytest.mark.parametrize("coeffs", [(1.0,), (1.0, -1.0), (2.0, -1.0), (1.0, 0.5)])
def test_lenard_relation_holds(coeffs, base_point):
    """P_m G_k = Q G_{k+1} for k < K"""
    result = lenard_hierarchy.generate(InertiaOperator(coeffs), base_point, depth=5)
    for k in range(1, 5):
        assert lenard_hierarchy.lenard_residual(result, k) <= 1e-9


@pytest.mark.parametrize("a, b", [(1.0, -1.0), (2.0, -1.0), (1.0, 0.5)])
def test_third_hamiltonian_closed_form(a, b, base_point):
    A = InertiaOperator.from_ab(a, b)
    result = lenard_hierarchy.generate(A, base_point, depth=3)
    error = lenard_hierarchy.oracle_error(result.level(3).H_value, lenard_hierarchy.closed_form_h3(A, base_point))
    assert error <= 1e-9
    assert lenard_hierarchy.bihamiltonian_residual(A, base_point) <= 1e-9


def test_involution_matrices(camassa_holm, base_point):
    result = lenard_hierarchy.generate(camassa_holm, base_point, depth=4)
    for structure in ('lie_poisson', 'cocycle'):
        table = lenard_hierarchy.involution_matrix(result, structure)
        assert list(table.columns) == ['H_1', 'H_2', 'H_3', 'H_4']
        assert np.all(np.diag(table.values) == 0.0)
        assert np.max(np.abs(table.values)) <= 1e-8, structure
    with pytest.raises(ValueError):
        lenard_hierarchy.involution_matrix(result, 'symplectic')


def test_hamiltonian_gradients_match_finite_differences(camassa_holm):
    m = random_band_limited(64, 3, modes=4, amplitude=0.5) + 0.5
    for k in range(1, 5):
        H = lenard_hierarchy.hierarchy_functional(camassa_holm, k, quad_points=max(k, 2))
        assert relative_difference(fd_gradient(H, m), H.grad(m)) <= 1e-5, f"H_{k}"


@pytest.mark.parametrize("seed", [1, 2, 3, 7, 42])
def test_order_four_ladder_is_not_a_gradient(seed):
    """For A = I + D^4 the field G_3 has a non-symmetric derivative at every seed"""
    m = long_wave_state(64, seed + 2)
    field = lenard_hierarchy.gradient_field(InertiaOperator((1.0, 0.0, 1.0)), 3)
    assert gradient_symmetry_residual(field, m, seed=seed) >= 10 * NOT_GRADIENT_TOL
    ch_field = lenard_hierarchy.gradient_field(InertiaOperator((1.0, -1.0)), 3)
    assert gradient_symmetry_residual(ch_field, m, seed=seed) <= NOT_GRADIENT_TOL


def test_level_access_and_unsupported_forms(camassa_holm, base_point):
    result = lenard_hierarchy.generate(camassa_holm, base_point, depth=5)
    with pytest.raises(IndexOutOfRange):
        result.level(6)
    with pytest.raises(IndexOutOfRange):
        lenard_hierarchy.lenard_residual(result, 5)
    with pytest.raises(UnsupportedLevel):
        lenard_hierarchy.ch_explicit(4, base_point)
    with pytest.raises(UnsupportedLevel):
        lenard_hierarchy.closed_form_h3(InertiaOperator.sobolev(2), base_point)


def test_invalid_requests(base_point):
    with pytest.raises(ValueError):
        lenard_hierarchy.generate(InertiaOperator.identity(), base_point, depth=0)
    with pytest.raises(SingularSymbol):
        lenard_hierarchy.generate(InertiaOperator.from_ab(1.0, 1.0), base_point, depth=3)


def test_ladder_break_carries_partial_result(camassa_holm, base_point):
    """A negative tolerance forces the break at the first level"""
    with pytest.raises(LadderBreak) as info:
        lenard_hierarchy.generate(camassa_holm, base_point, depth=3, tol_mean=-1.0)
    assert info.value.k == 1
    assert info.value.partial is not None and info.value.partial.depth == 0
    assert not info.value.partial.complete


def test_result_frame_and_json(camassa_holm, base_point):
    result = lenard_hierarchy.generate(camassa_holm, base_point, depth=3)
    frame = result.to_frame()
    assert list(frame.index) == [1, 2, 3]
    assert np.isnan(frame.loc[3, 'lenard_residual'])
    data = result.to_json(sample_stride=4)
    assert data['depth'] == 3 and data['complete'] is True
    assert len(data['levels'][0]['G']) == 32
    assert data['levels'][2]['lenard_residual'] is None


def test_hamiltonian_values_on_a_batch(camassa_holm):
    states = np.stack([random_band_limited(64, s, modes=4).samples for s in range(3)])
    values = lenard_hierarchy.hamiltonian_values(camassa_holm, states, 3, quad_points=3)
    assert values.shape == (3, 3)
    for i in range(3):
        m = random_band_limited(64, i, modes=4)
        assert values[i, 1] == pytest.approx(lenard_hierarchy.ch_explicit(2, m), rel=1e-12)


@pytest.mark.parametrize("lam", [2.0, -0.5])
def test_burgers_hamiltonians_scale_homogeneously(burgers, lam):
    """H_k(lam m) = lam^k H_k(m) for A = I"""
    m = random_band_limited(128, 42) + 0.3
    base = lenard_hierarchy.generate(burgers, m, depth=5)
    scaled = lenard_hierarchy.generate(burgers, m * lam, depth=5)
    for k in range(1, 6):
        expected = lam ** k * base.level(k).H_value
        assert lenard_hierarchy.oracle_error(scaled.level(k).H_value, expected) <= 1e-8, f"H_{k}"
