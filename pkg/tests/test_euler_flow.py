import math

import numpy as np
import pandas as pd
import pytest

from analysis.circle_fourier import GridFunction, constant, dealiased_product, derivative, from_function, random_band_limited
from analysis.errors import BlowUp
from analysis.euler_flow import (
    FlowState,
    cfl_dt,
    evolve,
    initial_energy,
    reverse_evolve,
    rhs,
    step_rk4,
)
from analysis.lie_ops import InertiaOperator


def _ch_state(amplitude, n=64):
    return FlowState.from_velocity(InertiaOperator((1.0, -1.0)), from_function(lambda x: amplitude * np.cos(x), n))


def test_rhs_for_identity_is_burgers():
    """A = I: X_A(m) = 3 m m_x"""
    m = random_band_limited(64, 1)
    expected = 3.0 * dealiased_product(m.samples, derivative(m).samples)
    np.testing.assert_allclose(rhs(FlowState(0.0, m, InertiaOperator.identity())).samples, expected, atol=1e-12)


def test_rhs_camassa_holm_trig_oracle():
    """u = cos x, m = 2 cos x: 2 m u_x + m_x u = -6 sin x cos x"""
    state = _ch_state(1.0, n=32)
    np.testing.assert_allclose(rhs(state).samples, -6.0 * np.sin(state.m.x) * np.cos(state.m.x), atol=1e-12)
    np.testing.assert_allclose(state.velocity.samples, np.cos(state.m.x), atol=1e-14)


def test_constant_state_is_steady():
    state = FlowState.from_velocity(InertiaOperator((1.0, -1.0)), constant(0.3, 64))
    assert rhs(state).max_abs() <= 1e-14
    after = step_rk4(state, 0.01)
    assert (after.m - state.m).max_abs() <= 1e-14
    assert after.t == pytest.approx(0.01)


def test_step_size_must_be_positive():
    state = _ch_state(0.2)
    with pytest.raises(ValueError):
        step_rk4(state, 0.0)
    with pytest.raises(ValueError):
        evolve(state, -1e-3, 10)
    with pytest.raises(ValueError):
        evolve(state, 1e-3, -1)


def test_zero_data_has_no_drift():
    state = FlowState.from_velocity(InertiaOperator((1.0, -1.0)), constant(0.0, 64))
    series = evolve(state, 1e-2, 20, hierarchy_depth=3, record_interval=5)
    assert series.max_drifts() == {'H_1': 0.0, 'H_2': 0.0, 'H_3': 0.0}
    assert series.final.m.max_abs() == 0.0


def test_camassa_holm_invariants_are_conserved():
    """u0 = 0.2 cos x, dt = 1e-3 to T = 1: drift of H_1..H_3 below 1e-6"""
    series = evolve(_ch_state(0.2), 1e-3, 1000, hierarchy_depth=3, record_interval=100)
    assert series.times[-1] == pytest.approx(1.0)
    for name, drift in series.max_drifts().items():
        assert drift <= 1e-6, f"{name} drifted by {drift:.3e}"


def test_energy_drift_has_fourth_order():
    """Halving dt divides the H_2 drift by a factor between 12 and 20"""
    drifts = []
    for dt in (0.02, 0.01):
        steps = int(round(1.0 / dt))
        series = evolve(_ch_state(0.5, n=32), dt, steps, hierarchy_depth=2, record_interval=steps // 10)
        drifts.append(series.max_drifts()['H_2'])
    assert drifts[1] > 1e-13
    ratio = drifts[0] / drifts[1]
    assert 12.0 <= ratio <= 20.0, f"ratio {ratio:.2f}"


def test_rk4_state_error_has_fourth_order():
    """Global error against a fine reference shrinks ~16x per halving"""
    state = _ch_state(0.5, n=32)
    reference = evolve(state, 0.05 / 8, 160, hierarchy_depth=1, record_interval=160).final.m
    errors = []
    for dt, steps in ((0.05, 20), (0.025, 40)):
        final = evolve(state, dt, steps, hierarchy_depth=1, record_interval=steps).final.m
        errors.append((final - reference).max_abs())
    ratio = errors[0] / errors[1]
    assert 12.0 <= ratio <= 20.0, f"ratio {ratio:.2f}"


def test_time_reversal_recovers_initial_state():
    state = _ch_state(0.2)
    forward = evolve(state, 1e-3, 1000, hierarchy_depth=1, record_interval=1000)
    back = reverse_evolve(forward.final, 1e-3, 1000, record_interval=1000)
    assert back.final.t == pytest.approx(0.0, abs=1e-12)
    assert (back.final.m - state.m).max_abs() <= 1e-6


def test_burgers_mean_is_conserved():
    m = random_band_limited(64, 42, amplitude=0.02)
    series = evolve(FlowState(0.0, m, InertiaOperator.identity()), 1e-3, 200, hierarchy_depth=2, record_interval=50)
    assert series.max_drifts()['H_1'] <= 1e-12


def test_burgers_smooth_flow_conserves_hierarchy():
    """m0 = 0.1 cos x breaks at t = 10/3; up to T = 0.5 the drifts of H_1..H_4 stay below 1e-7"""
    m = from_function(lambda x: 0.1 * np.cos(x), 128)
    series = evolve(FlowState(0.0, m, InertiaOperator.identity()), 1e-3, 500, hierarchy_depth=4, record_interval=50)
    assert series.times[-1] == pytest.approx(0.5)
    for name, drift in series.max_drifts().items():
        assert drift <= 1e-7, f"{name} drifted by {drift:.3e}"


def test_blowup_guard_keeps_partial_series():
    state = _ch_state(0.2)
    with pytest.raises(BlowUp) as info:
        evolve(state, 1e-3, 10, hierarchy_depth=2, guard=0.1)
    partial = info.value.partial
    assert info.value.t == pytest.approx(1e-3)
    assert partial is not None and len(partial.times) == 1
    assert partial.depth == 2


def test_drift_series_frame_and_csv(tmp_path):
    series = evolve(_ch_state(0.2), 1e-2, 20, hierarchy_depth=3, record_interval=5)
    frame = series.to_frame()
    assert list(frame.columns) == ['t', 'H_1', 'H_2', 'H_3', 'drift_1', 'drift_2', 'drift_3']
    assert len(frame) == 5
    path = tmp_path / "drift.csv"
    series.to_csv(path)
    loaded = pd.read_csv(path, float_precision='round_trip')
    np.testing.assert_array_equal(loaded.to_numpy(), frame.to_numpy())
    assert frame['drift_2'].iloc[0] == 0.0


def test_drift_is_absolute_for_vanishing_invariants():
    """H_1 = 0 for zero-mean Camassa-Holm data, so its drift is reported in absolute terms"""
    series = evolve(_ch_state(0.2), 1e-2, 20, hierarchy_depth=2, record_interval=10)
    assert abs(series.H_values[0, 0]) <= series.floor
    assert series.max_drifts()['H_1'] <= 1e-12


def test_record_schedule_includes_last_step():
    series = evolve(_ch_state(0.2), 1e-2, 25, hierarchy_depth=1, record_interval=10)
    np.testing.assert_allclose(series.times, [0.0, 0.1, 0.2, 0.25])


def test_cfl_heuristic():
    assert math.isinf(cfl_dt(FlowState.from_velocity(InertiaOperator.identity(), constant(0.0, 32))))
    state = _ch_state(0.5)
    assert cfl_dt(state) == pytest.approx(0.5 / (64 * 0.5))


def test_initial_energy():
    """H_2 = 1/2 int (u^2 + u_x^2) = pi a^2 for u = a cos x"""
    assert initial_energy(_ch_state(0.2)) == pytest.approx(np.pi * 0.04, rel=1e-12)


def test_filter_is_optional():
    state = _ch_state(0.2)
    plain = evolve(state, 1e-2, 10, hierarchy_depth=1, record_interval=10).final
    filtered = evolve(state, 1e-2, 10, hierarchy_depth=1, record_interval=10, filter_strength=36.0).final
    assert isinstance(filtered.m, GridFunction)
    assert (plain.m - filtered.m).max_abs() <= 1e-10
