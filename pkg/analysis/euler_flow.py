"""
Method-of-lines integration of m_t = 2 m u_x + m_x u, m = A u, with classical RK4
and drift accounting for the ladder Hamiltonians.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from analysis.circle_fourier import GridFunction, filter_array, grid_inner
from analysis.errors import BlowUp, LadderBreak
from analysis.lenard_hierarchy import hamiltonian_values
from analysis.lie_ops import InertiaOperator, lie_poisson_array

BLOWUP_GUARD = 1e8
DRIFT_FLOOR = 1e-12
RECORD_INTERVAL = 10
CFL_SAFETY = 0.5


@dataclass(frozen=True, eq=False)
class FlowState:
    t: float
    m: GridFunction
    A: InertiaOperator

    @classmethod
    def from_velocity(cls, A, u, t=0.0):
        return cls(float(t), GridFunction(A.apply_array(u.samples)), A)

    @property
    def velocity(self):
        return GridFunction(self.A.invert_array(self.m.samples))

    def is_finite(self):
        return self.m.is_finite()


@dataclass(eq=False)
class DriftSeries:
    """H_k(t) at recorded times; drifts are relative to |H_k(0)|, absolute when H_k(0) ~ 0"""
    times: np.ndarray
    H_values: np.ndarray
    floor: float = DRIFT_FLOOR
    meta: dict = field(default_factory=dict)
    final: FlowState = None

    @property
    def depth(self):
        return self.H_values.shape[0]

    @property
    def relative_drifts(self):
        if self.H_values.size == 0:
            return self.H_values.copy()
        start = self.H_values[:, :1]
        scale = np.where(np.abs(start) > self.floor, np.abs(start), 1.0)
        return np.abs(self.H_values - start) / scale

    def max_drifts(self):
        drifts = self.relative_drifts
        return {f"H_{k + 1}": float(np.max(drifts[k])) if drifts.shape[1] else 0.0 for k in range(self.depth)}

    def to_frame(self):
        data = {'t': self.times}
        for k in range(self.depth):
            data[f"H_{k + 1}"] = self.H_values[k]
        drifts = self.relative_drifts
        for k in range(self.depth):
            data[f"drift_{k + 1}"] = drifts[k]
        return pd.DataFrame(data)

    def to_csv(self, path):
        self.to_frame().to_csv(path, index=False, float_format='%.17g')


def rhs_array(A, m):
    u = A.invert_array(m)
    return lie_poisson_array(m, u)


def rhs(state):
    """X_A(m) = 2 m u_x + m_x u (dealiased)"""
    return GridFunction(rhs_array(state.A, state.m.samples))


def initial_energy(state):
    """H_2 = 1/2 <m, u>"""
    return 0.5 * float(grid_inner(state.m.samples, state.A.invert_array(state.m.samples)))


def _rk4(A, m, h):
    k1 = rhs_array(A, m)
    k2 = rhs_array(A, m + 0.5 * h * k1)
    k3 = rhs_array(A, m + 0.5 * h * k2)
    k4 = rhs_array(A, m + h * k3)
    return m + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _advance(state, h, guard=BLOWUP_GUARD, filter_strength=None):
    m = _rk4(state.A, state.m.samples, h)
    if filter_strength:
        m = filter_array(m, filter_strength)
    t = state.t + h
    peak = float(np.max(np.abs(m))) if np.all(np.isfinite(m)) else math.inf
    if peak > guard:
        raise BlowUp(t, peak)
    return FlowState(t, GridFunction(m), state.A)


def step_rk4(state, dt, guard=BLOWUP_GUARD):
    """One classical RK4 step of size dt > 0"""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    return _advance(state, dt, guard)


def cfl_dt(state, safety=CFL_SAFETY):
    """Step-size heuristic dt <= safety / (N max|u|)"""
    peak = state.velocity.max_abs()
    if peak == 0.0:
        return math.inf
    return safety / (state.m.n * peak)


def _hamiltonians(A, m, depth, quad_points):
    return hamiltonian_values(A, m.samples[None], depth, quad_points)[0]


def _integrate(state, h, steps, depth, record_interval, filter_strength, quad_points, guard):
    if steps < 0:
        raise ValueError(f"steps must be >= 0, got {steps}")
    if record_interval < 1:
        raise ValueError(f"record_interval must be >= 1, got {record_interval}")
    state.A.check_invertible(state.m.n)
    quad_points = quad_points or max(depth, 2)
    times = [state.t]
    values = [_hamiltonians(state.A, state.m, depth, quad_points)]

    def series():
        return DriftSeries(np.array(times), np.array(values).T.reshape(depth, len(times)),
                           meta={'dt': h, 'steps': steps, 'n': state.m.n, 'A': state.A.to_dict()}, final=current)

    current = state
    for step in range(1, steps + 1):
        try:
            current = _advance(current, h, guard, filter_strength)
        except BlowUp as e:
            logging.warning(f"blow-up at t = {e.t:.6g} (step {step}), max|m| = {e.peak:.3e}")
            e.partial = series()
            raise
        if step % record_interval == 0 or step == steps:
            try:
                values.append(_hamiltonians(current.A, current.m, depth, quad_points))
            except LadderBreak as e:
                e.partial = series()
                raise
            times.append(current.t)
            logging.debug(f"step {step}: t = {current.t:.6g}")
    result = series()
    logging.info(f"evolved {steps} steps of dt = {h:g}; max drifts {result.max_drifts()}")
    return result


def evolve(state, dt, steps, hierarchy_depth=3, record_interval=RECORD_INTERVAL,
           filter_strength=None, quad_points=None, guard=BLOWUP_GUARD):
    """Integrate steps RK4 steps and record H_1..H_K every record_interval steps

    The returned DriftSeries carries the last state in .final. BlowUp and LadderBreak carry the series
    recorded so far in their partial attribute.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    return _integrate(state, dt, steps, hierarchy_depth, record_interval, filter_strength, quad_points, guard)


def reverse_evolve(state, dt, steps, hierarchy_depth=1, record_interval=RECORD_INTERVAL, guard=BLOWUP_GUARD):
    """Integrate backwards in time with step -dt"""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    return _integrate(state, -dt, steps, hierarchy_depth, record_interval, None, None, guard)
