"""
Lenard ladder P_m G_k = Q G_{k+1} (Q = DA) for the Euler equation of an inertia
operator A, the Hamiltonians H_k, and the closed-form Burgers / Camassa-Holm oracles.

Q has the constants in its kernel, so Q^{-1} X_k fixes G_{k+1} only up to a constant.
The ladder adds the constant that keeps G_{k+1} a gradient, homogeneous of degree k in
m and equal to c_k (k+1) (m/a)^k on constant states; this reproduces the polynomial
gradients (G_3 = A^{-1}(mu + q(u)), Burgers G_{k+1} = c_k (k+1) m^k). The constant is
obtained exactly by running the ladder on jets m + s*1 that are polynomial in s.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from analysis.circle_fourier import (
    TWO_PI,
    GridFunction,
    dealiased_product,
    grid_inner,
    grid_mean,
    l2_norm,
    product_integral,
    spectral_derivative,
)
from analysis.errors import IndexOutOfRange, LadderBreak, UnsupportedLevel
from analysis.functionals import QUAD_POINTS, RegularFunctional
from analysis.lie_ops import InertiaOperator, da_apply_array, da_invert_array, lie_poisson_array

DEFAULT_DEPTH = 5
TOL_MEAN = 1e-8
BATCH_CHUNK = 64
CAMASSA_HOLM = InertiaOperator((1.0, -1.0))


def burgers_coefficient(k):
    """c_k = (2k)! / (2^k (k!)^2 (k+1))"""
    return math.factorial(2 * k) / (2 ** k * math.factorial(k) ** 2 * (k + 1))


@dataclass(frozen=True, eq=False)
class HierarchyLevel:
    k: int
    H_value: float
    G: GridFunction
    X: GridFunction

    @property
    def mean_X(self):
        return self.X.mean()


@dataclass(eq=False)
class HierarchyResult:
    levels: list
    m: GridFunction
    A: InertiaOperator
    diagnostics: dict = field(default_factory=dict)
    break_level: int = None

    @property
    def depth(self):
        return len(self.levels)

    @property
    def complete(self):
        return self.break_level is None

    def level(self, k):
        if not 1 <= k <= self.depth:
            raise IndexOutOfRange(f"level {k} not in 1..{self.depth}")
        return self.levels[k - 1]

    def H(self):
        return np.array([lvl.H_value for lvl in self.levels])

    def to_frame(self):
        rows = []
        for lvl in self.levels:
            rows.append({
                'k': lvl.k,
                'H': lvl.H_value,
                'mean_X': lvl.mean_X,
                'lenard_residual': (lenard_residual(self, lvl.k) if lvl.k < self.depth else np.nan),
            })
        return pd.DataFrame(rows).set_index('k')

    def to_json(self, sample_stride=1):
        levels = []
        for lvl in self.levels:
            levels.append({
                'k': lvl.k,
                'H': lvl.H_value,
                'mean_X': lvl.mean_X,
                'lenard_residual': lenard_residual(self, lvl.k) if lvl.k < self.depth else None,
                'G': lvl.G.samples[::sample_stride].tolist(),
            })
        return {
            'A': self.A.to_dict(),
            'n': self.m.n,
            'depth': self.depth,
            'complete': self.complete,
            'break_level': self.break_level,
            'levels': levels,
            'diagnostics': self.diagnostics,
        }


def ladder_arrays(A, m, depth, tol_mean=TOL_MEAN):
    """G_1..G_depth and X_1..X_depth at the states m (array (..., N))

    Returns (G, X, break_level, break_mean); on a break the lists stop at the last
    complete level.
    """
    a = A.a
    mean_m = grid_mean(m)
    G_jet = np.ones((1,) + m.shape)
    G_out, X_out = [G_jet[0]], []
    for k in range(1, depth + 1):
        # X_k(m + s) = P_m G_k(s) + s P_1 G_k(s), P_1 f = 2 f_x
        X_jet = np.zeros((k + 1,) + m.shape)
        for j in range(k):
            X_jet[j] += lie_poisson_array(m, G_jet[j])
            X_jet[j + 1] += 2.0 * spectral_derivative(G_jet[j])
        scale = np.maximum(1.0, np.max(np.abs(X_jet), axis=-1))
        drift = np.abs(grid_mean(X_jet)) / scale
        if np.max(drift) > tol_mean:
            worst = float(np.max(np.abs(grid_mean(X_jet[0]))))
            logging.warning(f"ladder break at level {k}: mean of X_{k} is {worst:.3e}")
            return G_out, X_out, k, worst
        X_out.append(X_jet[0])
        if k == depth:
            break
        G0 = da_invert_array(A, X_jet)
        gauge = np.zeros((k + 1,) + mean_m.shape)
        gauge[k] = burgers_coefficient(k) * (k + 1) / a ** k
        for j in range(k - 1, -1, -1):
            p_j = (j + 1) * grid_inner(G0[j + 1], m) / TWO_PI
            gauge[j] = (p_j + (j + 1) * mean_m * gauge[j + 1]) / (k - j)
        G_jet = G0 + gauge[..., None]
        G_out.append(G_jet[0])
    return G_out, X_out, None, 0.0


def _gauss_nodes(quad_points):
    nodes, weights = np.polynomial.legendre.leggauss(quad_points)
    return 0.5 * (nodes + 1.0), 0.5 * weights


def hamiltonian_values(A, states, depth, quad_points=QUAD_POINTS, tol_mean=TOL_MEAN):
    """H_1..H_depth at each state (array (B, N)) by the line integral of the gradient fields"""
    t, w = _gauss_nodes(quad_points)
    values = []
    for start in range(0, states.shape[0], BATCH_CHUNK):
        chunk = states[start:start + BATCH_CHUNK]
        scaled = t[:, None, None] * chunk[None]
        G, _, broke, mean = ladder_arrays(A, scaled, depth, tol_mean)
        if len(G) < depth:
            raise LadderBreak(broke, mean)
        values.append(np.stack([np.tensordot(w, grid_inner(g, chunk[None]), axes=1) for g in G[:depth]], axis=-1))
    return np.concatenate(values, axis=0)


def generate(A, m, depth=DEFAULT_DEPTH, quad_points=QUAD_POINTS, tol_mean=TOL_MEAN):
    """Run the Lenard ladder from G_1 = 1 to depth K at the base point m

    Raises LadderBreak with the partial HierarchyResult attached if some X_k leaves
    the image of D.
    """
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    A.check_invertible(m.n)
    logging.info(f"generating Lenard ladder for A = {A}, depth {depth}, N = {m.n}")
    t, w = _gauss_nodes(quad_points)
    states = np.concatenate([t[:, None] * m.samples[None], m.samples[None]], axis=0)
    G, X, broke, mean = ladder_arrays(A, states, depth, tol_mean)

    complete = min(len(G), len(X))
    levels = []
    for idx in range(complete):
        H = float(np.dot(w, grid_inner(G[idx][:-1], m.samples[None])))
        levels.append(HierarchyLevel(idx + 1, H, GridFunction(G[idx][-1]), GridFunction(X[idx][-1])))

    result = HierarchyResult(levels, m, A, break_level=broke)
    result.diagnostics = {
        'mean_X': [lvl.mean_X for lvl in levels],
        'lenard_residuals': [lenard_residual(result, k) for k in range(1, result.depth)],
    }
    if broke is not None:
        result.diagnostics['break_mean'] = mean
        raise LadderBreak(broke, mean, partial=result)
    logging.info(f"ladder complete: H = {[f'{h:.6g}' for h in result.H()]}")
    return result


def lenard_residual(result, k):
    """|P_m G_k - Q G_{k+1}| / |P_m G_k|"""
    if not 1 <= k < result.depth:
        raise IndexOutOfRange(f"lenard residual needs levels {k} and {k + 1}, ladder has {result.depth}")
    lhs = GridFunction(lie_poisson_array(result.m.samples, result.level(k).G.samples))
    rhs = GridFunction(da_apply_array(result.A, result.level(k + 1).G.samples))
    scale = l2_norm(lhs)
    if scale == 0.0:
        return l2_norm(rhs)
    return l2_norm(lhs - rhs) / scale


def involution_matrix(result, structure='lie_poisson'):
    """{H_j, H_k} at the base point for 'lie_poisson' (P_m) or 'cocycle' (Q = DA)"""
    if structure == 'lie_poisson':
        def op(f):
            return lie_poisson_array(result.m.samples, f)
    elif structure == 'cocycle':
        def op(f):
            return da_apply_array(result.A, f)
    else:
        raise ValueError(f"unknown structure {structure!r}")
    K = result.depth
    table = np.zeros((K, K))
    for j in range(K):
        gj = result.levels[j].G.samples
        for k in range(j + 1, K):
            value = float(grid_inner(gj, op(result.levels[k].G.samples)))
            table[j, k] = value
            table[k, j] = -value
    names = [f"H_{k}" for k in range(1, K + 1)]
    return pd.DataFrame(table, index=names, columns=names)


def oracle_error(value, reference, floor=1e-12):
    """|value - reference| relative to |reference|, absolute when the reference is ~0"""
    scale = abs(reference) if abs(reference) > floor else 1.0
    return abs(value - reference) / scale


def burgers_closed_form(k, m):
    """c_k int m^{k+1} dx, the (k+1)-th Burgers Hamiltonian"""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    return burgers_coefficient(k) * float(product_integral(*([m.samples] * (k + 1))))


def ch_explicit(k, m):
    """Explicit Camassa-Holm Hamiltonians H_1..H_3 (A = I - D^2)"""
    if k not in (1, 2, 3):
        raise UnsupportedLevel(f"no explicit Camassa-Holm Hamiltonian for k = {k}")
    u = CAMASSA_HOLM.invert_array(m.samples)
    ux = spectral_derivative(u)
    if k == 1:
        return TWO_PI * float(np.mean(u))
    if k == 2:
        return 0.5 * float(product_integral(u, u) + product_integral(ux, ux))
    return 0.5 * float(product_integral(u, u, u) + product_integral(u, ux, ux))


def closed_form_h3(A, m):
    """H_3 = 1/2 int (a u^3 - b u u_x^2) for A = aI + bD^2"""
    if A.order > 2:
        raise UnsupportedLevel(f"closed-form H_3 needs order <= 2, got {A.order}")
    u = A.invert_array(m.samples)
    ux = spectral_derivative(u)
    return 0.5 * float(A.a * product_integral(u, u, u) - A.b * product_integral(u, ux, ux))


def bihamiltonian_residual(A, m):
    """|X_A(m) - Q dH_3(m)| / |X_A(m)| with dH_3 = A^{-1}(mu + q(u))"""
    u = A.invert_array(m.samples)
    ux = spectral_derivative(u)
    q = 0.5 * (A.a * dealiased_product(u, u) + A.b * dealiased_product(ux, ux))
    grad_h3 = A.invert_array(dealiased_product(m.samples, u) + q)
    x_a = GridFunction(lie_poisson_array(m.samples, u))
    q_grad = GridFunction(da_apply_array(A, grad_h3))
    scale = l2_norm(x_a)
    return l2_norm(x_a - q_grad) / scale if scale else l2_norm(q_grad)


def gradient_field(A, k, tol_mean=TOL_MEAN):
    """The field m -> G_k(m) of the ladder"""

    def field(m):
        G, _, broke, mean = ladder_arrays(A, m.samples, k, tol_mean)
        if len(G) < k:
            raise LadderBreak(broke, mean)
        return GridFunction(G[k - 1])

    return field


def hierarchy_functional(A, k, quad_points=QUAD_POINTS, tol_mean=TOL_MEAN):
    """H_k as a RegularFunctional: values by line integral, gradient G_k"""

    def evaluate_batch(states):
        return hamiltonian_values(A, np.atleast_2d(states), k, quad_points, tol_mean)[:, k - 1]

    return RegularFunctional(
        evaluate=lambda m: float(evaluate_batch(m.samples[None])[0]),
        gradient=gradient_field(A, k, tol_mean),
        name=f"H_{k}",
        evaluate_batch=evaluate_batch,
    )
