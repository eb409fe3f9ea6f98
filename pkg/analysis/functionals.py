"""
Regular functionals on the regular dual of Vect(S^1): L2 gradients, finite-difference
gradient checks, Hamiltonian reconstruction from gradient fields and Poisson brackets.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import pandas as pd

from analysis.circle_fourier import (
    TWO_PI,
    GridFunction,
    constant,
    dealiased_product,
    grid_inner,
    integral,
    l2_inner,
    l2_norm,
    product_integral,
    random_batch,
    spectral_derivative,
)
from analysis.lie_ops import (
    CocycleOperator,
    InertiaOperator,
    da_apply_array,
    lie_poisson_array,
)

FD_EPS = 1e-5
QUAD_POINTS = 32
LIE_POISSON = 'lie_poisson'


@dataclass(frozen=True)
class RegularFunctional:
    """A functional given by its values and, when known, its L2 gradient

    evaluate_batch, if present, maps an array of states (B, N) to B values and is
    used to speed up finite-difference gradients.
    """
    evaluate: Callable[[GridFunction], float]
    gradient: Optional[Callable[[GridFunction], GridFunction]] = None
    name: str = 'F'
    evaluate_batch: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __call__(self, m):
        return float(self.evaluate(m))

    def grad(self, m):
        if self.gradient is None:
            return fd_gradient(self, m)
        return self.gradient(m)


def structure_array(structure, m, f):
    """Apply a Poisson operator: 'lie_poisson' (P_m), a CocycleOperator, or DA for an InertiaOperator"""
    if isinstance(structure, str):
        if structure != LIE_POISSON:
            raise ValueError(f"unknown Poisson structure {structure!r}")
        return lie_poisson_array(m, f)
    if isinstance(structure, CocycleOperator):
        return structure.apply_array(f)
    if isinstance(structure, InertiaOperator):
        return da_apply_array(structure, f)
    raise TypeError(f"unsupported Poisson structure {type(structure).__name__}")


def fd_gradient(F, m, eps=FD_EPS):
    """Central-difference L2 gradient against the N coordinate directions"""
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    n = m.n
    weight = TWO_PI / n
    bumps = eps * np.eye(n)
    if F.evaluate_batch is not None:
        plus = np.asarray(F.evaluate_batch(m.samples + bumps))
        minus = np.asarray(F.evaluate_batch(m.samples - bumps))
    else:
        plus = np.array([F(GridFunction(m.samples + b)) for b in bumps])
        minus = np.array([F(GridFunction(m.samples - b)) for b in bumps])
    logging.debug(f"fd_gradient of {F.name}: {2 * n} evaluations at eps={eps:g}")
    return GridFunction((plus - minus) / (2.0 * eps) / weight)


def directional_derivative(X, m, direction, eps=FD_EPS):
    """X'(m) M by central differences"""
    return (X(m + direction * eps) - X(m - direction * eps)) / (2.0 * eps)


def reconstruct_hamiltonian(X, m, quad_points=QUAD_POINTS):
    """F(m) = int_0^1 <X(tm), m> dt by Gauss-Legendre quadrature (F(0) = 0)"""
    nodes, weights = np.polynomial.legendre.leggauss(quad_points)
    t = 0.5 * (nodes + 1.0)
    w = 0.5 * weights
    return float(sum(wi * l2_inner(X(m * ti), m) for ti, wi in zip(t, w)))


def gradient_symmetry_residual(X, m, probes=4, eps=FD_EPS, seed=0):
    """max |<X'(m)M, N> - <X'(m)N, M>| / (|M| |N|) over random probe pairs

    Near zero certifies that X is a gradient field.
    """
    batch = random_batch(m.n, 2 * probes, seed)
    worst = 0.0
    for i in range(probes):
        M, N = GridFunction(batch[2 * i]), GridFunction(batch[2 * i + 1])
        xm = directional_derivative(X, m, M, eps)
        xn = directional_derivative(X, m, N, eps)
        gap = abs(l2_inner(xm, N) - l2_inner(xn, M)) / (l2_norm(M) * l2_norm(N))
        worst = max(worst, gap)
    return worst


def poisson_bracket(F, G, structure, m):
    """{F, G}(m) = <dF(m), P dG(m)> for the chosen structure"""
    dF, dG = F.grad(m), G.grad(m)
    return float(grid_inner(dF.samples, structure_array(structure, m.samples, dG.samples)))


def hamiltonian_vector_field(F, structure, m):
    """X_F(m) = P dF(m)"""
    return GridFunction(structure_array(structure, m.samples, F.grad(m).samples))


def lie_poisson_bracket_gradient(F, G, m, eps=FD_EPS):
    """Closed form of d{F,G} for the Lie-Poisson structure:

    dF'(P_m dG) - dG'(P_m dF) + dF D dG - dG D dF
    """
    dF, dG = F.grad(m), G.grad(m)
    p_dG = GridFunction(lie_poisson_array(m.samples, dG.samples))
    p_dF = GridFunction(lie_poisson_array(m.samples, dF.samples))
    second = directional_derivative(F.grad, m, p_dG, eps) - directional_derivative(G.grad, m, p_dF, eps)
    first = dealiased_product(dF.samples, spectral_derivative(dG.samples)) - dealiased_product(
        dG.samples, spectral_derivative(dF.samples))
    return second + GridFunction(first)


def bracket_functional(F, G, structure):
    """{F, G} as a functional of m (no gradient attached)"""
    return RegularFunctional(lambda m: poisson_bracket(F, G, structure, m), name=f"{{{F.name},{G.name}}}")


def bracket_table(functionals, structure, m):
    """Matrix of {F_i, F_j}(m) as a DataFrame indexed by functional names"""
    names = [F.name for F in functionals]
    grads = [F.grad(m).samples for F in functionals]
    images = [structure_array(structure, m.samples, g) for g in grads]
    table = np.array([[float(grid_inner(gi, pj)) for pj in images] for gi in grads])
    return pd.DataFrame(table, index=names, columns=names)


def linear(u, name=None):
    """F_u(m) = <u, m>, gradient u"""
    return RegularFunctional(
        evaluate=lambda m: l2_inner(u, m),
        gradient=lambda m: u,
        name=name or 'F_u',
        evaluate_batch=lambda batch: grid_inner(batch, u.samples),
    )


def casimir_mean():
    """H_1(m) = int m dx, the Casimir of every constant cocycle structure"""
    return RegularFunctional(
        evaluate=integral,
        gradient=lambda m: constant(1.0, m.n),
        name='H_1',
        evaluate_batch=lambda batch: TWO_PI * np.mean(batch, axis=-1),
    )


def power(k, scale=1.0, name=None):
    """scale * int m^k dx, gradient scale * k m^(k-1)"""

    def evaluate_batch(batch):
        return scale * product_integral(*([batch] * k))

    def gradient(m):
        g = np.ones_like(m.samples)
        for _ in range(k - 1):
            g = dealiased_product(g, m.samples)
        return GridFunction(scale * k * g)

    return RegularFunctional(
        evaluate=lambda m: float(evaluate_batch(m.samples)),
        gradient=gradient,
        name=name or f"int m^{k}",
        evaluate_batch=evaluate_batch,
    )


def quadratic_energy(A):
    """H_2(m) = 1/2 <m, A^{-1} m>, gradient u = A^{-1} m"""

    def evaluate_batch(batch):
        return 0.5 * grid_inner(batch, A.invert_array(batch))

    return RegularFunctional(
        evaluate=lambda m: float(evaluate_batch(m.samples)),
        gradient=lambda m: GridFunction(A.invert_array(m.samples)),
        name='H_2',
        evaluate_batch=evaluate_batch,
    )


def from_vector_field(X, quad_points=QUAD_POINTS, name='F_X'):
    """Functional whose gradient is the (symmetric-derivative) field X"""
    return RegularFunctional(
        evaluate=lambda m: reconstruct_hamiltonian(X, m, quad_points),
        gradient=X,
        name=name,
    )
