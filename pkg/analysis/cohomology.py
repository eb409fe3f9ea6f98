"""
Local Gelfand-Fuks cochains of Vect(S^1) on the grid: 2-cochains gamma(u, v) = <u, K v>
with K a skew differential operator, the coboundary of 1-cochains, the Chevalley-
Eilenberg cocycle test, the Virasoro cocycle and the classification K = lambda D^3 + dm.
"""
import logging
from dataclasses import dataclass
from math import comb

import numpy as np
import scipy.linalg

from analysis.circle_fourier import (
    GridFunction,
    antiderivative_zero_mean,
    dealiased_product,
    grid_inner,
    grid_points,
    product_integral,
    random_batch,
    spectral_antiderivative,
    spectral_derivative,
)
from analysis.errors import GridMismatch, NotACocycle, NotSkew
from analysis.lie_ops import bracket_array

MAX_ORDER = 5
SKEW_TOL = 1e-12
COCYCLE_TOL = 1e-8
FIT_MODES = tuple(range(2, 9))


def _adjoint_coeffs(coeffs):
    """Coefficients of K* = sum (-1)^k D^k a_k, expanded by Leibniz"""
    order = coeffs.shape[0] - 1
    out = np.zeros_like(coeffs)
    for k in range(order + 1):
        for j in range(k + 1):
            out[j] += (-1) ** k * comb(k, j) * spectral_derivative(coeffs[k], k - j)
    return out


def _trim(coeffs, scale):
    while coeffs.shape[0] > 1 and np.max(np.abs(coeffs[-1])) <= SKEW_TOL * scale:
        coeffs = coeffs[:-1]
    return coeffs


@dataclass(frozen=True, eq=False)
class TwoCochain:
    """gamma(u, v) = <u, K v> with K = sum_k a_k(x) D^k skew-adjoint

    Construction antisymmetrizes K -> (K - K*)/2 and raises NotSkew if nothing is left.
    """
    coeffs: np.ndarray

    def __post_init__(self):
        raw = np.atleast_2d(np.array(self.coeffs, dtype=float))
        if raw.shape[0] - 1 > MAX_ORDER:
            raise ValueError(f"cochains are limited to order {MAX_ORDER}, got {raw.shape[0] - 1}")
        scale = max(1.0, float(np.max(np.abs(raw))))
        skew = 0.5 * (raw - _adjoint_coeffs(raw))
        if np.max(np.abs(raw)) > SKEW_TOL * scale and np.max(np.abs(skew)) <= SKEW_TOL * scale:
            raise NotSkew("operator has no skew-adjoint part")
        skew = _trim(skew, scale)
        skew.setflags(write=False)
        object.__setattr__(self, 'coeffs', skew)

    @classmethod
    def _from_skew(cls, coeffs):
        obj = object.__new__(cls)
        coeffs = np.array(coeffs, dtype=float)
        coeffs.setflags(write=False)
        object.__setattr__(obj, 'coeffs', coeffs)
        return obj

    @classmethod
    def from_operator(cls, coeffs, n=None):
        """Build from a list of constants, GridFunctions or arrays a_0, a_1, ..."""
        if n is None:
            sizes = {c.n for c in coeffs if isinstance(c, GridFunction)}
            sizes |= {np.asarray(c).size for c in coeffs if not isinstance(c, GridFunction) and np.ndim(c)}
            if len(sizes) != 1:
                raise ValueError("grid size must be given or implied by exactly one coefficient size")
            n = sizes.pop()
        rows = []
        for c in coeffs:
            samples = c.samples if isinstance(c, GridFunction) else np.broadcast_to(np.asarray(c, dtype=float), (n,))
            if samples.size != n:
                raise GridMismatch(n, samples.size)
            rows.append(samples)
        return cls(np.array(rows))

    @classmethod
    def virasoro(cls, n, scale=1.0):
        """K = scale * D^3"""
        return cls.from_operator([0.0, 0.0, 0.0, scale], n)

    @classmethod
    def zero(cls, n):
        return cls.from_operator([0.0], n)

    @property
    def n(self):
        return self.coeffs.shape[-1]

    @property
    def order(self):
        return self.coeffs.shape[0] - 1

    def coefficient(self, k):
        if k > self.order:
            return GridFunction(np.zeros(self.n))
        return GridFunction(self.coeffs[k])

    def apply_array(self, f):
        total = dealiased_product(self.coeffs[0], f)
        for k in range(1, self.order + 1):
            total = total + dealiased_product(self.coeffs[k], spectral_derivative(f, k))
        return total

    def apply(self, f):
        if f.n != self.n:
            raise GridMismatch(self.n, f.n)
        return GridFunction(self.apply_array(f.samples))

    def evaluate(self, u, v):
        if u.n != self.n or v.n != self.n:
            raise GridMismatch(self.n, u.n if u.n != self.n else v.n)
        return float(grid_inner(u.samples, self.apply_array(v.samples)))

    __call__ = evaluate

    def adjoint(self):
        return self.scale(-1.0)

    def scale(self, factor):
        return TwoCochain._from_skew(factor * self.coeffs)

    def __add__(self, other):
        if other.n != self.n:
            raise GridMismatch(self.n, other.n)
        order = max(self.order, other.order)
        total = np.zeros((order + 1, self.n))
        total[: self.order + 1] += self.coeffs
        total[: other.order + 1] += other.coeffs
        return TwoCochain._from_skew(total)

    def __sub__(self, other):
        return self + other.scale(-1.0)

    def to_dict(self):
        coeffs = []
        for row in self.coeffs:
            if np.ptp(row) == 0.0:
                coeffs.append(float(row[0]))
            else:
                coeffs.append({'n': self.n, 'samples': row.tolist()})
        return {'coeffs': coeffs}

    @classmethod
    def from_dict(cls, data, n=None):
        coeffs = [GridFunction(np.asarray(c['samples'])) if isinstance(c, dict) else float(c) for c in data['coeffs']]
        return cls.from_operator(coeffs, n)


def coboundary_1(m):
    """dm: u -> ad*_u m = 2 m u_x + m_x u, i.e. K = 2 m D + m_x"""
    return TwoCochain._from_skew([spectral_derivative(m.samples), 2.0 * m.samples])


def cocycle_residual_2(gamma, triples=8, seed=0):
    """max |dgamma(u, v, w)| over random triples, normalized by the size of its terms

    dgamma(u, v, w) = -gamma([u,v], w) - gamma([v,w], u) - gamma([w,u], v)
    """
    probes = random_batch(gamma.n, 3 * triples, seed)
    u, v, w = probes[:triples], probes[triples:2 * triples], probes[2 * triples:]

    def g(a, b):
        return grid_inner(a, gamma.apply_array(b))

    terms = np.array([g(bracket_array(u, v), w), g(bracket_array(v, w), u), g(bracket_array(w, u), v)])
    total = -terms.sum(axis=0)
    scale = max(1.0, float(np.max(np.abs(terms))))
    return float(np.max(np.abs(total))) / scale


def virasoro(u, v):
    """vir(u, v) = int (u' v'' - v' u'') dx"""
    if u.n != v.n:
        raise GridMismatch(u.n, v.n)
    du, ddu = spectral_derivative(u.samples), spectral_derivative(u.samples, 2)
    dv, ddv = spectral_derivative(v.samples), spectral_derivative(v.samples, 2)
    return float(product_integral(du, ddv) - product_integral(dv, ddu))


def decompose_commutators(u):
    """u = [1, W] + c [cos, sin] with c = mean(u)"""
    c = u.mean()
    W = antiderivative_zero_mean(u - c)
    return W, c


def commutator_certificate(u, W, c):
    """max |[1, W] + c [cos, sin] - u|"""
    x = grid_points(u.n)
    one = np.ones(u.n)
    total = bracket_array(one, W.samples) + c * bracket_array(np.cos(x), np.sin(x))
    return float(np.max(np.abs(total - u.samples)))


def classify_cocycle(gamma, tol=COCYCLE_TOL, fit_modes=FIT_MODES):
    """Write a 2-cocycle as lambda D^3 + dm

    Returns (lam, m, residual): lam and mean(m) from least squares on the diagonal
    elements <sin nx, K cos nx> = pi (lam n^3 - 2 n mean(m)), the rest of m from
    K(1) = m_x, and residual the relative operator-norm estimate of K - lam D^3 - dm on
    the Fourier modes up to the largest fit mode.
    """
    defect = cocycle_residual_2(gamma)
    if defect > tol:
        raise NotACocycle(defect, tol)
    n = gamma.n
    x = grid_points(n)
    modes = np.array(fit_modes, dtype=float)
    cos_modes = np.cos(modes[:, None] * x)
    sin_modes = np.sin(modes[:, None] * x)
    diagonal = grid_inner(sin_modes, gamma.apply_array(cos_modes))
    design = np.column_stack([np.pi * modes ** 3, -2.0 * np.pi * modes])
    (lam, mean_m), *_ = np.linalg.lstsq(design, diagonal, rcond=None)

    k1 = gamma.apply_array(np.ones(n))
    m = GridFunction(mean_m + spectral_antiderivative(k1))

    remainder = gamma - TwoCochain.virasoro(n, lam) - coboundary_1(m)
    k_max = int(max(fit_modes))
    ks = np.arange(1, k_max + 1)[:, None]
    basis = np.vstack([np.ones((1, n)), np.cos(ks * x), np.sin(ks * x)])
    norms = np.sqrt(grid_inner(basis, basis))
    residual = float(np.max(np.sqrt(grid_inner(remainder.apply_array(basis), remainder.apply_array(basis))) / norms))
    size = float(np.max(np.sqrt(grid_inner(gamma.apply_array(basis), gamma.apply_array(basis))) / norms))
    residual /= max(1.0, size)
    logging.debug(f"classified cocycle: lambda = {lam:.12g}, mean(m) = {mean_m:.6g}, residual = {residual:.3e}")
    return float(lam), m, residual


def first_cohomology_witness(modes=8, n=64):
    """Functionals m in span{1, cos kx, sin kx : k <= modes} vanishing on all brackets

    Returns the dimension of that space (0 for a trivial H^1) and the smallest
    singular value of the constraint system.
    """
    x = grid_points(n)
    ks = np.arange(1, modes + 1)[:, None]
    basis = np.vstack([np.ones((1, n)), np.cos(ks * x), np.sin(ks * x)])
    i, j = np.triu_indices(basis.shape[0], k=1)
    brackets = bracket_array(basis[i], basis[j])
    system = grid_inner(brackets[:, None, :], basis[None, :, :])
    kernel = scipy.linalg.null_space(system)
    sigma = scipy.linalg.svdvals(system)
    return {'dimension': int(kernel.shape[1]), 'smallest_singular_value': float(sigma[-1])}


def cocycle_coefficient_defects(gamma):
    """Constraints every 2-cocycle meets: 2 a_0 = a_1', a_k constant for k >= 2, a_k = 0 for k >= 4"""
    a = gamma.coeffs
    a1 = a[1] if gamma.order >= 1 else np.zeros(gamma.n)
    affine = float(np.max(np.abs(2.0 * a[0] - spectral_derivative(a1))))
    nonconstant = max([float(np.ptp(a[k])) for k in range(2, gamma.order + 1)], default=0.0)
    beyond = max([float(np.max(np.abs(a[k]))) for k in range(4, gamma.order + 1)], default=0.0)
    return {'affine': affine, 'nonconstant_higher': nonconstant, 'beyond_third_order': beyond}
