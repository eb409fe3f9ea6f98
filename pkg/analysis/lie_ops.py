"""
Operators of the Lie algebra Vect(S^1) and its regular dual: bracket, coadjoint
action, the Lie-Poisson operator P_m = mD + Dm, constant-coefficient inertia
operators and the affine (cocycle) operators Q = m0 D + D m0 + beta D^3.
"""
from dataclasses import dataclass

import numpy as np

from analysis.circle_fourier import (
    GridFunction,
    dealiased_product,
    grid_inner,
    l2_inner,
    l2_norm,
    random_batch,
    spectral_antiderivative,
    spectral_derivative,
    wavenumbers,
)
from analysis.errors import GridMismatch, NonConstantAffinePart, NotZeroMean, SingularSymbol

SYMBOL_TOL = 1e-12
DEFAULT_TOL_MEAN = 1e-10


def _same_grid(*fs):
    n = fs[0].n
    for f in fs[1:]:
        if f.n != n:
            raise GridMismatch(n, f.n)


def bracket_array(u, v):
    return dealiased_product(u, spectral_derivative(v)) - dealiased_product(spectral_derivative(u), v)


def lie_poisson_array(m, f):
    """P_m f = m f_x + (m f)_x = 2 m f_x + m_x f"""
    return 2.0 * dealiased_product(m, spectral_derivative(f)) + dealiased_product(spectral_derivative(m), f)


def bracket(u, v):
    """[u, v] = u v_x - u_x v"""
    _same_grid(u, v)
    return GridFunction(bracket_array(u.samples, v.samples))


ad = bracket


def coadjoint(u, m):
    """ad*_u m = m u_x + (m u)_x = 2 m u_x + m_x u"""
    _same_grid(u, m)
    return GridFunction(lie_poisson_array(m.samples, u.samples))


def lie_poisson_apply(m, f):
    _same_grid(m, f)
    return GridFunction(lie_poisson_array(m.samples, f.samples))


@dataclass(frozen=True)
class InertiaOperator:
    """A = sum_j a_{2j} D^{2j}, symbol s_A(n) = sum_j a_{2j} (-1)^j n^{2j}"""
    even_coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.even_coeffs)
        if not coeffs:
            raise ValueError("an inertia operator needs at least one coefficient")
        while len(coeffs) > 1 and coeffs[-1] == 0.0:
            coeffs = coeffs[:-1]
        object.__setattr__(self, 'even_coeffs', coeffs)

    @classmethod
    def from_ab(cls, a, b):
        """A = a I + b D^2"""
        return cls((a, b))

    @classmethod
    def identity(cls):
        return cls((1.0,))

    @classmethod
    def sobolev(cls, k):
        """A_k = 1 - D^2 + ... + (-1)^k D^{2k}, the H^k inner product"""
        return cls(tuple((-1.0) ** j for j in range(k + 1)))

    @property
    def order(self):
        return 2 * (len(self.even_coeffs) - 1)

    @property
    def a(self):
        return self.even_coeffs[0]

    @property
    def b(self):
        return self.even_coeffs[1] if len(self.even_coeffs) > 1 else 0.0

    def symbol(self, n):
        n = np.asarray(n, dtype=float)
        return sum(c * (-1.0) ** j * n ** (2 * j) for j, c in enumerate(self.even_coeffs))

    def check_invertible(self, n_grid):
        """Raise SingularSymbol at the smallest |n| <= n_grid/2 where s_A vanishes"""
        k = wavenumbers(n_grid)
        values = self.symbol(k)
        bad = np.flatnonzero(np.abs(values) <= SYMBOL_TOL * max(1.0, np.max(np.abs(self.even_coeffs))))
        if bad.size:
            n = int(k[bad[0]])
            raise SingularSymbol(n, float(values[bad[0]]))
        return True

    def apply_array(self, u):
        n = u.shape[-1]
        return np.fft.irfft(np.fft.rfft(u, axis=-1) * self.symbol(wavenumbers(n)), n=n, axis=-1)

    def invert_array(self, m):
        n = m.shape[-1]
        self.check_invertible(n)
        return np.fft.irfft(np.fft.rfft(m, axis=-1) / self.symbol(wavenumbers(n)), n=n, axis=-1)

    def to_dict(self):
        return {'even_coeffs': list(self.even_coeffs)}

    @classmethod
    def from_dict(cls, data):
        return cls(tuple(data['even_coeffs']))

    def __str__(self):
        terms = [f"{c:g}D^{2 * j}" if j else f"{c:g}I" for j, c in enumerate(self.even_coeffs) if c]
        return " + ".join(terms) or "0"


def inertia_apply(A, u):
    return GridFunction(A.apply_array(u.samples))


def inertia_invert(A, m):
    return GridFunction(A.invert_array(m.samples))


def da_apply_array(A, f):
    """Q = DA for any constant-coefficient A"""
    return spectral_derivative(A.apply_array(f))


def da_invert_array(A, f):
    """Zero-mean preimage of f under DA (A^{-1} D^{-1})"""
    return A.invert_array(spectral_antiderivative(f))


@dataclass(frozen=True, eq=False)
class CocycleOperator:
    """Q = m0 D + D m0 + beta D^3; m0 is a constant or a GridFunction"""
    m0: object
    beta: float = 0.0

    def __post_init__(self):
        if not isinstance(self.m0, GridFunction):
            object.__setattr__(self, 'm0', float(self.m0))
        object.__setattr__(self, 'beta', float(self.beta))

    @classmethod
    def from_alpha_beta(cls, alpha, beta):
        """Constant case Q = alpha D + beta D^3 (alpha = 2 m0)"""
        return cls(alpha / 2.0, beta)

    @classmethod
    def from_inertia(cls, A):
        """Q = DA = aD + bD^3 for A = aI + bD^2"""
        if A.order > 2:
            raise ValueError(f"DA is a cocycle operator only for order <= 2, got order {A.order}")
        return cls(A.a / 2.0, A.b)

    @classmethod
    def freezing(cls, m0):
        """Lie-Poisson structure frozen at m0 (the coboundary of m0)"""
        return cls(m0, 0.0)

    @property
    def is_constant(self):
        return not isinstance(self.m0, GridFunction)

    @property
    def alpha(self):
        if not self.is_constant:
            raise NonConstantAffinePart("alpha is only defined for constant m0")
        return 2.0 * self.m0

    def symbol(self, n):
        """Q e^{inx} = i n (alpha - beta n^2) e^{inx} for constant m0"""
        n = np.asarray(n, dtype=float)
        return 1j * n * (self.alpha - self.beta * n ** 2)

    def apply_array(self, f):
        if self.is_constant:
            n = f.shape[-1]
            multiplier = self.symbol(wavenumbers(n))
            multiplier[-1] = 0.0
            return np.fft.irfft(np.fft.rfft(f, axis=-1) * multiplier, n=n, axis=-1)
        m0 = self.m0.samples
        return lie_poisson_array(m0, f) + self.beta * spectral_derivative(f, 3)

    def invert_array(self, f, tol_mean=DEFAULT_TOL_MEAN):
        if not self.is_constant:
            raise NonConstantAffinePart("Q^{-1} is only defined for constant m0")
        mean = float(np.max(np.abs(np.mean(f, axis=-1))))
        if mean > tol_mean:
            raise NotZeroMean(mean, tol_mean)
        n = f.shape[-1]
        k = wavenumbers(n)
        values = self.symbol(k)
        bad = np.flatnonzero(np.abs(values[1:-1]) <= SYMBOL_TOL * max(1.0, abs(self.alpha), abs(self.beta)))
        if bad.size:
            raise SingularSymbol(int(k[bad[0] + 1]), 0.0, what="cocycle operator")
        values[0] = 1.0
        inverse = 1.0 / values
        inverse[0] = 0.0
        inverse[-1] = 0.0
        return np.fft.irfft(np.fft.rfft(f, axis=-1) * inverse, n=n, axis=-1)

    def to_dict(self):
        m0 = self.m0 if self.is_constant else {'n': self.m0.n, 'samples': self.m0.samples.tolist()}
        return {'m0': m0, 'beta': self.beta}

    @classmethod
    def from_dict(cls, data):
        m0 = data['m0']
        if isinstance(m0, dict):
            m0 = GridFunction(np.asarray(m0['samples'], dtype=float))
        return cls(m0, data.get('beta', 0.0))


def cocycle_apply(Q, f):
    if not Q.is_constant:
        _same_grid(Q.m0, f)
    return GridFunction(Q.apply_array(f.samples))


def cocycle_invert(Q, f, tol_mean=DEFAULT_TOL_MEAN):
    return GridFunction(Q.invert_array(f.samples, tol_mean))


def jacobi_residual(u, v, w):
    """max |[[u,v],w] + [[v,w],u] + [[w,u],v]|"""
    total = (bracket(bracket(u, v), w) + bracket(bracket(v, w), u) + bracket(bracket(w, u), v))
    return total.max_abs()


def cocycle_identity_residual(Q, n, pairs=8, seed=0):
    """Q([u,v]) = ad*_u Q(v) - ad*_v Q(u), normalized by |Q([u,v])|"""
    probes = random_batch(n, 2 * pairs, seed)
    u, v = probes[:pairs], probes[pairs:]
    lhs = Q.apply_array(bracket_array(u, v))
    rhs = lie_poisson_array(Q.apply_array(v), u) - lie_poisson_array(Q.apply_array(u), v)
    scale = max(1.0, float(np.max(np.abs(lhs))))
    return float(np.max(np.abs(lhs - rhs))) / scale


def compatibility_residual(Q, n, triples=8, seed=0):
    """Cyclic sum of gamma(u,v) = <u, Qv> over [u,v], w: the 2-cocycle condition

    Vanishing of this sum is what makes P_m + lambda Q a Poisson pencil.
    """
    probes = random_batch(n, 3 * triples, seed)
    u, v, w = probes[:triples], probes[triples:2 * triples], probes[2 * triples:]

    def gamma(a, b):
        return grid_inner(a, Q.apply_array(b))

    cyclic = gamma(bracket_array(u, v), w) + gamma(bracket_array(v, w), u) + gamma(bracket_array(w, u), v)
    scale = max(1.0, float(np.max(np.abs(gamma(bracket_array(u, v), w)))))
    return float(np.max(np.abs(cyclic))) / scale


def skew_residual(apply, n, pairs=8, seed=0):
    """max |<f, Og> + <g, Of>| / (|f| |g|) for an operator given as an array map"""
    probes = random_batch(n, 2 * pairs, seed)
    f, g = probes[:pairs], probes[pairs:]
    sym = grid_inner(f, apply(g)) + grid_inner(g, apply(f))
    norms = np.sqrt(grid_inner(f, f) * grid_inner(g, g))
    return float(np.max(np.abs(sym) / norms))


def duality_residual(u, m, v):
    """<ad*_u m, v> + <m, [u, v]>"""
    return abs(l2_inner(coadjoint(u, m), v) + l2_inner(m, bracket(u, v)))


def relative_difference(f, g):
    scale = max(l2_norm(g), 1e-300)
    return l2_norm(f - g) / scale
