"""
Spectral calculus on smooth periodic functions sampled on [0, 2*pi).

Array kernels act along the last axis so that batches of probes and polynomial
jets broadcast; the GridFunction-level operations wrap them for single functions.
"""
import math
from dataclasses import dataclass

import numpy as np

from analysis.errors import GridMismatch, NotZeroMean

TWO_PI = 2.0 * np.pi
DEFAULT_TOL_MEAN = 1e-10


def _check_grid_size(n):
    if n < 16 or n & (n - 1):
        raise ValueError(f"grid size must be a power of two >= 16, got {n}")


def grid_points(n):
    """Uniform nodes x_j = 2*pi*j/n"""
    _check_grid_size(n)
    return TWO_PI * np.arange(n) / n


def wavenumbers(n):
    """Non-negative wavenumbers of the real FFT, 0..n/2"""
    return np.arange(n // 2 + 1, dtype=float)


def spectral_derivative(samples, order=1):
    n = samples.shape[-1]
    if order == 0:
        return np.array(samples, dtype=float)
    coeffs = np.fft.rfft(samples, axis=-1)
    multiplier = (1j * wavenumbers(n)) ** order
    if order % 2:
        # odd derivatives of the Nyquist cosine are not representable on the grid
        multiplier[-1] = 0.0
    return np.fft.irfft(coeffs * multiplier, n=n, axis=-1)


def spectral_antiderivative(samples):
    """Zero-mean primitive of the non-constant part of samples"""
    n = samples.shape[-1]
    coeffs = np.fft.rfft(samples, axis=-1)
    k = wavenumbers(n)
    k[0] = 1.0
    inverse = 1.0 / (1j * k)
    inverse[0] = 0.0
    inverse[-1] = 0.0
    return np.fft.irfft(coeffs * inverse, n=n, axis=-1)


def _pad(coeffs, n, m):
    """Zero-pad half-spectra of an n-point grid onto an m-point grid, Nyquist dropped"""
    padded = np.zeros(coeffs.shape[:-1] + (m // 2 + 1,), dtype=complex)
    padded[..., : n // 2] = coeffs[..., : n // 2]
    return padded


def oversample(samples, m):
    """Trigonometric interpolation of samples onto an m-point grid (m >= n)"""
    n = samples.shape[-1]
    coeffs = np.fft.rfft(samples, axis=-1)
    return np.fft.irfft(_pad(coeffs, n, m), n=m, axis=-1) * (m / n)


def dealiased_product(a, b):
    """Pointwise product with the 3/2 padding rule (equivalent to 2/3 truncation)"""
    n = a.shape[-1]
    if b.shape[-1] != n:
        raise GridMismatch(n, b.shape[-1])
    m = 3 * n // 2
    fine = oversample(a, m) * oversample(b, m)
    coeffs = np.fft.rfft(fine, axis=-1)[..., : n // 2 + 1] * (n / m)
    coeffs[..., -1] = 0.0
    return np.fft.irfft(coeffs, n=n, axis=-1)


def grid_mean(samples):
    return np.mean(samples, axis=-1)


def grid_inner(a, b):
    """L2 pairing on [0, 2*pi) by Parseval (the mean of the dealiased product)"""
    n = a.shape[-1]
    if b.shape[-1] != n:
        raise GridMismatch(n, b.shape[-1])
    ca = np.fft.rfft(a, axis=-1) / n
    cb = np.fft.rfft(b, axis=-1) / n
    total = ca[..., 0].real * cb[..., 0].real
    total = total + 2.0 * np.sum((ca[..., 1 : n // 2] * np.conj(cb[..., 1 : n // 2])).real, axis=-1)
    return TWO_PI * total


def product_integral(*arrays):
    """Integral of a product of several factors, evaluated on an oversampled grid"""
    n = arrays[0].shape[-1]
    for a in arrays[1:]:
        if a.shape[-1] != n:
            raise GridMismatch(n, a.shape[-1])
    m = n * max(2, math.ceil(len(arrays) / 2))
    fine = oversample(arrays[0], m)
    for a in arrays[1:]:
        fine = fine * oversample(a, m)
    return TWO_PI * np.mean(fine, axis=-1)


def filter_array(samples, strength=36.0, order=36):
    """Exponential low-pass filter sigma(k) = exp(-strength (k/kmax)^order)"""
    n = samples.shape[-1]
    k = wavenumbers(n)
    sigma = np.exp(-strength * (k / k[-1]) ** order)
    return np.fft.irfft(np.fft.rfft(samples, axis=-1) * sigma, n=n, axis=-1)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real periodic function sampled at x_j = 2*pi*j/N"""
    samples: np.ndarray

    def __post_init__(self):
        samples = np.array(self.samples, dtype=float)
        if samples.ndim != 1:
            raise ValueError(f"samples must be one-dimensional, got shape {samples.shape}")
        _check_grid_size(samples.size)
        samples.setflags(write=False)
        object.__setattr__(self, 'samples', samples)

    @property
    def n(self):
        return self.samples.size

    @property
    def x(self):
        return grid_points(self.n)

    def mean(self):
        return float(np.mean(self.samples))

    def max_abs(self):
        return float(np.max(np.abs(self.samples)))

    def is_finite(self):
        return bool(np.all(np.isfinite(self.samples)))

    def _same_grid(self, other):
        if other.n != self.n:
            raise GridMismatch(self.n, other.n)

    def __add__(self, other):
        if isinstance(other, GridFunction):
            self._same_grid(other)
            return GridFunction(self.samples + other.samples)
        return GridFunction(self.samples + float(other))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, GridFunction):
            self._same_grid(other)
            return GridFunction(self.samples - other.samples)
        return GridFunction(self.samples - float(other))

    def __rsub__(self, other):
        return GridFunction(float(other) - self.samples)

    def __neg__(self):
        return GridFunction(-self.samples)

    def __mul__(self, other):
        if isinstance(other, GridFunction):
            return multiply(self, other)
        return GridFunction(self.samples * float(other))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return GridFunction(self.samples / float(scalar))

    def __repr__(self):
        return f"GridFunction(n={self.n}, mean={self.mean():.6g}, max|f|={self.max_abs():.6g})"


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Complex Fourier coefficients indexed by wavenumber -N/2+1 .. N/2"""
    coeffs: np.ndarray

    @property
    def n(self):
        return self.coeffs.size

    @property
    def wavenumbers(self):
        return np.arange(-self.n // 2 + 1, self.n // 2 + 1)

    def coefficient(self, k):
        return complex(self.coeffs[k + self.n // 2 - 1])


def spectrum(f):
    """c_k with f(x) = sum_k c_k exp(i k x); Nyquist coefficient kept real"""
    n = f.n
    full = np.fft.fft(f.samples) / n
    ordered = np.concatenate([full[n // 2 + 1:], full[: n // 2 + 1]])
    ordered[-1] = ordered[-1].real
    return Spectrum(ordered)


def from_spectrum(spec):
    n = spec.n
    ordered = np.asarray(spec.coeffs, dtype=complex)
    full = np.concatenate([ordered[n // 2 - 1:], ordered[: n // 2 - 1]])
    return GridFunction(np.fft.ifft(full * n).real)


def from_function(func, n):
    """Sample a vectorised callable on the n-point grid"""
    x = grid_points(n)
    return GridFunction(np.broadcast_to(np.asarray(func(x), dtype=float), x.shape))


def constant(value, n):
    return GridFunction(np.full(n, float(value)))


def random_band_limited(n, seed, modes=8, amplitude=1.0):
    """sum_{k=1..modes} a_k cos kx + b_k sin kx with a_k, b_k ~ U[-1, 1]; zero mean"""
    rng = np.random.default_rng(seed)
    a = rng.uniform(-1.0, 1.0, modes)
    b = rng.uniform(-1.0, 1.0, modes)
    x = grid_points(n)
    k = np.arange(1, modes + 1)[:, None]
    samples = a @ np.cos(k * x) + b @ np.sin(k * x)
    return GridFunction(amplitude * samples)


def random_batch(n, count, seed, modes=8):
    """count independent band-limited probes as an array of shape (count, n)"""
    rng = np.random.default_rng(seed)
    x = grid_points(n)
    k = np.arange(1, modes + 1)[:, None]
    a = rng.uniform(-1.0, 1.0, (count, modes))
    b = rng.uniform(-1.0, 1.0, (count, modes))
    return a @ np.cos(k * x) + b @ np.sin(k * x)


def derivative(f, order=1):
    return GridFunction(spectral_derivative(f.samples, order))


def antiderivative_zero_mean(f, tol_mean=DEFAULT_TOL_MEAN):
    """D^{-1} on zero-mean functions: the primitive with zero integral"""
    mean = f.mean()
    if abs(mean) > tol_mean:
        raise NotZeroMean(mean, tol_mean)
    return GridFunction(spectral_antiderivative(f.samples))


def integral(f):
    return TWO_PI * f.mean()


def multiply(f, g):
    if f.n != g.n:
        raise GridMismatch(f.n, g.n)
    return GridFunction(dealiased_product(f.samples, g.samples))


def l2_inner(f, g):
    if f.n != g.n:
        raise GridMismatch(f.n, g.n)
    return float(grid_inner(f.samples, g.samples))


def l2_norm(f):
    return math.sqrt(max(l2_inner(f, f), 0.0))


def integral_of_product(*fs):
    return float(product_integral(*(f.samples for f in fs)))


def exponential_filter(f, strength=36.0, order=36):
    return GridFunction(filter_array(f.samples, strength, order))
