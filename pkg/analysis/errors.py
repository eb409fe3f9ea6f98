"""
Exceptions raised by the analysis modules. The front end maps them to exit codes.
"""


class BihamError(Exception):
    """Base class for every error raised by the toolkit"""


class ConfigError(BihamError):
    """Invalid run configuration (flags, config file or preset)"""


class GridMismatch(BihamError):
    def __init__(self, n_left, n_right):
        super().__init__(f"grid sizes differ: {n_left} vs {n_right}")
        self.n_left = n_left
        self.n_right = n_right


class NotZeroMean(BihamError):
    def __init__(self, mean, tol):
        super().__init__(f"function has mean {mean:.3e}, outside tolerance {tol:.1e}; not in the image of D")
        self.mean = mean
        self.tol = tol


class SingularSymbol(BihamError):
    def __init__(self, n, value=0.0, what="inertia operator"):
        super().__init__(f"{what} has a vanishing symbol at wavenumber n = {n} (value {value:.3e})")
        self.n = n
        self.value = value


class NonConstantAffinePart(BihamError):
    """Inversion of m0 D + D m0 + beta D^3 is only defined for constant m0"""


class LadderBreak(BihamError):
    def __init__(self, k, mean, partial=None):
        super().__init__(f"Lenard ladder left the image of D at level {k} (mean of X_{k} = {mean:.3e})")
        self.k = k
        self.mean = mean
        self.partial = partial


class IndexOutOfRange(BihamError):
    """Requested hierarchy level is not available"""


class UnsupportedLevel(BihamError):
    """No explicit formula exists for the requested level"""


class BlowUp(BihamError):
    def __init__(self, t, peak, partial=None):
        super().__init__(f"solution exceeded the overflow guard at t = {t:.6g} (max |m| = {peak:.3e})")
        self.t = t
        self.peak = peak
        self.partial = partial


class NotACocycle(BihamError):
    def __init__(self, residual, tol):
        super().__init__(f"cochain fails the cocycle condition: residual {residual:.3e} > {tol:.1e}")
        self.residual = residual
        self.tol = tol


class NotSkew(BihamError):
    """Operator has no skew-adjoint part (e.g. a purely symmetric D^2)"""
