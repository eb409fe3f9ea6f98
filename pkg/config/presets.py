"""
Named constant tables: inertia operators, the classification scan lattice and the
verification suites
"""

# Even coefficients (a_0, a_2, a_4, ...) of A = sum a_{2j} D^{2j}
INERTIA_PRESETS = {
    'burgers': (1.0,),             # A = I
    'camassa_holm': (1.0, -1.0),   # A = I - D^2
    'hunter_saxton_like': (0.0, -1.0),  # A = -D^2, singular at n = 0
    'sobolev_2': (1.0, -1.0, 1.0),  # A_2 = 1 - D^2 + D^4
    'sobolev_3': (1.0, -1.0, 1.0, -1.0),
    'order_4_witness': (1.0, 0.0, 1.0),  # A = I + D^4
}

# Coefficient lattice of the admissibility scan
SCAN_LATTICE = (-2.0, -1.0, 1.0, 2.0)

SCAN_CANDIDATES = {
    0: [(a,) for a in SCAN_LATTICE],
    2: [(a, b) for a in SCAN_LATTICE for b in SCAN_LATTICE],
    4: [(a0, a2, a4) for a0 in (1.0, 2.0) for a2 in (-1.0, 0.0, 1.0) for a4 in (-1.0, 1.0)],
    6: [(1.0, a2, a4, a6) for a2 in (-1.0, 0.0) for a4 in (0.0, 1.0) for a6 in (-1.0, 1.0)],
}

# (alpha, beta) grid: 9 x 9 points on [-2, 2]^2
SCAN_ALPHA = tuple(-2.0 + 0.5 * i for i in range(9))
SCAN_BETA = tuple(-2.0 + 0.5 * i for i in range(9))
SCAN_MODES = (1, 2, 3, 4)
SCAN_GRID_SIZE = 64

CLASSIFICATION_TOL = 1e-8

VERIFY_SUITES = (
    'poisson',
    'lenard',
    'involution',
    'classification',
    'cohomology',
    'flow',
)

# Gradient-symmetry residual above which a field is not a gradient; true gradients sit
# at finite-difference round-off (~1e-10)
NOT_GRADIENT_TOL = 1e-6
