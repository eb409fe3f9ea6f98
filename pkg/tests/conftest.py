import os

import hypothesis
import numpy as np
import pytest
from hypothesis import strategies as st

from analysis.circle_fourier import GridFunction, grid_points, random_band_limited
from analysis.lie_ops import InertiaOperator

np.seterr(all="warn")

hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=100, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "fast"))


# Fourier coefficients (a_1..a_4, b_1..b_4) of a band-limited zero-mean function
coefficient_vectors = st.lists(
    st.floats(min_value=-1.0, max_value=1.0, allow_nan=False, allow_infinity=False),
    min_size=8,
    max_size=8,
)


def band_limited(coeffs, n=64, mean=0.0):
    x = grid_points(n)
    k = np.arange(1, 5)[:, None]
    a, b = np.asarray(coeffs[:4]), np.asarray(coeffs[4:])
    return GridFunction(mean + a @ np.cos(k * x) + b @ np.sin(k * x))


@pytest.fixture
def x64():
    return grid_points(64)


@pytest.fixture
def burgers():
    return InertiaOperator((1.0,))


@pytest.fixture
def camassa_holm():
    return InertiaOperator((1.0, -1.0))


@pytest.fixture
def base_point():
    """Generic positive-mean state on the 128-point grid"""
    return random_band_limited(128, 42, amplitude=0.5) + 0.5
