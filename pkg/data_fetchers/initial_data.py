import logging

import numpy as np

from analysis.circle_fourier import GridFunction, constant, from_function, random_band_limited
from analysis.errors import ConfigError
from config.settings import RANDOM_MODES
from utils.report_store import read_grid_function

SOURCES = ('zero', 'cosine', 'random', 'file')


def parse_init(text):
    """Split 'kind:argument' into (kind, argument)"""
    kind, _, argument = str(text).partition(':')
    kind = kind.strip().lower()
    if kind not in SOURCES:
        raise ConfigError(f"unknown initial data source {text!r}; expected zero|cosine:amp|random:seed|file:path")
    if kind != 'zero' and not argument:
        raise ConfigError(f"initial data source {kind!r} needs an argument, e.g. {kind}:...")
    return kind, argument


def get_initial_velocity(text, n, modes=RANDOM_MODES):
    """Initial velocity u0 on the n-point grid from an --init source"""
    kind, argument = parse_init(text)
    try:
        if kind == 'zero':
            u = constant(0.0, n)
        elif kind == 'cosine':
            amplitude = float(argument)
            u = from_function(lambda x: amplitude * np.cos(x), n)
        elif kind == 'random':
            u = random_band_limited(n, int(argument), modes=modes)
        else:
            u = read_grid_function(argument)
            if u.n != n:
                logging.info(f"Initial data in {argument} has n = {u.n}; using that grid instead of {n}")
    except ConfigError:
        raise
    except (ValueError, OSError) as e:
        raise ConfigError(f"cannot build initial data from {text!r}: {e}") from e
    logging.info(f"Initial velocity from {kind}: n = {u.n}, max|u| = {u.max_abs():.6g}")
    return u


def get_initial_momentum(text, A, n, modes=RANDOM_MODES):
    """m0 = A u0"""
    u = get_initial_velocity(text, n, modes)
    return GridFunction(A.apply_array(u.samples))
