"""
Global configuration settings: defaults from the environment (.env honoured), an
optional key=value config file, and the resolved RunConfig for one CLI invocation.
"""
import logging
import os
from dataclasses import dataclass, replace

from dotenv import dotenv_values, load_dotenv

from analysis.errors import ConfigError
from config.presets import INERTIA_PRESETS

# Load environment variables from .env file
load_dotenv()

# Grid and time stepping
GRID_SIZE = int(os.getenv('BIHAM_N', '256'))
TIME_STEP = float(os.getenv('BIHAM_DT', '1e-3'))
STEPS = int(os.getenv('BIHAM_STEPS', '1000'))
RECORD_INTERVAL = int(os.getenv('BIHAM_RECORD_INTERVAL', '10'))
BLOWUP_GUARD = float(os.getenv('BIHAM_BLOWUP_GUARD', '1e8'))

# Hierarchy
DEPTH = int(os.getenv('BIHAM_DEPTH', '5'))
QUAD_POINTS = int(os.getenv('BIHAM_QUAD_POINTS', '32'))
TOL_MEAN = float(os.getenv('BIHAM_TOL_MEAN', '1e-8'))

# Verification
SEED = int(os.getenv('BIHAM_SEED', '42'))
TOLERANCE = float(os.getenv('BIHAM_TOL', '1e-8'))
RANDOM_MODES = int(os.getenv('BIHAM_RANDOM_MODES', '8'))

# Config file path (overridden by --config)
CONFIG_PATH = os.getenv('BIHAM_CONFIG')

# Output directory for reports written through ReportStore
REPORT_DIR = os.getenv('BIHAM_REPORT_DIR', 'reports')


@dataclass(frozen=True)
class RunConfig:
    a: float = 1.0
    b: float = 0.0
    coeffs: tuple = None
    alpha: float = None
    beta: float = None
    m0: float = None
    n: int = GRID_SIZE
    dt: float = TIME_STEP
    steps: int = STEPS
    depth: int = DEPTH
    seed: int = SEED
    tol: float = TOLERANCE
    tol_mean: float = TOL_MEAN
    quad_points: int = QUAD_POINTS
    record_interval: int = RECORD_INTERVAL
    filter_strength: float = None
    init: str = 'random:42'
    out: str = None
    suite: str = 'all'

    def even_coeffs(self):
        if self.coeffs is not None:
            return tuple(self.coeffs)
        return (self.a, self.b)


def _parse_coeffs(text):
    if isinstance(text, str) and text.strip().lower() in INERTIA_PRESETS:
        return INERTIA_PRESETS[text.strip().lower()]
    if isinstance(text, (list, tuple)):
        return tuple(float(c) for c in text)
    parts = [p for p in str(text).replace(';', ',').split(',') if p.strip()]
    if not parts:
        raise ConfigError("coeffs must list at least one coefficient")
    return tuple(float(p) for p in parts)


_CASTS = {
    'a': float, 'b': float, 'alpha': float, 'beta': float, 'm0': float,
    'n': int, 'dt': float, 'steps': int, 'depth': int, 'seed': int,
    'tol': float, 'tol_mean': float, 'quad_points': int, 'record_interval': int,
    'filter_strength': float, 'coeffs': _parse_coeffs, 'init': str, 'out': str, 'suite': str,
}


def _cast(key, value):
    try:
        return _CASTS[key](value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid value {value!r} for {key}: {e}") from e


def read_config_file(path):
    """key=value lines (comments with #); unknown keys are a ConfigError"""
    if not os.path.exists(path):
        raise ConfigError(f"config file {path} not found")
    values = {}
    for key, value in dotenv_values(path).items():
        name = key.strip().lower().replace('-', '_')
        if name not in _CASTS:
            raise ConfigError(f"unknown key {key!r} in config file {path}")
        if value is None or value == '':
            continue
        values[name] = _cast(name, value)
    logging.info(f"Loaded {len(values)} settings from {path}")
    return values


def resolve_config(cli_values, config_path=None):
    """CLI flags > config file > environment defaults"""
    config = RunConfig()
    path = config_path or CONFIG_PATH
    if path:
        config = replace(config, **read_config_file(path))
    overrides = {k: _cast(k, v) for k, v in cli_values.items() if v is not None and k in _CASTS}
    config = replace(config, **overrides)
    validate(config)
    return config


def validate(config):
    if config.n < 16 or config.n & (config.n - 1):
        raise ConfigError(f"n must be a power of two >= 16, got {config.n}")
    if config.dt <= 0:
        raise ConfigError(f"dt must be positive, got {config.dt}")
    if config.steps < 0:
        raise ConfigError(f"steps must be >= 0, got {config.steps}")
    if config.depth < 1:
        raise ConfigError(f"depth must be >= 1, got {config.depth}")
    if config.record_interval < 1:
        raise ConfigError(f"record_interval must be >= 1, got {config.record_interval}")
    if config.quad_points < 1:
        raise ConfigError(f"quad_points must be >= 1, got {config.quad_points}")
    return config
