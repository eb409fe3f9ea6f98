import json
import math
import os
import logging

import numpy as np
import pandas as pd

from analysis.circle_fourier import GridFunction


def _clean(value):
    """Plain Python containers with non-finite floats replaced by None"""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return _clean(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, GridFunction):
        return grid_function_to_dict(value)
    return value


def dumps(data):
    """JSON text with floats at 17 significant digits and insertion-ordered keys"""
    return _encode(_clean(data), 0) + "\n"


def _encode(value, level):
    # json.dumps(indent=2) layout, except floats and flat lists
    if isinstance(value, float):
        text = format(value, '.17g')
        return text + '.0' if text.lstrip('-').isdigit() else text
    pad = '\n' + '  ' * (level + 1)
    if isinstance(value, list) and value:
        if any(isinstance(v, (list, dict)) for v in value):
            return '[' + ','.join(pad + _encode(v, level + 1) for v in value) + pad[:-2] + ']'
        return '[' + ', '.join(_encode(v, level + 1) for v in value) + ']'
    if isinstance(value, dict) and value:
        items = (pad + json.dumps(k) + ': ' + _encode(v, level + 1) for k, v in value.items())
        return '{' + ','.join(items) + pad[:-2] + '}'
    return json.dumps(value)


def grid_function_to_dict(f):
    return {'n': f.n, 'samples': f.samples.tolist()}


def grid_function_from_dict(data):
    samples = np.asarray(data['samples'], dtype=float)
    if 'n' in data and int(data['n']) != samples.size:
        raise ValueError(f"declared n = {data['n']} but {samples.size} samples given")
    return GridFunction(samples)


def read_grid_function(path):
    """GridFunction from JSON {"n", "samples"} or CSV with one sample per line"""
    if path.endswith('.json'):
        with open(path, 'r') as f:
            return grid_function_from_dict(json.load(f))
    frame = pd.read_csv(path, header=None, comment='#', float_precision='round_trip')
    column = frame.iloc[:, -1]
    bad = pd.to_numeric(column, errors='coerce').isna()
    if bad.any():
        row = int(bad.idxmax())
        raise ValueError(f"{path}: sample {row + 1} ({column.iloc[row]!r}) is not a number")
    return GridFunction(column.to_numpy(dtype=float))


def write_grid_function_csv(path, f):
    pd.Series(f.samples).to_csv(path, index=False, header=False, float_format='%.17g')


class ReportStore:
    def __init__(self, report_dir="reports"):
        self.report_dir = report_dir
        if not os.path.exists(report_dir):
            os.makedirs(report_dir)

    def path(self, key, suffix='.json'):
        return os.path.join(self.report_dir, f"{key}{suffix}")

    def set(self, key, data):
        """Write a report with deterministic float formatting"""
        return write_json(self.path(key), data)


def write_json(path, data):
    directory = os.path.dirname(path)
    if directory and not os.path.exists(directory):
        os.makedirs(directory)
    with open(path, 'w') as f:
        f.write(dumps(data))
    logging.info(f"Wrote {path}")
    return path


def write_csv(path, frame):
    directory = os.path.dirname(path)
    if directory and not os.path.exists(directory):
        os.makedirs(directory)
    frame.to_csv(path, index=False, float_format='%.17g')
    logging.info(f"Wrote {len(frame)} rows to {path}")
    return path
