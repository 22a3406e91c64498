"""Input validation helpers used by the estimator API, the CLI and the
numerical modules."""

import numbers

import numpy as np


def check_positive_int(value, name):
    """Validate that ``value`` is an integer >= 1 and return it as ``int``."""
    if not isinstance(value, numbers.Integral):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < 1:
        raise ValueError(f"{name} must be >= 1, got {value}")
    return value


def check_nonneg_int(value, name):
    if not isinstance(value, numbers.Integral):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < 0:
        raise ValueError(f"{name} must be >= 0, got {value}")
    return value


def check_real(value, name, low=None, high=None, low_open=False, high_open=False):
    """Validate a real scalar, optionally against an interval, and return it
    as ``float``.  Bounds are inclusive unless the matching ``*_open`` flag
    is set."""
    if not isinstance(value, numbers.Real) or isinstance(value, bool):
        raise ValueError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if not np.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value}")
    if low is not None and (value < low or (low_open and value == low)):
        bracket = "(" if low_open else "["
        raise ValueError(f"{name} must lie in {bracket}{low}, ...], got {value}")
    if high is not None and (value > high or (high_open and value == high)):
        bracket = ")" if high_open else "]"
        raise ValueError(f"{name} must lie in [..., {high}{bracket}, got {value}")
    return value


def as_float_array(x, name, ndim=None, shape=None):
    """Convert to a float ndarray and optionally check dimensionality/shape."""
    arr = np.asarray(x, dtype=float)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if shape is not None and arr.shape != tuple(shape):
        raise ValueError(f"{name} must have shape {tuple(shape)}, got {arr.shape}")
    return arr


def check_choice(value, name, choices):
    if value not in choices:
        raise ValueError(f"{name} must be one of {sorted(choices)}, got {value!r}")
    return value
