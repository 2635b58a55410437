"""Argument checks shared by the estimators and the CLI."""

import numbers

import numpy as np
from sklearn.utils import check_array

from .exceptions import ConfigError


def check_positive(value, name, allow_zero=False):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if not np.isfinite(value) or value < 0 or (value == 0 and not allow_zero):
        bound = ">= 0" if allow_zero else "> 0"
        raise ConfigError(f"{name} must be finite and {bound}, got {value!r}")
    return value


def check_int(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(f"{name} must be >= {minimum}, got {value!r}")
    return int(value)


def check_stretches(X):
    """Accept a scalar, 1-d list or ``(n, 1)`` array of stretches; return 1-d."""
    arr = np.atleast_1d(np.asarray(X, dtype=float))
    if arr.ndim == 1:
        arr = arr[:, None]
    arr = check_array(arr, ensure_2d=True, dtype=float)
    if arr.shape[1] != 1:
        raise ValueError(f"expected a single stretch column, got shape {arr.shape}")
    lam = arr[:, 0]
    if np.any(lam <= 0):
        raise ValueError("stretches must be positive")
    return lam
