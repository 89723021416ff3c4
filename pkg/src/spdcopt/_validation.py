"""Small input-validation helpers used across the package."""

import math

import numpy as np
from sklearn.utils.validation import check_array

from .exceptions import DomainError


def _as_array(value):
    return np.asarray(value, dtype=float)


def check_finite(name, value):
    arr = _as_array(value)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


def check_positive(name, value):
    arr = _as_array(value)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError(f"{name} must be strictly positive and finite, got {value!r}")
    return value


def check_nonnegative(name, value):
    arr = _as_array(value)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise DomainError(f"{name} must be non-negative and finite, got {value!r}")
    return value


def check_nonzero(name, value):
    arr = _as_array(value)
    if not np.all(np.isfinite(arr)) or np.any(arr == 0):
        raise DomainError(f"{name} must be non-zero and finite, got {value!r}")
    return value


def check_negative(name, value):
    arr = _as_array(value)
    if not np.all(np.isfinite(arr)) or np.any(arr >= 0):
        raise DomainError(f"{name} must be strictly negative, got {value!r}")
    return value


def check_probability(name, value):
    arr = _as_array(value)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0) or np.any(arr > 1):
        raise DomainError(f"{name} must lie in [0, 1], got {value!r}")
    return value


def check_interval(name, value, lo, hi, *, closed=(True, True)):
    """Raise unless ``lo <= value <= hi`` (ends open or closed per ``closed``)."""
    arr = _as_array(value)
    lo_ok = arr >= lo if closed[0] else arr > lo
    hi_ok = arr <= hi if closed[1] else arr < hi
    if not np.all(np.isfinite(arr)) or not np.all(lo_ok & hi_ok):
        left = "[" if closed[0] else "("
        right = "]" if closed[1] else ")"
        raise DomainError(f"{name} must lie in {left}{lo}, {hi}{right}, got {value!r}")
    return value


def check_bracket(lo, hi):
    if not (math.isfinite(lo) and math.isfinite(hi)) or not 0 < lo < hi:
        raise DomainError(f"need 0 < lo < hi, got lo={lo!r}, hi={hi!r}")


def check_feature_matrix(X, n_features, *, names=None):
    """Validate an (n_samples, n_features) float matrix for the estimator layer."""
    X = check_array(X, dtype=float, ensure_2d=True)
    if X.shape[1] != n_features:
        cols = f" ({', '.join(names)})" if names else ""
        raise ValueError(f"expected {n_features} columns{cols}, got {X.shape[1]}")
    return X
