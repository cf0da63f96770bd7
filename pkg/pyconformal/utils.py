#!/usr/bin/env python3
"""
pyconformal Utilities

Shared tolerances, array validation helpers and diagnostics for the
pyconformal library.
"""

import os
import sys
from typing import Optional, Sequence, Set, Tuple

import numpy as np

from .exceptions import ConformalDataError

# Absolute tolerance for equality and monotonicity comparisons
TOL = 1e-12

_emitted: Set[str] = set()


def as_float_array(values: Sequence[float], name: str, allow_empty: bool = False) -> np.ndarray:
    """Convert to a 1-D float array, requiring finite entries"""
    array = np.asarray(values, dtype=float)
    if array.ndim == 0:
        array = array.reshape(1)
    if array.ndim != 1:
        raise ConformalDataError(f"{name} must be one-dimensional")
    if not allow_empty and array.size == 0:
        raise ConformalDataError(f"{name} must not be empty")
    if not np.all(np.isfinite(array)):
        raise ConformalDataError(f"{name} must contain finite values only")
    return array


def as_weight_array(weights: Optional[Sequence[float]], size: int, positive: bool = False) -> np.ndarray:
    """Validate a weight vector, defaulting to unit weights"""
    if weights is None:
        return np.ones(size)
    array = as_float_array(weights, 'weights', allow_empty=size == 0)
    if array.size != size:
        raise ConformalDataError(f"weights has length {array.size}, expected {size}")
    if positive and np.any(array <= 0):
        raise ConformalDataError("weights must be positive")
    if np.any(array < 0):
        raise ConformalDataError("weights must be nonnegative")
    return array


def check_same_length(first: np.ndarray, second: np.ndarray, names: Tuple[str, str]) -> None:
    """Raise when two arrays do not line up"""
    if first.shape[0] != second.shape[0]:
        raise ConformalDataError(
            f"{names[0]} and {names[1]} differ in length ({first.shape[0]} != {second.shape[0]})")


def snap_probabilities(values: np.ndarray) -> np.ndarray:
    """Clip to [0, 1] and snap values within TOL of the ends"""
    values = np.clip(values, 0.0, 1.0)
    values[values > 1.0 - TOL] = 1.0
    values[values < TOL] = 0.0
    return values


def emit_diagnostic(message: str, once: bool = True) -> None:
    """Print one non-fatal diagnostic line to stderr.

    Suppress with ``CONFORMAL_NO_DIAG=1`` in the environment. With ``once``
    a given message is printed a single time per process.
    """
    if os.environ.get('CONFORMAL_NO_DIAG'):
        return
    if once:
        if message in _emitted:
            return
        _emitted.add(message)
    print(f"⚠️ {message}", file=sys.stderr)


def reset_diagnostics() -> None:
    """Forget which diagnostics were already printed"""
    _emitted.clear()
