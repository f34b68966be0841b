"""Small input validation helpers shared by the estimators and config loader."""

import math

import numpy as np

from .exceptions import ConfigurationError


def check_positive(value, name, *, allow_zero=False):
    value = float(value)
    if not math.isfinite(value) or value < 0 or (value == 0 and not allow_zero):
        bound = ">= 0" if allow_zero else "> 0"
        raise ConfigurationError(f"must be finite and {bound}, got {value!r}", name)
    return value


def check_interval(value, name, low, high, *, closed_low=False, closed_high=False):
    """Check ``value`` lies in the interval (low, high) with optional closed ends."""
    value = float(value)
    ok_low = value >= low if closed_low else value > low
    ok_high = value <= high if closed_high else value < high
    if not (math.isfinite(value) and ok_low and ok_high):
        lo = "[" if closed_low else "("
        hi = "]" if closed_high else ")"
        raise ConfigurationError(f"must lie in {lo}{low}, {high}{hi}, got {value!r}", name)
    return value


def check_vector(value, name, size=2):
    arr = np.asarray(value, dtype=float)
    if arr.shape != (size,) or not np.all(np.isfinite(arr)):
        raise ConfigurationError(f"expected {size} finite numbers, got {value!r}", name)
    return arr.copy()


def check_matrix(value, name, size=2, *, positive_definite=False, psd=False):
    """Validate a square symmetric matrix, optionally checking (semi)definiteness."""
    arr = np.asarray(value, dtype=float)
    if arr.shape != (size, size) or not np.all(np.isfinite(arr)):
        raise ConfigurationError(f"expected a {size}x{size} finite matrix, got {value!r}", name)
    if positive_definite or psd:
        if not np.allclose(arr, arr.T, rtol=1e-12, atol=0.0):
            raise ConfigurationError("matrix must be symmetric", name)
        eig = np.linalg.eigvalsh(arr)
        if positive_definite and eig.min() <= 0:
            raise ConfigurationError("matrix must be positive definite", name)
        if psd and eig.min() < -1e-12 * max(1.0, abs(eig.max())):
            raise ConfigurationError("matrix must be positive semi-definite", name)
    return arr.copy()


def as_current_column(X):
    """Coerce regression input to a 1-D array of injected currents.

    Accepts a vector of currents or an ``(n, 1)`` array, the sklearn layout.
    """
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise ValueError(f"expected a single current feature, got shape {arr.shape}")
        arr = arr[:, 0]
    elif arr.ndim != 1:
        raise ValueError(f"expected 1-D or (n, 1) input, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("input contains NaN or infinity")
    return arr


def design_matrix(currents):
    """Stack the ``[1, Ij]`` regressor rows for an array of currents."""
    currents = np.asarray(currents, dtype=float)
    return np.column_stack([np.ones_like(currents), currents])
