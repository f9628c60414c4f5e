"""Input validation helpers shared by the evaluators and estimators."""

import numbers

import numpy as np


def check_finite_scalar(value, name, *, minimum=None, strict=False):
    """Return ``value`` as a float, raising ``ValueError`` if it is not finite
    or violates the lower bound."""
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise TypeError(f"{name} must be a real number, got {type(value).__name__}")
    value = float(value)
    if not np.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value}")
    if minimum is not None:
        if strict and value <= minimum:
            raise ValueError(f"{name} must be > {minimum}, got {value}")
        if not strict and value < minimum:
            raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_complex_vector(h, name, *, length=None):
    h = np.asarray(h, dtype=complex)
    if h.ndim == 0:
        h = h.reshape(1)
    if h.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {h.shape}")
    if h.size == 0:
        raise ValueError(f"{name} must not be empty")
    if not np.all(np.isfinite(h)):
        raise ValueError(f"{name} contains non-finite entries")
    if length is not None and h.size != length:
        raise ValueError(f"{name} has length {h.size}, expected {length}")
    return h


def check_complex_matrix(h, name, *, shape=None):
    h = np.asarray(h, dtype=complex)
    if h.ndim == 1:
        h = h.reshape(1, -1)
    if h.ndim != 2 or min(h.shape) < 1:
        raise ValueError(f"{name} must be a non-empty 2-D matrix, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise ValueError(f"{name} contains non-finite entries")
    if shape is not None and h.shape != tuple(shape):
        raise ValueError(f"{name} has shape {h.shape}, expected {tuple(shape)}")
    return h


def check_unit_vector(u, name, *, tol=1e-9):
    u = np.asarray(u, dtype=float).reshape(-1)
    if u.size != 3:
        raise ValueError(f"{name} must have 3 components")
    norm = np.linalg.norm(u)
    if not np.isfinite(norm) or norm == 0.0:
        raise ValueError(f"{name} must be a non-zero finite vector")
    if abs(norm - 1.0) > tol:
        raise ValueError(f"{name} must have unit norm (|u| = {norm})")
    return u


def check_random_state(seed):
    """Turn ``seed`` into a ``numpy.random.Generator``."""
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None or isinstance(seed, (numbers.Integral, np.random.SeedSequence)):
        return np.random.default_rng(seed)
    raise TypeError(f"cannot seed a Generator from {seed!r}")
