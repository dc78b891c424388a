"""Input checking shared by the public functions and estimators."""

import numbers

import numpy as np

from .exceptions import NonFiniteInputError


def check_finite(a, name="array"):
    a = np.asarray(a)
    if not np.all(np.isfinite(a)):
        raise NonFiniteInputError(f"{name} contains non-finite entries")
    return a


def check_positive(value, name):
    if not isinstance(value, numbers.Real) or not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be a positive finite number, got {value!r}")
    return float(value)


def check_nonnegative(value, name):
    if not isinstance(value, numbers.Real) or not np.isfinite(value) or value < 0:
        raise ValueError(f"{name} must be a non-negative finite number, got {value!r}")
    return float(value)


def check_int(value, name, minimum):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def check_state_batch(X, dim=4):
    """Coerce initial states to a complex array of shape (n_samples, dim).

    A single state of shape (dim,) is promoted to a batch of one.
    """
    X = np.asarray(X, dtype=complex)
    if X.ndim == 1:
        X = X[np.newaxis, :]
    if X.ndim != 2 or X.shape[1] != dim:
        raise ValueError(f"expected states of shape (n_samples, {dim}), got {X.shape}")
    return check_finite(X, "initial states")
