"""Input validation helpers shared by the functional API and the estimators."""

import numpy as np
from sklearn.utils import check_array

from .exceptions import ConfigurationError, DataError, EmptyInputError


def check_samples(x, name="samples"):
    """Return ``x`` as a finite 1-D float64 array."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise DataError(f"{name} must be one-dimensional, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise DataError(f"{name} contains NaN or Inf")
    return x


def check_frames(X, name="frames"):
    """2-D (n_frames, frame_len) float64 array, all finite."""
    try:
        return check_array(X, dtype=np.float64, ensure_2d=True, input_name=name)
    except ValueError as exc:
        raise DataError(str(exc)) from None


def check_cepstra(C, n_coeffs=None):
    """Cepstral matrix of shape (n_frames, D + 1); column 0 holds c_0."""
    C = np.asarray(C, dtype=np.float64)
    if C.ndim == 1:
        C = C[np.newaxis, :]
    if C.ndim != 2 or C.shape[1] < 2:
        raise ConfigurationError(f"cepstra must have shape (n, D+1) with D >= 1, got {C.shape}")
    if n_coeffs is not None and C.shape[1] != n_coeffs + 1:
        raise ConfigurationError(
            f"cepstra carry D={C.shape[1] - 1} coefficients, expected D={n_coeffs}"
        )
    if not np.all(np.isfinite(C)):
        raise DataError("cepstra contain NaN or Inf")
    return C


def check_scores(v, name="scores"):
    """Column vector or 1-D array of scores, flattened to 1-D."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim == 2 and v.shape[1] == 1:
        v = v[:, 0]
    if v.ndim != 1:
        raise DataError(f"{name} must be 1-D or a single column, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise DataError(f"{name} contain NaN or Inf")
    return v


def check_consistent_length(*arrays):
    lengths = {len(a) for a in arrays if a is not None}
    if len(lengths) > 1:
        raise DataError(f"inconsistent input lengths: {sorted(lengths)}")


def check_nonempty(x, name):
    if len(x) == 0:
        raise EmptyInputError(f"{name} is empty")
