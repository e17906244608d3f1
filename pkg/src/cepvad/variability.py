"""Cepstral variability scores V1, V2 and V2N.

All scores skip c_0.  Cepstra are passed as arrays whose last axis holds
c_0..c_D, so a single vector and an (n_frames, D + 1) matrix both work.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_cepstra
from .exceptions import ConfigurationError, DataError, EmptyInputError


class ScoreKind(str, enum.Enum):
    V1 = "v1"
    V2 = "v2"
    V2N = "v2n"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ConfigurationError(f"unknown score kind {value!r}; expected v1, v2 or v2n") from None


@dataclass(frozen=True)
class NoiseCepstralMeans:
    means: np.ndarray
    frames_used: int

    def __post_init__(self):
        m = np.asarray(self.means, dtype=np.float64)
        if m.ndim != 1 or not np.all(np.isfinite(m)):
            raise DataError("noise means must be a finite 1-D array")
        if self.frames_used < 1:
            raise DataError("frames_used must be >= 1")
        object.__setattr__(self, "means", m)


def _split(c, w):
    c = np.asarray(c, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 1 or not np.all(np.isfinite(w)):
        raise ConfigurationError("weights must be a finite 1-D vector")
    if c.shape[-1] != w.shape[0] + 1:
        raise ConfigurationError(
            f"dimension mismatch: cepstrum has D={c.shape[-1] - 1}, weights have D={w.shape[0]}"
        )
    return c[..., 1:], w


def score_v1(c, w):
    """sum_i w_i |c_i|; negative when negative weights dominate."""
    ci, w = _split(c, w)
    return np.abs(ci) @ w


def score_v2(c, w):
    ci, w = _split(c, w)
    return np.sqrt(np.square(ci * w).sum(axis=-1))


def score_v2n(c, w, means):
    """Weighted Euclidean distance between c_1..c_D and the noise means."""
    ci, w = _split(c, w)
    m = means.means if isinstance(means, NoiseCepstralMeans) else np.asarray(means, dtype=np.float64)
    if m.shape != w.shape:
        raise ConfigurationError(
            f"dimension mismatch: noise means have D={m.shape[0]}, weights have D={w.shape[0]}"
        )
    return np.sqrt(np.square((ci - m) * w).sum(axis=-1))


def noise_cepstral_means(noise_cepstra):
    """Per-coefficient mean of c_1..c_D over a set of noise frames."""
    C = np.asarray(noise_cepstra, dtype=np.float64)
    if C.ndim == 1:
        C = C[np.newaxis, :]
    if C.shape[0] == 0:
        raise EmptyInputError("no noise frames to average")
    C = check_cepstra(C)
    return NoiseCepstralMeans(C[:, 1:].mean(axis=0), C.shape[0])


def score(c, w, kind, means=None):
    """Dispatch to the score function for ``kind``."""
    kind = ScoreKind.parse(kind)
    if kind is ScoreKind.V1:
        return score_v1(c, w)
    if kind is ScoreKind.V2:
        return score_v2(c, w)
    if means is None:
        raise ConfigurationError("V2N scoring needs noise cepstral means")
    return score_v2n(c, w, means)


class VariabilityScore(TransformerMixin, BaseEstimator):
    """Fixed-weight variability score as a transformer.

    ``fit`` only validates; for V2N without explicit ``noise_means`` it
    averages the cepstra passed to ``fit``, so fit it on noise frames.
    """

    def __init__(self, kind="v2", weights=None, noise_means=None):
        self.kind = kind
        self.weights = weights
        self.noise_means = noise_means

    def fit(self, X, y=None):
        C = check_cepstra(X)
        d = C.shape[1] - 1
        self.kind_ = ScoreKind.parse(self.kind)
        self.weights_ = np.ones(d) if self.weights is None else np.asarray(self.weights, dtype=np.float64)
        if self.weights_.shape != (d,):
            raise ConfigurationError(f"weights must have length {d}")
        self.means_ = None
        if self.kind_ is ScoreKind.V2N:
            if self.noise_means is None:
                self.means_ = noise_cepstral_means(C)
            elif isinstance(self.noise_means, NoiseCepstralMeans):
                self.means_ = self.noise_means
            else:
                self.means_ = NoiseCepstralMeans(np.asarray(self.noise_means, dtype=np.float64), 1)
        self.n_features_in_ = C.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "weights_")
        C = check_cepstra(X, self.n_features_in_ - 1)
        return score(C, self.weights_, self.kind_, self.means_)[:, np.newaxis]
