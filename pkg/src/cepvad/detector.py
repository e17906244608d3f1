"""Histogram-based Bayesian speech probability and SNR posterior."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_scores
from .dsp import Label
from .exceptions import ConfigurationError, DataError, FitError
from .trainer import ScoredFrames

DEFAULT_BINS = 40
DEFAULT_SMOOTHING = 0.5
DEFAULT_MARGIN = 0.05


def score_bin_edges(v, bins=DEFAULT_BINS, margin=DEFAULT_MARGIN):
    """``bins`` uniform bins over [min - margin*range, max + margin*range]."""
    if bins < 4:
        raise ConfigurationError("bins must be >= 4")
    v = check_scores(v)
    if v.size == 0:
        raise FitError("no scores to bin")
    lo, hi = float(v.min()), float(v.max())
    pad = margin * (hi - lo)
    if pad <= 0:
        pad = 0.5 * max(abs(lo), 1.0)
    return np.linspace(lo - pad, hi + pad, bins + 1)


def bin_index(edges, v):
    """Bin of each score; values outside the grid clamp to the edge bins."""
    idx = np.searchsorted(edges, np.asarray(v, dtype=np.float64), side="right") - 1
    return np.clip(idx, 0, len(edges) - 2)


def _histogram(v, edges, smoothing):
    counts = np.bincount(bin_index(edges, v), minlength=len(edges) - 1).astype(np.float64)
    return counts + smoothing


@dataclass
class DetectorModel:
    bin_edges: np.ndarray
    h_s: np.ndarray
    h_n: np.ndarray
    speech_pool_thr: float = 5.0
    noise_pool_thr: float = -5.0
    smoothing: float = DEFAULT_SMOOTHING

    def __post_init__(self):
        self.bin_edges = np.asarray(self.bin_edges, dtype=np.float64)
        self.h_s = np.asarray(self.h_s, dtype=np.float64)
        self.h_n = np.asarray(self.h_n, dtype=np.float64)
        nb = len(self.bin_edges) - 1
        if self.h_s.shape != (nb,) or self.h_n.shape != (nb,):
            raise FitError("histogram lengths must equal the number of bins")
        if np.any(np.diff(self.bin_edges) <= 0):
            raise FitError("bin edges must be strictly increasing")
        if np.any(self.h_s <= 0) or np.any(self.h_n <= 0):
            raise FitError("smoothed counts must be positive")

    @property
    def bin_centers(self):
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    @property
    def p_table(self):
        """P(speech | bin) for every bin."""
        return self.h_s / (self.h_s + self.h_n)

    def p_speech(self, v):
        p = self.p_table[bin_index(self.bin_edges, v)]
        return float(p) if np.ndim(v) == 0 else p

    def decide(self, v):
        """1 (speech) where P(speech|v) >= 0.5, else 0; ties go to speech."""
        d = np.where(np.asarray(self.p_speech(v)) >= 0.5, int(Label.SPEECH), int(Label.NONSPEECH))
        return Label(int(d)) if np.ndim(v) == 0 else d

    def to_dict(self):
        return {
            "bin_edges": [float(x) for x in self.bin_edges],
            "h_s": [float(x) for x in self.h_s],
            "h_n": [float(x) for x in self.h_n],
            "speech_pool_thr": float(self.speech_pool_thr),
            "noise_pool_thr": float(self.noise_pool_thr),
            "smoothing": float(self.smoothing),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["bin_edges"], d["h_s"], d["h_n"], float(d["speech_pool_thr"]),
                   float(d["noise_pool_thr"]), float(d["smoothing"]))


def speech_pool_mask(scores: ScoredFrames, speech_thr=5.0):
    return scores.is_speech & (scores.snr_db > speech_thr)


def noise_pool_mask(scores: ScoredFrames, noise_thr=-5.0):
    # label-agnostic: every frame below the noise threshold is noise-like
    return scores.snr_db < noise_thr


def fit_model(scores: ScoredFrames, bins=DEFAULT_BINS, speech_thr=5.0, noise_thr=-5.0,
              smoothing=DEFAULT_SMOOTHING, margin=DEFAULT_MARGIN):
    """Smoothed score histograms of the speech-like and noise-like pools.

    Speech-like: speech frames with snr > ``speech_thr``.  Noise-like: any
    frame with snr < ``noise_thr``.  Frames in between are left out.
    """
    if noise_thr > speech_thr:
        raise ConfigurationError("noise_thr must not exceed speech_thr")
    if smoothing <= 0:
        raise ConfigurationError("smoothing floor must be positive")
    s_mask = speech_pool_mask(scores, speech_thr)
    n_mask = noise_pool_mask(scores, noise_thr)
    n_s, n_n = int(s_mask.sum()), int(n_mask.sum())
    if n_s == 0 or n_n == 0:
        raise FitError(f"empty pool: {n_s} speech-like and {n_n} noise-like frames")
    edges = score_bin_edges(scores.v, bins, margin)
    return DetectorModel(edges, _histogram(scores.v[s_mask], edges, smoothing),
                         _histogram(scores.v[n_mask], edges, smoothing),
                         float(speech_thr), float(noise_thr), float(smoothing))


def p_speech(model: DetectorModel, v):
    return model.p_speech(v)


def decide(model: DetectorModel, v):
    return model.decide(v)


@dataclass
class SnrPosteriorModel:
    snr_levels: np.ndarray
    bin_edges: np.ndarray
    hist: np.ndarray  # (n_levels, n_bins)

    def __post_init__(self):
        self.snr_levels = np.asarray(self.snr_levels, dtype=np.float64)
        self.bin_edges = np.asarray(self.bin_edges, dtype=np.float64)
        self.hist = np.asarray(self.hist, dtype=np.float64)
        if self.hist.shape != (len(self.snr_levels), len(self.bin_edges) - 1):
            raise FitError("posterior histogram shape does not match levels x bins")
        if np.any(self.hist <= 0):
            raise FitError("smoothed counts must be positive")

    @property
    def bin_centers(self):
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    @property
    def table(self):
        """P(SNR = level | bin), shape (n_levels, n_bins); columns sum to 1."""
        return self.hist / self.hist.sum(axis=0, keepdims=True)

    def posterior(self, v):
        """P(SNR = level | v); shape (n_levels,) for scalar v, else (n, n_levels)."""
        cols = self.table[:, bin_index(self.bin_edges, v)]
        return cols if np.ndim(v) == 0 else cols.T

    def mode(self, v):
        post = self.posterior(v)
        return self.snr_levels[np.argmax(post, axis=-1)]

    def to_dict(self):
        return {
            "snr_levels": [float(x) for x in self.snr_levels],
            "bin_edges": [float(x) for x in self.bin_edges],
            "hist": [[float(x) for x in row] for row in self.hist],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["snr_levels"], d["bin_edges"], d["hist"])


def fit_snr_posterior(scores: ScoredFrames, snr_levels, bins=DEFAULT_BINS,
                      smoothing=DEFAULT_SMOOTHING, margin=DEFAULT_MARGIN, speech_only=True):
    """Per-SNR-level smoothed score histograms over one shared bin grid.

    Frames are matched to a level by exact SNR value.  By default only
    speech frames are used, since the noise-only class carries no SNR
    information.
    """
    levels = np.asarray(sorted(float(s) for s in snr_levels))
    if levels.size == 0:
        raise ConfigurationError("snr_levels must be non-empty")
    keep = scores.is_speech if speech_only else np.ones(len(scores), dtype=bool)
    v, snr = scores.v[keep], scores.snr_db[keep]
    rows = []
    for level in levels:
        sel = np.isclose(snr, level, rtol=0.0, atol=1e-9)
        if not sel.any():
            raise FitError(f"no frames at SNR level {level} dB")
        rows.append(sel)
    in_levels = np.any(rows, axis=0)
    edges = score_bin_edges(v[in_levels], bins, margin)
    hist = np.vstack([_histogram(v[sel], edges, smoothing) for sel in rows])
    return SnrPosteriorModel(levels, edges, hist)


def evaluate(model: DetectorModel, test: ScoredFrames, speech_thr=None):
    """(speech detection %, non-speech rejection %) on labeled test frames.

    Speech frames count only above ``speech_thr`` (default: the model's
    speech-pool threshold); every non-speech frame counts.
    """
    speech_thr = model.speech_pool_thr if speech_thr is None else speech_thr
    s_mask = test.is_speech & (test.snr_db > speech_thr)
    n_mask = test.labels == Label.NONSPEECH
    if not s_mask.any() or not n_mask.any():
        raise DataError(
            f"evaluation needs both classes: {int(s_mask.sum())} speech frames above "
            f"{speech_thr} dB, {int(n_mask.sum())} non-speech frames"
        )
    decisions = model.decide(test.v)
    speech_rate = 100.0 * np.mean(decisions[s_mask] == Label.SPEECH)
    nonspeech_rate = 100.0 * np.mean(decisions[n_mask] == Label.NONSPEECH)
    return float(speech_rate), float(nonspeech_rate)


def evaluate_by_level(model: DetectorModel, test: ScoredFrames):
    """Per-SNR-level rates: rows of (snr_db, n_speech, speech %, n_nonspeech, nonspeech %).

    A rate is NaN where the level has no frames of that class.
    """
    decisions = model.decide(test.v)
    rows = []
    for level in np.unique(test.snr_db):
        at = test.snr_db == level
        s = at & test.is_speech
        n = at & (test.labels == Label.NONSPEECH)
        s_rate = 100.0 * float(np.mean(decisions[s] == Label.SPEECH)) if s.any() else float("nan")
        n_rate = 100.0 * float(np.mean(decisions[n] == Label.NONSPEECH)) if n.any() else float("nan")
        rows.append((float(level), int(s.sum()), s_rate, int(n.sum()), n_rate))
    return rows


def _labels_or_speech(labels, n):
    if labels is None:
        return np.full(n, int(Label.SPEECH))
    return np.asarray(labels, dtype=np.int64)


class BayesSpeechDetector(BaseEstimator):
    """P(speech | V) from pooled score histograms, hard decision at 0.5.

    ``fit(X, y)``: scores ``X`` (1-D or one column), SNR ``y`` in dB and
    optional ``labels`` (default all speech).  ``predict`` returns 1 for
    speech and 0 for non-speech.
    """

    def __init__(self, bins=DEFAULT_BINS, speech_pool_thr=5.0, noise_pool_thr=-5.0,
                 smoothing=DEFAULT_SMOOTHING, margin=DEFAULT_MARGIN):
        self.bins = bins
        self.speech_pool_thr = speech_pool_thr
        self.noise_pool_thr = noise_pool_thr
        self.smoothing = smoothing
        self.margin = margin

    def fit(self, X, y, labels=None):
        v = check_scores(X)
        scores = ScoredFrames(v, y, _labels_or_speech(labels, v.size))
        self.model_ = fit_model(scores, self.bins, self.speech_pool_thr, self.noise_pool_thr,
                                self.smoothing, self.margin)
        self.classes_ = np.array([int(Label.NONSPEECH), int(Label.SPEECH)])
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "model_")
        p = self.model_.p_speech(check_scores(X))
        return np.column_stack([1.0 - p, p])

    def predict(self, X):
        check_is_fitted(self, "model_")
        return self.model_.decide(check_scores(X))


class SnrEstimator(BaseEstimator):
    """Posterior over a grid of SNR levels given a variability score."""

    def __init__(self, snr_levels=(-15, -10, -5, 0, 5, 10, 15, 20, 25), bins=DEFAULT_BINS,
                 smoothing=DEFAULT_SMOOTHING, margin=DEFAULT_MARGIN, speech_only=True):
        self.snr_levels = snr_levels
        self.bins = bins
        self.smoothing = smoothing
        self.margin = margin
        self.speech_only = speech_only

    def fit(self, X, y, labels=None):
        v = check_scores(X)
        scores = ScoredFrames(v, y, _labels_or_speech(labels, v.size))
        self.model_ = fit_snr_posterior(scores, self.snr_levels, self.bins, self.smoothing,
                                        self.margin, self.speech_only)
        self.classes_ = self.model_.snr_levels
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "model_")
        return np.atleast_2d(self.model_.posterior(check_scores(X)))

    def predict(self, X):
        check_is_fitted(self, "model_")
        return self.model_.mode(check_scores(X))
