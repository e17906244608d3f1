"""Weight and threshold training that maximizes sensitivity + specificity.

Only speech-labeled frames enter Se and Sp.  With an SNR threshold
``t_snr`` splitting them into a high pool (snr > t_snr) and a low pool
(snr < t_snr), and a score threshold ``t_v``::

    Se = #(high pool, v > t_v) / #(high pool)
    Sp = #(low pool,  v < t_v) / #(low pool)

Frames exactly at ``t_snr`` belong to neither pool; scores exactly at
``t_v`` count in neither numerator.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_cepstra, check_consistent_length, check_scores
from .dsp import Label
from .exceptions import ConfigurationError, DegenerateSplitError, OptimizationError
from .simplex import nelder_mead
from .variability import NoiseCepstralMeans, ScoreKind, score

logger = logging.getLogger(__name__)


class ScoredFrame(NamedTuple):
    v: float
    snr_db: float
    label: Label


class ScoredFrames:
    """Array-backed sequence of ScoredFrame records."""

    def __init__(self, v, snr_db, labels):
        self.v = check_scores(v)
        self.snr_db = np.asarray(snr_db, dtype=np.float64).reshape(-1)
        self.labels = np.asarray(labels, dtype=np.int64).reshape(-1)
        check_consistent_length(self.v, self.snr_db, self.labels)

    @classmethod
    def from_records(cls, records):
        records = list(records)
        if not records:
            return cls(np.empty(0), np.empty(0), np.empty(0, dtype=np.int64))
        v, snr, lab = zip(*records)
        return cls(v, snr, [int(x) for x in lab])

    def __len__(self):
        return self.v.shape[0]

    def __getitem__(self, i):
        return ScoredFrame(float(self.v[i]), float(self.snr_db[i]), Label(int(self.labels[i])))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def subset(self, mask):
        return ScoredFrames(self.v[mask], self.snr_db[mask], self.labels[mask])

    @property
    def is_speech(self):
        return self.labels == Label.SPEECH


def default_t_snr(kind):
    return -5.0 if ScoreKind.parse(kind) is ScoreKind.V2N else 5.0


def init_weights(name, n_coeffs=8):
    """``ones`` -> w_i = 1, ``linear`` -> w_i = i."""
    if name == "ones":
        return np.ones(n_coeffs)
    if name == "linear":
        return np.arange(1, n_coeffs + 1, dtype=np.float64)
    raise ConfigurationError(f"unknown init {name!r}; expected 'ones' or 'linear'")


def score_dataset(cepstra, snr_db, labels, kind, w, means=None):
    """Score every frame, keeping SNR and label alongside."""
    if len(cepstra) == 0:
        return ScoredFrames(np.empty(0), np.empty(0), np.empty(0, dtype=np.int64))
    C = check_cepstra(cepstra)
    return ScoredFrames(score(C, w, kind, means), snr_db, labels)


def _pools(scores: ScoredFrames, t_snr):
    speech = scores.is_speech
    high = scores.v[speech & (scores.snr_db > t_snr)]
    low = scores.v[speech & (scores.snr_db < t_snr)]
    if high.size == 0 or low.size == 0:
        raise DegenerateSplitError(
            f"need speech frames on both sides of t_snr={t_snr} dB; "
            f"got {high.size} above and {low.size} below",
            n_high=high.size, n_low=low.size,
        )
    return high, low


def se_sp(scores: ScoredFrames, t_snr, t_v):
    high, low = _pools(scores, t_snr)
    se = int(np.count_nonzero(high > t_v)) / high.size
    sp = int(np.count_nonzero(low < t_v)) / low.size
    return se, sp


def threshold_candidates(v):
    """Midpoints between consecutive distinct scores, plus one below and one above."""
    u = np.unique(v)
    return np.concatenate([[u[0] - 1.0], 0.5 * (u[:-1] + u[1:]), [u[-1] + 1.0]])


def best_threshold(scores: ScoredFrames, t_snr):
    """Exact maximizer of Se + Sp over the score threshold.

    Se + Sp only changes where the threshold crosses a score, so every
    distinct value is attained at one of ``threshold_candidates``.  Ties go to
    the smallest threshold.
    """
    high, low = _pools(scores, t_snr)
    cand = threshold_candidates(np.concatenate([high, low]))
    high_sorted = np.sort(high)
    low_sorted = np.sort(low)
    n_above = high.size - np.searchsorted(high_sorted, cand, side="right")
    n_below = np.searchsorted(low_sorted, cand, side="left")
    total = n_above / high.size + n_below / low.size
    best = int(np.argmax(total))
    t_v = float(cand[best])
    se, sp = se_sp(scores, t_snr, t_v)
    return t_v, se + sp


@dataclass
class TrainConfig:
    kind: ScoreKind = ScoreKind.V2
    t_snr: float | None = None
    init_w: np.ndarray | str = "linear"
    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5
    simplex_scale: float = 0.25
    max_simplex_evals: int = 800
    tol: float = 1e-3
    max_outer_iters: int = 10

    def __post_init__(self):
        self.kind = ScoreKind.parse(self.kind)
        if self.t_snr is None:
            self.t_snr = default_t_snr(self.kind)
        if self.tol <= 0:
            raise ConfigurationError("tol must be positive")
        if self.max_outer_iters < 1:
            raise ConfigurationError("max_outer_iters must be >= 1")

    @classmethod
    def from_pipeline(cls, cfg, kind, t_snr=None, init="linear"):
        return cls(kind=kind, t_snr=t_snr, init_w=init, reflection=cfg.reflection,
                   expansion=cfg.expansion, contraction=cfg.contraction, shrink=cfg.shrink,
                   simplex_scale=cfg.simplex_scale, max_simplex_evals=cfg.max_simplex_evals,
                   tol=cfg.tol, max_outer_iters=cfg.max_outer_iters)


@dataclass
class TrainedScorer:
    kind: ScoreKind
    w: np.ndarray
    t_v: float
    se: float
    sp: float
    t_snr: float
    means: NoiseCepstralMeans | None = None
    history: list = field(default_factory=list)

    @property
    def se_plus_sp(self):
        return self.se + self.sp

    @property
    def n_coeffs(self):
        return self.w.shape[0]

    def score(self, cepstra):
        return score(cepstra, self.w, self.kind, self.means)

    def to_dict(self):
        return {
            "kind": self.kind.value,
            "w": [float(x) for x in self.w],
            "t_v": float(self.t_v),
            "se": float(self.se),
            "sp": float(self.sp),
            "t_snr": float(self.t_snr),
            "noise_means": None if self.means is None else {
                "means": [float(x) for x in self.means.means],
                "frames_used": int(self.means.frames_used),
            },
            "history": [float(x) for x in self.history],
        }

    @classmethod
    def from_dict(cls, d):
        nm = d.get("noise_means")
        means = None if nm is None else NoiseCepstralMeans(np.array(nm["means"], dtype=np.float64),
                                                           int(nm["frames_used"]))
        return cls(ScoreKind.parse(d["kind"]), np.array(d["w"], dtype=np.float64), float(d["t_v"]),
                   float(d["se"]), float(d["sp"]), float(d["t_snr"]), means,
                   [float(x) for x in d.get("history", [])])


class _Objective:
    """Se + Sp as a function of w at fixed (t_snr, t_v), on precomputed features."""

    def __init__(self, C, snr_db, labels, kind, means, t_snr):
        speech = labels == Label.SPEECH
        self.kind = kind
        ci = C[:, 1:]
        if kind is ScoreKind.V1:
            feats = np.abs(ci)
        elif kind is ScoreKind.V2:
            feats = ci**2
        else:
            feats = (ci - means.means) ** 2
        self.high = feats[speech & (snr_db > t_snr)]
        self.low = feats[speech & (snr_db < t_snr)]
        if self.high.shape[0] == 0 or self.low.shape[0] == 0:
            raise DegenerateSplitError(
                f"need speech frames on both sides of t_snr={t_snr} dB; "
                f"got {self.high.shape[0]} above and {self.low.shape[0]} below",
                n_high=self.high.shape[0], n_low=self.low.shape[0],
            )

    def scores(self, feats, w):
        if self.kind is ScoreKind.V1:
            return feats @ w
        return np.sqrt(feats @ (w * w))

    def __call__(self, w, t_v):
        se = np.count_nonzero(self.scores(self.high, w) > t_v) / self.high.shape[0]
        sp = np.count_nonzero(self.scores(self.low, w) < t_v) / self.low.shape[0]
        return se + sp


def normalize_weights(C, w, kind, means=None):
    """Rescale w so the largest training score is 1.

    V1 can be entirely non-positive; then the largest |V| is used instead.
    Returns (w_scaled, factor) with w_scaled = w / factor.
    """
    v = score(C, w, kind, means)
    top = float(v.max())
    factor = top if top > 0 else float(np.abs(v).max())
    if not factor > 0 or not np.isfinite(factor):
        raise OptimizationError("all training scores are zero; cannot normalize weights")
    return w / factor, factor


def optimize_weights(cepstra, snr_db, labels, cfg: TrainConfig, means=None):
    """Alternate threshold search and simplex search over w.

    Each outer round: best t_v for the current w, Nelder-Mead over w with
    t_v held fixed, then rescale w so the top training score is 1.  Stops
    when Se + Sp gains less than ``cfg.tol`` or after ``cfg.max_outer_iters``.
    The best point seen is returned, so the result never falls below the
    starting point.
    """
    C = check_cepstra(cepstra)
    snr_db = np.asarray(snr_db, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    check_consistent_length(C, snr_db, labels)
    kind = cfg.kind
    d = C.shape[1] - 1
    if kind is ScoreKind.V2N and means is None:
        raise ConfigurationError("V2N training needs noise cepstral means")
    w0 = init_weights(cfg.init_w, d) if isinstance(cfg.init_w, str) else np.asarray(cfg.init_w, dtype=np.float64)
    if w0.shape != (d,) or not np.all(np.isfinite(w0)):
        raise ConfigurationError(f"init_w must be a finite vector of length {d}")

    objective = _Objective(C, snr_db, labels, kind, means, cfg.t_snr)

    def threshold_for(w):
        return best_threshold(ScoredFrames(score(C, w, kind, means), snr_db, labels), cfg.t_snr)

    w, _ = normalize_weights(C, w0, kind, means)
    t_v, best = threshold_for(w)
    history = [best]
    logger.debug("init %s: Se+Sp=%.4f", kind.value, best)

    for it in range(cfg.max_outer_iters):
        if best >= 2.0:
            break
        fixed_t = t_v
        res = nelder_mead(lambda x: -objective(x, fixed_t), w, scale=cfg.simplex_scale,
                          reflection=cfg.reflection, expansion=cfg.expansion,
                          contraction=cfg.contraction, shrink=cfg.shrink,
                          max_evals=cfg.max_simplex_evals)
        try:
            w_new, _ = normalize_weights(C, res.x, kind, means)
        except OptimizationError:
            break
        t_new, value = threshold_for(w_new)
        gain = value - best
        logger.debug("outer %d: Se+Sp=%.4f (gain %.4f, %d evals)", it, value, gain, res.nfev)
        if gain > 0:
            w, t_v, best = w_new, t_new, value
        history.append(best)
        if gain < cfg.tol:
            break

    se, sp = se_sp(ScoredFrames(score(C, w, kind, means), snr_db, labels), cfg.t_snr, t_v)
    return TrainedScorer(kind, w, t_v, se, sp, float(cfg.t_snr), means, history)


class WeightOptimizer(TransformerMixin, BaseEstimator):
    """Learns variability weights and a score threshold; transforms cepstra into scores.

    ``fit(X, y)`` takes cepstra ``X`` of shape (n_frames, D + 1) and per-frame
    SNR ``y`` in dB.  ``labels`` defaults to all-speech.  For ``kind='v2n'``
    pass ``noise_means`` (a NoiseCepstralMeans or array of length D).
    """

    def __init__(self, kind="v2n", t_snr=None, init="linear", tol=1e-3, max_outer_iters=10,
                 simplex_scale=0.25, max_simplex_evals=800):
        self.kind = kind
        self.t_snr = t_snr
        self.init = init
        self.tol = tol
        self.max_outer_iters = max_outer_iters
        self.simplex_scale = simplex_scale
        self.max_simplex_evals = max_simplex_evals

    def fit(self, X, y, labels=None, noise_means=None):
        C = check_cepstra(X)
        if labels is None:
            labels = np.full(C.shape[0], int(Label.SPEECH))
        if noise_means is not None and not isinstance(noise_means, NoiseCepstralMeans):
            noise_means = NoiseCepstralMeans(np.asarray(noise_means, dtype=np.float64), 1)
        cfg = TrainConfig(kind=self.kind, t_snr=self.t_snr, init_w=self.init, tol=self.tol,
                          max_outer_iters=self.max_outer_iters, simplex_scale=self.simplex_scale,
                          max_simplex_evals=self.max_simplex_evals)
        self.scorer_ = optimize_weights(C, y, labels, cfg, noise_means)
        self.weights_ = self.scorer_.w
        self.threshold_ = self.scorer_.t_v
        self.n_features_in_ = C.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "scorer_")
        return self.scorer_.score(check_cepstra(X, self.n_features_in_ - 1))[:, np.newaxis]

    def score(self, X, y, labels=None):
        """Se + Sp of the fitted weights and threshold on (X, y)."""
        check_is_fitted(self, "scorer_")
        C = check_cepstra(X, self.n_features_in_ - 1)
        if labels is None:
            labels = np.full(C.shape[0], int(Label.SPEECH))
        se, sp = se_sp(ScoredFrames(self.scorer_.score(C), y, labels), self.scorer_.t_snr,
                       self.scorer_.t_v)
        return se + sp
