"""End-to-end training, detection and the versioned model file.

The model file is indented, key-sorted JSON.  Floats are written with
Python's shortest round-trip repr, so load(save(m)) is exact and two
trainings with the same inputs produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import PipelineConfig
from .corpus import Corpus
from .detector import DetectorModel, SnrPosteriorModel, fit_model, fit_snr_posterior
from .dsp import MelCepstrum, frame_matrix
from .exceptions import ConfigurationError, FitError, FormatError
from .noise import PRNG_ID
from .trainer import ScoredFrames, TrainConfig, TrainedScorer, optimize_weights
from .variability import ScoreKind, noise_cepstral_means

FORMAT_VERSION = "cepvad-model/1"


@dataclass
class ModelFile:
    config: PipelineConfig
    scorer: TrainedScorer
    detector: DetectorModel
    snr_posterior: SnrPosteriorModel | None = None
    corpus_hash: str = ""
    prng: str = PRNG_ID

    def to_dict(self):
        return {
            "format_version": FORMAT_VERSION,
            "prng": self.prng,
            "config": self.config.to_dict(),
            "config_hash": self.config.digest(),
            "corpus_hash": self.corpus_hash,
            "scorer": self.scorer.to_dict(),
            "detector": self.detector.to_dict(),
            "snr_posterior": None if self.snr_posterior is None else self.snr_posterior.to_dict(),
        }

    @classmethod
    def from_dict(cls, d):
        version = d.get("format_version")
        if version != FORMAT_VERSION:
            raise FormatError(f"unsupported model format {version!r}, expected {FORMAT_VERSION!r}")
        cfg = PipelineConfig.from_dict(d["config"])
        if cfg.digest() != d.get("config_hash"):
            raise FormatError("model config_hash does not match the embedded config")
        scorer = TrainedScorer.from_dict(d["scorer"])
        if scorer.n_coeffs != cfg.n_coeffs:
            raise FormatError(f"scorer has D={scorer.n_coeffs}, config says D={cfg.n_coeffs}")
        post = d.get("snr_posterior")
        return cls(cfg, scorer, DetectorModel.from_dict(d["detector"]),
                   None if post is None else SnrPosteriorModel.from_dict(post),
                   d.get("corpus_hash", ""), d.get("prng", ""))

    def dumps(self):
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    def save(self, path):
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path):
        try:
            d = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: model file is not valid JSON ({exc})") from None
        try:
            return cls.from_dict(d)
        except (KeyError, TypeError) as exc:
            raise FormatError(f"{path}: malformed model file ({exc!r})") from None

    def cepstra(self, frames):
        return MelCepstrum.from_config(self.config).fit().transform(frames)

    def score_frames(self, frames):
        return self.scorer.score(self.cepstra(frames))


def corpus_cepstra(corpus: Corpus, cfg: PipelineConfig):
    """Cepstra of the mixed frames and of the noise section."""
    if corpus.frame_len != cfg.frame_len or corpus.sample_rate != cfg.sample_rate:
        raise ConfigurationError(
            f"corpus has frame_len={corpus.frame_len}, sample_rate={corpus.sample_rate}; "
            f"config has frame_len={cfg.frame_len}, sample_rate={cfg.sample_rate}"
        )
    mc = MelCepstrum.from_config(cfg).fit()
    C = mc.transform(corpus.samples)
    N = mc.transform(corpus.noise) if corpus.noise.shape[0] else None
    return C, N


def train_model(corpus: Corpus, cfg: PipelineConfig, kind="v2n", t_snr=None, init="linear",
                split="train"):
    """Train scorer, detector and SNR posterior on one split of ``corpus``."""
    kind = ScoreKind.parse(kind)
    C, N = corpus_cepstra(corpus, cfg)
    means = None
    if kind is ScoreKind.V2N:
        if N is None:
            raise ConfigurationError("V2N training needs a corpus with a noise-frames section")
        means = noise_cepstral_means(N)
    mask = corpus.select(split)
    C, snr, labels = C[mask], corpus.snr_db[mask], corpus.labels[mask]
    scorer = optimize_weights(C, snr, labels, TrainConfig.from_pipeline(cfg, kind, t_snr, init), means)
    scores = ScoredFrames(scorer.score(C), snr, labels)
    detector = fit_model(scores, cfg.bins, cfg.speech_pool_thr, cfg.noise_pool_thr,
                         cfg.smoothing, cfg.margin)
    present = set(np.unique(snr[labels == 1]).tolist())
    levels = [s for s in cfg.snr_levels if s in present]
    posterior = None
    if levels:
        try:
            posterior = fit_snr_posterior(scores, levels, cfg.bins, cfg.smoothing, cfg.margin)
        except FitError:
            posterior = None
    return ModelFile(cfg, scorer, detector, posterior, corpus.params_hash)


def score_corpus(model: ModelFile, corpus: Corpus, split=None):
    C, _ = corpus_cepstra(corpus, model.config)
    mask = corpus.select(split)
    return ScoredFrames(model.scorer.score(C[mask]), corpus.snr_db[mask], corpus.labels[mask]), np.flatnonzero(mask)


@dataclass
class FrameReport:
    index: int
    v: float
    p_speech: float
    speech: bool
    snr_mode_db: float | None
    degenerate: bool


def detect_signal(model: ModelFile, signal):
    """Per-frame score, speech probability, decision and SNR estimate.

    Frames with zero variance (digital silence) are still scored (their
    band energies sit on the floor) and flagged as degenerate.
    """
    cfg = model.config
    if signal.sample_rate != cfg.sample_rate:
        raise ConfigurationError(
            f"input sample rate {signal.sample_rate} Hz does not match model's {cfg.sample_rate} Hz"
        )
    raw = frame_matrix(signal.samples, cfg.frame_len, cfg.hop)
    v = model.score_frames(raw)
    p = model.detector.p_speech(v)
    decisions = model.detector.decide(v)
    modes = model.snr_posterior.mode(v) if model.snr_posterior is not None else [None] * len(v)
    degenerate = raw.std(axis=1) == 0
    return [
        FrameReport(i, float(v[i]), float(p[i]), bool(decisions[i]),
                    None if modes[i] is None else float(modes[i]), bool(degenerate[i]))
        for i in range(len(v))
    ]
