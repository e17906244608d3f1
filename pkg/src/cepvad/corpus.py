"""Labeled noisy-frame corpora and their binary container format.

File layout (all little-endian)::

    header, 68 bytes
        magic        8s   b"CEPVADCP"
        version      u16  1
        reserved     u16  0
        sample_rate  u32
        frame_len    u32
        n_records    u32  mixed frames
        n_noise      u32  pure-noise frames (noise section)
        seed         u64
        params_hash  32s  raw SHA-256 of the construction parameters
    n_records mixed-frame records, then n_noise noise records, each:
        label        u8   0 nonspeech, 1 speech, 2 unknown
        split        u8   0 train, 1 test
        has_snr      u8   0 for noise-section records
        reserved     u8
        source       u32  index of the clean frame it came from
        snr_index    u32  position in the SNR grid
        snr_db       f64
        samples      f32 x frame_len  raw mixed samples (no pre-emphasis, no window)
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import PipelineConfig, config_hash
from .dsp import Label
from .exceptions import ConfigurationError, FormatError
from .noise import PRNG_ID, StreamTag, normalize_unit_std, snr_to_gain, stream_id, white_noise

MAGIC = b"CEPVADCP"
VERSION = 1
_HEADER = struct.Struct("<8sHHIIIIQ32s")

SPLIT_TRAIN = 0
SPLIT_TEST = 1


def record_dtype(frame_len):
    return np.dtype([
        ("label", "u1"), ("split", "u1"), ("has_snr", "u1"), ("reserved", "u1"),
        ("source", "<u4"), ("snr_index", "<u4"), ("snr_db", "<f8"),
        ("samples", "<f4", (frame_len,)),
    ])


@dataclass
class Corpus:
    """Mixed frames plus an optional section of pure white-noise frames."""

    samples: np.ndarray
    labels: np.ndarray
    snr_db: np.ndarray
    source: np.ndarray
    snr_index: np.ndarray
    split: np.ndarray
    noise: np.ndarray
    sample_rate: int
    seed: int
    params_hash: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float32)
        if self.samples.ndim != 2:
            raise FormatError("corpus samples must be 2-D (n_frames, frame_len)")
        n, frame_len = self.samples.shape
        self.noise = np.asarray(self.noise, dtype=np.float32).reshape(-1, frame_len)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        self.snr_db = np.asarray(self.snr_db, dtype=np.float64)
        self.source = np.asarray(self.source, dtype=np.int64)
        self.snr_index = np.asarray(self.snr_index, dtype=np.int64)
        self.split = np.asarray(self.split, dtype=np.int64)
        for name in ("labels", "snr_db", "source", "snr_index", "split"):
            if getattr(self, name).shape != (n,):
                raise FormatError(f"corpus field {name} has wrong length")

    @property
    def frame_len(self):
        return self.samples.shape[1]

    def __len__(self):
        return self.samples.shape[0]

    def select(self, split=None):
        """Boolean mask for ``split`` in {'train', 'test', None/'all'}."""
        if split in (None, "all"):
            return np.ones(len(self), dtype=bool)
        if split == "train":
            return self.split == SPLIT_TRAIN
        if split == "test":
            return self.split == SPLIT_TEST
        raise ConfigurationError(f"unknown split {split!r}")


def construction_params(cfg: PipelineConfig, seed):
    return {
        "sample_rate": cfg.sample_rate, "frame_len": cfg.frame_len, "hop": cfg.hop,
        "snr_grid": list(cfg.snr_grid), "noise_frames": cfg.noise_frames,
        "holdout_every": cfg.holdout_every, "seed": int(seed), "prng": PRNG_ID,
    }


def _mix_class(clean, snr_grid, seed, tag):
    """Frame-major mixing of a raw (n, L) array; returns samples and indices."""
    n, frame_len = clean.shape
    gains = snr_to_gain(snr_grid)
    out = np.empty((n * len(snr_grid), frame_len))
    src = np.repeat(np.arange(n), len(snr_grid))
    lvl = np.tile(np.arange(len(snr_grid)), n)
    for i in range(n):
        s = normalize_unit_std(clean[i])
        for j, g in enumerate(gains):
            noise = normalize_unit_std(white_noise(frame_len, seed, stream_id(tag, i, j)))
            out[i * len(snr_grid) + j] = s + g * noise
    return out, src, lvl


def build_labeled_corpus(speech_frames, nonspeech_frames, cfg: PipelineConfig, seed):
    """Mix raw speech and non-speech frames at every SNR of ``cfg.snr_grid``.

    Every ``cfg.holdout_every``-th clean frame of each class (with all of its
    SNR versions) goes to the test split.  ``cfg.noise_frames`` pure
    unit-std noise frames form the noise section.
    """
    grid = np.asarray(cfg.snr_grid, dtype=np.float64)
    parts = []
    for frames, label, tag in ((speech_frames, Label.SPEECH, StreamTag.SPEECH_MIX),
                               (nonspeech_frames, Label.NONSPEECH, StreamTag.NONSPEECH_MIX)):
        frames = np.asarray(frames, dtype=np.float64).reshape(-1, cfg.frame_len)
        if frames.shape[0] == 0:
            continue
        mixed, src, lvl = _mix_class(frames, grid, seed, tag)
        parts.append((mixed, np.full(src.size, int(label)), grid[lvl], src, lvl))
    if not parts:
        raise FormatError("no clean frames supplied")
    samples, labels, snr, src, lvl = (np.concatenate(x) for x in zip(*parts))
    k = cfg.holdout_every
    split = (src % k == k - 1).astype(np.int64) if k else np.zeros(src.size, dtype=np.int64)
    noise = np.vstack([
        normalize_unit_std(white_noise(cfg.frame_len, seed, stream_id(StreamTag.NOISE_SECTION, i)))
        for i in range(cfg.noise_frames)
    ]) if cfg.noise_frames else np.empty((0, cfg.frame_len))
    params = construction_params(cfg, seed)
    return Corpus(samples, labels, snr, src, lvl, split, noise, cfg.sample_rate, int(seed),
                  config_hash(params), params)


def save_corpus(corpus: Corpus, path):
    dt = record_dtype(corpus.frame_len)
    rec = np.zeros(len(corpus), dtype=dt)
    rec["label"] = corpus.labels
    rec["split"] = corpus.split
    rec["has_snr"] = 1
    rec["source"] = corpus.source
    rec["snr_index"] = corpus.snr_index
    rec["snr_db"] = corpus.snr_db
    rec["samples"] = corpus.samples
    noise = np.zeros(corpus.noise.shape[0], dtype=dt)
    noise["label"] = int(Label.NONSPEECH)
    noise["source"] = np.arange(corpus.noise.shape[0])
    noise["samples"] = corpus.noise
    digest = bytes.fromhex(corpus.params_hash) if corpus.params_hash else bytes(32)
    header = _HEADER.pack(MAGIC, VERSION, 0, corpus.sample_rate, corpus.frame_len, len(corpus),
                          corpus.noise.shape[0], corpus.seed, digest)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(rec.tobytes())
        fh.write(noise.tobytes())


def load_corpus(path):
    blob = Path(path).read_bytes()
    if len(blob) < _HEADER.size:
        raise FormatError(f"{path}: too short for a corpus header")
    magic, version, _, sr, frame_len, n_rec, n_noise, seed, digest = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise FormatError(f"{path}: not a corpus file (bad magic {magic!r})")
    if version != VERSION:
        raise FormatError(f"{path}: unsupported corpus version {version}")
    dt = record_dtype(frame_len)
    expected = _HEADER.size + (n_rec + n_noise) * dt.itemsize
    if len(blob) != expected:
        raise FormatError(f"{path}: size {len(blob)} bytes, header implies {expected}")
    rec = np.frombuffer(blob, dtype=dt, count=n_rec, offset=_HEADER.size)
    noise = np.frombuffer(blob, dtype=dt, count=n_noise, offset=_HEADER.size + n_rec * dt.itemsize)
    return Corpus(rec["samples"], rec["label"], rec["snr_db"], rec["source"], rec["snr_index"],
                  rec["split"], noise["samples"], sr, seed, digest.hex())
