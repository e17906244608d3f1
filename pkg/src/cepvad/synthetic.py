"""Synthetic stand-in for a speech corpus.

"Speech" frames are harmonic complexes shaped by a three-formant resonance
envelope with a glottal spectral tilt; "non-speech" frames are seeded white
noise.  Good enough to exercise the whole pipeline without recorded data.
"""

from __future__ import annotations

import numpy as np

from .config import PipelineConfig
from .corpus import build_labeled_corpus
from .noise import StreamTag, stream_id, white_noise

F0_RANGE = (90.0, 260.0)
FORMANT_RANGES = ((300.0, 850.0), (900.0, 2300.0), (2300.0, 3300.0))
BANDWIDTH_RANGES = ((60.0, 120.0), (80.0, 160.0), (120.0, 250.0))


def _rng(seed, stream):
    return np.random.Generator(np.random.Philox(key=(int(seed) & (2**64 - 1)) | (int(stream) << 64)))


def formant_envelope(f, formants, bandwidths):
    """Magnitude response of a cascade of second-order resonators."""
    f = np.asarray(f, dtype=np.float64)
    mag = np.ones_like(f)
    for fc, bw in zip(formants, bandwidths):
        mag *= fc**2 / np.sqrt((fc**2 - f**2) ** 2 + (bw * f) ** 2)
    return mag


def harmonic_frame(n, sample_rate, f0, formants, bandwidths, phases, tilt=1.0):
    nyq = 0.95 * sample_rate / 2
    h = np.arange(1, int(nyq // f0) + 1)
    freqs = h * f0
    amps = formant_envelope(freqs, formants, bandwidths) * (f0 / freqs) ** tilt
    t = np.arange(n) / sample_rate
    return (amps[:, np.newaxis] * np.cos(2 * np.pi * freqs[:, np.newaxis] * t + phases[: h.size, np.newaxis])).sum(axis=0)


def speech_like_frames(n_frames, frame_len=1024, sample_rate=8000, seed=7):
    """(n_frames, frame_len) raw harmonic-complex frames, one random vowel each."""
    out = np.empty((n_frames, frame_len))
    for i in range(n_frames):
        rng = _rng(seed, stream_id(StreamTag.SYNTH, i, 1))
        f0 = rng.uniform(*F0_RANGE)
        formants = [rng.uniform(*r) for r in FORMANT_RANGES]
        bandwidths = [rng.uniform(*r) for r in BANDWIDTH_RANGES]
        phases = rng.uniform(0.0, 2 * np.pi, size=64)
        out[i] = harmonic_frame(frame_len, sample_rate, f0, formants, bandwidths, phases)
    return out


def noise_frames(n_frames, frame_len=1024, seed=7):
    return np.vstack([white_noise(frame_len, seed, stream_id(StreamTag.SYNTH, i, 2))
                      for i in range(n_frames)])


def synthetic_corpus(n_frames=200, cfg: PipelineConfig | None = None, seed=7):
    """Labeled corpus with ``n_frames`` clean frames per class, mixed over ``cfg.snr_grid``."""
    cfg = cfg or PipelineConfig()
    speech = speech_like_frames(n_frames, cfg.frame_len, cfg.sample_rate, seed)
    nonspeech = noise_frames(n_frames, cfg.frame_len, seed)
    return build_labeled_corpus(speech, nonspeech, cfg, seed)


def speech_like_signal(n_frames, frame_len=1024, sample_rate=8000, seed=7):
    """Concatenated speech-like frames as one signal (for WAV fixtures)."""
    return speech_like_frames(n_frames, frame_len, sample_rate, seed).reshape(-1)
