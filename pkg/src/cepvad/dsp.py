"""Framing, filterbank analysis and mel-cepstrum extraction."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_frames, check_samples
from .exceptions import ConfigurationError, DataError, EmptyInputError

DEFAULT_ENERGY_FLOOR = 1e-10


class Label(enum.IntEnum):
    NONSPEECH = 0
    SPEECH = 1
    UNKNOWN = 2


@dataclass
class AudioSignal:
    samples: np.ndarray
    sample_rate: int
    label: Label = Label.UNKNOWN
    snr_db: float | None = None
    source: str = ""

    def __post_init__(self):
        self.samples = check_samples(self.samples)
        if int(self.sample_rate) <= 0:
            raise ConfigurationError("sample_rate must be positive")
        self.sample_rate = int(self.sample_rate)

    def __len__(self):
        return self.samples.shape[0]


@dataclass
class Frame:
    """One fixed-length audio segment plus provenance.

    ``windowed`` is False for raw slices (used for noise mixing) and True
    once pre-emphasis and the Hamming window have been applied.
    """

    samples: np.ndarray
    index: int
    label: Label = Label.UNKNOWN
    snr_db: float | None = None
    source: str = ""
    windowed: bool = True

    def __len__(self):
        return self.samples.shape[0]


@dataclass(frozen=True)
class FilterBank:
    sample_rate: int
    fft_size: int
    f_low: float
    f_high: float
    centers: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def num_filters(self):
        return self.weights.shape[0]

    @property
    def bin_frequencies(self):
        return np.arange(self.fft_size // 2 + 1) * self.sample_rate / self.fft_size


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def preemphasize(frames, coeff):
    """First-order high-pass y[n] = x[n] - coeff*x[n-1] along the last axis.

    The sample preceding each frame is taken as zero, so y[0] = x[0].
    """
    x = np.asarray(frames, dtype=np.float64)
    y = x.copy()
    y[..., 1:] -= coeff * x[..., :-1]
    return y


def analysis_window(frames, preemph=0.97):
    """Pre-emphasis followed by a symmetric Hamming window, per frame."""
    x = np.asarray(frames, dtype=np.float64)
    return preemphasize(x, preemph) * np.hamming(x.shape[-1])


def frame_count(n_samples, frame_len, hop):
    if n_samples < frame_len:
        return 0
    return (n_samples - frame_len) // hop + 1


def frame_matrix(samples, frame_len, hop):
    """Stack the raw slices of ``samples`` into an (n_frames, frame_len) array."""
    if frame_len < 2 or hop < 1:
        raise ConfigurationError("need frame_len >= 2 and hop >= 1")
    x = check_samples(samples)
    if x.shape[0] < frame_len:
        raise EmptyInputError(
            f"signal has {x.shape[0]} samples, shorter than one frame ({frame_len})"
        )
    view = np.lib.stride_tricks.sliding_window_view(x, frame_len)[::hop]
    return np.ascontiguousarray(view)


def slice_frames(signal: AudioSignal, frame_len=1024, hop=None):
    """Cut ``signal`` into raw (unwindowed) frames carrying its metadata."""
    hop = frame_len if hop is None else hop
    rows = frame_matrix(signal.samples, frame_len, hop)
    return [
        Frame(row, i, signal.label, signal.snr_db, signal.source, windowed=False)
        for i, row in enumerate(rows)
    ]


def extract_frames(signal: AudioSignal, frame_len=1024, hop=None, preemph=0.97):
    """Cut ``signal`` into pre-emphasized, Hamming-windowed frames.

    ``hop`` defaults to ``frame_len`` (non-overlapping frames).
    """
    hop = frame_len if hop is None else hop
    rows = analysis_window(frame_matrix(signal.samples, frame_len, hop), preemph)
    return [
        Frame(row, i, signal.label, signal.snr_db, signal.source, windowed=True)
        for i, row in enumerate(rows)
    ]


def make_filterbank(sample_rate=8000, fft_size=1024, num_filters=16, f_low=100.0, f_high=3500.0):
    """Mel-spaced bank of raised-cosine (Hann) lobes over the rfft bins.

    ``num_filters + 2`` points equally spaced on the mel scale between
    ``f_low`` and ``f_high`` give the lobe edges; interior points are the
    centers.  Each lobe rises from the previous center to its own (gain 1)
    and falls to the next one, so neighbouring lobes overlap by half and
    sum to one inside the passband.
    """
    if num_filters < 2:
        raise ConfigurationError("num_filters must be >= 2")
    if fft_size < 2 or fft_size & (fft_size - 1):
        raise ConfigurationError(f"fft_size must be a power of two, got {fft_size}")
    if not 0 < f_low < f_high <= sample_rate / 2:
        raise ConfigurationError(
            f"need 0 < f_low < f_high <= sample_rate/2, got f_low={f_low}, f_high={f_high}"
        )
    mel_points = np.linspace(hz_to_mel(f_low), hz_to_mel(f_high), num_filters + 2)
    step = mel_points[1] - mel_points[0]
    bin_mel = hz_to_mel(np.arange(fft_size // 2 + 1) * sample_rate / fft_size)

    dist = (bin_mel[np.newaxis, :] - mel_points[1:-1, np.newaxis]) / step
    weights = np.where(np.abs(dist) < 1.0, 0.5 * (1.0 + np.cos(np.pi * dist)), 0.0)
    if np.any(weights.max(axis=1) <= 0):
        raise ConfigurationError(
            "fft_size too small: some mel filters cover no FFT bin"
        )
    weights.setflags(write=False)
    centers = mel_to_hz(mel_points[1:-1])
    centers.setflags(write=False)
    return FilterBank(int(sample_rate), int(fft_size), float(f_low), float(f_high), centers, weights)


def power_spectrum(frames, fft_size):
    x = np.asarray(frames, dtype=np.float64)
    if x.shape[-1] > fft_size:
        raise ConfigurationError(
            f"frame length {x.shape[-1]} exceeds fft_size {fft_size}"
        )
    spec = np.fft.rfft(x, n=fft_size, axis=-1)
    return spec.real**2 + spec.imag**2


def band_energies(frame, fb: FilterBank, floor=DEFAULT_ENERGY_FLOOR):
    """Mel band powers S_k of one frame (or a stack of frames), floored at ``floor``."""
    x = frame.samples if isinstance(frame, Frame) else frame
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise DataError("frame contains NaN or Inf")
    energies = power_spectrum(x, fb.fft_size) @ fb.weights.T
    return np.maximum(energies, floor)


def cosine_basis(n_bands, n_coeffs):
    """Rows p = 0..n_coeffs of cos(p (k - 1/2) pi / N), k = 1..N."""
    p = np.arange(n_coeffs + 1)[:, np.newaxis]
    k = np.arange(1, n_bands + 1)[np.newaxis, :]
    return np.cos(p * (k - 0.5) * np.pi / n_bands)


def mel_cepstrum(energies, n_coeffs=8):
    """Cepstral coefficients c_0..c_D from mel band powers.

    Unnormalized cosine transform of the log band powers; works on a single
    energy vector or along the last axis of a stack.
    """
    S = np.asarray(energies, dtype=np.float64)
    n_bands = S.shape[-1]
    if not 1 <= n_coeffs <= n_bands:
        raise ConfigurationError(f"need 1 <= D <= N, got D={n_coeffs}, N={n_bands}")
    if np.any(~(S > 0)):
        raise DataError("band energies must be positive (apply the energy floor first)")
    return np.log(S) @ cosine_basis(n_bands, n_coeffs).T


class MelCepstrum(TransformerMixin, BaseEstimator):
    """Raw frame slices -> mel-cepstral vectors c_0..c_D.

    Parameters
    ----------
    sample_rate : int
    fft_size : int
    num_filters : int
    f_low, f_high : float
        Passband covered by the filterbank, in Hz.
    n_coeffs : int
        Highest cepstral order D; the output has ``n_coeffs + 1`` columns.
    preemph : float
        Pre-emphasis coefficient applied before the Hamming window.
    energy_floor : float
    """

    def __init__(self, sample_rate=8000, fft_size=1024, num_filters=16, f_low=100.0,
                 f_high=3500.0, n_coeffs=8, preemph=0.97, energy_floor=DEFAULT_ENERGY_FLOOR):
        self.sample_rate = sample_rate
        self.fft_size = fft_size
        self.num_filters = num_filters
        self.f_low = f_low
        self.f_high = f_high
        self.n_coeffs = n_coeffs
        self.preemph = preemph
        self.energy_floor = energy_floor

    @classmethod
    def from_config(cls, cfg):
        return cls(cfg.sample_rate, cfg.fft_size, cfg.num_filters, cfg.f_low, cfg.f_high,
                   cfg.n_coeffs, cfg.preemph, cfg.energy_floor)

    def fit(self, X=None, y=None):
        if not 1 <= self.n_coeffs <= self.num_filters:
            raise ConfigurationError("need 1 <= n_coeffs <= num_filters")
        self.filterbank_ = make_filterbank(self.sample_rate, self.fft_size, self.num_filters,
                                           self.f_low, self.f_high)
        return self

    def transform(self, X):
        check_is_fitted(self, "filterbank_")
        X = check_frames(X)
        S = band_energies(analysis_window(X, self.preemph), self.filterbank_, self.energy_floor)
        return mel_cepstrum(S, self.n_coeffs)
