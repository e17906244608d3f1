"""Seeded white Gaussian noise and additive mixing at a per-frame SNR.

Noise generator
---------------
Uniforms come from Philox4x64-10 (``numpy.random.Philox``), a counter-based
generator whose raw 64-bit output is fixed by its published definition.  The
128-bit key is ``seed | stream << 64``; the counter starts at zero.  Each raw
word ``r`` becomes a double ``u = (r >> 11) * 2**-53`` in [0, 1).  Consecutive
pairs (u1, u2) feed the Box-Muller transform::

    z0 = sqrt(-2 ln(1 - u1)) cos(2 pi u2)
    z1 = sqrt(-2 ln(1 - u1)) sin(2 pi u2)

and the normals are emitted interleaved z0, z1, z0, z1, ...  A corpus frame
draws its noise from the stream ``stream_id(tag, frame_index, snr_index)`` so
every mixed frame is independent of generation order.  Changing any of this
requires bumping ``PRNG_ID`` (it is stored in model files).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_samples
from .dsp import AudioSignal, Frame
from .exceptions import ConfigurationError, DataError, DegenerateSignalError

PRNG_ID = "philox4x64-10/box-muller/v1"

STD_EPS = 1e-12
NORMALIZED_TOL = 1e-6

_U64 = (1 << 64) - 1


class StreamTag:
    SPEECH_MIX = 1
    NONSPEECH_MIX = 2
    NOISE_SECTION = 3
    SYNTH = 4


def stream_id(tag, frame_index=0, snr_index=0):
    """Pack (tag, frame index, snr index) into one 64-bit stream number."""
    if not (0 <= tag < 16 and 0 <= frame_index < 1 << 40 and 0 <= snr_index < 1 << 20):
        raise ConfigurationError("stream components out of range")
    return (tag << 60) | (frame_index << 20) | snr_index


def uniform_stream(n, seed, stream=0):
    """``n`` doubles in [0, 1) from the keyed Philox stream."""
    key = (int(seed) & _U64) | ((int(stream) & _U64) << 64)
    raw = np.random.Philox(key=key).random_raw(n)
    return (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53


def white_noise(n, seed, stream=0):
    """``n`` i.i.d. standard normal samples, bit-reproducible for (n, seed, stream)."""
    if n < 1:
        raise ConfigurationError("n must be >= 1")
    m = (n + 1) // 2
    u = uniform_stream(2 * m, seed, stream)
    radius = np.sqrt(-2.0 * np.log1p(-u[0::2]))
    angle = 2.0 * np.pi * u[1::2]
    z = np.empty(2 * m)
    z[0::2] = radius * np.cos(angle)
    z[1::2] = radius * np.sin(angle)
    return z[:n]


def snr_to_gain(snr_db):
    """Mixing gain lambda with SNR = -20 log10(lambda)."""
    return 10.0 ** (-np.asarray(snr_db, dtype=np.float64) / 20.0)


def gain_to_snr(gain):
    return -20.0 * np.log10(gain)


@dataclass(frozen=True)
class MixSpec:
    snr_db: float
    seed: int = 0

    @property
    def gain(self):
        return float(snr_to_gain(self.snr_db))


def _samples_of(x):
    if isinstance(x, (AudioSignal, Frame)):
        return x.samples
    return x


def normalize_unit_std(signal):
    """Remove the mean and scale to unit (population) standard deviation.

    Accepts an AudioSignal, a Frame or a bare array and returns the same kind.
    """
    x = check_samples(_samples_of(signal))
    std = x.std()
    if not std > STD_EPS * max(1.0, np.abs(x).max()):
        raise DegenerateSignalError("signal has (near-)zero standard deviation")
    y = (x - x.mean()) / std
    if isinstance(signal, AudioSignal):
        return AudioSignal(y, signal.sample_rate, signal.label, signal.snr_db, signal.source)
    if isinstance(signal, Frame):
        return Frame(y, signal.index, signal.label, signal.snr_db, signal.source, signal.windowed)
    return y


def _check_normalized(x, name):
    if abs(x.mean()) > NORMALIZED_TOL or abs(x.std() - 1.0) > NORMALIZED_TOL:
        raise DataError(f"{name} must be zero-mean with unit std before mixing")


def mix_at_snr(speech, noise, snr_db):
    """speech + lambda * noise for unit-std inputs of equal length."""
    s = check_samples(_samples_of(speech), "speech")
    n = check_samples(_samples_of(noise), "noise")
    if s.shape != n.shape:
        raise DataError(f"length mismatch: speech {s.shape[0]} vs noise {n.shape[0]}")
    _check_normalized(s, "speech")
    _check_normalized(n, "noise")
    out = s + float(snr_to_gain(snr_db)) * n
    if isinstance(speech, AudioSignal):
        return AudioSignal(out, speech.sample_rate, speech.label, float(snr_db), speech.source)
    return out


def build_corpus(clean_frames, snr_grid, seed, tag=StreamTag.SPEECH_MIX):
    """Mix every raw clean frame with fresh white noise at every SNR of the grid.

    Output is frame-major: all SNR levels of frame 0, then frame 1, ...  The
    noise for (frame i, level j) comes from ``stream_id(tag, i, j)``.
    """
    snr_grid = [float(s) for s in snr_grid]
    if not snr_grid:
        raise ConfigurationError("snr_grid must be non-empty")
    out = []
    for frame in clean_frames:
        if frame.windowed:
            raise DataError("build_corpus expects raw (unwindowed) frames")
        clean = normalize_unit_std(frame.samples)
        for j, snr in enumerate(snr_grid):
            noise = normalize_unit_std(white_noise(clean.shape[0], seed, stream_id(tag, frame.index, j)))
            mixed = mix_at_snr(clean, noise, snr)
            out.append(Frame(mixed, frame.index, frame.label, snr, frame.source, windowed=False))
    return out
