"""PCM16 mono WAV reading and writing (stdlib ``wave``)."""

import wave

import numpy as np

from .dsp import AudioSignal, Label
from .exceptions import FormatError


def read_wav(path, expected_rate=None, label=Label.UNKNOWN):
    """Read a PCM16 mono WAV into an AudioSignal with samples in [-1, 1)."""
    try:
        with wave.open(str(path), "rb") as w:
            channels = w.getnchannels()
            width = w.getsampwidth()
            rate = w.getframerate()
            comp = w.getcomptype()
            raw = w.readframes(w.getnframes())
    except wave.Error as exc:
        raise FormatError(f"{path}: unsupported WAV encoding ({exc}); need PCM16 mono") from None
    except EOFError:
        raise FormatError(f"{path}: truncated WAV file") from None
    if channels != 1:
        raise FormatError(f"{path}: channel count is {channels}, expected 1 (mono)")
    if width != 2:
        raise FormatError(f"{path}: sample width is {8 * width} bits, expected 16")
    if comp != "NONE":
        raise FormatError(f"{path}: compression {comp!r}, expected uncompressed PCM")
    if expected_rate is not None and rate != expected_rate:
        raise FormatError(f"{path}: sample rate is {rate} Hz, expected {expected_rate} Hz")
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    return AudioSignal(samples, rate, label, None, str(path))


def write_wav(path, samples, sample_rate):
    """Write samples in [-1, 1] as PCM16 mono; values outside are clipped."""
    x = np.clip(np.asarray(samples, dtype=np.float64), -1.0, 32767 / 32768)
    pcm = np.round(x * 32768.0).astype("<i2")
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(int(sample_rate))
        w.writeframes(pcm.tobytes())
