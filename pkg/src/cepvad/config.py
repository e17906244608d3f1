"""Pipeline configuration shared by every stage and persisted in model files."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path

from .exceptions import ConfigurationError

CONFIG_ENV_VAR = "CEPVAD_CONFIG"

DEFAULT_SNR_GRID = (-15.0, -10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0)


@dataclass(frozen=True)
class PipelineConfig:
    # framing / dsp
    sample_rate: int = 8000
    frame_len: int = 1024
    hop: int = 1024
    preemph: float = 0.97
    fft_size: int = 1024
    num_filters: int = 16
    f_low: float = 100.0
    f_high: float = 3500.0
    n_coeffs: int = 8
    energy_floor: float = 1e-10
    # corpus construction
    snr_grid: tuple = DEFAULT_SNR_GRID
    noise_frames: int = 100
    holdout_every: int = 5
    # trainer
    tol: float = 1e-3
    max_outer_iters: int = 10
    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5
    simplex_scale: float = 0.25
    max_simplex_evals: int = 800
    # detector
    bins: int = 40
    smoothing: float = 0.5
    margin: float = 0.05
    speech_pool_thr: float = 5.0
    noise_pool_thr: float = -5.0
    snr_levels: tuple = DEFAULT_SNR_GRID

    def __post_init__(self):
        object.__setattr__(self, "snr_grid", tuple(float(s) for s in self.snr_grid))
        object.__setattr__(self, "snr_levels", tuple(float(s) for s in self.snr_levels))
        self.validate()

    def validate(self):
        if self.sample_rate <= 0:
            raise ConfigurationError("sample_rate must be positive")
        if self.frame_len < 2:
            raise ConfigurationError("frame_len must be >= 2")
        if self.hop < 1:
            raise ConfigurationError("hop must be >= 1")
        if self.fft_size < self.frame_len or self.fft_size & (self.fft_size - 1):
            raise ConfigurationError(
                f"fft_size must be a power of two >= frame_len, got {self.fft_size}"
            )
        if self.num_filters < 2:
            raise ConfigurationError("num_filters must be >= 2")
        if not 0 < self.f_low < self.f_high <= self.sample_rate / 2:
            raise ConfigurationError(
                f"need 0 < f_low < f_high <= sample_rate/2, got "
                f"f_low={self.f_low}, f_high={self.f_high}"
            )
        if not 1 <= self.n_coeffs <= self.num_filters:
            raise ConfigurationError("need 1 <= n_coeffs <= num_filters")
        if self.energy_floor <= 0:
            raise ConfigurationError("energy_floor must be positive")
        if not self.snr_grid:
            raise ConfigurationError("snr_grid must be non-empty")
        if self.tol <= 0 or self.max_outer_iters < 1:
            raise ConfigurationError("need tol > 0 and max_outer_iters >= 1")
        if self.bins < 4:
            raise ConfigurationError("bins must be >= 4")
        if self.smoothing <= 0:
            raise ConfigurationError("smoothing floor must be positive")
        if self.noise_pool_thr > self.speech_pool_thr:
            raise ConfigurationError("noise_pool_thr must not exceed speech_pool_thr")
        if self.holdout_every < 0 or self.holdout_every == 1:
            raise ConfigurationError("holdout_every must be 0 (no holdout) or >= 2")

    def to_dict(self):
        d = dataclasses.asdict(self)
        d["snr_grid"] = list(self.snr_grid)
        d["snr_levels"] = list(self.snr_levels)
        return d

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def digest(self):
        return config_hash(self.to_dict())


def config_hash(obj):
    """SHA-256 of the canonical JSON rendering of ``obj``."""
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def load_config(path=None):
    """Load a JSON config from ``path``, ``$CEPVAD_CONFIG``, or defaults."""
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR) or None
    if path is None:
        return PipelineConfig()
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigurationError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigurationError("config file must hold a JSON object")
    return PipelineConfig.from_dict(data)
