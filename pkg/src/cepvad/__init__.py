"""Noise-robust speech/non-speech detection from mel-cepstral variability."""

__version__ = "0.1.0"

from .config import PipelineConfig, load_config
from .detector import (
    BayesSpeechDetector,
    DetectorModel,
    SnrEstimator,
    SnrPosteriorModel,
    decide,
    evaluate,
    fit_model,
    fit_snr_posterior,
    p_speech,
)
from .dsp import (
    AudioSignal,
    FilterBank,
    Frame,
    Label,
    MelCepstrum,
    band_energies,
    extract_frames,
    make_filterbank,
    mel_cepstrum,
)
from .noise import MixSpec, build_corpus, mix_at_snr, normalize_unit_std, white_noise
from .trainer import (
    ScoredFrame,
    ScoredFrames,
    TrainConfig,
    TrainedScorer,
    WeightOptimizer,
    best_threshold,
    optimize_weights,
    score_dataset,
    se_sp,
)
from .variability import (
    NoiseCepstralMeans,
    ScoreKind,
    VariabilityScore,
    noise_cepstral_means,
    score_v1,
    score_v2,
    score_v2n,
)
