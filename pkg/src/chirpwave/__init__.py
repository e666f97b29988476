"""DFT-s-OFDM with chirping for integrated sensing and communication.

Modulators for chirped and chirp-modulated DFT-s-OFDM and the OFDM, AFDM,
OTFS and FMCW baselines; a multipath/interference/clipping channel; ML and
LMMSE receivers; mixing and matched-filter radar processing; and a seeded
experiment runner.
"""

__version__ = "0.1.0"

from .channel import ChannelProfile, Interferer, PathTap, clip, propagate, radar_echo
from .constellation import ConstellationKind, demap_constellation, map_constellation
from .dsp import circular_correlate, dft, idft
from .errors import (
    ChirpwaveError,
    ConfigurationError,
    DetectionBudgetError,
    DimensionError,
    NumericalError,
    PayloadError,
    UndefinedMetricError,
)
from .metrics import MetricSeries, ccdf, modulation_complexity, papr_db, spectral_efficiency
from .receiver import build_equivalent_channel, lmmse_detect, ml_detect, ml_detect_cm
from .sensing import detect, matched_filter_map, mix_and_range, pmsr, resolutions
from .waveforms import (
    BasebandFrame,
    ChirpSpec,
    WaveformConfig,
    WaveformKind,
    demodulate,
    make_chirp,
    modulate,
    random_frame,
)

__all__ = [
    "BasebandFrame", "ChannelProfile", "ChirpSpec", "ChirpwaveError", "ConfigurationError",
    "ConstellationKind", "DetectionBudgetError", "DimensionError", "Interferer", "MetricSeries",
    "NumericalError", "PathTap", "PayloadError", "UndefinedMetricError", "WaveformConfig", "WaveformKind",
    "build_equivalent_channel", "ccdf", "circular_correlate", "clip", "demap_constellation", "demodulate",
    "detect", "dft", "idft", "lmmse_detect", "make_chirp", "map_constellation", "matched_filter_map",
    "mix_and_range", "ml_detect", "ml_detect_cm", "modulation_complexity", "modulate", "papr_db", "pmsr",
    "propagate", "radar_echo", "random_frame", "resolutions", "spectral_efficiency",
]
