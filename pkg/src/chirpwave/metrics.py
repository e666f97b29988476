"""Communication metrics: symbol PAPR, its CCDF, spectral efficiency, modulation cost."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import dsp
from .waveforms import WaveformConfig, WaveformKind


@dataclass
class MetricSeries:
    label: str
    x: np.ndarray
    y: np.ndarray
    x_unit: str = ""
    y_unit: str = ""

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.x.shape != self.y.shape:
            raise ValueError("x and y must have the same length")
        if np.any(np.diff(self.x) <= 0):
            raise ValueError("x must be strictly increasing")

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.x.tolist(), self.y.tolist()))

    def to_dict(self) -> dict:
        return {"label": self.label, "x_unit": self.x_unit, "y_unit": self.y_unit,
                "x": self.x.tolist(), "y": self.y.tolist()}


def papr_db(symbol, axis: int = -1):
    """Peak-to-average power ratio of a symbol body (no prefix), in dB.

    Raises UndefinedMetricError for a zero-power symbol.
    """
    return dsp.peak_to_average_db(symbol, axis=axis)


def ccdf(papr_samples, thresholds, label: str = "ccdf") -> MetricSeries:
    """Empirical ``Pr(PAPR > lambda)`` at each threshold."""
    samples = np.sort(np.asarray(papr_samples, dtype=float).ravel())
    if samples.size == 0:
        raise ValueError("ccdf needs at least one PAPR sample")
    thresholds = np.asarray(thresholds, dtype=float)
    exceed = samples.size - np.searchsorted(samples, thresholds, side="right")
    return MetricSeries(label, thresholds, exceed / samples.size, "dB", "probability")


def papr_at_ccdf(papr_samples, probability: float) -> float:
    """Smallest sample value lambda with ``Pr(PAPR > lambda) <= probability``."""
    samples = np.sort(np.asarray(papr_samples, dtype=float).ravel())
    allowed = int(math.floor(probability * samples.size))
    return float(samples[samples.size - 1 - allowed]) if allowed < samples.size else float(samples[0])


def spectral_efficiency(cfg: WaveformConfig) -> float:
    """Bits per second per hertz for one symbol body (prefix not charged)."""
    bits_q = math.log2(cfg.Q)
    kind = cfg.waveform
    if kind in (WaveformKind.DFT_S_OFDM, WaveformKind.CHIRPED_DFT_S_OFDM):
        return cfg.M * bits_q / cfg.N
    if kind is WaveformKind.DFT_S_OFDM_CM:
        return (cfg.M * bits_q + math.log2(cfg.P)) / cfg.N
    if kind is WaveformKind.FMCW:
        return 0.0
    return bits_q


@dataclass
class ComplexityReport:
    waveform: WaveformKind
    multiplications: int
    normalized_to_ofdm: float
    breakdown: dict = field(default_factory=dict)


def _fft_cost(size: int) -> int:
    return size * int(round(math.log2(size))) if size > 1 else 0


def modulation_complexity(cfg: WaveformConfig, waveform: WaveformKind | str | None = None) -> ComplexityReport:
    """Transmitter complex multiplications, counting ``L log2 L`` per L-point
    transform and one per elementwise chirp sample."""
    kind = WaveformKind(waveform) if waveform is not None else cfg.waveform
    N = cfg.N
    parts = {"ifft_N": _fft_cost(N)}
    if kind in (WaveformKind.DFT_S_OFDM, WaveformKind.CHIRPED_DFT_S_OFDM, WaveformKind.DFT_S_OFDM_CM):
        parts["dft_M"] = _fft_cost(cfg.M)
        if kind is not WaveformKind.DFT_S_OFDM:
            parts["chirp"] = N
    elif kind is WaveformKind.AFDM:
        parts["chirps"] = 2 * N
    elif kind is WaveformKind.OTFS:
        parts["heisenberg"] = N * int(round(math.log2(cfg.M_otfs)))
    elif kind is WaveformKind.FMCW:
        parts = {"chirp": N}
    total = sum(parts.values())
    return ComplexityReport(kind, total, total / _fft_cost(N), parts)
