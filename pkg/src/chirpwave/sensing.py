"""Radar processing: conjugate mixing (beat-frequency ranging) and matched filtering.

Range bins are ``c / (2B)`` wide. Velocity bins come from a K-point transform
across slow time and are ``B c / (2 f_c (N + L_CP) K)`` wide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import dsp
from .channel import SPEED_OF_LIGHT
from .errors import ConfigurationError, DimensionError, UndefinedMetricError
from .waveforms import BasebandFrame, WaveformConfig


@dataclass
class RangeProfile:
    magnitudes: np.ndarray
    bin_to_meters: float

    @property
    def ranges_m(self) -> np.ndarray:
        return np.arange(self.magnitudes.shape[0]) * self.bin_to_meters


@dataclass
class RangeVelocityMap:
    """Magnitudes indexed ``[range_bin, velocity_bin]``."""

    magnitudes: np.ndarray
    bin_to_meters: float
    bin_to_mps: float

    @property
    def ranges_m(self) -> np.ndarray:
        return np.arange(self.magnitudes.shape[0]) * self.bin_to_meters

    @property
    def velocities_mps(self) -> np.ndarray:
        K = self.magnitudes.shape[1]
        return np.fft.fftfreq(K, 1.0 / K) * self.bin_to_mps

    def range_cut(self, velocity_bin: int = 0) -> RangeProfile:
        return RangeProfile(self.magnitudes[:, velocity_bin], self.bin_to_meters)


@dataclass
class DetectionReport:
    peak_bin: tuple
    range_m: float
    velocity_mps: float | None
    pmsr_db: float
    detected: bool


def resolutions(cfg: WaveformConfig, K: int | None = None) -> tuple[float, float]:
    """(range resolution in m, velocity resolution in m/s).

    ``K`` overrides ``cfg.K``; the formula itself does not need a power of two.
    """
    K = cfg.K if K is None else K
    values = {"B": cfg.B, "f_c": cfg.f_c, "N": cfg.N, "K": K}
    for name, value in values.items():
        if not value > 0:
            raise ConfigurationError(f"{name} must be positive", name)
    if cfg.L_CP < 0:
        raise ConfigurationError("L_CP must be non-negative", "L_CP")
    range_res = SPEED_OF_LIGHT / (2 * cfg.B)
    velocity_res = cfg.B * SPEED_OF_LIGHT / (2 * cfg.f_c * (cfg.N + cfg.L_CP) * K)
    return range_res, velocity_res


def _bodies(x, cfg: WaveformConfig) -> np.ndarray:
    if isinstance(x, BasebandFrame):
        return x.body
    x = np.asarray(x, dtype=np.complex128)
    if x.shape[-1] == cfg.symbol_length and cfg.L_CP:
        return x[..., cfg.L_CP :]
    return x


def mix_and_range(tx, rx, cfg: WaveformConfig) -> RangeProfile:
    """Beat-frequency range profile of a transmit/echo pair.

    The mixer output is taken as ``tx * conj(rx)``: in complex baseband there
    is no sum-frequency image, so no low-pass stage is needed, and with this
    ordering a delay of ``d`` samples on the wrapped chirp gives a tone on bin
    ``d`` (the conjugate of ``rx * conj(tx)``, which has the same magnitude
    spectrum mirrored). For a multi-symbol burst the per-symbol power spectra
    are averaged over slow time.
    """
    tx = _bodies(tx, cfg)
    rx = _bodies(rx, cfg)
    if tx.shape != rx.shape:
        raise DimensionError(f"tx {tx.shape} and rx {rx.shape} differ")
    if tx.shape[-1] != cfg.N:
        raise DimensionError(f"expected {cfg.N} samples per symbol, got {tx.shape[-1]}")
    beat = tx * np.conj(rx)
    power = np.abs(dsp.dft(beat)) ** 2
    if power.ndim > 1:
        power = power.reshape(-1, cfg.N).mean(axis=0)
    return RangeProfile(np.sqrt(power), SPEED_OF_LIGHT / (2 * cfg.B))


def matched_filter_map(tx, rx, cfg: WaveformConfig) -> RangeVelocityMap:
    """Per-symbol circular correlation of echo against transmit, then a K-point
    transform across slow time for every range bin."""
    tx = np.atleast_2d(_bodies(tx, cfg))
    rx = np.atleast_2d(_bodies(rx, cfg))
    if tx.shape != rx.shape:
        raise DimensionError(f"tx {tx.shape} and rx {rx.shape} differ")
    correlation = dsp.circular_correlate(rx, tx)  # (K, N)
    doppler = dsp.dft(correlation, axis=0)
    range_res, _ = resolutions(cfg)
    velocity_res = cfg.B * SPEED_OF_LIGHT / (2 * cfg.f_c * cfg.symbol_length * tx.shape[0])
    return RangeVelocityMap(np.abs(doppler).T, range_res, velocity_res)


def _magnitudes(surface) -> np.ndarray:
    if isinstance(surface, (RangeProfile, RangeVelocityMap)):
        return np.asarray(surface.magnitudes, dtype=float)
    return np.abs(np.asarray(surface))


def _cyclic_neighbourhood(shape, centre, radius) -> np.ndarray:
    mask = np.ones(shape, dtype=bool)
    for axis, (size, c) in enumerate(zip(shape, centre)):
        offsets = (np.arange(size) - c) % size
        near = np.minimum(offsets, size - offsets) <= radius
        index = [np.newaxis] * len(shape)
        index[axis] = slice(None)
        mask &= near[tuple(index)]
    return mask


def pmsr(surface, exclusion_radius: int = 1, peak=None) -> float:
    """Peak-to-maximum-sidelobe ratio in dB.

    The peak is the global maximum unless ``peak`` gives its bin. Sidelobes
    are everything outside a cyclic ``+-exclusion_radius`` box around it.
    Returns ``inf`` when nothing lies outside the main lobe.
    """
    power = _magnitudes(surface) ** 2
    if power.size == 0 or not np.any(power > 0):
        raise UndefinedMetricError("PMSR undefined for an all-zero map")
    if peak is None:
        peak = np.unravel_index(np.argmax(power), power.shape)
    peak = tuple(np.atleast_1d(peak))
    mask = _cyclic_neighbourhood(power.shape, peak, exclusion_radius)
    side = power[~mask]
    if side.size == 0 or side.max() == 0:
        return math.inf
    if power[peak] == 0:
        return -math.inf
    return float(10 * np.log10(power[peak] / side.max()))


def detect(surface, truth, tolerance_bins: int = 1) -> DetectionReport:
    """Global-argmax detector: hit if the maximum lies within ``tolerance_bins``
    (cyclically, per axis) of ``truth``."""
    mags = _magnitudes(surface)
    truth = tuple(np.atleast_1d(truth))
    if len(truth) != mags.ndim or any(not 0 <= t < s for t, s in zip(truth, mags.shape)):
        raise DimensionError(f"truth {truth} outside map of shape {mags.shape}")
    peak = np.unravel_index(np.argmax(mags), mags.shape)
    hit = all(min((p - t) % s, (t - p) % s) <= tolerance_bins for p, t, s in zip(peak, truth, mags.shape))
    range_m = velocity = None
    if isinstance(surface, (RangeProfile, RangeVelocityMap)):
        range_m = float(surface.ranges_m[peak[0]])
    if isinstance(surface, RangeVelocityMap):
        velocity = float(surface.velocities_mps[peak[1]])
    try:
        ratio = pmsr(mags)
    except UndefinedMetricError:
        ratio = -math.inf
    peak_bin = (int(peak[0]), int(peak[1]) if len(peak) > 1 else None)
    return DetectionReport(peak_bin, range_m, velocity, ratio, hit)


def resolve_peaks(cut, threshold_db: float = 3.0) -> list[int]:
    """Bins that are cyclic local maxima (>= both neighbours) within
    ``threshold_db`` of the strongest bin."""
    mags = _magnitudes(cut)
    if mags.ndim != 1:
        raise DimensionError("resolve_peaks expects a 1-D cut")
    floor = mags.max() * 10 ** (-threshold_db / 20)
    left, right = np.roll(mags, 1), np.roll(mags, -1)
    return [int(i) for i in np.flatnonzero((mags >= left) & (mags >= right) & (mags >= floor))]
