"""Multipath/Doppler propagation, AWGN, co-channel interference and PA clipping."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import dsp
from .errors import ConfigurationError, DimensionError
from .waveforms import BasebandFrame, WaveformConfig

SPEED_OF_LIGHT = 3e8


@dataclass(frozen=True)
class PathTap:
    delay: int = 0
    gain: complex = 1.0
    doppler_hz: float = 0.0


@dataclass
class Interferer:
    """Another emitter's burst, received at ``isr_db`` relative to our own signal.

    ``offset`` is the cyclic start offset in samples; ``None`` draws one
    uniformly from the propagation seed.
    """

    frame: BasebandFrame | np.ndarray
    isr_db: float
    offset: int | None = None

    def __post_init__(self):
        if not math.isfinite(self.isr_db):
            raise ConfigurationError("interferer ISR must be finite", "isr_db")


@dataclass
class ChannelProfile:
    taps: Sequence[PathTap] = field(default_factory=lambda: [PathTap()])
    snr_db: float = math.inf
    interferers: Sequence[Interferer] = field(default_factory=list)
    clipping_ratio_db: float = math.inf

    def __post_init__(self):
        if len(self.taps) < 1:
            raise ConfigurationError("a channel needs at least one path", "taps")

    @property
    def max_delay(self) -> int:
        return max(t.delay for t in self.taps)


def _samples_of(frame) -> np.ndarray:
    if isinstance(frame, BasebandFrame):
        return frame.grid
    return np.asarray(frame, dtype=np.complex128)


def clip(frame, clipping_ratio_db: float, reference_power: float | None = None):
    """Soft limiter: magnitudes above ``A = sqrt(P) * 10^(CR/20)`` are set to A, phase kept.

    ``P`` is the mean power of the whole input unless ``reference_power`` is
    given. Returns the same type it was given.
    """
    x = _samples_of(frame)
    if clipping_ratio_db == math.inf:
        out = x.copy()
    else:
        power = dsp.mean_power(x) if reference_power is None else reference_power
        limit = math.sqrt(power) * 10 ** (clipping_ratio_db / 20)
        mag = np.abs(x)
        scale = np.where(mag > limit, limit / np.where(mag > 0, mag, 1.0), 1.0)
        out = x * scale
    if isinstance(frame, BasebandFrame):
        return frame.with_grid(out)
    return out


def apply_taps(samples, taps: Sequence[PathTap], sample_rate: float, start_index: int = 0) -> np.ndarray:
    """``y[n] = sum_l g_l exp(j 2 pi f_l (n0 + n) / fs) x[n - d_l]`` along the last axis.

    Samples before the start of ``samples`` are taken as zero; a cyclic prefix
    at least as long as the largest delay makes the per-symbol effect circular.
    """
    x = np.asarray(samples, dtype=np.complex128)
    length = x.shape[-1]
    n = start_index + np.arange(length)
    y = np.zeros_like(x)
    for tap in taps:
        if tap.delay < 0 or tap.delay > length:
            raise ConfigurationError(f"tap delay {tap.delay} outside [0, {length}]", "delay")
        shifted = np.zeros_like(x)
        shifted[..., tap.delay :] = x[..., : length - tap.delay]
        if tap.doppler_hz:
            shifted = shifted * np.exp(2j * np.pi * tap.doppler_hz * n / sample_rate)
        y += tap.gain * shifted
    return y


def complex_noise(rng: np.random.Generator, shape, variance: float) -> np.ndarray:
    return math.sqrt(variance / 2) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def propagate(frame: BasebandFrame, profile: ChannelProfile, seed=None) -> BasebandFrame:
    """Send a burst through the channel.

    Order: PA clipping, multipath with per-path Doppler, interference, noise.
    SNR and ISR are referenced to the mean power of the frame *before*
    clipping, i.e. the nominal transmit level; clipping therefore costs
    received power. Deterministic for a given ``seed``.
    """
    cfg = frame.config
    if profile.max_delay > cfg.L_CP:
        raise ConfigurationError(f"path delay {profile.max_delay} exceeds L_CP={cfg.L_CP}", "delay")
    rng = np.random.default_rng(seed)
    x = frame.samples
    reference = float(dsp.mean_power(x))
    x = clip(x, profile.clipping_ratio_db, reference)
    y = apply_taps(x, profile.taps, cfg.B)

    for interferer in profile.interferers:
        z = _samples_of(interferer.frame).reshape(-1)
        if z.size != y.size:
            raise DimensionError(f"interferer has {z.size} samples, frame has {y.size}")
        offset = interferer.offset if interferer.offset is not None else int(rng.integers(0, z.size))
        z_power = float(dsp.mean_power(z))
        if z_power > 0:
            scale = math.sqrt(reference * 10 ** (interferer.isr_db / 10) / z_power)
            y = y + scale * np.roll(z, offset)

    if profile.snr_db != math.inf:
        variance = reference / 10 ** (profile.snr_db / 10)
        y = y + complex_noise(rng, y.shape, variance)
    return frame.with_grid(y)


def radar_echo(frame: BasebandFrame | None, range_m: float, velocity_mps: float,
               rcs_gain: complex, cfg: WaveformConfig) -> PathTap:
    """Monostatic echo of a point target as a channel tap.

    ``frame`` is accepted for symmetry with the other channel calls; only
    ``cfg`` determines the tap.
    """
    if range_m < 0:
        raise ConfigurationError(f"range {range_m} m is negative", "range_m")
    delay = int(round(2 * range_m * cfg.B / SPEED_OF_LIGHT))
    if delay > cfg.L_CP:
        max_range = cfg.L_CP * SPEED_OF_LIGHT / (2 * cfg.B)
        raise ConfigurationError(
            f"range {range_m} m maps to {delay} samples, beyond the {max_range:g} m window (L_CP)", "range_m"
        )
    doppler = 2 * velocity_mps * cfg.f_c / SPEED_OF_LIGHT
    return PathTap(delay=delay, gain=complex(rcs_gain), doppler_hz=doppler)


def rayleigh_taps(rng: np.random.Generator, delays: Sequence[int], size: int | None = None) -> np.ndarray:
    """i.i.d. CN(0, 1/L) gains for ``len(delays)`` paths, shape ``(size, L)`` or ``(L,)``."""
    L = len(delays)
    shape = (L,) if size is None else (size, L)
    return complex_noise(rng, shape, 1.0 / L)


def random_phase_taps(rng: np.random.Generator, delays: Sequence[int], size: int | None = None) -> np.ndarray:
    """Equal-magnitude ``1/sqrt(L)`` gains with i.i.d. uniform phases (no amplitude fading)."""
    L = len(delays)
    shape = (L,) if size is None else (size, L)
    return np.exp(2j * np.pi * rng.random(shape)) / math.sqrt(L)


def cyclic_delay(x, delay: float) -> np.ndarray:
    """Band-limited cyclic delay of ``x`` by a possibly fractional number of samples."""
    x = np.asarray(x, dtype=np.complex128)
    n = x.shape[-1]
    if float(delay).is_integer():
        return np.roll(x, int(delay), axis=-1)
    k = np.fft.fftfreq(n) * n
    return np.fft.ifft(np.fft.fft(x, axis=-1) * np.exp(-2j * np.pi * k * delay / n), axis=-1)
