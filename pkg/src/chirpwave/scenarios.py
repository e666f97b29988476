"""Seeded Monte Carlo trials shared by the experiment runner, demos and tests.

Each function draws everything it needs from the generator it is given, so a
trial is reproducible from its seed alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import (
    ChannelProfile,
    Interferer,
    PathTap,
    complex_noise,
    cyclic_delay,
    propagate,
    random_phase_taps,
    rayleigh_taps,
)
from .constellation import bits_to_int, map_constellation
from .errors import ConfigurationError
from .metrics import papr_db
from .receiver import cm_channels, equivalent_channels, ml_detect, ml_detect_cm, lmmse_detect
from .sensing import RangeProfile, RangeVelocityMap, matched_filter_map, mix_and_range
from .waveforms import (
    ChirpSpec,
    WaveformConfig,
    WaveformKind,
    modulate_symbols,
    random_frame,
)

SCENARIO_II_DELAYS = (0, 1, 2)
_FADING = {"rayleigh": rayleigh_taps, "random_phase": random_phase_taps}


# --------------------------------------------------------------------------
# communication


def papr_samples(cfg: WaveformConfig, count: int, rng: np.random.Generator, chunk: int = 4096) -> np.ndarray:
    """Body PAPR (dB) of ``count`` independently drawn symbols."""
    out = []
    left = count
    while left > 0:
        n = min(chunk, left)
        bits = rng.integers(0, 2, size=(n, cfg.bits_per_symbol))
        symbols = modulate_symbols(bits, cfg)
        out.append(np.broadcast_to(papr_db(symbols[..., cfg.L_CP :]), (n,)))
        left -= n
    return np.concatenate(out)


def ber_trial(cfg: WaveformConfig, snr_db: float, frames: int, rng: np.random.Generator,
              delays: Sequence[int] = SCENARIO_II_DELAYS, detector: str = "ml",
              fading: str = "rayleigh") -> tuple[int, int]:
    """Bit errors over ``frames`` single-symbol transmissions through random
    multipath, with the receiver knowing the channel.

    ``fading`` is ``"rayleigh"`` (i.i.d. CN(0, 1/L) taps) or ``"random_phase"``
    (fixed 1/sqrt(L) magnitudes, uniform phases). SNR is the ratio of mean
    transmit sample power (unity) to noise variance; the taps have unit total
    average power. Returns (errors, bits).
    """
    kind = cfg.waveform
    if kind not in (WaveformKind.DFT_S_OFDM, WaveformKind.CHIRPED_DFT_S_OFDM, WaveformKind.DFT_S_OFDM_CM):
        raise ConfigurationError(f"BER simulation supports the DFT-s-OFDM family, not {kind.value}", "waveform")
    if max(delays) > cfg.L_CP:
        raise ConfigurationError(f"path delay {max(delays)} exceeds L_CP={cfg.L_CP}", "delay")
    if fading not in _FADING:
        raise ConfigurationError(f"unknown fading model {fading!r}", "fading")
    gains = _FADING[fading](rng, delays, frames)
    bits = rng.integers(0, 2, size=(frames, cfg.bits_per_symbol))
    chirp_bits, data_bits = bits[:, : cfg.chirp_bits], bits[:, cfg.chirp_bits :]
    symbols = map_constellation(data_bits, cfg.Q, cfg.constellation)
    noise_var = 10 ** (-snr_db / 10)

    if kind is WaveformKind.DFT_S_OFDM_CM:
        channels = cm_channels(cfg, delays=delays, gains=gains)  # (F, P, N, M)
        which = bits_to_int(chirp_bits, cfg.chirp_bits)[:, 0] if cfg.chirp_bits else np.zeros(frames, int)
        H = channels[np.arange(frames), which]
    else:
        chirp = None if kind is WaveformKind.DFT_S_OFDM else ChirpSpec(0)
        H = equivalent_channels(cfg, delays, gains, chirp)
    y = (H @ symbols[..., None])[..., 0]
    y = y + complex_noise(rng, y.shape, noise_var)

    if detector == "ml":
        detected = ml_detect_cm(y, cfg, channels=channels) if kind is WaveformKind.DFT_S_OFDM_CM else ml_detect(y, H, cfg)
    elif detector == "lmmse" and kind is not WaveformKind.DFT_S_OFDM_CM:
        detected = lmmse_detect(y, H, cfg, noise_var)
    else:
        raise ConfigurationError(f"unknown detector {detector!r} for {kind.value}", "detector")
    return int(np.count_nonzero(detected != bits)), int(bits.size)


def diversity_slope(snr_db, ber, upper: float = 1e-2, lower: float = 1e-4) -> float:
    """Negative decades of BER per 10 dB, measured between the SNRs where the
    curve crosses ``upper`` and ``lower`` (log-linear interpolation).

    Returns NaN when the curve does not span both levels.
    """
    snr_db = np.asarray(snr_db, dtype=float)
    logb = np.log10(np.maximum(np.asarray(ber, dtype=float), 1e-300))

    def crossing(level):
        t = math.log10(level)
        for i in range(len(snr_db) - 1):
            if logb[i] >= t >= logb[i + 1] and logb[i] != logb[i + 1]:
                return snr_db[i] + (t - logb[i]) * (snr_db[i + 1] - snr_db[i]) / (logb[i + 1] - logb[i])
        return None

    a, b = crossing(upper), crossing(lower)
    if a is None or b is None or b <= a:
        return math.nan
    return (math.log10(upper) - math.log10(lower)) / ((b - a) / 10)


# --------------------------------------------------------------------------
# sensing


@dataclass(frozen=True)
class GhostScenario:
    """Own echo plus another emitter's burst arriving at a different delay.

    Powers are relative to our own transmit power: the echo comes back
    ``echo_gain_db`` down, the interferer at ``isr_db``, noise at ``snr_db``.
    """

    target_delay: int = 10
    interferer_delay: int = 20
    echo_gain_db: float = -10.0
    snr_db: float = -5.0
    isr_db: float = -10.0


def ghost_trial(cfg: WaveformConfig, scenario: GhostScenario, rng: np.random.Generator) -> RangeProfile:
    """Beat-frequency range profile of one burst in the two-emitter scene."""
    own = random_frame(cfg, rng)
    other = random_frame(cfg, rng)
    phase = np.exp(2j * np.pi * rng.random())
    echo = PathTap(delay=scenario.target_delay, gain=10 ** (scenario.echo_gain_db / 20) * phase)
    profile = ChannelProfile(
        taps=[echo],
        snr_db=scenario.snr_db,
        interferers=[Interferer(other, scenario.isr_db, offset=scenario.interferer_delay)],
    )
    rx = propagate(own, profile, seed=rng.integers(2**63))
    return mix_and_range(own, rx, cfg)


def doppler_for_bin(cfg: WaveformConfig, velocity_bin: float) -> float:
    """Doppler shift (Hz) that lands on the given slow-time bin."""
    return velocity_bin * cfg.B / (cfg.symbol_length * cfg.K)


def sensing_trial(cfg: WaveformConfig, rng: np.random.Generator, *, delay: int, velocity_bin: int = 0,
                  snr_db: float = math.inf, clipping_ratio_db: float = math.inf,
                  gain: complex = 1.0) -> RangeVelocityMap:
    """Matched-filter map of one point target.

    The transmitter clips its own burst; the receiver correlates against the
    intended (unclipped) waveform, so clipping shows up as mismatch loss.
    """
    tx = random_frame(cfg, rng)
    tap = PathTap(delay=delay, gain=complex(gain), doppler_hz=doppler_for_bin(cfg, velocity_bin))
    profile = ChannelProfile(taps=[tap], snr_db=snr_db, clipping_ratio_db=clipping_ratio_db)
    rx = propagate(tx, profile, seed=rng.integers(2**63))
    return matched_filter_map(tx, rx, cfg)


def two_target_cut(cfg: WaveformConfig, separation_bins: float, rng: np.random.Generator) -> RangeProfile:
    """Zero-Doppler range cut for two equal, in-phase targets ``separation_bins`` apart."""
    tx = random_frame(cfg.replace(K=1), rng).body
    rx = tx + cyclic_delay(tx, separation_bins)
    return matched_filter_map(tx, rx, cfg.replace(K=1)).range_cut(0)
