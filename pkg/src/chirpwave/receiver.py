"""Communication receivers for (chirped) DFT-s-OFDM with perfect channel knowledge.

The known chirp, spreading, subcarrier mapping and multipath are all folded
into one ``N x M`` equivalent channel, so every detector below sees the
linear model ``y = H s + w``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import PathTap, apply_taps
from .constellation import alphabet, bits_per_symbol, int_to_bits, slice_labels, gray_inverse
from .errors import DetectionBudgetError, DimensionError, NumericalError
from .waveforms import (
    ChirpSpec,
    WaveformConfig,
    WaveformKind,
    add_cyclic_prefix,
    chirp_samples,
    dft_s_ofdm_body,
)

DEFAULT_BUDGET = 2**20
_TIE_RTOL = 1e-9


@dataclass
class EquivalentChannel:
    matrix: np.ndarray
    noise_var: float = 0.0

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=np.complex128)
        if not np.all(np.isfinite(self.matrix)):
            raise NumericalError("equivalent channel has non-finite entries")


def _transmit_basis(cfg: WaveformConfig, chirp: ChirpSpec | None) -> np.ndarray:
    """Transmitted symbols (with prefix) for each unit constellation impulse, shape (M, N+L_CP)."""
    body = dft_s_ofdm_body(np.eye(cfg.M), cfg.N)
    if chirp is not None:
        chirp.validate(cfg)
        body = body * chirp_samples(chirp.start_index, cfg)
    return add_cyclic_prefix(body, cfg.L_CP)


def _default_chirp(cfg: WaveformConfig) -> ChirpSpec | None:
    return None if cfg.waveform is WaveformKind.DFT_S_OFDM else ChirpSpec(0)


def build_equivalent_channel(cfg: WaveformConfig, taps: Sequence[PathTap],
                             chirp: ChirpSpec | None = None, noise_var: float = 0.0,
                             symbol_index: int = 0) -> EquivalentChannel:
    """Probe the modulator and channel with each unit symbol; column m is the
    noiseless, prefix-free body received for ``s = e_m``.

    ``chirp=None`` means no chirp (plain DFT-s-OFDM).
    """
    basis = _transmit_basis(cfg, chirp)
    start = symbol_index * cfg.symbol_length
    received = apply_taps(basis, taps, cfg.B, start_index=start)
    return EquivalentChannel(received[:, cfg.L_CP :].T, noise_var)


def equivalent_channels(cfg: WaveformConfig, delays: Sequence[int], gains: np.ndarray,
                        chirp: ChirpSpec | None = None) -> np.ndarray:
    """Batched Doppler-free version: ``gains`` is ``(F, L)``, result ``(F, N, M)``."""
    basis = _transmit_basis(cfg, chirp)
    per_path = np.stack(
        [apply_taps(basis, [PathTap(delay=int(d))], cfg.B)[:, cfg.L_CP :].T for d in delays]
    )
    return np.einsum("fl,lnm->fnm", np.asarray(gains, dtype=np.complex128), per_path)


def candidate_symbols(cfg: WaveformConfig) -> np.ndarray:
    """All constellation vectors in lexicographic bit order, shape ``(M, Q**M)``."""
    b = bits_per_symbol(cfg.Q)
    count = cfg.Q**cfg.M
    labels = (np.arange(count)[:, None] >> (b * np.arange(cfg.M - 1, -1, -1))) & (cfg.Q - 1)
    return alphabet(cfg.Q, cfg.constellation)[labels].T


def _check_budget(hypotheses: int, budget: int) -> None:
    if hypotheses > budget:
        raise DetectionBudgetError(
            f"exhaustive ML needs {hypotheses} hypotheses (budget {budget}); use LMMSE instead"
        )


def _first_minimum(metric: np.ndarray) -> np.ndarray:
    """Index of the lowest metric per row, the earliest one among numerical ties."""
    best = metric.min(axis=-1, keepdims=True)
    tol = _TIE_RTOL * np.maximum(np.abs(best), 1.0)
    return np.argmax(metric <= best + tol, axis=-1)


def ml_metrics(y: np.ndarray, matrices: np.ndarray, candidates: np.ndarray) -> np.ndarray:
    """``||y - H s||^2`` for every candidate; ``matrices`` is ``(F, G, N, M)``, result ``(F, G*C)``.

    Expanded as ``||y||^2 - 2 Re(z^H s) + s^H G s`` with ``z = H^H y`` and
    ``G = H^H H``, which costs M^2 per candidate instead of N M.
    """
    M = candidates.shape[0]
    hh = np.conj(np.swapaxes(matrices, -1, -2))
    z = (hh @ y[:, None, :, None])[..., 0]  # (F, G, M)
    gram = (hh @ matrices).reshape(matrices.shape[:2] + (M * M,))
    outer = (np.conj(candidates)[:, None, :] * candidates[None, :, :]).reshape(M * M, -1)
    cross = (np.conj(z) @ candidates).real
    quad = (gram @ outer).real
    energy = np.sum(np.abs(y) ** 2, axis=-1)[:, None, None]
    metric = energy - 2 * cross + quad
    return metric.reshape(metric.shape[0], -1)


def _batched(y, matrix):
    y = np.asarray(y, dtype=np.complex128)
    matrix = np.asarray(matrix, dtype=np.complex128)
    single = y.ndim == 1
    y = np.atleast_2d(y)
    if matrix.ndim == 2:
        matrix = np.broadcast_to(matrix, (y.shape[0],) + matrix.shape)
    if matrix.shape[-2] != y.shape[-1] or matrix.shape[0] != y.shape[0]:
        raise DimensionError(f"observation shape {y.shape} does not fit channel {matrix.shape}")
    return y, matrix, single


def ml_detect(y, eqch: EquivalentChannel | np.ndarray, cfg: WaveformConfig,
              budget: int = DEFAULT_BUDGET, chunk: int = 2048) -> np.ndarray:
    """Exhaustive maximum-likelihood detection of the M data symbols.

    ``y`` may be ``(N,)`` or a batch ``(F, N)`` with ``eqch`` an ``(F, N, M)``
    array. Ties go to the lexicographically smallest bit pattern.
    """
    matrix = eqch.matrix if isinstance(eqch, EquivalentChannel) else eqch
    _check_budget(cfg.Q**cfg.M, budget)
    y, matrix, single = _batched(y, matrix)
    cands = candidate_symbols(cfg)
    width = cfg.M * bits_per_symbol(cfg.Q)
    out = np.empty((y.shape[0], width), dtype=np.int64)
    for lo in range(0, y.shape[0], chunk):
        sl = slice(lo, lo + chunk)
        idx = _first_minimum(ml_metrics(y[sl], matrix[sl, None], cands))
        out[sl] = int_to_bits(idx[:, None], width)
    return out[0] if single else out


def cm_channels(cfg: WaveformConfig, taps: Sequence[PathTap] | None = None, *,
                delays: Sequence[int] | None = None, gains: np.ndarray | None = None) -> np.ndarray:
    """Equivalent channels for every chirp hypothesis in chirp-bit lexicographic order.

    Either ``taps`` (one channel, result ``(P, N, M)``) or ``delays``+``gains``
    (batch, result ``(F, P, N, M)``).
    """
    order = gray_inverse(np.arange(cfg.P))
    if taps is not None:
        return np.stack([build_equivalent_channel(cfg, taps, ChirpSpec(int(p))).matrix for p in order])
    return np.stack([equivalent_channels(cfg, delays, gains, ChirpSpec(int(p))) for p in order], axis=1)


def ml_detect_cm(y, cfg: WaveformConfig, taps: Sequence[PathTap] | None = None, *,
                 channels: np.ndarray | None = None, budget: int = DEFAULT_BUDGET,
                 chunk: int = 2048) -> np.ndarray:
    """Joint ML over chirp start index and data; returns (chirp bits, data bits).

    Pass either ``taps`` or precomputed ``channels`` from :func:`cm_channels`.
    """
    _check_budget(cfg.P * cfg.Q**cfg.M, budget)
    if channels is None:
        channels = cm_channels(cfg, taps)
    y = np.asarray(y, dtype=np.complex128)
    single = y.ndim == 1
    y = np.atleast_2d(y)
    if channels.ndim == 3:
        channels = np.broadcast_to(channels, (y.shape[0],) + channels.shape)
    if channels.shape[-2] != y.shape[-1]:
        raise DimensionError(f"observation shape {y.shape} does not fit channels {channels.shape}")
    cands = candidate_symbols(cfg)
    chirp_width = bits_per_symbol(cfg.P)
    data_width = cfg.M * bits_per_symbol(cfg.Q)
    out = np.empty((y.shape[0], chirp_width + data_width), dtype=np.int64)
    for lo in range(0, y.shape[0], chunk):
        sl = slice(lo, lo + chunk)
        idx = _first_minimum(ml_metrics(y[sl], channels[sl], cands))
        out[sl] = int_to_bits(idx[:, None], chirp_width + data_width)
    return out[0] if single else out


def lmmse_equalize(y, eqch: EquivalentChannel | np.ndarray, noise_var: float | None = None) -> np.ndarray:
    """Soft estimate ``(H^H H + s2 I)^-1 H^H y`` (unit-energy symbols assumed)."""
    if isinstance(eqch, EquivalentChannel):
        matrix, s2 = eqch.matrix, eqch.noise_var if noise_var is None else noise_var
    else:
        matrix, s2 = np.asarray(eqch, dtype=np.complex128), (noise_var or 0.0)
    y, matrix, single = _batched(y, matrix)
    hh = np.conj(np.swapaxes(matrix, -1, -2))
    gram = hh @ matrix + s2 * np.eye(matrix.shape[-1])
    if np.any(np.linalg.cond(gram) > 1e12):
        raise NumericalError("LMMSE normal matrix is singular; noise_var must be positive for rank-deficient H")
    est = np.linalg.solve(gram, (hh @ y[..., None]))[..., 0]
    return est[0] if single else est


def lmmse_detect(y, eqch: EquivalentChannel | np.ndarray, cfg: WaveformConfig,
                 noise_var: float | None = None) -> np.ndarray:
    est = lmmse_equalize(y, eqch, noise_var)
    return int_to_bits(slice_labels(est, cfg.Q, cfg.constellation), bits_per_symbol(cfg.Q))


def count_errors(tx_bits, rx_bits) -> tuple[int, int]:
    """(Hamming distance, length)."""
    tx = np.asarray(tx_bits).ravel()
    rx = np.asarray(rx_bits).ravel()
    if tx.size != rx.size:
        raise DimensionError(f"bit sequences differ in length: {tx.size} vs {rx.size}")
    return int(np.count_nonzero(tx != rx)), int(tx.size)
