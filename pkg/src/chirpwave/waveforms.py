"""Transmit-side generators for DFT-s-OFDM with chirping and the baseline waveforms.

All modulators work on the last axis and broadcast over leading axes, so a
stack of ``T`` payloads of shape ``(T, bits)`` yields ``T`` symbols at once.
A transmitted burst is a :class:`BasebandFrame`: ``K`` slow-time rows of
``N + L_CP`` fast-time samples.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import dsp
from .constellation import (
    ConstellationKind,
    bits_per_symbol,
    bits_to_int,
    gray,
    gray_inverse,
    int_to_bits,
    map_constellation,
    slice_labels,
)
from .errors import ConfigurationError, DimensionError, PayloadError


class WaveformKind(str, Enum):
    DFT_S_OFDM = "DFT_S_OFDM"
    CHIRPED_DFT_S_OFDM = "CHIRPED_DFT_S_OFDM"
    DFT_S_OFDM_CM = "DFT_S_OFDM_CM"
    OFDM = "OFDM"
    AFDM = "AFDM"
    OTFS = "OTFS"
    FMCW = "FMCW"


DFT_S_FAMILY = (WaveformKind.DFT_S_OFDM, WaveformKind.CHIRPED_DFT_S_OFDM, WaveformKind.DFT_S_OFDM_CM)


class ChirpShape(str, Enum):
    # Placeholder for nonlinear sweeps; only the linear one is generated.
    LINEAR = "LINEAR"


def _check_pow2(name: str, value: int) -> None:
    if not dsp.is_power_of_two(value):
        raise ConfigurationError(f"{name}={value!r} must be a positive power of two", name)


@dataclass(frozen=True)
class WaveformConfig:
    """Frame parameters shared by every waveform.

    Attributes:
        N: IFFT size, i.e. fast-time samples per symbol body.
        M: DFT-spread size.
        Q: constellation order.
        P: chirp-modulation order (1 means an unmodulated chirp).
        L_CP: cyclic-prefix length in samples.
        K: slow-time symbols per burst.
        B: bandwidth (= sample rate) in Hz.
        f_c: carrier frequency in Hz.
        constellation: PSK or square QAM.
        waveform: which modulator to run.
        M_otfs, N_otfs: OTFS delay and Doppler grid sizes, ``M_otfs * N_otfs == N``.
        chirp_shape: sweep law; only linear is implemented.
    """

    N: int = 256
    M: int = 128
    Q: int = 4
    P: int = 1
    L_CP: int = 32
    K: int = 64
    B: float = 50e6
    f_c: float = 30e9
    constellation: ConstellationKind = ConstellationKind.QAM
    waveform: WaveformKind = WaveformKind.CHIRPED_DFT_S_OFDM
    M_otfs: int = 128
    N_otfs: int = 2
    chirp_shape: ChirpShape = ChirpShape.LINEAR

    def __post_init__(self):
        object.__setattr__(self, "constellation", ConstellationKind(self.constellation))
        object.__setattr__(self, "waveform", WaveformKind(self.waveform))
        object.__setattr__(self, "chirp_shape", ChirpShape(self.chirp_shape))
        for name in ("N", "M", "Q", "P", "K", "M_otfs", "N_otfs"):
            _check_pow2(name, getattr(self, name))
        if self.Q < 2:
            raise ConfigurationError("Q must be at least 2", "Q")
        if self.constellation is ConstellationKind.QAM and bits_per_symbol(self.Q) % 2:
            raise ConfigurationError(f"Q={self.Q} is not a square QAM order", "Q")
        if self.M > self.N:
            raise ConfigurationError(f"M={self.M} exceeds N={self.N}", "M")
        if self.P > self.N // self.M:
            raise ConfigurationError(
                f"P={self.P} exceeds N/M={self.N // self.M}: chirp start points must fit in one comb gap", "P"
            )
        if self.M_otfs * self.N_otfs != self.N:
            raise ConfigurationError(
                f"M_otfs*N_otfs={self.M_otfs * self.N_otfs} must equal N={self.N}", "M_otfs*N_otfs"
            )
        if not isinstance(self.L_CP, (int, np.integer)) or not 0 <= self.L_CP <= self.N:
            raise ConfigurationError(f"L_CP={self.L_CP!r} must be an integer in [0, N]", "L_CP")
        for name in ("B", "f_c"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ConfigurationError(f"{name}={value!r} must be positive", name)

    def replace(self, **changes) -> "WaveformConfig":
        return dataclasses.replace(self, **changes)

    @property
    def symbol_length(self) -> int:
        return self.N + self.L_CP

    @property
    def sample_period(self) -> float:
        return 1.0 / self.B

    @property
    def bits_per_constellation_symbol(self) -> int:
        return bits_per_symbol(self.Q)

    @property
    def chirp_bits(self) -> int:
        return bits_per_symbol(self.P) if self.waveform is WaveformKind.DFT_S_OFDM_CM else 0

    @property
    def data_symbols(self) -> int:
        """Constellation symbols carried per slow-time symbol."""
        if self.waveform in DFT_S_FAMILY:
            return self.M
        if self.waveform is WaveformKind.FMCW:
            return 0
        return self.N

    @property
    def bits_per_symbol(self) -> int:
        return self.chirp_bits + self.data_symbols * self.bits_per_constellation_symbol


@dataclass(frozen=True)
class ChirpSpec:
    """A linear chirp with starting index ``p`` out of ``P`` start points."""

    start_index: int = 0
    shape: ChirpShape = ChirpShape.LINEAR

    def validate(self, cfg: WaveformConfig) -> None:
        if self.shape != ChirpShape.LINEAR:
            raise ConfigurationError(f"chirp shape {self.shape} is not implemented", "chirp_shape")
        if not 0 <= self.start_index < cfg.P:
            raise ConfigurationError(f"start index {self.start_index} outside [0, {cfg.P})", "P")


@dataclass
class BasebandFrame:
    """``K x (N + L_CP)`` complex samples plus the bits they carry."""

    grid: np.ndarray
    config: WaveformConfig
    payload_bits: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int8))

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=np.complex128)
        if self.grid.ndim == 1:
            self.grid = self.grid[None, :]
        if self.grid.shape[-1] != self.config.symbol_length:
            raise DimensionError(
                f"frame rows have {self.grid.shape[-1]} samples, expected {self.config.symbol_length}"
            )

    @property
    def body(self) -> np.ndarray:
        """Samples with the cyclic prefix stripped, shape ``(K, N)``."""
        return self.grid[..., self.config.L_CP :]

    @property
    def samples(self) -> np.ndarray:
        """The burst serialised in transmission order."""
        return self.grid.reshape(-1)

    def mean_power(self) -> float:
        return float(dsp.mean_power(self.grid))

    def with_grid(self, grid: np.ndarray) -> "BasebandFrame":
        return BasebandFrame(np.asarray(grid).reshape(self.grid.shape), self.config, self.payload_bits)


# --------------------------------------------------------------------------
# building blocks


def add_cyclic_prefix(body: np.ndarray, L_CP: int) -> np.ndarray:
    if L_CP == 0:
        return np.array(body, dtype=np.complex128)
    return np.concatenate([body[..., -L_CP:], body], axis=-1)


def remove_cyclic_prefix(samples: np.ndarray, cfg: WaveformConfig) -> np.ndarray:
    samples = np.asarray(samples)
    if samples.shape[-1] != cfg.symbol_length:
        raise DimensionError(f"expected {cfg.symbol_length} samples per symbol, got {samples.shape[-1]}")
    return samples[..., cfg.L_CP :]


def chirp_start_bin(p, cfg: WaveformConfig):
    """FFT bin at which chirp ``p`` starts; the P start points split one comb gap."""
    return np.asarray(p) * (cfg.N // (cfg.M * cfg.P))


def chirp_samples(p, cfg: WaveformConfig) -> np.ndarray:
    """Wrapped full-band linear chirp(s) starting at bin ``chirp_start_bin(p)``.

    Phase is evaluated in exact integer arithmetic modulo ``2N`` so long
    symbols keep full precision.
    """
    N = cfg.N
    n = np.arange(N, dtype=np.int64)
    start = np.asarray(chirp_start_bin(p, cfg), dtype=np.int64)[..., None]
    numer = (2 * start * n + n * n) % (2 * N)
    return np.exp(1j * np.pi * numer / N)


def make_chirp(spec: ChirpSpec, cfg: WaveformConfig) -> np.ndarray:
    """Unit-modulus chirp of length N for ``spec``.

    The instantaneous frequency starts at bin ``p * N / (M P)`` and advances one
    bin per sample, wrapping cyclically across the band.
    """
    spec.validate(cfg)
    return chirp_samples(spec.start_index, cfg)


def dft_s_ofdm_body(symbols, N: int) -> np.ndarray:
    """M-point DFT, interleaved mapping onto every (N/M)-th subcarrier, N-point IDFT.

    Scaled by ``sqrt(N/M)`` so unit-energy symbols give unit mean power.
    """
    symbols = dsp.as_complex(symbols, "symbols")
    M = symbols.shape[-1]
    if M > N or N % M:
        raise DimensionError(f"cannot spread {M} symbols over {N} subcarriers")
    spread = dsp.dft(symbols)
    grid = np.zeros(symbols.shape[:-1] + (N,), dtype=np.complex128)
    grid[..., :: N // M] = spread
    return np.sqrt(N / M) * dsp.idft(grid)


def modulate_dft_s_ofdm(symbols, cfg: WaveformConfig) -> np.ndarray:
    """Plain DFT-s-OFDM symbol(s) with cyclic prefix, shape ``(..., N + L_CP)``."""
    symbols = np.asarray(symbols)
    if symbols.shape[-1] != cfg.M:
        raise DimensionError(f"expected {cfg.M} symbols, got {symbols.shape[-1]}")
    return add_cyclic_prefix(dft_s_ofdm_body(symbols, cfg.N), cfg.L_CP)


def chirp_index_from_bits(chirp_bits, cfg: WaveformConfig) -> np.ndarray:
    width = bits_per_symbol(cfg.P)
    chirp_bits = np.asarray(chirp_bits, dtype=np.int64)
    if chirp_bits.shape[-1] != width:
        raise PayloadError(f"expected {width} chirp bits, got {chirp_bits.shape[-1]}")
    if width == 0:
        return np.zeros(chirp_bits.shape[:-1], dtype=np.int64)
    return gray_inverse(bits_to_int(chirp_bits, width)[..., 0])


def chirp_bits_from_index(p, cfg: WaveformConfig) -> np.ndarray:
    width = bits_per_symbol(cfg.P)
    p = np.asarray(p, dtype=np.int64)
    if width == 0:
        return np.zeros(p.shape + (0,), dtype=np.int64)
    return int_to_bits(gray(p)[..., None], width)


def modulate_with_chirp(symbols, chirp_bits, cfg: WaveformConfig) -> np.ndarray:
    """DFT-s-OFDM body times a chirp, then a prefix copied from the product.

    For ``CHIRPED_DFT_S_OFDM`` ``chirp_bits`` must be empty (p = 0); for
    ``DFT_S_OFDM_CM`` it holds ``log2 P`` Gray-labelled bits choosing the start.
    """
    symbols = np.asarray(symbols)
    if symbols.shape[-1] != cfg.M:
        raise DimensionError(f"expected {cfg.M} symbols, got {symbols.shape[-1]}")
    chirp_bits = np.asarray(chirp_bits, dtype=np.int64)
    if cfg.waveform is WaveformKind.CHIRPED_DFT_S_OFDM:
        if chirp_bits.size:
            raise PayloadError("unmodulated chirp takes no chirp bits")
        p = np.zeros(symbols.shape[:-1], dtype=np.int64)
    elif cfg.waveform is WaveformKind.DFT_S_OFDM_CM:
        if chirp_bits.ndim == 0 or chirp_bits.shape[-1] != bits_per_symbol(cfg.P):
            raise PayloadError(f"chirp modulation needs {bits_per_symbol(cfg.P)} bits per symbol")
        p = chirp_index_from_bits(chirp_bits, cfg)
    else:
        raise ConfigurationError(f"{cfg.waveform.value} is not a chirped DFT-s-OFDM kind", "waveform")
    body = dft_s_ofdm_body(symbols, cfg.N) * chirp_samples(p, cfg)
    return add_cyclic_prefix(body, cfg.L_CP)


def afdm_chirp_rates(cfg: WaveformConfig) -> tuple[float, float]:
    """(time-domain chirp rate, symbol-domain chirp rate) used for AFDM."""
    return 1.0 / (2 * cfg.N), 0.0


def _afdm_body(symbols: np.ndarray, cfg: WaveformConfig) -> np.ndarray:
    c1, c2 = afdm_chirp_rates(cfg)
    n = np.arange(cfg.N)
    pre = np.exp(2j * np.pi * c2 * n**2)
    post = np.exp(2j * np.pi * c1 * n**2)
    return post * dsp.idft(pre * symbols)


def _afdm_demod(body: np.ndarray, cfg: WaveformConfig) -> np.ndarray:
    c1, c2 = afdm_chirp_rates(cfg)
    n = np.arange(cfg.N)
    return np.exp(-2j * np.pi * c2 * n**2) * dsp.dft(np.exp(-2j * np.pi * c1 * n**2) * body)


def _otfs_body(symbols: np.ndarray, cfg: WaveformConfig) -> np.ndarray:
    # delay-Doppler grid, delay index fastest
    grid = symbols.reshape(symbols.shape[:-1] + (cfg.N_otfs, cfg.M_otfs))
    grid = np.swapaxes(grid, -1, -2)  # (..., M_otfs, N_otfs)
    tf = dsp.dft(dsp.idft(grid, axis=-1), axis=-2)  # inverse symplectic FFT
    slots = dsp.idft(tf, axis=-2)  # Heisenberg: per-column M_otfs-point IDFT
    return np.swapaxes(slots, -1, -2).reshape(symbols.shape[:-1] + (cfg.N,))


def _otfs_demod(body: np.ndarray, cfg: WaveformConfig) -> np.ndarray:
    slots = np.swapaxes(body.reshape(body.shape[:-1] + (cfg.N_otfs, cfg.M_otfs)), -1, -2)
    tf = dsp.dft(slots, axis=-2)  # Wigner
    grid = dsp.dft(dsp.idft(tf, axis=-2), axis=-1)  # symplectic FFT
    return np.swapaxes(grid, -1, -2).reshape(body.shape[:-1] + (cfg.N,))


def modulate_baseline(bits, cfg: WaveformConfig) -> np.ndarray:
    """OFDM, AFDM, OTFS or FMCW symbol(s) with cyclic prefix."""
    kind = cfg.waveform
    bits = np.asarray(bits, dtype=np.int64)
    if kind is WaveformKind.FMCW:
        if bits.size:
            raise PayloadError("FMCW carries no data")
        batch = bits.shape[:-1] if bits.ndim > 1 else ()
        body = np.broadcast_to(chirp_samples(0, cfg), batch + (cfg.N,))
        return add_cyclic_prefix(body, cfg.L_CP)
    if kind not in (WaveformKind.OFDM, WaveformKind.AFDM, WaveformKind.OTFS):
        raise ConfigurationError(f"{kind.value} is not a baseline waveform", "waveform")
    expected = cfg.N * cfg.bits_per_constellation_symbol
    if bits.ndim == 0 or bits.shape[-1] != expected:
        raise PayloadError(f"{kind.value} needs {expected} bits per symbol, got {bits.shape[-1] if bits.ndim else 0}")
    symbols = map_constellation(bits, cfg.Q, cfg.constellation)
    if kind is WaveformKind.OFDM:
        body = dsp.idft(symbols)
    elif kind is WaveformKind.AFDM:
        body = _afdm_body(symbols, cfg)
    else:
        body = _otfs_body(symbols, cfg)
    return add_cyclic_prefix(body, cfg.L_CP)


# --------------------------------------------------------------------------
# burst level


def split_payload(bits, cfg: WaveformConfig) -> tuple[np.ndarray, np.ndarray]:
    """Split per-symbol bits into (chirp bits, data bits)."""
    bits = np.asarray(bits, dtype=np.int64)
    if bits.shape[-1] != cfg.bits_per_symbol:
        raise PayloadError(f"expected {cfg.bits_per_symbol} bits per symbol, got {bits.shape[-1]}")
    return bits[..., : cfg.chirp_bits], bits[..., cfg.chirp_bits :]


def modulate_symbols(bits, cfg: WaveformConfig) -> np.ndarray:
    """Dispatch on ``cfg.waveform``; ``bits`` has shape ``(..., bits_per_symbol)``."""
    bits = np.asarray(bits, dtype=np.int64)
    kind = cfg.waveform
    if kind in DFT_S_FAMILY:
        chirp_bits, data_bits = split_payload(bits, cfg)
        symbols = map_constellation(data_bits, cfg.Q, cfg.constellation)
        if kind is WaveformKind.DFT_S_OFDM:
            return modulate_dft_s_ofdm(symbols, cfg)
        if kind is WaveformKind.CHIRPED_DFT_S_OFDM:
            chirp_bits = np.zeros(0, dtype=np.int64)
        return modulate_with_chirp(symbols, chirp_bits, cfg)
    if kind is WaveformKind.FMCW:
        if bits.shape[-1]:
            raise PayloadError("FMCW carries no data")
        return modulate_baseline(bits, cfg)
    return modulate_baseline(bits, cfg)


def modulate(bits, cfg: WaveformConfig) -> BasebandFrame:
    """Build a K-symbol burst from a flat bit sequence."""
    bits = np.asarray(bits, dtype=np.int64).reshape(-1)
    expected = cfg.K * cfg.bits_per_symbol
    if bits.size != expected:
        raise PayloadError(f"burst needs {expected} bits, got {bits.size}")
    per_symbol = bits.reshape(cfg.K, cfg.bits_per_symbol)
    grid = modulate_symbols(per_symbol, cfg)
    grid = np.broadcast_to(grid, (cfg.K, cfg.symbol_length)).copy()
    return BasebandFrame(grid, cfg, bits.astype(np.int8))


def random_bits(cfg: WaveformConfig, rng: np.random.Generator, symbols: int | None = None) -> np.ndarray:
    count = cfg.K if symbols is None else symbols
    return rng.integers(0, 2, size=count * cfg.bits_per_symbol, dtype=np.int64)


def random_frame(cfg: WaveformConfig, rng: np.random.Generator) -> BasebandFrame:
    return modulate(random_bits(cfg, rng), cfg)


def demodulate(samples, cfg: WaveformConfig) -> np.ndarray:
    """Invert every transmit stage (identity channel assumed); returns bits per symbol.

    ``samples`` has shape ``(..., N + L_CP)``; the result has shape
    ``(..., bits_per_symbol)``.
    """
    body = remove_cyclic_prefix(np.asarray(samples, dtype=np.complex128), cfg)
    kind = cfg.waveform
    if kind is WaveformKind.FMCW:
        return np.zeros(body.shape[:-1] + (0,), dtype=np.int64)
    if kind in DFT_S_FAMILY:
        p = np.zeros(body.shape[:-1], dtype=np.int64)
        if kind is not WaveformKind.DFT_S_OFDM:
            dechirped = body * np.conj(chirp_samples(0, cfg))
            if kind is WaveformKind.DFT_S_OFDM_CM:
                # the start offset shifts the occupied comb; pick the loaded one
                spectrum = np.abs(dsp.dft(dechirped)) ** 2
                offsets = chirp_start_bin(np.arange(cfg.P), cfg)
                comb = spectrum.reshape(body.shape[:-1] + (cfg.M, cfg.N // cfg.M))
                p = np.argmax(comb.sum(axis=-2)[..., offsets], axis=-1)
            body = dechirped * np.conj(chirp_samples(p, cfg)) * chirp_samples(0, cfg)
        spectrum = dsp.dft(body)[..., :: cfg.N // cfg.M] * np.sqrt(cfg.M / cfg.N)
        symbols = dsp.idft(spectrum)
        data = int_to_bits(slice_labels(symbols, cfg.Q, cfg.constellation), cfg.bits_per_constellation_symbol)
        if kind is WaveformKind.DFT_S_OFDM_CM:
            return np.concatenate([chirp_bits_from_index(p, cfg), data], axis=-1)
        return data
    if kind is WaveformKind.OFDM:
        symbols = dsp.dft(body)
    elif kind is WaveformKind.AFDM:
        symbols = _afdm_demod(body, cfg)
    else:
        symbols = _otfs_demod(body, cfg)
    return int_to_bits(slice_labels(symbols, cfg.Q, cfg.constellation), cfg.bits_per_constellation_symbol)
