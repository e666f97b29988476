import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chirpwave.constellation import alphabet, map_constellation
from chirpwave.errors import ConfigurationError, DimensionError, PayloadError
from chirpwave.metrics import papr_db
from chirpwave.waveforms import (
    ChirpSpec,
    WaveformConfig,
    WaveformKind,
    _otfs_body,
    chirp_bits_from_index,
    chirp_samples,
    demodulate,
    dft_s_ofdm_body,
    make_chirp,
    modulate,
    modulate_baseline,
    modulate_dft_s_ofdm,
    modulate_with_chirp,
    random_bits,
    random_frame,
)

W = WaveformKind
ALL_KINDS = list(W)


def _dft_matrix(n):
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n) / np.sqrt(n)


def _qpsk(rng, size):
    return alphabet(4, "PSK")[rng.integers(0, 4, size)]


@pytest.mark.parametrize(
    "changes,field",
    [
        ({"M": 100}, "M"),
        ({"N": 48, "M_otfs": 48, "N_otfs": 1}, "N"),
        ({"M": 512}, "M"),
        ({"M_otfs": 64}, "M_otfs*N_otfs"),
        ({"P": 4}, "P"),
        ({"L_CP": -1}, "L_CP"),
        ({"Q": 8}, "Q"),
        ({"B": 0.0}, "B"),
    ],
)
def test_config_validation_names_field(changes, field):
    with pytest.raises(ConfigurationError) as err:
        WaveformConfig(**changes)
    assert err.value.field == field


def test_body_equals_explicit_matrix_chain():
    rng = np.random.default_rng(0)
    M, N = 8, 32
    s = _qpsk(rng, M)
    mapping = np.zeros((N, M))
    mapping[np.arange(M) * (N // M), np.arange(M)] = 1
    oracle = np.sqrt(N / M) * np.conj(_dft_matrix(N)).T @ mapping @ _dft_matrix(M) @ s
    assert np.max(np.abs(dft_s_ofdm_body(s, N) - oracle)) < 1e-12


def test_no_spreading_returns_symbols():
    s = _qpsk(np.random.default_rng(1), 16)
    assert np.allclose(dft_s_ofdm_body(s, 16), s)


def test_interleaved_body_repeats_symbols():
    cfg = WaveformConfig(N=256, M=128, L_CP=32)
    s = alphabet(16, "QAM")[np.random.default_rng(2).integers(0, 16, cfg.M)]
    body = dft_s_ofdm_body(s, cfg.N)
    assert np.allclose(np.abs(body[: cfg.M]), np.abs(body[cfg.M :]))
    assert np.allclose(body, np.tile(s, 2))


def test_prefix_is_tail_copy():
    cfg = WaveformConfig(N=64, M=16, L_CP=8, M_otfs=64, N_otfs=1)
    x = modulate_dft_s_ofdm(_qpsk(np.random.default_rng(3), 16), cfg)
    assert x.shape == (72,)
    assert np.array_equal(x[:8], x[-8:])


def test_symbol_count_mismatch():
    with pytest.raises(DimensionError):
        modulate_dft_s_ofdm(np.ones(7), WaveformConfig())


@pytest.mark.parametrize("M,N", [(1, 8), (4, 16), (16, 64), (128, 256), (256, 256)])
def test_psk_body_constant_modulus(M, N):
    mag = np.abs(dft_s_ofdm_body(_qpsk(np.random.default_rng(M), M), N))
    assert mag.max() / mag.min() < 1 + 1e-9


def test_chirp_unit_modulus_and_sweep():
    cfg = WaveformConfig(N=64, M=16, P=4, L_CP=0, M_otfs=64, N_otfs=1)
    c = make_chirp(ChirpSpec(0), cfg)
    assert np.allclose(np.abs(c), 1.0)
    # finite-difference instantaneous frequency, in bins
    step = np.angle(c[1:] * np.conj(c[:-1])) % (2 * np.pi) * cfg.N / (2 * np.pi)
    assert np.allclose(np.diff(step), 1.0)
    assert step[0] == pytest.approx(0.5)


def test_chirp_matches_closed_form():
    cfg = WaveformConfig(N=64, M=16, P=4, L_CP=0, M_otfs=64, N_otfs=1)
    n = np.arange(cfg.N)
    for p in range(cfg.P):
        start = p * cfg.N / (cfg.M * cfg.P)
        oracle = np.exp(2j * np.pi * (start * n / cfg.N + n**2 / (2 * cfg.N)))
        assert np.max(np.abs(make_chirp(ChirpSpec(p), cfg) - oracle)) < 1e-9


def test_chirp_delay_mix_is_tone():
    cfg = WaveformConfig(N=64, M=64, L_CP=0, M_otfs=64, N_otfs=1)
    c = chirp_samples(0, cfg)
    for d in range(cfg.N):
        spectrum = np.abs(np.fft.fft(c * np.conj(np.roll(c, d))))
        assert np.argmax(spectrum) == d
        assert spectrum[d] == pytest.approx(cfg.N)


def test_chirp_spec_validation():
    cfg = WaveformConfig(P=2)
    with pytest.raises(ConfigurationError):
        make_chirp(ChirpSpec(2), cfg)
    with pytest.raises(ConfigurationError):
        make_chirp(ChirpSpec(0, "QUADRATIC"), cfg)


def test_bits_00_start_at_lowest_frequency():
    cfg = WaveformConfig(N=64, M=16, P=4, L_CP=8, M_otfs=64, N_otfs=1, waveform=W.DFT_S_OFDM_CM)
    starts = []
    for p in range(cfg.P):
        c = chirp_samples(p, cfg)
        starts.append(np.angle(c[1] * np.conj(c[0])) % (2 * np.pi))
    assert np.argmin(starts) == 0
    assert chirp_bits_from_index(0, cfg).tolist() == [0, 0]


def test_chirp_prefix_copied_from_product():
    cfg = WaveformConfig(N=64, M=16, L_CP=8, M_otfs=64, N_otfs=1, waveform=W.CHIRPED_DFT_S_OFDM)
    s = _qpsk(np.random.default_rng(4), cfg.M)
    x = modulate_with_chirp(s, [], cfg)
    body = dft_s_ofdm_body(s, cfg.N) * chirp_samples(0, cfg)
    assert np.allclose(x[cfg.L_CP :], body)
    assert np.allclose(x[: cfg.L_CP], body[-cfg.L_CP :])


def test_chirp_bit_errors():
    cfg = WaveformConfig(P=2, waveform=W.DFT_S_OFDM_CM)
    s = np.ones(cfg.M)
    with pytest.raises(PayloadError):
        modulate_with_chirp(s, [0, 1], cfg)
    with pytest.raises(PayloadError):
        modulate_with_chirp(s, [1], cfg.replace(waveform=W.CHIRPED_DFT_S_OFDM))


def test_chirp_index_changes_body_by_a_tone():
    cfg = WaveformConfig(N=64, M=16, P=4, L_CP=0, M_otfs=64, N_otfs=1, waveform=W.DFT_S_OFDM_CM)
    s = _qpsk(np.random.default_rng(5), cfg.M)
    n = np.arange(cfg.N)
    bodies = {p: modulate_with_chirp(s, chirp_bits_from_index(p, cfg), cfg) for p in range(cfg.P)}
    for p in range(cfg.P):
        for q in range(cfg.P):
            shift = (p - q) * cfg.N // (cfg.M * cfg.P)
            assert np.allclose(bodies[p] / bodies[q], np.exp(2j * np.pi * shift * n / cfg.N))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([W.DFT_S_OFDM, W.CHIRPED_DFT_S_OFDM, W.DFT_S_OFDM_CM]))
def test_psk_frames_are_constant_modulus(seed, kind):
    cfg = WaveformConfig(N=64, M=16, Q=8, P=4 if kind is W.DFT_S_OFDM_CM else 1, L_CP=8, K=4,
                         M_otfs=64, N_otfs=1, constellation="PSK", waveform=kind)
    mag = np.abs(random_frame(cfg, np.random.default_rng(seed)).body)
    assert mag.max() / mag.min() < 1 + 1e-9


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_mean_power_matches_symbol_energy(kind):
    cfg = WaveformConfig(N=64, M=16, Q=4, P=4 if kind is W.DFT_S_OFDM_CM else 1, L_CP=8, K=32,
                         M_otfs=16, N_otfs=4, constellation="PSK", waveform=kind)
    frame = random_frame(cfg, np.random.default_rng(6))
    assert np.mean(np.abs(frame.body) ** 2) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("kind", [W.OFDM, W.AFDM, W.OTFS, W.DFT_S_OFDM])
def test_unitary_modulators_preserve_qam_energy(kind):
    cfg = WaveformConfig(N=64, M=64, Q=16, L_CP=0, K=1, M_otfs=16, N_otfs=4, waveform=kind)
    bits = random_bits(cfg, np.random.default_rng(7))
    body = modulate(bits, cfg).body
    energy = np.sum(np.abs(map_constellation(bits, 16)) ** 2)
    assert np.sum(np.abs(body) ** 2) == pytest.approx(energy, rel=1e-10)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_demodulation_round_trip(kind):
    cfg = WaveformConfig(N=16, M=4, Q=4, P=4 if kind is W.DFT_S_OFDM_CM else 1, L_CP=4, K=1024,
                         M_otfs=4, N_otfs=4, waveform=kind)
    frame = random_frame(cfg, np.random.default_rng(8))
    bits = demodulate(frame.grid, cfg)
    assert np.array_equal(bits.reshape(-1), frame.payload_bits)


def test_ofdm_identical_symbols_peak():
    cfg = WaveformConfig(waveform=W.OFDM, L_CP=0)
    bits = np.zeros(cfg.N * 2, dtype=int)
    body = modulate_baseline(bits, cfg)
    assert papr_db(body) == pytest.approx(10 * math.log10(cfg.N))


def test_afdm_is_post_chirped_ofdm():
    cfg = WaveformConfig(N=64, M=64, L_CP=0, M_otfs=64, N_otfs=1)
    bits = random_bits(cfg.replace(waveform=W.OFDM), np.random.default_rng(9), 1)
    ofdm = modulate_baseline(bits, cfg.replace(waveform=W.OFDM))
    afdm = modulate_baseline(bits, cfg.replace(waveform=W.AFDM))
    n = np.arange(cfg.N)
    assert np.allclose(afdm, ofdm * np.exp(1j * np.pi * n**2 / cfg.N))


def test_otfs_single_symbol_is_pulse_train():
    cfg = WaveformConfig(N=64, M=64, Q=4, L_CP=0, M_otfs=16, N_otfs=4, waveform=W.OTFS)
    grid = np.zeros(cfg.N, dtype=complex)
    delay, doppler = 3, 1
    grid[doppler * cfg.M_otfs + delay] = 1.0
    x = _otfs_body(grid, cfg)
    assert np.sum(np.abs(x) ** 2) == pytest.approx(1.0, abs=1e-10)
    support = np.flatnonzero(np.abs(x) > 1e-9)
    assert np.array_equal(support % cfg.M_otfs, np.full(cfg.N_otfs, delay))
    assert np.allclose(np.abs(x[support]), 1 / math.sqrt(cfg.N_otfs))
    ramp = x[support] / x[support[0]]
    assert np.allclose(ramp, np.exp(2j * np.pi * doppler * np.arange(cfg.N_otfs) / cfg.N_otfs))


def test_fmcw_is_the_base_chirp():
    cfg = WaveformConfig(waveform=W.FMCW, K=2)
    frame = modulate([], cfg)
    assert np.allclose(frame.body, chirp_samples(0, cfg))
    assert np.allclose(papr_db(frame.body), 0.0)
    with pytest.raises(PayloadError):
        modulate_baseline(np.ones((1, 4), dtype=int), cfg)


def test_burst_payload_size_checked():
    with pytest.raises(PayloadError):
        modulate(np.zeros(3, dtype=int), WaveformConfig())
    with pytest.raises(PayloadError):
        modulate_baseline(np.zeros(10, dtype=int), WaveformConfig(waveform=W.OFDM))
