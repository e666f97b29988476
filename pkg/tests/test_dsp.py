import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chirpwave import dsp
from chirpwave.errors import ConfigurationError, DimensionError


def _random(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def _dft_matrix(n):
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n) / np.sqrt(n)


def test_dft_matches_explicit_matrix():
    rng = np.random.default_rng(1)
    for n in (1, 2, 8, 64):
        x = _random(rng, n)
        assert np.max(np.abs(dsp.dft(x) - _dft_matrix(n) @ x)) < 1e-12


def test_impulse_gives_flat_spectrum():
    out = dsp.dft([1, 0, 0, 0])
    assert np.allclose(out, 0.5)


@pytest.mark.parametrize("n", [8, 64, 256, 1024])
def test_round_trip(n):
    x = _random(np.random.default_rng(n), n)
    assert np.max(np.abs(dsp.idft(dsp.dft(x)) - x)) < 1e-10


@pytest.mark.parametrize("n", [3, 6, 100])
def test_non_power_of_two_rejected(n):
    with pytest.raises(ConfigurationError):
        dsp.dft(np.ones(n))


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        dsp.dft([1.0, np.nan])
    with pytest.raises(DimensionError):
        dsp.dft([])


def test_transform_along_axis():
    x = _random(np.random.default_rng(3), (4, 8))
    assert np.allclose(dsp.dft(x, axis=0), dsp.dft(x.T).T)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 8), st.integers(0, 2**32 - 1))
def test_parseval(log_n, seed):
    x = _random(np.random.default_rng(seed), 2**log_n)
    assert np.isclose(np.sum(np.abs(dsp.dft(x)) ** 2), np.sum(np.abs(x) ** 2), rtol=1e-10)


def test_correlation_zero_lag_is_energy():
    x = _random(np.random.default_rng(4), 32)
    assert np.isclose(dsp.circular_correlate(x, x)[0], np.sum(np.abs(x) ** 2))


def test_correlation_peak_follows_shift():
    x = _random(np.random.default_rng(5), 64)
    r = dsp.circular_correlate(np.roll(x, 5), x)
    assert np.argmax(np.abs(r)) == 5


def test_correlation_unit_impulses():
    r = dsp.circular_correlate([1, 0, 0, 0], [0, 1, 0, 0])
    assert np.argmax(np.abs(r)) == 3
    assert np.isclose(abs(r[3]), 1.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 7), st.integers(0, 2**32 - 1))
def test_correlation_matches_loop_oracle(log_n, seed):
    rng = np.random.default_rng(seed)
    n = 2**log_n
    y, x = _random(rng, n), _random(rng, n)
    oracle = np.array([np.sum(y * np.conj(np.roll(x, d))) for d in range(n)])
    assert np.max(np.abs(dsp.circular_correlate(y, x) - oracle)) < 1e-9 * max(1.0, np.abs(oracle).max())
    assert np.max(np.abs(dsp.circular_correlate_direct(y, x) - oracle)) < 1e-9 * max(1.0, np.abs(oracle).max())


def test_correlation_length_mismatch():
    with pytest.raises(DimensionError):
        dsp.circular_correlate(np.ones(8), np.ones(4))


def test_correlation_batches_rows():
    rng = np.random.default_rng(6)
    y, x = _random(rng, (3, 16)), _random(rng, (3, 16))
    out = dsp.circular_correlate(y, x)
    for i in range(3):
        assert np.allclose(out[i], dsp.circular_correlate(y[i], x[i]))
