import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chirpwave.constellation import (
    alphabet,
    bits_to_int,
    demap_constellation,
    gray,
    gray_inverse,
    int_to_bits,
    map_constellation,
)
from chirpwave.errors import ConfigurationError, PayloadError


def test_qpsk_phases():
    points = alphabet(4, "PSK")
    phases = np.degrees(np.angle(points)) % 360
    assert sorted(np.round(phases, 9)) == [45, 135, 225, 315]


def test_qpsk_gray_neighbours():
    points = alphabet(4, "PSK")
    bits = int_to_bits(np.arange(4)[:, None], 2)
    for i, j in itertools.combinations(range(4), 2):
        opposite = np.isclose(points[i], -points[j])
        assert (np.sum(bits[i] != bits[j]) == 2) == opposite


@pytest.mark.parametrize("order", [2, 4, 8, 16, 32, 64])
def test_psk_unit_modulus(order):
    assert np.allclose(np.abs(alphabet(order, "PSK")), 1.0, atol=1e-12)


@pytest.mark.parametrize("order", [4, 16, 64, 256])
def test_qam_unit_energy(order):
    assert np.isclose(np.mean(np.abs(alphabet(order, "QAM")) ** 2), 1.0)


def test_16qam_peak_to_mean():
    p = np.abs(alphabet(16, "QAM")) ** 2
    assert np.isclose(p.max() / p.mean(), 1.8)


@pytest.mark.parametrize("order,kind", [(8, "PSK"), (16, "PSK"), (16, "QAM"), (64, "QAM")])
def test_nearest_neighbours_differ_in_one_bit(order, kind):
    points = alphabet(order, kind)
    width = int(np.log2(order))
    bits = int_to_bits(np.arange(order)[:, None], width)
    dist = np.abs(points[:, None] - points[None, :])
    np.fill_diagonal(dist, np.inf)
    dmin = dist.min()
    for i, j in zip(*np.nonzero(np.isclose(dist, dmin))):
        assert np.sum(bits[i] != bits[j]) == 1


@pytest.mark.parametrize("order", [8, 32, 3])
def test_bad_qam_orders(order):
    with pytest.raises(ConfigurationError):
        alphabet(order, "QAM")


def test_gray_inverse_inverts():
    n = np.arange(1024)
    assert np.array_equal(gray_inverse(gray(n)), n)
    assert all(bin(int(a ^ b)).count("1") == 1 for a, b in zip(gray(n), gray(n + 1)))


def test_bits_to_int_rejects_ragged():
    with pytest.raises(PayloadError):
        bits_to_int(np.ones(5, dtype=int), 2)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([(2, "PSK"), (4, "PSK"), (8, "PSK"), (4, "QAM"), (16, "QAM"), (64, "QAM")]),
       st.integers(1, 40), st.integers(0, 2**32 - 1))
def test_map_demap_round_trip(ok, count, seed):
    order, kind = ok
    bits = np.random.default_rng(seed).integers(0, 2, count * int(np.log2(order)))
    symbols = map_constellation(bits, order, kind)
    assert np.array_equal(demap_constellation(symbols, order, kind), bits)
