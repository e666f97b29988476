"""Gray-labelled PSK and square-QAM alphabets with unit average energy."""

from __future__ import annotations

from enum import Enum
from functools import lru_cache

import numpy as np

from .dsp import is_power_of_two
from .errors import ConfigurationError, PayloadError


class ConstellationKind(str, Enum):
    PSK = "PSK"
    QAM = "QAM"


def gray(n):
    n = np.asarray(n)
    return n ^ (n >> 1)


def gray_inverse(g):
    g = np.asarray(g).copy()
    shift = g >> 1
    while np.any(shift):
        g ^= shift
        shift >>= 1
    return g


def bits_to_int(bits: np.ndarray, width: int) -> np.ndarray:
    """Group a bit array (last axis) MSB-first into integers of ``width`` bits."""
    bits = np.asarray(bits, dtype=np.int64)
    if width == 0:
        return np.zeros(bits.shape[:-1] + (bits.shape[-1],), dtype=np.int64)[..., :0]
    if bits.shape[-1] % width:
        raise PayloadError(f"{bits.shape[-1]} bits is not a multiple of {width}")
    grouped = bits.reshape(bits.shape[:-1] + (-1, width))
    weights = 1 << np.arange(width - 1, -1, -1)
    return grouped @ weights


def int_to_bits(values: np.ndarray, width: int) -> np.ndarray:
    values = np.asarray(values, dtype=np.int64)
    shifts = np.arange(width - 1, -1, -1)
    bits = (values[..., None] >> shifts) & 1
    return bits.reshape(values.shape[:-1] + (-1,)) if values.ndim else bits


def bits_per_symbol(order: int) -> int:
    return int(order).bit_length() - 1


@lru_cache(maxsize=None)
def _alphabet(order: int, kind: ConstellationKind) -> np.ndarray:
    if not is_power_of_two(order) or order < 2:
        raise ConfigurationError(f"constellation order {order} is not a power of two >= 2", "Q")
    labels = np.arange(order)
    if kind is ConstellationKind.PSK:
        offset = np.pi / 4 if order == 4 else 0.0
        position = gray_inverse(labels)
        points = np.exp(1j * (2 * np.pi * position / order + offset))
    else:
        side = int(round(np.sqrt(order)))
        if side * side != order:
            raise ConfigurationError(f"QAM order {order} is not square", "Q")
        half = bits_per_symbol(side)
        i_pos = gray_inverse(labels >> half)
        q_pos = gray_inverse(labels & (side - 1))
        levels = 2 * np.arange(side) - (side - 1)
        points = levels[i_pos] + 1j * levels[q_pos]
        points = points / np.sqrt(np.mean(np.abs(points) ** 2))
    points = points.astype(np.complex128)
    points.setflags(write=False)
    return points


def alphabet(order: int, kind: ConstellationKind | str = ConstellationKind.QAM) -> np.ndarray:
    """Constellation points indexed by their integer bit label (MSB first)."""
    return _alphabet(int(order), ConstellationKind(kind))


def map_constellation(bits, order: int, kind: ConstellationKind | str = ConstellationKind.QAM) -> np.ndarray:
    """Map bits (last axis) to unit-energy Gray-labelled symbols."""
    points = alphabet(order, kind)
    labels = bits_to_int(bits, bits_per_symbol(order))
    return points[labels]


def slice_labels(symbols, order: int, kind: ConstellationKind | str = ConstellationKind.QAM) -> np.ndarray:
    """Nearest-point decision, returned as integer labels."""
    points = alphabet(order, kind)
    symbols = np.asarray(symbols, dtype=np.complex128)
    dist = np.abs(symbols[..., None] - points) ** 2
    return np.argmin(dist, axis=-1)


def demap_constellation(symbols, order: int, kind: ConstellationKind | str = ConstellationKind.QAM) -> np.ndarray:
    labels = slice_labels(symbols, order, kind)
    return int_to_bits(labels, bits_per_symbol(order))
