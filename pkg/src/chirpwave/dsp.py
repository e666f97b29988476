"""Complex-vector primitives: unitary transforms, circular correlation, power stats.

Every transform uses the symmetric ``1/sqrt(n)`` scaling, so energies carry over
between domains without compensation factors.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError, DimensionError, UndefinedMetricError


def is_power_of_two(n: int) -> bool:
    return isinstance(n, (int, np.integer)) and n >= 1 and (n & (n - 1)) == 0


def as_complex(v, name: str = "v") -> np.ndarray:
    """Coerce to a complex128 array and reject empty or non-finite input."""
    arr = np.asarray(v, dtype=np.complex128)
    if arr.ndim == 0 or arr.shape[-1] < 1:
        raise DimensionError(f"{name} must have at least one sample")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf")
    return arr


def dft(v, inverse: bool = False, axis: int = -1) -> np.ndarray:
    """Unitary DFT (or its inverse) along ``axis``.

    The length along ``axis`` must be a power of two.
    """
    arr = as_complex(v)
    n = arr.shape[axis]
    if not is_power_of_two(n):
        raise ConfigurationError(f"transform length {n} is not a power of two")
    if inverse:
        return np.fft.ifft(arr, axis=axis, norm="ortho")
    return np.fft.fft(arr, axis=axis, norm="ortho")


def idft(v, axis: int = -1) -> np.ndarray:
    return dft(v, inverse=True, axis=axis)


def circular_correlate(y, x) -> np.ndarray:
    """Circular cross-correlation ``r[d] = sum_n y[n] * conj(x[(n - d) mod N])``.

    Computed with two forward transforms, one product and one inverse transform.
    Leading axes broadcast, so a stack of symbols is correlated row by row.
    """
    y = as_complex(y, "y")
    x = as_complex(x, "x")
    if y.shape[-1] != x.shape[-1]:
        raise DimensionError(f"length mismatch: {y.shape[-1]} vs {x.shape[-1]}")
    n = y.shape[-1]
    spectrum = dft(y) * np.conj(dft(x))
    return np.sqrt(n) * dft(spectrum, inverse=True)


def circular_correlate_direct(y, x) -> np.ndarray:
    """O(N^2) reference for :func:`circular_correlate`."""
    y = np.asarray(y, dtype=np.complex128)
    x = np.asarray(x, dtype=np.complex128)
    if y.shape != x.shape:
        raise DimensionError(f"shape mismatch: {y.shape} vs {x.shape}")
    n = y.shape[-1]
    out = np.zeros(n, dtype=np.complex128)
    for d in range(n):
        for k in range(n):
            out[d] += y[k] * np.conj(x[(k - d) % n])
    return out


def mean_power(v, axis=None) -> np.ndarray | float:
    return np.mean(np.abs(np.asarray(v)) ** 2, axis=axis)


def peak_power(v, axis=None) -> np.ndarray | float:
    return np.max(np.abs(np.asarray(v)) ** 2, axis=axis)


def peak_to_average_db(v, axis: int = -1) -> np.ndarray | float:
    """``10 log10(max |x|^2 / mean |x|^2)`` along ``axis``."""
    p = np.abs(np.asarray(v, dtype=np.complex128)) ** 2
    mean = p.mean(axis=axis)
    if np.any(mean == 0):
        raise UndefinedMetricError("PAPR undefined for a zero-power input")
    return 10.0 * np.log10(p.max(axis=axis) / mean)
