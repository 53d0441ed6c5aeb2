"""Iterative radix-2 decimation-in-time FFT.

Forward transform is unnormalized, ``X_k = sum_j x_j exp(-2 pi i jk/N)``;
:func:`ifft` divides by ``N``.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .linalg import LinalgError


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@lru_cache(maxsize=32)
def _bit_reversal(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


@lru_cache(maxsize=64)
def _twiddles(size: int) -> np.ndarray:
    tw = np.exp(-2j * np.pi * np.arange(size // 2) / size)
    tw.setflags(write=False)
    return tw


def fft(values) -> np.ndarray:
    x = np.asarray(values, dtype=np.complex128)
    if x.ndim != 1:
        raise LinalgError("fft expects a 1-D array")
    n = x.size
    if not is_power_of_two(n):
        raise LinalgError(f"fft length must be a power of two, got {n}")
    out = x[_bit_reversal(n)]
    size = 2
    while size <= n:
        half = size // 2
        blocks = out.reshape(n // size, size)
        even = blocks[:, :half]
        odd = blocks[:, half:] * _twiddles(size)
        out = np.concatenate((even + odd, even - odd), axis=1).ravel()
        size *= 2
    return out


def ifft(values) -> np.ndarray:
    x = np.asarray(values, dtype=np.complex128)
    return np.conj(fft(np.conj(x))) / x.size
