"""Spectral transforms implemented from scratch: radix-2 FFT and DCT-II.

Everything runs in 64-bit floats.  The FFT is an iterative Cooley-Tukey
radix-2 decimation-in-time over the last axis, vectorized so a whole batch
of frames transforms at once.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def bit_reverse_indices(n: int) -> np.ndarray:
    """Index permutation that reorders 0..n-1 by reversed bit patterns."""
    if not is_power_of_two(n):
        raise ConfigError(f"FFT length must be a power of two, got {n}")
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for _ in range(bits):
        rev = (rev << 1) | (idx & 1)
        idx >>= 1
    return rev


def fft(x: np.ndarray) -> np.ndarray:
    """Radix-2 FFT along the last axis of a real or complex array."""
    x = np.asarray(x)
    n = x.shape[-1]
    out = x[..., bit_reverse_indices(n)].astype(np.complex128)
    size = 2
    while size <= n:
        half = size // 2
        twiddle = np.exp(-2j * np.pi * np.arange(half) / size)
        blocks = out.reshape(*out.shape[:-1], n // size, size)
        even = blocks[..., :half].copy()
        odd = blocks[..., half:] * twiddle
        blocks[..., :half] = even + odd
        blocks[..., half:] = even - odd
        size *= 2
    return out


def dct_ii_matrix(n: int) -> np.ndarray:
    """Orthonormal DCT-II basis as an n x n matrix (rows are basis vectors)."""
    k = np.arange(n).reshape(-1, 1)
    m = np.arange(n).reshape(1, -1)
    basis = np.cos(np.pi * (2 * m + 1) * k / (2 * n))
    basis[0] *= np.sqrt(1.0 / n)
    basis[1:] *= np.sqrt(2.0 / n)
    return basis


def dct_ii(x: np.ndarray) -> np.ndarray:
    """Orthonormal DCT-II along the last axis."""
    x = np.asarray(x, dtype=np.float64)
    return x @ dct_ii_matrix(x.shape[-1]).T


def idct_ii(y: np.ndarray) -> np.ndarray:
    """Inverse of dct_ii (the transpose, by orthonormality)."""
    y = np.asarray(y, dtype=np.float64)
    return y @ dct_ii_matrix(y.shape[-1])
