"""Discrete Fourier transform with symmetric normalization.

All transforms here use ``y_k = N**-0.5 * sum_m exp(+2*pi*i*k*m/N) x_m``.
Both the sign of the exponent and the ``1/sqrt(N)`` factor differ from
``numpy.fft.fft``; this convention makes the transform unitary and equal
to the quantum Fourier transform on amplitudes.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError


def _as_vector(x) -> np.ndarray:
    v = np.asarray(x, dtype=np.complex128).reshape(-1)
    if v.size == 0:
        raise DomainError("empty signal")
    return v


def pad_to_power_of_two(x) -> np.ndarray:
    """Zero-pad to the next power-of-two length."""
    v = _as_vector(x)
    size = 1 << (v.size - 1).bit_length()
    if size == v.size:
        return v.copy()
    out = np.zeros(size, dtype=np.complex128)
    out[: v.size] = v
    return out


def dft_direct(x, sign: int = 1) -> np.ndarray:
    """O(N**2) evaluation straight from the definition."""
    v = _as_vector(x)
    n = v.size
    km = np.outer(np.arange(n), np.arange(n)) % n
    w = np.exp(sign * 2j * np.pi * km / n)
    return (w @ v) / math.sqrt(n)


def inverse_dft(y) -> np.ndarray:
    """Inverse of :func:`dft_direct` (conjugated exponent)."""
    return dft_direct(y, sign=-1)


def fft(x, sign: int = 1) -> np.ndarray:
    """Radix-2 FFT for power-of-two lengths.

    Works through stages ``l = n, n-1, ..., 1``. At stage ``l`` each output
    ``2**(l-1)*k + p`` combines inputs ``2**l*k + p`` and
    ``2**l*k + p + 2**(l-1)`` (indices mod N) with twiddle
    ``omega**(2**(l-1)*k)`` and a factor ``1/sqrt(2)``. Outputs land in
    natural order, so no bit-reversal pass is needed.
    """
    v = _as_vector(x)
    size = v.size
    if size & (size - 1):
        raise DomainError(f"length {size} is not a power of two; pad first")
    n = size.bit_length() - 1
    omega = np.exp(sign * 2j * np.pi / size)
    cur = v.copy()
    for ell in range(n, 0, -1):
        half = 1 << (ell - 1)
        k = np.arange(size // half)[:, None]
        p = np.arange(half)[None, :]
        first = (2 * half * k + p) % size
        second = (first + half) % size
        twiddle = omega ** ((half * k) % size)
        nxt = np.empty_like(cur)
        nxt[(half * k + p).reshape(-1)] = ((cur[first] + twiddle * cur[second]) / math.sqrt(2)).reshape(-1)
        cur = nxt
    return cur


def inverse_fft(y) -> np.ndarray:
    return fft(y, sign=-1)
