"""Seeded, reproducible random numbers.

The generator is SplitMix64 in counter form. With 64-bit wrapping
arithmetic, draw number ``i`` (starting at 0) is::

    z = seed + (i + 1) * 0x9E3779B97F4A7C15
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    out = z ^ (z >> 31)

A uniform double in ``[0, 1)`` is ``(out >> 11) * 2**-53``. Because each draw
depends only on ``seed`` and ``i``, a block of draws can be computed in one
vectorized step and still match the one-at-a-time stream exactly.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_SPAWN = 0xD1B54A32D192ED03
_TWO_M53 = 2.0 ** -53
PROB_FLOOR = 1e-14


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a Python integer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


class Rng:
    """Explicit random stream owned by the caller.

    Args:
        seed: Any integer; reduced modulo 2**64.
    """

    def __init__(self, seed: int = 0):
        self.seed = int(seed) & MASK64
        self.counter = 0

    def __repr__(self) -> str:
        return f"Rng(seed={self.seed}, counter={self.counter})"

    # raw draws

    def next_u64(self) -> int:
        self.counter += 1
        return mix64(self.seed + self.counter * GOLDEN)

    def u64_block(self, count: int) -> np.ndarray:
        if count < 0:
            raise DomainError("count must be non-negative")
        idx = np.arange(self.counter + 1, self.counter + count + 1, dtype=np.uint64)
        self.counter += count
        with np.errstate(over="ignore"):
            z = idx * np.uint64(GOLDEN) + np.uint64(self.seed)
            return _mix64_array(z)

    # derived draws

    def random(self) -> float:
        """One uniform double in ``[0, 1)``."""
        return (self.next_u64() >> 11) * _TWO_M53

    def randoms(self, count: int) -> np.ndarray:
        """``count`` uniform doubles in ``[0, 1)``."""
        return (self.u64_block(count) >> np.uint64(11)).astype(np.float64) * _TWO_M53

    def integers(self, low: int, high: int, size: int | None = None):
        """Uniform integers in ``[low, high)`` by scaling a uniform double."""
        if high <= low:
            raise DomainError("empty integer range")
        span = high - low
        if size is None:
            return low + min(int(self.random() * span), span - 1)
        vals = np.floor(self.randoms(size) * span).astype(np.int64)
        return low + np.minimum(vals, span - 1)

    def bits(self, size: int) -> np.ndarray:
        """Fair coin flips as an int8 array of 0/1."""
        return (self.randoms(size) < 0.5).astype(np.int8)

    def normals(self, size: int) -> np.ndarray:
        """Standard normal deviates via the Box-Muller transform."""
        half = (size + 1) // 2
        u = self.randoms(2 * half)
        u1 = 1.0 - u[:half]  # in (0, 1]
        r = np.sqrt(-2.0 * np.log(u1))
        t = 2.0 * math.pi * u[half:]
        return np.concatenate([r * np.cos(t), r * np.sin(t)])[:size]

    def choice(self, probs) -> int:
        """Sample one index from a categorical distribution."""
        return int(self.categorical(probs, 1)[0])

    def categorical(self, probs, size: int) -> np.ndarray:
        """Sample ``size`` indices; entries below 1e-14 are never chosen."""
        p = np.asarray(probs, dtype=np.float64).reshape(-1)
        if p.size == 0 or np.any(p < -PROB_FLOOR) or not np.all(np.isfinite(p)):
            raise DomainError("invalid probability vector")
        p = np.where(p < PROB_FLOOR, 0.0, p)
        total = p.sum()
        if total <= 0:
            raise DomainError("probability vector has no mass")
        cdf = np.cumsum(p)
        u = self.randoms(size) * cdf[-1]
        idx = np.searchsorted(cdf, u, side="right")
        # Roundoff can push u onto the final edge; fall back to the last
        # index that carries mass.
        last = int(np.flatnonzero(p)[-1])
        return np.minimum(idx, last)

    def spawn(self, key: int) -> "Rng":
        """Independent child stream: seed ``mix64(seed ^ mix64(key + c))``."""
        return Rng(mix64(self.seed ^ mix64((int(key) + _SPAWN) & MASK64)))


def as_rng(rng) -> Rng:
    """Accept an :class:`Rng`, an integer seed, or ``None`` (seed 0)."""
    if isinstance(rng, Rng):
        return rng
    if rng is None:
        return Rng(0)
    return Rng(int(rng))
