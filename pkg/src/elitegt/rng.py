"""Deterministic 64-bit pseudo-random generator (splitmix64).

One fixed, documented algorithm is used everywhere randomness is needed so
that every seeded run is reproducible bit for bit, including across the
compiled and pure-Python simulation backends (the compiled kernel implements
the identical recurrence).

State update: ``state += PHI`` (mod 2**64), output = ``mix64(state)``.
Substreams for trial/customer ``i`` start from ``mix64(seed + (i+1)*PHI)``;
the avalanche mix scatters substream origins so overlaps are negligible.
"""

from __future__ import annotations

import math

MASK64 = (1 << 64) - 1
PHI = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """splitmix64 finalizer: bijective avalanche mix of a 64-bit word."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def substream_state(seed: int, index: int) -> int:
    """Initial state of the ``index``-th substream of ``seed``."""
    return mix64((seed + (index + 1) * PHI) & MASK64)


class SplitMix64:
    """Sequential splitmix64 generator over a 64-bit state."""

    __slots__ = ("_state",)

    def __init__(self, state: int):
        self._state = state & MASK64

    @classmethod
    def substream(cls, seed: int, index: int) -> "SplitMix64":
        return cls(substream_state(seed, index))

    def next_uint64(self) -> int:
        self._state = (self._state + PHI) & MASK64
        return mix64(self._state)

    def next_float(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_uint64() >> 11) * 2.0**-53

    def next_below(self, n: int) -> int:
        """Uniform integer in [0, n). Modulo bias is < n / 2**64."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_uint64() % n

    def exponential(self, mean: float) -> float:
        """Exponential variate with the given mean (inverse CDF)."""
        if mean <= 0:
            raise ValueError("mean must be positive")
        return -mean * math.log1p(-self.next_float())
