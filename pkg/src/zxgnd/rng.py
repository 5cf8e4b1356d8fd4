"""A small deterministic RNG with a stable cross-platform stream.

Random circuit generation must reproduce bit-identical output for a given
seed on any platform and Python version, so we avoid :mod:`random` (whose
high-level helpers have changed across versions) and use the well-known
splitmix64 generator.
"""

from __future__ import annotations

from typing import Sequence, TypeVar

_MASK = (1 << 64) - 1

T = TypeVar("T")


class SplitMix64:
    """splitmix64: a tiny 64-bit PRNG with a guaranteed output stream."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        """Return the next 64-bit output word."""
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def rand_float(self) -> float:
        """Return a float uniform on [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (2.0**-53)

    def rand_below(self, n: int) -> int:
        """Return an int uniform on [0, n), by rejection (no modulo bias)."""
        if n <= 0:
            raise ValueError("rand_below needs a positive bound")
        threshold = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < threshold:
                return x % n

    def choice(self, seq: Sequence[T]) -> T:
        """Return a uniformly random element of a non-empty sequence."""
        return seq[self.rand_below(len(seq))]

    def weighted_index(self, weights: Sequence[float]) -> int:
        """Return an index drawn with the given (summing to ~1) weights."""
        total = sum(weights)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"weights sum to {total}, expected 1")
        x = self.rand_float()
        acc = 0.0
        for i, w in enumerate(weights):
            acc += w
            if x < acc:
                return i
        return len(weights) - 1
