"""Deterministic pseudo-random stream for reproducible instance generation.

SplitMix64 (Steele/Lea/Flood mixing constants).  The algorithm is fixed here
so that instances are bit-for-bit reproducible across interpreter versions
and platforms; do not swap in `random.Random`, whose internals are an
implementation detail of CPython.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1


class Stream:
    """Sequential 64-bit generator.  Same seed, same draw order, same values."""

    def __init__(self, seed: int) -> None:
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def int_between(self, lo: int, hi: int) -> int:
        """Uniform-ish integer in [lo, hi] via modular reduction (documented,
        deterministic; the slight modulo bias is irrelevant for genericity)."""
        if hi < lo:
            raise ValueError(f"empty range [{lo}, {hi}]")
        return lo + self.next_u64() % (hi - lo + 1)
