"""A small 64-bit PRNG with fixed constants, for reproducible instances.

The seed is expanded with one splitmix64 step; draws come from xorshift64*
(shifts 12, 25, 27; multiplier 0x2545F4914F6CDD1D).  Both are public-domain
designs by Vigna, chosen so other languages can reproduce the corpus.
"""

from __future__ import annotations

from typing import Sequence, TypeVar

MASK64 = (1 << 64) - 1
SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
SPLITMIX_M1 = 0xBF58476D1CE4E5B9
SPLITMIX_M2 = 0x94D049BB133111EB
XORSHIFT_MULT = 0x2545F4914F6CDD1D

T = TypeVar("T")


def splitmix64(x: int) -> int:
    z = (x + SPLITMIX_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * SPLITMIX_M1) & MASK64
    z = ((z ^ (z >> 27)) * SPLITMIX_M2) & MASK64
    return z ^ (z >> 31)


class Rng:
    def __init__(self, seed: int):
        state = splitmix64(seed & MASK64)
        self.state = state or SPLITMIX_GAMMA

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self.state = x
        return (x * XORSHIFT_MULT) & MASK64

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` by rejection (no modulo bias)."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = MASK64 - (MASK64 + 1) % n
        while True:
            r = self.next_u64()
            if r <= limit:
                return r % n

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in ``[lo, hi]``."""
        return lo + self.below(hi - lo + 1)

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def chance(self, num: int, den: int) -> bool:
        """True with probability ``num/den`` using integer arithmetic only."""
        return self.below(den) < num

    def choice(self, items: Sequence[T]) -> T:
        return items[self.below(len(items))]

    def fork(self, salt: int) -> "Rng":
        return Rng(self.next_u64() ^ splitmix64(salt))
