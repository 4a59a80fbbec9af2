"""Seeded random streams and the fixed 64-bit mixing/hashing functions.

Everything here is platform independent: integer arithmetic is masked to
64 bits and the generator is CPython's Mersenne Twister, whose output for
an integer seed is identical on every platform.
"""

from __future__ import annotations

import random
from typing import MutableSequence, Sequence, TypeVar

T = TypeVar("T")

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3

# Stream tags used when deriving per-purpose seeds from one run seed.
TAG_ORDER = 1
TAG_AUGMENT = 2


def splitmix64(x: int) -> int:
    """SplitMix64 finalizer (Steele, Lea & Flood) on a 64-bit integer."""
    z = x & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix64(seed: int, tag: int) -> int:
    """Combine a seed and a tag into a new 64-bit seed.

    ``mix64(s, t) = splitmix64(s ^ splitmix64(t + GOLDEN_GAMMA))``; distinct
    tags give statistically independent seeds.
    """
    return splitmix64((seed & MASK64) ^ splitmix64((tag + GOLDEN_GAMMA) & MASK64))


def fnv1a64(data: bytes) -> int:
    h = FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * FNV_PRIME) & MASK64
    return h


def hash64(text: str, seed: int = 0) -> int:
    """Stable 64-bit string hash: ``splitmix64(fnv1a64(utf8(text)) ^ seed)``."""
    return splitmix64(fnv1a64(text.encode("utf-8")) ^ (seed & MASK64))


class RandomStream:
    """Single-owner deterministic random stream seeded by a 64-bit integer.

    Raw bits come from ``random.Random(seed).getrandbits``; every derived
    draw (bounded integers, sampling, shuffling) is implemented here by
    rejection sampling and Fisher-Yates, so the mapping from seed to output
    is fixed by this module alone.
    """

    __slots__ = ("seed", "_rand", "_bits")

    def __init__(self, seed: int):
        self.seed = seed & MASK64
        self._rand = random.Random(self.seed)
        self._bits = self._rand.getrandbits

    @classmethod
    def derived(cls, seed: int, tag: int) -> "RandomStream":
        return cls(mix64(seed, tag))

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)``."""
        if n <= 0:
            raise ValueError("upper bound must be positive")
        k = n.bit_length()
        r = self._bits(k)
        while r >= n:
            r = self._bits(k)
        return r

    def choice(self, seq: Sequence[T]) -> T:
        return seq[self.below(len(seq))]

    def sample(self, population: Sequence[T], k: int) -> list[T]:
        """``k`` distinct elements, uniformly without replacement, in draw order."""
        pool = list(population)
        n = len(pool)
        if not 0 <= k <= n:
            raise ValueError("sample larger than population")
        for i in range(k):
            j = i + self.below(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]

    def pair(self, n: int) -> tuple[int, int]:
        """Two distinct uniform integers in ``[0, n)``."""
        i = self.below(n)
        j = self.below(n - 1)
        return i, (j + 1 if j >= i else j)

    def shuffle(self, items: MutableSequence) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    def random(self) -> float:
        """Uniform float in ``[0, 1)`` with 53 random bits."""
        return self._bits(53) / 9007199254740992.0
