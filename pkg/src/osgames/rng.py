"""Pinned deterministic random number generator.

Every record produced by the engine names the algorithm so that replays can
refuse streams they do not understand.  The generator is splitmix64: a single
64-bit state word, advanced by a fixed increment and scrambled on output.
Draws are counted so records can assert exactly how much randomness a run
consumed.
"""

from __future__ import annotations

import hashlib

RNG_ALGORITHM = "splitmix64"

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    """64-bit splitmix generator with an explicit draw counter."""

    __slots__ = ("state", "draws")

    def __init__(self, seed: int):
        self.state = seed & _MASK64
        self.draws = 0

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        self.draws += 1
        return (z ^ (z >> 31)) & _MASK64

    def rand_below(self, n: int) -> int:
        """Uniform integer in [0, n) without modulo bias (rejection sampling)."""
        if n <= 0:
            raise ValueError("rand_below requires n > 0")
        if n <= 1 << 64:
            limit = (1 << 64) - ((1 << 64) % n)
            while True:
                z = self.next_u64()
                if z < limit:
                    return z % n
        # Ranges wider than one word: draw enough words for the bit width,
        # trim to it, and reject values at or above n.
        bits = (n - 1).bit_length()
        words = (bits + 63) // 64
        while True:
            z = 0
            for _ in range(words):
                z = (z << 64) | self.next_u64()
            z >>= words * 64 - bits
            if z < n:
                return z

    def rand_int(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], both ends inclusive."""
        if hi < lo:
            raise ValueError("rand_int requires lo <= hi")
        return lo + self.rand_below(hi - lo + 1)

    def choice(self, items):
        if not items:
            raise ValueError("choice on empty sequence")
        return items[self.rand_below(len(items))]


def derive_seed(*parts) -> int:
    """Derive a 64-bit stream seed from a tuple of labels.

    Used to give every player/round/job its own independent stream from one
    top-level seed, independently of execution order.
    """
    text = "\x1f".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")
