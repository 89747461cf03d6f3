"""Bit-reproducible pseudo-random numbers.

The generator is xorshift64* (Marsaglia's xorshift with shifts 12/25/27 followed
by multiplication with 0x2545F4914F6CDD1D). Seeds are scrambled once with
splitmix64 so that small or zero seeds still give a good nonzero state.
Everything is plain integer arithmetic, so streams are identical on every
platform and numpy version.

Independent child streams (for parallel sweeps) use
``child_seed(seed, i) = splitmix64(seed XOR splitmix64(i))``.
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_STAR = 0x2545F4914F6CDD1D
_INV_2_53 = 1.0 / (1 << 53)


def splitmix64(x: int) -> int:
    z = (x + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def child_seed(seed: int, index: int) -> int:
    return splitmix64((seed & MASK64) ^ splitmix64(index & MASK64))


class XorShift64Star:
    """xorshift64* stream; ``uniform()`` returns 53-bit floats in [0, 1)."""

    def __init__(self, seed: int):
        state = splitmix64(int(seed) & MASK64)
        self.state = state or _GOLDEN

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self.state = x
        return (x * _STAR) & MASK64

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * _INV_2_53

    def uniforms(self, size: int) -> np.ndarray:
        nxt = self.next_u64
        return np.array([(nxt() >> 11) * _INV_2_53 for _ in range(int(size))], dtype=float)
