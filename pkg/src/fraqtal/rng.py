"""SplitMix64 streams.

Every random decision in the package (circuit structure, rotation angles,
shot sampling, palette choice, k-means seeding) is drawn from a SplitMix64
stream, so results are bit-identical across platforms and worker counts.
Independent purposes use the same master seed XOR-ed with a fixed constant.
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

# purpose constants, XOR-ed into a seed to split it into independent streams
CIRCUIT_CONST = 0xC1C0_17A7_0000_0001
SHOT_CONST = 0x5407_5000_0000_0002
CMAP_CONST = 0xC4A9_0000_0000_0003
CHOICE_CONST = 0xC401_CE00_0000_0004
KMEANS_CONST = 0x4B3E_A115_0000_0005

_U64 = np.uint64


def mix64(z: int) -> int:
    """The SplitMix64 output finalizer (Stafford variant 13)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def splitmix64(x: int) -> int:
    """First output of a SplitMix64 generator whose state is ``x``."""
    return mix64((x + GOLDEN_GAMMA) & MASK64)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> _U64(27))) * _U64(0x94D049BB133111EB)
    return z ^ (z >> _U64(31))


class SplitMix64:
    """Sequential SplitMix64 generator.

    ``next_u64`` and the array variants advance the same state, so a stream
    can mix scalar and bulk draws and still be reproducible.
    """

    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return mix64(self.state)

    def random(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) by multiply-shift (Lemire without rejection)."""
        if n <= 0:
            raise ValueError("n must be positive")
        return (self.next_u64() * n) >> 64

    def u64_array(self, count: int) -> np.ndarray:
        steps = np.arange(1, count + 1, dtype=_U64)
        with np.errstate(over="ignore"):
            states = _U64(self.state) + steps * _U64(GOLDEN_GAMMA)
            out = _mix64_array(states)
        self.state = (self.state + count * GOLDEN_GAMMA) & MASK64
        return out

    def random_array(self, count: int) -> np.ndarray:
        return (self.u64_array(count) >> _U64(11)).astype(np.float64) * (1.0 / (1 << 53))
