"""SplitMix64: a tiny, portable, seedable 64-bit generator.

Mesh perturbations must be reproducible across platforms and numpy
versions, so the stream is defined here bit-for-bit instead of relying on
``numpy.random``:

    state  <- state + 0x9E3779B97F4A7C15          (mod 2**64)
    z      <- state
    z      <- (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z      <- (z ^ (z >> 27)) * 0x94D049BB133111EB
    output <- z ^ (z >> 31)

Doubles in [0, 1) are ``(output >> 11) * 2**-53``.
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return _mix(self.state)

    def uniform(self, n: int) -> np.ndarray:
        """``n`` doubles uniformly distributed on [0, 1)."""
        out = np.empty(n)
        for i in range(n):
            out[i] = (self.next_u64() >> 11) * (1.0 / (1 << 53))
        return out


def derive_seed(master: int, *keys: int) -> int:
    """Deterministic sub-stream seed from a master seed and integer keys.

    Used for the x/y axes of 2D meshes and per-resolution meshes in a
    convergence study; distinct key tuples give unrelated streams.
    """
    s = int(master) & MASK64
    for k in keys:
        s = _mix((s + GOLDEN_GAMMA * (int(k) + 1)) & MASK64)
    return s
