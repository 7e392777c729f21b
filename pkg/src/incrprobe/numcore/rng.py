"""Seeded random streams and weight initialization."""

from __future__ import annotations

import numpy as np


class Rng:
    """Deterministic random stream backed by PCG64.

    The same seed yields the same stream on every platform, which is what
    makes checkpoints and metric values reproducible bit for bit.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def uniform(self, low: float, high: float, size) -> np.ndarray:
        return self._gen.uniform(low, high, size=size)

    def normal(self, size, scale: float = 1.0) -> np.ndarray:
        return self._gen.normal(0.0, scale, size=size)

    def integers(self, low: int, high: int) -> int:
        return int(self._gen.integers(low, high))

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)


def xavier_uniform(rows: int, cols: int, rng: Rng) -> np.ndarray:
    """Uniform init with bound sqrt(6 / (fan_in + fan_out))."""
    bound = np.sqrt(6.0 / (rows + cols))
    return rng.uniform(-bound, bound, (rows, cols))
