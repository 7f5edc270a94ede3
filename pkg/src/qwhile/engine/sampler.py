"""Pseudo-random measurement sampling.

Outcome selection follows a five-step procedure: compute the probability
vector; short-circuit to a certain outcome (no draw consumed) when some
p_i = 1, discarding zero-probability indices; accumulate the remaining
probabilities; draw x uniform on (0,1); pick the first index whose
cumulative bound reaches x (first index when x falls below the first
bound, last when it exceeds the second-to-last).

Reproducibility contract: the same seed and the same draw sequence give
identical outputs. Multi-shot runs derive per-shot seeds with the
splitmix64 mix, so shot k of seed s is the same everywhere.
"""
from __future__ import annotations

import numpy as np

from ..errors import MalformedDistribution

PROB_FLOOR = 1e-12   # below this a probability counts as zero
PROB_CEIL = 1.0 - 1e-12  # above this a probability counts as one


def splitmix64(seed: int, k: int) -> int:
    """Derive the k-th child seed of `seed` (64-bit splitmix finalizer)."""
    z = (seed + (k + 1) * 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31)


class SamplerState:
    """Seeded uniform source on the open interval (0,1).

    Backed by a splitmix64 counter stream: cheap to fork, identical
    across platforms, and fully determined by the 64-bit seed.
    """

    __slots__ = ("seed", "_state", "draw_count")

    def __init__(self, seed: int):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self._state = self.seed
        self.draw_count = 0

    def draw(self) -> float:
        self.draw_count += 1
        while True:
            self._state = (self._state + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
            z = self._state
            z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
            z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
            z ^= z >> 31
            x = (z >> 11) * 2.0**-53
            if x > 0.0:  # exclude the single point 0 of [0,1)
                return x

    def child(self, k: int) -> "SamplerState":
        return SamplerState(splitmix64(self.seed, k))


def sample_outcome(p, rng: SamplerState) -> int:
    """Sample an outcome index from probability vector p.

    Zero-probability indices are never returned; a certain outcome is
    returned without consuming a random draw.
    """
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise MalformedDistribution(f"expected a probability vector, got shape {p.shape}")
    if float(p.min()) < -PROB_FLOOR:
        raise MalformedDistribution(f"negative probability {p.min():.3e}")
    total = float(p.sum())
    if abs(total - 1.0) > 1e-9:
        raise MalformedDistribution(f"probabilities sum to {total}, expected 1")

    certain = np.nonzero(p >= PROB_CEIL)[0]
    if certain.size:
        return int(certain[0])

    kept = np.nonzero(p > PROB_FLOOR)[0]
    cumulative = np.cumsum(p[kept])
    x = rng.draw()
    i = int(np.searchsorted(cumulative, x, side="left"))
    if i >= kept.size:  # x beyond the last bound (float slack): take the last index
        i = kept.size - 1
    return int(kept[i])
