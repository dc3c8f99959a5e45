"""Counter-based random streams with order-independent determinism.

Every consumer of randomness is keyed by (seed, substream index) through a
Philox generator, so draws never depend on execution order or thread count.
Derived seeds for auxiliary purposes (perturbations, bootstrap replicas,
null-band pairs) are produced by splitmix64 steps to keep substreams from
colliding.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1


def derive_seed(seed: int, *tags: int) -> int:
    """Deterministically mix integer tags into a 64-bit sub-seed."""
    x = seed & _MASK
    for tag in tags:
        x = (x + 0x9E3779B97F4A7C15 + (tag & _MASK)) & _MASK
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        x = z ^ (z >> 31)
    return x


def substream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for one (seed, index) pair."""
    key = np.array([seed & _MASK, index & _MASK], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
