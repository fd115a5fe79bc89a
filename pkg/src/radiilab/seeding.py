"""Deterministic seed derivation for reproducible, partition-independent runs.

A single 64-bit root seed is split into independent sub-streams with the
splitmix64 finalizer applied to ``root XOR mix(index)``.  Batches are indexed
logically (by batch number, never by worker id), so results are bit-identical
regardless of how many threads execute the batches.
"""
from __future__ import annotations

import numpy as np

_MASK = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(value: int) -> int:
    """One splitmix64 step: a high-quality 64-bit mixing function."""
    z = (value + _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derive_seed(root: int, index: int) -> int:
    """Sub-seed for logical batch ``index`` under ``root``."""
    return splitmix64((root & _MASK) ^ splitmix64(index & _MASK))


def spawn_generator(root: int, index: int = 0) -> np.random.Generator:
    """NumPy generator on the sub-stream ``(root, index)``."""
    return np.random.Generator(np.random.PCG64(derive_seed(root, index)))
