"""Splittable, counter-based random streams.

Every stochastic routine takes a 64-bit base seed and derives independent
streams with ``derive(seed, *path)``, where ``path`` is a tuple of small integers
(replication index, layer index, ...).  Derivation goes through
``numpy.random.SeedSequence`` (a fixed hash mix), so campaigns are
order-independent: replication ``i`` sees the same stream no matter how
many replications run, or in which order.
"""

from __future__ import annotations

import numpy as np

__all__ = ["derive", "generator"]


def derive(seed: int, *path: int) -> np.random.SeedSequence:
    """Mix ``seed`` with a derivation path into an independent seed sequence."""
    return np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=tuple(int(p) for p in path))


def generator(seed: int, *path: int) -> np.random.Generator:
    """Counter-based (Philox) generator for the stream ``(seed, *path)``."""
    return np.random.Generator(np.random.Philox(derive(seed, *path)))
