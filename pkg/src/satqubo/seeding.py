"""Seed splitting.

Every random draw in the package descends from one integer root seed through
:class:`numpy.random.SeedSequence` spawn keys.  A child stream is identified by
the tuple ``(root, *keys)`` only, so item ``i`` of any batch can be replayed on
its own without generating items ``0..i-1`` first.

Key layout used across the package:

====================================  =====================================
stream                                spawn key
====================================  =====================================
instance ``i`` of a corpus            ``(INSTANCE, i)``
generator attempt ``a``               ``(a,)`` under the instance seed
clause-multiplier for clause ``l``    ``(l,)`` under the transform seed
multiplier seed of instance ``i``     ``(MULTIPLIER, i)``
sampler seed of instance ``i``        ``(SAMPLER, i)``
annealing read ``r``                  ``(r,)`` under the sampler seed
====================================  =====================================
"""

from __future__ import annotations

import numpy as np

INSTANCE = 0
MULTIPLIER = 1
SAMPLER = 2

_MASK64 = (1 << 64) - 1


def _sequence(root: int, keys: tuple[int, ...]) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(root) & _MASK64, spawn_key=tuple(int(k) for k in keys))


def child_seed(root: int, *keys: int) -> int:
    """Derive a 64-bit seed for the stream ``(root, *keys)``."""
    state = _sequence(root, keys).generate_state(1, dtype=np.uint64)
    return int(state[0])


def child_seed32(root: int, *keys: int) -> int:
    """Like :func:`child_seed` but fits legacy 32-bit seeding APIs."""
    state = _sequence(root, keys).generate_state(1, dtype=np.uint32)
    return int(state[0])


def generator(root: int, *keys: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(_sequence(root, keys)))
