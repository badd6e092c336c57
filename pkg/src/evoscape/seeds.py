"""Seed derivation.

All randomness flows from ``numpy.random.SeedSequence`` hashing, so any
instance or walk can be regenerated on its own:

* instance seed = first 64-bit word of ``SeedSequence([master, N, m, instance])``
* walk ``w`` stream = ``PCG64(SeedSequence(seed, spawn_key=(0, w)))``
* auxiliary stream ``j`` (e.g. neutral-degree sampling) =
  ``PCG64(SeedSequence(seed, spawn_key=(1, j)))``
"""

from __future__ import annotations

import numpy as np

WALK_BRANCH = 0
AUX_BRANCH = 1


def instance_seed(master_seed: int, num_vars: int, num_clauses: int, index: int) -> int:
    ss = np.random.SeedSequence([master_seed, num_vars, num_clauses, index])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def walk_rng(seed: int, walk_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(WALK_BRANCH, walk_index))
    return np.random.Generator(np.random.PCG64(ss))


def aux_rng(seed: int, stream: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(AUX_BRANCH, stream))
    return np.random.Generator(np.random.PCG64(ss))
