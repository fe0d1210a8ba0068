"""Seed handling shared by the generator, solver and experiment harness.

All randomness comes from numpy's PCG64 bit generator. Child seeds are derived
with ``numpy.random.SeedSequence``: the child of ``master`` at index path
``(a, b, ...)`` is the first 64-bit word of
``SeedSequence(master, spawn_key=(a, b, ...)).generate_state(1, uint64)``.
SeedSequence hashing is stable across numpy releases, so derived seeds are too.
"""

import numpy as np

from mprp.model import ParamError

SEED_MAX = 2**64 - 1


def check_seed(seed, name: str = "seed") -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise ParamError(f"must be an integer, got {seed!r}", name)
    seed = int(seed)
    if not 0 <= seed <= SEED_MAX:
        raise ParamError(f"must be a 64-bit unsigned integer, got {seed}", name)
    return seed


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(check_seed(seed)))


def derive_seed(master: int, *path: int) -> int:
    ss = np.random.SeedSequence(check_seed(master, "master_seed"), spawn_key=tuple(int(p) for p in path))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
