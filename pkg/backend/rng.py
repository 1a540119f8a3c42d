#!/usr/bin/env python3
"""
🎲 RNG - Counter-based seeded streams for reproducible amputation

Every random draw in the toolkit comes from a Philox stream keyed by
(seed, purpose, *key). Row-parallel work derives one stream per block of
rows, so serial and threaded execution produce identical bits.
"""

from enum import IntEnum

import numpy as np

from .errors import ValidationError

SEED_LIMIT = 2 ** 64


class Purpose(IntEnum):
    """Stream tags; never renumber, they are part of the seed contract"""

    COPULA_ROWS = 1
    CELL_UNIFORMS = 2
    MIXTURE_SELECTOR = 3
    ROW_PERMUTATION = 4
    SCENARIO_DRAWS = 5
    IMPUTATION = 6
    REPLICATION = 7
    MC_CDF = 8
    PER_ROW_COPULA = 9
    MASK_REPLICATION = 10


def check_seed(seed) -> int:
    """Validate a user seed (64-bit unsigned integer)"""
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise ValidationError("seed", f"must be an integer, got {seed!r}")
    seed = int(seed)
    if not 0 <= seed < SEED_LIMIT:
        raise ValidationError("seed", "must be a 64-bit unsigned integer")
    return seed


def seed_sequence(seed: int, purpose: Purpose, *key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=check_seed(seed),
                                  spawn_key=(int(purpose),) + tuple(int(k) for k in key))


def generator(seed: int, purpose: Purpose, *key: int) -> np.random.Generator:
    """Independent Philox generator for (seed, purpose, key)"""
    return np.random.Generator(np.random.Philox(seed_sequence(seed, purpose, *key)))


def derive_seed(seed: int, purpose: Purpose, *key: int) -> int:
    """Child seed, e.g. one per replication of a study"""
    state = seed_sequence(seed, purpose, *key).generate_state(1, dtype=np.uint64)
    return int(state[0])


def row_blocks(n_rows: int, block_size: int):
    """Yield (block index, start, stop) covering range(n_rows)"""
    for index, start in enumerate(range(0, n_rows, block_size)):
        yield index, start, min(start + block_size, n_rows)
