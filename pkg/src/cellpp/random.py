"""Seed plumbing for reproducible Monte-Carlo runs.

All samplers accept either a plain integer seed or a ``numpy.random.Generator``.
Experiment drivers derive one independent counter-based stream per realization
from ``(master_seed, realization_index)``, so results do not depend on
execution order or worker count.
"""

import numpy as np


def as_generator(seed):
    """Return a ``numpy.random.Generator`` for an int seed or pass one through."""
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        raise ValueError("an explicit seed is required for reproducibility")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def realization_rng(master_seed, index, *sub):
    """Independent stream for realization ``index`` (optionally sub-indexed)."""
    key = np.random.SeedSequence(int(master_seed), spawn_key=(int(index), *map(int, sub)))
    return np.random.Generator(np.random.Philox(key))
