"""Seedable, splittable random streams.

Every trial gets its own generator derived from ``(seed, trial_index)`` so
that runs are reproducible whether trials execute serially or in a pool.
"""
import numpy as np


def make_rng(seed=None):
    """Return a ``numpy.random.Generator``; pass generators through untouched."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def trial_rng(seed, index):
    """Independent stream for trial ``index`` of a run seeded with ``seed``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


def trial_seed(seed, index):
    """Integer seed for trial ``index``; stable across platforms."""
    ss = np.random.SeedSequence([int(seed), int(index)])
    return int(ss.generate_state(1, dtype=np.uint32)[0])
