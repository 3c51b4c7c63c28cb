"""Distances between probability vectors."""
from __future__ import annotations

import numpy as np

from .errors import InputError


def l1_distance(p, q):
    """``||p - q||_1`` for probability vectors of equal length."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise InputError(f"length mismatch: {p.shape} vs {q.shape}")
    return float(np.abs(p - q).sum())


def tv_distance(p, q):
    """Total variation distance, half the 1-norm distance, in ``[0, 1]``."""
    return min(1.0, 0.5 * l1_distance(p, q))


def empirical_distribution(samples, size):
    """Relative frequencies of integer ``samples`` over ``range(size)``."""
    counts = np.bincount(np.asarray(samples, dtype=int), minlength=size)
    return counts / counts.sum()
