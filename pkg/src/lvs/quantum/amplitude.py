"""Amplitude estimation simulated through its exact outcome distribution.

Phase estimation with ``M`` grid points on the phase ``theta = arcsin(sqrt(a))/pi``
returns ``y`` with probability ``sin^2(M pi D) / (M^2 sin^2(pi D))``,
``D = theta - y/M``, and reports ``sin^2(pi y / M)``. Sampling that kernel
reproduces the ``8/pi^2`` success guarantee without simulating a circuit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError
from ..rng import make_rng

DEFAULT_BOOST = 15
MAX_GRID = 2 ** 18


def ae_bound(a, M):
    """Additive error ``2 pi sqrt(a(1-a))/M + pi^2/M^2`` guaranteed with probability >= 8/pi^2."""
    a = np.clip(a, 0.0, 1.0)
    return 2 * math.pi * np.sqrt(a * (1 - a)) / M + math.pi ** 2 / M ** 2


def outcome_distribution(a, M):
    """Probabilities of the ``M`` phase-estimation outcomes for amplitude ``a``."""
    if M < 1:
        raise ParameterError(f"M must be >= 1, got {M}")
    a = min(max(float(a), 0.0), 1.0)
    theta = math.asin(math.sqrt(a)) / math.pi
    y = np.arange(M)
    delta = theta - y / M
    den = np.sin(math.pi * delta)
    num = np.sin(M * math.pi * delta)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = num * num / (M * M * den * den)
    p[np.abs(den) < 1e-15] = 1.0
    return p / p.sum()


def ae_simulate(a, M, rng=None, size=None):
    """One (or ``size``) simulated amplitude-estimation outputs for ``a`` in ``[0, 1]``."""
    rng = make_rng(rng)
    p = outcome_distribution(a, M)
    y = rng.choice(M, size=size, p=p)
    return np.sin(math.pi * np.asarray(y) / M) ** 2 if size is not None else \
        math.sin(math.pi * int(y) / M) ** 2


def ae_median(a, M, boost, rng):
    """Median of ``boost`` independent estimates; fails with probability ``2^{-Omega(boost)}``."""
    return float(np.median(ae_simulate(a, M, rng, size=boost)))


@dataclass
class AeResult:
    estimate: float
    grid: int
    rounds: int
    oracle_calls: int


def estimate_relative(a, relerr, rng=None, boost=DEFAULT_BOOST, start=8, max_grid=MAX_GRID):
    """Estimate ``a`` to relative error ``relerr`` by doubling the grid size.

    Stops once the error bound evaluated at the current estimate is at most
    ``relerr * estimate``, or at ``max_grid``.
    """
    if not 0 < relerr < 1:
        raise ParameterError(f"relerr must lie in (0, 1), got {relerr}")
    rng = make_rng(rng)
    M = max(8, int(start))
    rounds = calls = 0
    while True:
        est = ae_median(a, M, boost, rng)
        rounds += 1
        calls += boost * M
        if (est > 0 and ae_bound(est, M) <= relerr * est) or M >= max_grid:
            return AeResult(est, M, rounds, calls)
        M = min(2 * M, max_grid)


def leverage_amplitude(W, j, side="column"):
    """``||W e_j||^2`` (column) or ``||e_j^T W||^2`` (row)."""
    v = W[:, j] if side == "column" else W[j]
    return float(v @ v)


def estimate_leverage_score(beW, j, eps, boost=DEFAULT_BOOST, rng=None, side="column"):
    """Additive-error estimate of one leverage score from an encoding of ``W ~ U V^T``.

    Uses ``M = ceil(pi/eps)`` grid points and the median of ``boost`` runs,
    targeting ``|L~ - L| <= eps sqrt(L) + eps^2``.
    """
    if not 0 < eps < 1:
        raise ParameterError(f"eps must lie in (0, 1), got {eps}")
    if boost < 1:
        raise ParameterError("boost must be >= 1")
    M = math.ceil(math.pi / eps)
    return ae_median(leverage_amplitude(beW.block, j, side), M, boost, make_rng(rng))


def rank_amplitude(beW):
    """Post-selection probability ``||W||_F^2 / d`` of the column leverage state."""
    W = beW.block
    return float(np.sum(W * W)) / W.shape[1]


def estimate_rank(beW, eps, rng=None, boost=DEFAULT_BOOST, return_details=False):
    """Rank estimate ``d * a~`` where ``a~`` estimates ``||W||_F^2 / d`` to relative error ``eps``."""
    if not 0 < eps < 1:
        raise ParameterError(f"eps must lie in (0, 1), got {eps}")
    a = rank_amplitude(beW)
    d = beW.block_cols
    if a == 0.0:
        res = AeResult(0.0, 0, 0, 0)
    else:
        res = estimate_relative(a, eps, rng, boost)
    value = d * res.estimate
    return (value, res) if return_details else value
