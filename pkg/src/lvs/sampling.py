"""Importance samplers and sketched leverage-score estimates."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError, InputError, ParameterError
from .linalg import ScoreKind, ScoreVector, as_matrix, to_distribution
from .rng import make_rng

PROB_FLOOR = 1e-15


@dataclass(frozen=True)
class SamplingMatrix:
    """Sparse selector with importance weights.

    Draw ``t`` contributes ``weight[t] * e_{index[t]}``: a row of ``S`` for
    ``side == "row"`` (``S`` is q x ambient) or a column of ``R`` for
    ``side == "column"`` (``R`` is ambient x q). Duplicated indices are kept
    as separate draws.
    """

    side: str
    ambient: int
    indices: np.ndarray
    weights: np.ndarray
    probs: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        if self.side not in ("row", "column"):
            raise ParameterError(f"side must be 'row' or 'column', got {self.side!r}")
        idx = np.asarray(self.indices)
        w = np.asarray(self.weights, dtype=float)
        if idx.shape != w.shape or idx.ndim != 1:
            raise InputError("indices and weights must be 1-D and of equal length")
        if idx.size and (idx.min() < 0 or idx.max() >= self.ambient):
            raise InputError("sampled index out of range")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise InputError("weights must be positive and finite")

    @property
    def count(self) -> int:
        return int(self.indices.shape[0])

    @classmethod
    def from_probabilities(cls, side, ambient, indices, probs):
        """Build weights ``1/sqrt(q p_i)`` from (estimated) probabilities of the drawn indices."""
        indices = np.asarray(indices, dtype=int)
        p = np.maximum(np.asarray(probs, dtype=float), PROB_FLOOR)
        q = indices.shape[0]
        return cls(side, ambient, indices, 1.0 / np.sqrt(q * p), p)

    def to_dense(self):
        M = np.zeros((self.count, self.ambient))
        M[np.arange(self.count), self.indices] = self.weights
        return M if self.side == "row" else M.T


def _draw(dist, q, rng):
    p = np.asarray(dist, dtype=float).reshape(-1)
    if q < 1:
        raise ParameterError(f"number of draws must be >= 1, got {q}")
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12 * max(1, p.size):
        raise InputError("dist must be a probability vector")
    rng = make_rng(rng)
    # inverse-CDF draw that can never land on a zero-probability index
    cdf = np.cumsum(p)
    cdf /= cdf[-1]
    idx = np.searchsorted(cdf, rng.random(q), side="right")
    idx = np.minimum(idx, p.size - 1)
    return idx, p


def draw_row_sampler(dist, q, rng=None) -> SamplingMatrix:
    """Draw ``q`` i.i.d. row indices from ``dist`` with weights ``1/sqrt(q p_i)``."""
    idx, p = _draw(dist, q, rng)
    return SamplingMatrix.from_probabilities("row", p.size, idx, p[idx])


def draw_column_sampler(dist, c, rng=None) -> SamplingMatrix:
    idx, p = _draw(dist, c, rng)
    return SamplingMatrix.from_probabilities("column", p.size, idx, p[idx])


def apply_sampler(S: SamplingMatrix, A):
    """Materialize ``S A`` (row side) or ``A R`` (column side).

    One-dimensional ``A`` is treated as a vector and sampled entrywise on the
    row side, which gives ``S b``.
    """
    A = np.asarray(A, dtype=float)
    if S.side == "row":
        if A.shape[0] != S.ambient:
            raise InputError(f"sampler expects {S.ambient} rows, operand has {A.shape[0]}")
        w = S.weights if A.ndim == 1 else S.weights[:, None]
        return A[S.indices] * w
    if A.ndim != 2 or A.shape[1] != S.ambient:
        raise InputError(f"sampler expects {S.ambient} columns, operand has shape {A.shape}")
    return A[:, S.indices] * S.weights


def countsketch(A, m, rng):
    """Apply an m-row CountSketch (one random signed bucket per row of ``A``)."""
    n = A.shape[0]
    buckets = rng.integers(0, m, size=n)
    signs = rng.choice(np.array([-1.0, 1.0]), size=n)
    out = np.zeros((m, A.shape[1]))
    np.add.at(out, buckets, signs[:, None] * A)
    return out


def sketch_rows(r, relerr):
    """CountSketch size ``ceil(r^2 / relerr^2)`` used by the sketched estimator."""
    return math.ceil(r * r / (relerr * relerr))


def sketched_basis(A, relerr_target=0.25, rng=None, rank_tol=1e-10):
    """Approximate orthonormal basis of ``range(A)`` from a CountSketch.

    ``Pi A`` is factored by a truncated SVD ``Pi A = Q S W^T``; the returned
    ``B = A W S^{-1}`` has nearly orthonormal columns, and ``S`` approximates
    the singular values of ``A``. When the sketch would have at least as many
    rows as ``A`` it is skipped and the factorization is exact.

    Returns
    -------
    B : ndarray, shape (n, r)
    singulars : ndarray, shape (r,)
    """
    A = as_matrix(A)
    if not 0 < relerr_target < 1:
        raise ParameterError(f"relerr_target must lie in (0, 1), got {relerr_target}")
    if not np.any(A):
        raise DegenerateInputError("sketched scores of a zero matrix")
    n, d = A.shape
    rng = make_rng(rng)
    m = sketch_rows(min(n, d), relerr_target)
    SA = A if m >= n else countsketch(A, m, rng)
    _, s, Wt = np.linalg.svd(SA, full_matrices=False)
    r = int(np.count_nonzero(s > rank_tol * s[0]))
    return A @ (Wt[:r].T / s[:r]), s[:r]


def _row_norms_sq(B, relerr_target, rng):
    n, r = B.shape
    k = math.ceil(8 * math.log(max(n, 2)) / relerr_target ** 2)
    if k < r:
        B = B @ (rng.standard_normal((r, k)) / math.sqrt(k))
    return np.einsum("ij,ij->i", B, B)


def sketched_scores(A, relerr_target=0.25, rng=None, lam=None):
    """Sketched row scores together with the sketched singular values.

    With ``lam`` set, the basis is reweighted by ``s / sqrt(s^2 + lam^2)`` and
    the result approximates ridge leverage scores.

    Returns
    -------
    scores : ScoreVector
    singulars : ndarray
        Singular values of the sketch; their count is the estimated rank.
    """
    rng = make_rng(rng)
    B, s = sketched_basis(A, relerr_target, rng)
    kind = ScoreKind.ROW
    if lam is not None:
        if not lam > 0:
            raise ParameterError(f"lambda must be positive, got {lam}")
        B = B * (s / np.sqrt(s ** 2 + lam ** 2))
        kind = ScoreKind.RIDGE_ROW
    return ScoreVector(_row_norms_sq(B, relerr_target, rng), kind), s


def approx_leverage_scores_sketched(A, relerr_target=0.25, rng=None) -> ScoreVector:
    """Row leverage scores from a sketched basis (see :func:`sketched_basis`).

    A Gaussian projection with ``ceil(8 ln n / relerr^2)`` columns is applied
    to the basis only when that is smaller than the rank.
    """
    return sketched_scores(A, relerr_target, rng)[0]


def approx_ridge_scores_sketched(A, lam, relerr_target=0.25, rng=None) -> ScoreVector:
    """Ridge row scores ``||e_i^T U D (D^2 + lam^2)^{-1/2}||^2`` from a sketched basis."""
    return sketched_scores(A, relerr_target, rng, lam=lam)[0]


__all__ = [
    "SamplingMatrix",
    "apply_sampler",
    "approx_leverage_scores_sketched",
    "approx_ridge_scores_sketched",
    "countsketch",
    "draw_column_sampler",
    "draw_row_sampler",
    "sketched_basis",
    "sketched_scores",
    "to_distribution",
]
