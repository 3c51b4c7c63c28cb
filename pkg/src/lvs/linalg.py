"""Exact dense linear algebra for leverage scores.

Everything here is computed from a full SVD and serves as the ground truth
that the randomized and simulated routines are checked against.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import DegenerateInputError, InputError, ParameterError

DEFAULT_RANK_TOL = 1e-10


def as_matrix(A, name="A"):
    """Validate ``A`` as a finite 2-D float array and return it."""
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise InputError(f"{name} must be a non-empty 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InputError(f"{name} has non-finite entries")
    return A


def as_vector(b, n=None, name="b"):
    b = np.asarray(b, dtype=float).reshape(-1)
    if not np.all(np.isfinite(b)):
        raise InputError(f"{name} has non-finite entries")
    if n is not None and b.shape[0] != n:
        raise InputError(f"{name} has length {b.shape[0]}, expected {n}")
    return b


@dataclass(frozen=True)
class SvdFactors:
    """Compact rank-revealing SVD ``A = U diag(singulars) V^T``.

    ``U`` is n x r and ``V`` is d x r with orthonormal columns; ``r`` is the
    numerical rank, i.e. the number of singular values above
    ``rank_tol * sigma_1``.
    """

    U: np.ndarray
    singulars: np.ndarray
    V: np.ndarray
    rank_tol: float = DEFAULT_RANK_TOL

    @property
    def rank(self) -> int:
        return int(self.singulars.shape[0])

    @property
    def shape(self):
        return (self.U.shape[0], self.V.shape[0])

    @property
    def degenerate(self) -> bool:
        return self.rank == 0

    @property
    def sigma_max(self) -> float:
        return float(self.singulars[0]) if self.rank else 0.0

    @property
    def sigma_min(self) -> float:
        return float(self.singulars[-1]) if self.rank else 0.0

    def reconstruct(self):
        return (self.U * self.singulars) @ self.V.T


def svd(A, rank_tol=DEFAULT_RANK_TOL) -> SvdFactors:
    """Compact SVD truncated at ``rank_tol * sigma_1``.

    A zero matrix gives empty factors (``rank == 0``, ``degenerate`` set)
    rather than an error.
    """
    A = as_matrix(A)
    if not 0 < rank_tol <= 1e-3:
        raise ParameterError(f"rank_tol must lie in (0, 1e-3], got {rank_tol}")
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        r = 0
    else:
        r = int(np.count_nonzero(s > rank_tol * s[0]))
    return SvdFactors(U=U[:, :r].copy(), singulars=s[:r].copy(),
                      V=Vt[:r].T.copy(), rank_tol=rank_tol)


def polar_factor(F: SvdFactors):
    """Closest partial isometry ``U V^T``."""
    if F.degenerate:
        raise DegenerateInputError("polar factor of a rank-0 matrix is undefined")
    return F.U @ F.V.T


class ScoreKind(str, enum.Enum):
    ROW = "row"
    COLUMN = "column"
    RIDGE_ROW = "ridge-row"


@dataclass(frozen=True)
class ScoreVector:
    """Leverage scores plus the bookkeeping needed to normalize them."""

    scores: np.ndarray
    kind: ScoreKind
    degenerate: bool = False

    @property
    def total(self) -> float:
        return float(np.sum(self.scores))

    def __len__(self):
        return self.scores.shape[0]

    def distribution(self):
        """Sampling distribution ``scores / total``."""
        return to_distribution(self.scores)


def to_distribution(weights):
    """Normalize nonnegative ``weights`` to a probability vector."""
    w = np.asarray(weights, dtype=float).reshape(-1)
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise InputError("distribution weights must be finite and nonnegative")
    total = w.sum()
    if total <= 0:
        raise DegenerateInputError("distribution has empty support")
    return w / total


def row_leverage_scores(F: SvdFactors) -> ScoreVector:
    """Squared row norms of ``U``."""
    return ScoreVector(np.einsum("ij,ij->i", F.U, F.U), ScoreKind.ROW, F.degenerate)


def col_leverage_scores(F: SvdFactors) -> ScoreVector:
    """Squared row norms of ``V`` (column leverage of ``A``)."""
    return ScoreVector(np.einsum("ij,ij->i", F.V, F.V), ScoreKind.COLUMN, F.degenerate)


def extended_matrix(A, lam):
    """Stack ``A`` on top of ``lam * I_d``."""
    A = as_matrix(A)
    if not lam > 0:
        raise ParameterError(f"lambda must be positive, got {lam}")
    return np.vstack([A, lam * np.eye(A.shape[1])])


def _complete_basis(V, d):
    """Extend the orthonormal columns of ``V`` (d x r) to a d x d orthogonal matrix."""
    r = V.shape[1]
    if r == d:
        return V
    if r == 0:
        return np.eye(d)
    comp = sla.null_space(V.T)
    return np.hstack([V, comp[:, : d - r]])


def extended_svd(F: SvdFactors, lam):
    """SVD of the regularized stack ``[A; lam I]`` from the SVD of ``A``.

    Returns ``(U_ext, sigma, V_full)`` with ``[A; lam I] = U_ext diag(sigma)^{-1} V_full^T``
    where ``sigma_i = (s_i^2 + lam^2)^{-1/2}``. When ``A`` is rank deficient,
    ``V`` is completed to an orthonormal basis of R^d and the missing singular
    values are taken to be zero.
    """
    if not lam > 0:
        raise ParameterError(f"lambda must be positive, got {lam}")
    n, d = F.shape
    r = F.rank
    V_full = _complete_basis(F.V, d)
    s_full = np.zeros(d)
    s_full[:r] = F.singulars
    sigma = 1.0 / np.sqrt(s_full ** 2 + lam ** 2)
    top = np.zeros((n, d))
    top[:, :r] = F.U * (F.singulars * sigma[:r])
    bottom = lam * V_full * sigma
    return np.vstack([top, bottom]), sigma, V_full


def statistical_dimension(singulars, lam):
    """``sum_i s_i^2 / (s_i^2 + lam^2)``; equals the rank at ``lam = 0``."""
    s = np.asarray(singulars, dtype=float)
    if lam < 0:
        raise ParameterError(f"lambda must be nonnegative, got {lam}")
    if lam == 0:
        return float(np.count_nonzero(s > 0))
    s2 = s ** 2
    return float(np.sum(s2 / (s2 + lam ** 2)))


def ridge_row_scores(A, lam, rank_tol=DEFAULT_RANK_TOL) -> ScoreVector:
    """Row scores of ``U D (D^T D + lam^2 I)^{-1/2}``; they sum to the statistical dimension."""
    if not lam > 0:
        raise ParameterError(f"lambda must be positive, got {lam}")
    F = A if isinstance(A, SvdFactors) else svd(A, rank_tol)
    s = F.singulars
    Uhat = F.U * (s / np.sqrt(s ** 2 + lam ** 2))
    return ScoreVector(np.einsum("ij,ij->i", Uhat, Uhat), ScoreKind.RIDGE_ROW, F.degenerate)


class TailStatus(str, enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    ASSUMPTION_VIOLATED = "assumption-violated"

    def __bool__(self):
        return self is TailStatus.HOLDS


def tail_index(r, eps):
    """``ceil(r/eps)`` guarded against round-off such as ``2/0.1 = 20.000000000000004``."""
    return math.ceil(r / eps - 1e-9)


def tail_assumption_holds(r, n, eps):
    """Admissible range ``r/n - eps/2n <= eps <= 1 - eps/2n`` with ``ceil(r/eps) <= n``."""
    lo = r / n - eps / (2 * n)
    hi = 1 - eps / (2 * n)
    return lo <= eps <= hi and tail_index(r, eps) <= n


def score_tail_check(scores: ScoreVector, eps, rank=None) -> TailStatus:
    """Check that the ``ceil(r/eps)``-th largest row score is at least ``eps/2n``.

    Scores are sorted descending with a stable sort, so ties keep index
    order. ``rank`` defaults to the rounded score total.
    """
    s = np.asarray(scores.scores, dtype=float)
    n = s.shape[0]
    r = int(round(scores.total)) if rank is None else int(rank)
    if r < 1 or not eps > 0 or not tail_assumption_holds(r, n, eps):
        return TailStatus.ASSUMPTION_VIOLATED
    k = tail_index(r, eps)
    order = np.argsort(-s, kind="stable")
    kth = s[order[k - 1]]
    return TailStatus.HOLDS if kth >= eps / (2 * n) else TailStatus.FAILS
