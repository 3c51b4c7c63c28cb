"""Block-encodings simulated as explicit unitary dilations.

A :class:`BlockEncoding` stores the scaled block ``A / alpha`` and
materializes the full orthogonal dilation only on demand, since for the
matrices used here the ``2N x 2N`` unitary dominates memory.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ..errors import InputError, ParameterError, PreconditionError
from ..linalg import as_matrix
from .polynomial import QsvtPolynomial

MAX_DILATION = 4096
NORM_SLACK = 1e-12


def _padded(block):
    n, d = block.shape
    N = max(n, d)
    if N == n == d:
        return block
    out = np.zeros((N, N))
    out[:n, :d] = block
    return out


def halmos_dilation(B):
    """Orthogonal ``[[B, (I - B B^T)^{1/2}], [(I - B^T B)^{1/2}, -B^T]]`` of a square contraction."""
    P, s, Qt = np.linalg.svd(B)
    c = np.sqrt(np.clip(1.0 - np.clip(s, 0.0, 1.0) ** 2, 0.0, None))
    upper_right = (P * c) @ P.T
    lower_left = (Qt.T * c) @ Qt
    return np.block([[B, upper_right], [lower_left, -B.T]])


@dataclass(frozen=True)
class BlockEncoding:
    """``(alpha, a, err)`` block-encoding of an ``n x d`` matrix.

    Parameters
    ----------
    block : ndarray
        The top-left ``n x d`` block of the unitary, i.e. ``A / alpha``.
    alpha : float
        Normalization.
    ancilla_count : int
        Ancilla qubits in the circuit this simulates (bookkeeping only).
    err : float
        Bound on ``||A - alpha * block||``.
    queries_per_use : int
        Calls to the original encoding of the input matrix made by one use
        of this encoding.
    meta : dict
        Construction details (polynomial degree, delta, source alpha).
    """

    block: np.ndarray
    alpha: float
    ancilla_count: int
    err: float = 0.0
    queries_per_use: int = 1
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        n, d = self.block.shape
        if max(n, d) > MAX_DILATION:
            raise PreconditionError(
                f"dilation of a {n}x{d} block exceeds the simulation limit N <= {MAX_DILATION}")
        if not self.alpha > 0:
            raise ParameterError("alpha must be positive")

    @property
    def block_rows(self) -> int:
        return self.block.shape[0]

    @property
    def block_cols(self) -> int:
        return self.block.shape[1]

    @property
    def dimension(self) -> int:
        """Side length ``2N`` of the simulated unitary."""
        return 2 * max(self.block.shape)

    @cached_property
    def unitary(self):
        return halmos_dilation(_padded(self.block))

    def top_left(self):
        """The ``n x d`` block read back out of the unitary."""
        return self.unitary[: self.block_rows, : self.block_cols]

    def encoded(self):
        """``alpha * block``, the matrix this encodes up to ``err``."""
        return self.alpha * self.block

    def unitarity_defect(self):
        U = self.unitary
        return float(np.linalg.norm(U.T @ U - np.eye(U.shape[0]), 2))


def dilate_block_encoding(A, alpha=None) -> BlockEncoding:
    """Exact ``(alpha, 1, 0)`` encoding of ``A`` by unitary dilation.

    ``alpha`` defaults to ``||A|| (1 + 1e-12)`` (1 for the zero matrix) and
    must not be smaller than the spectral norm.
    """
    A = as_matrix(A)
    if max(A.shape) > MAX_DILATION:
        raise PreconditionError(f"matrix of shape {A.shape} exceeds N <= {MAX_DILATION}")
    norm = float(np.linalg.norm(A, 2))
    if alpha is None:
        alpha = norm * (1 + NORM_SLACK) if norm > 0 else 1.0
    elif alpha < norm * (1 - NORM_SLACK):
        raise ParameterError(f"alpha={alpha} is below ||A||={norm}; the dilation is undefined")
    return BlockEncoding(A / alpha, float(alpha), 1, 0.0, 1, {"norm": norm})


def extend_block_encoding(be: BlockEncoding, lam) -> BlockEncoding:
    """Encoding of ``[A; lam I]`` with normalization ``alpha + lam`` and two more ancillas."""
    if not lam > 0:
        raise ParameterError(f"lambda must be positive, got {lam}")
    d = be.block_cols
    alpha = be.alpha + lam
    stacked = np.vstack([be.alpha * be.block, lam * np.eye(d)]) / alpha
    return BlockEncoding(stacked, alpha, be.ancilla_count + 2, be.err, be.queries_per_use,
                         {**be.meta, "lambda": float(lam), "source_alpha": be.alpha})


def apply_svt(be: BlockEncoding, poly: QsvtPolynomial, rank_tol=1e-10) -> BlockEncoding:
    """Apply ``poly`` to the singular values of the encoded block.

    Returns a ``(1, a+1, err')`` encoding of ``W = U Q(D/alpha) V^T`` with
    ``err' = 4 m sqrt(err/alpha) + 2 eps`` recorded; ``W`` is within ``2 eps``
    of the polar factor whenever every nonzero singular value of the block is
    at least ``3 delta``.
    """
    B = be.block
    U, s, Vt = np.linalg.svd(B, full_matrices=False)
    r = int(np.count_nonzero(s > rank_tol * s[0])) if s.size and s[0] > 0 else 0
    if r and s[r - 1] < 3 * poly.delta * (1 - 1e-9):
        raise PreconditionError(
            f"delta={poly.delta:.4g} too large: smallest nonzero singular value of the block is "
            f"{s[r - 1]:.4g} < 3 delta")
    W = (U[:, :r] * poly(s[:r])) @ Vt[:r]
    m = poly.degree
    err = 4 * m * math.sqrt(be.err / be.alpha) + 2 * poly.eps
    meta = {**be.meta, "degree": m, "delta": poly.delta, "poly_eps": poly.eps,
            "svt_source_alpha": be.alpha,
            "sigma_min_block": float(s[r - 1]) if r else 0.0, "rank": r}
    return BlockEncoding(W, 1.0, be.ancilla_count + 1, err, m * be.queries_per_use, meta)


def check_encodes(be: BlockEncoding, A, atol=1e-10):
    """Raise ``InputError`` if ``alpha * top_left`` is farther than ``err + atol`` from ``A``."""
    gap = float(np.linalg.norm(np.asarray(A) - be.alpha * be.top_left(), 2))
    if gap > be.err + atol:
        raise InputError(f"encoding is off by {gap:.3g} > err + atol = {be.err + atol:.3g}")
    return gap
