"""Test-instance generators, including the search-based hard instances.

``diag-search``
    ``A = diag(f)`` for a 0/1 vector ``f``; its row leverage scores are ``f``.
``existence``
    ``A = [[1, 0], [0, a^T]]`` (size ``(N+1) x 2``) with ``b`` all ones. The
    least-squares solution is ``(1, 0)`` if ``a = 0`` and ``(1, 1)`` otherwise.
``spike``
    ``A = 1/sqrt(n)`` (one column), ``b = A + sqrt(n) a``. With one marked
    index the optimum is ``x = 2`` with residual ``sqrt(n - 1)``; with none
    it is ``x = 1`` with residual 0.
``random-lowrank``
    Gaussian factors with singular values decaying geometrically.
``coherent``
    Gaussian matrix with one row scaled until its leverage score is >= 0.9.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .linalg import row_leverage_scores, svd
from .rng import make_rng

KINDS = ("diag-search", "existence", "spike", "random-lowrank", "coherent")
COHERENCE = 0.9


@dataclass
class InstanceSpec:
    kind: str
    n: int = 100
    d: int = 10
    r: int | None = None
    decay: float = 1.0
    marked: list = field(default_factory=list)
    f: list | None = None


def _bits(spec, length):
    if spec.f is not None:
        f = np.asarray(spec.f, dtype=float)
        if f.shape != (length,) and spec.kind != "diag-search":
            raise ParameterError(f"f must have length {length}")
        if not np.all((f == 0) | (f == 1)):
            raise ParameterError("f must be a 0/1 vector")
        return f
    f = np.zeros(length)
    for i in spec.marked:
        if not 0 <= i < length:
            raise ParameterError(f"marked index {i} outside 0..{length - 1}")
        f[i] = 1.0
    return f


def random_lowrank(n, d, r, decay=1.0, rng=None):
    """``n x d`` matrix of rank ``r`` with singular values ``decay^k``, ``k = 0..r-1``."""
    if not 1 <= r <= min(n, d):
        raise ParameterError(f"rank must lie in 1..{min(n, d)}, got {r}")
    if not decay > 0:
        raise ParameterError("decay must be positive")
    rng = make_rng(rng)
    U, _ = np.linalg.qr(rng.standard_normal((n, r)))
    V, _ = np.linalg.qr(rng.standard_normal((d, r)))
    return (U * decay ** np.arange(r)) @ V.T


def coherent(n, d, rng=None):
    """Tall Gaussian matrix whose first row has leverage score at least 0.9."""
    if n <= d:
        raise ParameterError("coherent instances need n > d")
    rng = make_rng(rng)
    A = rng.standard_normal((n, d))
    scale = np.linalg.norm(A, 2)
    while row_leverage_scores(svd(A)).scores[0] < COHERENCE:
        A[0] *= 1 + scale
    return A


def generate_instance(spec: InstanceSpec, rng=None):
    """Return ``(A, b)`` for ``spec``; ``b`` is ``None`` for ``diag-search``."""
    rng = make_rng(rng)
    kind, n, d = spec.kind, spec.n, spec.d
    if n < 1 or d < 1:
        raise ParameterError("n and d must be positive")
    if kind == "diag-search":
        f = _bits(spec, n)
        return np.diag(f), None
    if kind == "existence":
        a = _bits(spec, n)
        A = np.zeros((n + 1, 2))
        A[0, 0] = 1.0
        A[1:, 1] = a
        return A, np.ones(n + 1)
    if kind == "spike":
        a = _bits(spec, n)
        A = np.full((n, 1), 1 / np.sqrt(n))
        return A, A[:, 0] + np.sqrt(n) * a
    if kind == "random-lowrank":
        A = random_lowrank(n, d, spec.r if spec.r is not None else min(n, d), spec.decay, rng)
        return A, rng.standard_normal(n)
    if kind == "coherent":
        A = coherent(n, d, rng)
        return A, rng.standard_normal(n)
    raise ParameterError(f"unknown instance kind {kind!r}; expected one of {', '.join(KINDS)}")
