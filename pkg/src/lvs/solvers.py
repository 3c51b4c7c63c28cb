"""Reduced-problem solvers and the classical sampling pipelines.

The pipelines follow the usual sketch-and-solve pattern: compute (or
approximate) leverage scores, draw an importance-weighted row or column
sampler, and solve the much smaller problem that results.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import DegenerateInputError, ParameterError, PreconditionError
from .linalg import (
    as_matrix,
    as_vector,
    col_leverage_scores,
    ridge_row_scores,
    row_leverage_scores,
    svd,
)
from .sampling import (
    SamplingMatrix,
    apply_sampler,
    draw_column_sampler,
    draw_row_sampler,
    sketched_scores,
)
from .rng import make_rng

C_Q = 4.0
C_C = 4.0
SCORE_RELERR = 0.25
DIRECT_FLOP_LIMIT = 1e8


class LargeLambdaWarning(UserWarning):
    """Regularization exceeds the spectral norm; ``x = 0`` is already near optimal."""


@dataclass
class SolveReport:
    """Result of one randomized solve.

    ``objective`` is the residual norm ``||Ax - b||`` for least squares and
    ``||Ax - b||^2 + lam^2 ||x||^2`` for ridge problems; ``ratio`` compares it
    with the exact optimum when that was computed.
    """

    solution: np.ndarray
    objective: float
    reference_objective: float | None = None
    ratio: float | None = None
    samples_used: dict = field(default_factory=dict)
    score_mode: str = "exact"
    seed: int | None = None
    cost_counters: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def to_dict(self):
        out = asdict(self)
        out["solution"] = [float(v) for v in self.solution]
        return out


@dataclass(frozen=True)
class CgnrInfo:
    converged: bool
    iterations: int
    normal_residual: float


def solve_ls_direct(A, b):
    """Minimum-norm least-squares solution via the pseudoinverse (LAPACK gelsd)."""
    A = as_matrix(A)
    b = as_vector(b, A.shape[0])
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    return x


def solve_ls_cgnr(A, b, tol=1e-10, maxit=None):
    """Conjugate gradients on the normal equations ``A^T A x = A^T b``.

    Stops when ``||A^T (b - A x)|| <= tol * ||A^T b||`` or after ``maxit``
    iterations (default ``10 d``). Non-convergence is reported through the
    returned :class:`CgnrInfo`, never raised.

    Returns
    -------
    x : ndarray
    info : CgnrInfo
    """
    A = as_matrix(A)
    b = as_vector(b, A.shape[0])
    d = A.shape[1]
    maxit = 10 * d if maxit is None else int(maxit)
    x = np.zeros(d)
    r = b.copy()
    z = A.T @ r
    target = tol * np.linalg.norm(z)
    p = z.copy()
    zz = z @ z
    if math.sqrt(zz) <= target:
        return x, CgnrInfo(True, 0, math.sqrt(zz))
    for it in range(1, maxit + 1):
        w = A @ p
        ww = w @ w
        if ww == 0.0:
            break
        alpha = zz / ww
        x += alpha * p
        r -= alpha * w
        z = A.T @ r
        zz_new = z @ z
        if math.sqrt(zz_new) <= target:
            return x, CgnrInfo(True, it, math.sqrt(zz_new))
        p = z + (zz_new / zz) * p
        zz = zz_new
    return x, CgnrInfo(False, maxit, math.sqrt(zz))


def solve_reduced_ls(SA, Sb):
    """Solve the sampled problem directly when ``q d^2`` is small, else by CGNR."""
    q, d = SA.shape
    if q * d * d <= DIRECT_FLOP_LIMIT:
        return solve_ls_direct(SA, Sb), {"reduced_solver": "direct"}
    x, info = solve_ls_cgnr(SA, Sb)
    return x, {"reduced_solver": "cgnr", "cgnr_iterations": info.iterations,
               "cgnr_converged": info.converged}


def objective_ridge(A, b, lam, x):
    """``||A x - b||^2 + lam^2 ||x||^2``."""
    res = np.asarray(A, dtype=float) @ np.asarray(x, dtype=float) - np.asarray(b, dtype=float)
    return float(res @ res + lam * lam * np.dot(x, x))


def solve_ridge_exact(A, b, lam):
    """``(A^T A + lam^2 I)^{-1} A^T b`` through the augmented least-squares problem."""
    A = as_matrix(A)
    b = as_vector(b, A.shape[0])
    if lam == 0:
        return solve_ls_direct(A, b)
    n, d = A.shape
    aug = np.vstack([A, lam * np.eye(d)])
    return solve_ls_direct(aug, np.concatenate([b, np.zeros(d)]))


def identity_sampler(d, side="column"):
    """Selector that keeps every index once with unit weight."""
    return SamplingMatrix(side, d, np.arange(d), np.ones(d))


def ridge_estimator(A, R: SamplingMatrix, b, lam):
    """``A^T (A R R^T A^T + lam^2 I)^{-1} b`` via a Cholesky solve.

    ``A R R^T A^T`` is accumulated per distinct sampled column, which equals
    the product over all draws but costs ``n^2`` per distinct index.
    """
    A = as_matrix(A)
    b = as_vector(b, A.shape[0])
    n, d = A.shape
    if R.side != "column" or R.ambient != d:
        raise PreconditionError(f"need a column sampler over {d} columns")
    mass = np.bincount(R.indices, weights=R.weights ** 2, minlength=d)
    cols = np.flatnonzero(mass)
    Ac = A[:, cols]
    K = (Ac * mass[cols]) @ Ac.T
    K[np.diag_indices(n)] += lam * lam
    try:
        factor = sla.cho_factor(K, lower=True, check_finite=False)
    except np.linalg.LinAlgError:
        raise PreconditionError("ridge estimator system is singular (ill-posed: lambda = 0 "
                                "with rank-deficient sampled Gram matrix)") from None
    y = sla.cho_solve(factor, b, check_finite=False)
    return A.T @ y


def _ratio(objective, reference, scale):
    if reference > 1e-12 * max(scale, 1e-300):
        return objective / reference
    return 1.0 if objective <= 1e-8 * max(scale, 1e-300) else math.inf


def _seed_of(rng):
    return rng if isinstance(rng, (int, np.integer)) else None


def _row_scores(A, score_mode, rng, relerr):
    if score_mode == "exact":
        F = svd(A)
        if F.degenerate:
            raise DegenerateInputError("matrix has rank 0")
        return row_leverage_scores(F).scores, F.rank
    if score_mode == "sketched":
        sv, s = sketched_scores(A, relerr, rng)
        return sv.scores, s.shape[0]
    raise ParameterError(f"unknown score_mode {score_mode!r}")


def ls_sample_count(r, eps, c_q=C_Q):
    """``ceil(c_q (r ln(r+1) + r/eps))`` rows for least squares."""
    return math.ceil(c_q * (r * math.log(r + 1) + r / eps))


def ridge_column_count(r, eps, norm, lam, c_c=C_C):
    """``ceil(c_c (r ln(r+1) + (r/eps)(||A||/lam)^2))`` columns for the ridge estimator."""
    return math.ceil(c_c * (r * math.log(r + 1) + (r / eps) * (norm / lam) ** 2))


def ridge_row_count(r, eps, c_q=C_Q):
    """``ceil(c_q (r/eps) ln(r+1))`` rows for the row-sampling stage of ridge regression."""
    return max(1, math.ceil(c_q * r / eps * math.log(r + 1)))


def _check_eps(eps):
    if not 0 < eps < 1:
        raise ParameterError(f"eps must lie in (0, 1), got {eps}")


def algorithm1_ls(A, b, eps, rng=None, score_mode="exact", c_q=C_Q,
                  relerr=SCORE_RELERR, reference=True) -> SolveReport:
    """Least squares by leverage-score row sampling.

    Draws ``q = ceil(c_q (r ln(r+1) + r/eps))`` rows with probability
    proportional to their (exact or sketched) leverage scores, rescales
    them by ``1/sqrt(q p_i)`` and solves the reduced problem.
    """
    A = as_matrix(A)
    b = as_vector(b, A.shape[0])
    _check_eps(eps)
    seed = _seed_of(rng)
    rng = make_rng(rng)
    scores, r = _row_scores(A, score_mode, rng, relerr)
    q = ls_sample_count(r, eps, c_q)
    S = draw_row_sampler(scores / scores.sum(), q, rng)
    x, counters = solve_reduced_ls(apply_sampler(S, A), apply_sampler(S, b))
    counters["distinct_rows"] = int(np.unique(S.indices).size)
    report = SolveReport(solution=x, objective=float(np.linalg.norm(A @ x - b)),
                         samples_used={"q": q}, score_mode=score_mode, seed=seed,
                         cost_counters=counters)
    if reference:
        x_opt = solve_ls_direct(A, b)
        report.reference_objective = float(np.linalg.norm(A @ x_opt - b))
        report.ratio = _ratio(report.objective, report.reference_objective, np.linalg.norm(b))
    return report


def _warn_large_lambda(lam, norm, notes):
    if lam > norm:
        msg = f"lambda={lam:g} exceeds ||A||={norm:g}; x = 0 is already a good approximation"
        warnings.warn(msg, LargeLambdaWarning, stacklevel=3)
        notes.append(msg)


def _finish_ridge(report, A, b, lam, reference):
    report.objective = objective_ridge(A, b, lam, report.solution)
    if reference:
        x_opt = solve_ridge_exact(A, b, lam)
        report.reference_objective = objective_ridge(A, b, lam, x_opt)
        report.ratio = _ratio(report.objective, report.reference_objective, float(b @ b))
    return report


def algorithm3_ridge(A, b, lam, eps, rng=None, score_mode="exact", c_c=C_C,
                     relerr=SCORE_RELERR, reference=True) -> SolveReport:
    """Ridge regression through column sampling and the push-through estimator.

    Samples ``c`` columns by column leverage and returns
    ``A^T (A R R^T A^T + lam^2 I)^{-1} b``. Best suited to wide matrices,
    since the solve is ``n x n``.
    """
    A = as_matrix(A)
    b = as_vector(b, A.shape[0])
    _check_eps(eps)
    if not lam > 0:
        raise ParameterError(f"lambda must be positive, got {lam}")
    seed = _seed_of(rng)
    rng = make_rng(rng)
    notes = []
    if not np.any(A):
        report = SolveReport(solution=np.zeros(A.shape[1]), objective=0.0,
                             samples_used={"c": 0}, score_mode=score_mode, seed=seed, notes=notes)
        return _finish_ridge(report, A, b, lam, reference)
    if score_mode == "exact":
        F = svd(A)
        scores, r, norm = col_leverage_scores(F).scores, F.rank, F.sigma_max
    elif score_mode == "sketched":
        sv, s = sketched_scores(A.T, relerr, rng)
        scores, r, norm = sv.scores, s.shape[0], float(s[0])
    else:
        raise ParameterError(f"unknown score_mode {score_mode!r}")
    _warn_large_lambda(lam, norm, notes)
    c = ridge_column_count(r, eps, norm, lam, c_c)
    R = draw_column_sampler(scores / scores.sum(), c, rng)
    x = ridge_estimator(A, R, b, lam)
    report = SolveReport(solution=x, objective=0.0, samples_used={"c": c},
                         score_mode=score_mode, seed=seed,
                         cost_counters={"distinct_columns": int(np.unique(R.indices).size)},
                         notes=notes)
    return _finish_ridge(report, A, b, lam, reference)


def sampled_ridge(A, b, lam, eps, S: SamplingMatrix, rng, *, score_mode="exact", c_c=C_C):
    """Run the column-sampling ridge solver on the row-sampled problem ``(S A, S b)``."""
    SA = apply_sampler(S, A)
    Sb = apply_sampler(S, b)
    with warnings.catch_warnings():
        # the large-lambda check belongs to the caller's original problem
        warnings.simplefilter("ignore", LargeLambdaWarning)
        inner = algorithm3_ridge(SA, Sb, lam, eps, rng, score_mode=score_mode, c_c=c_c,
                                 reference=False)
    return inner


def algorithm4_classical(A, b, lam, eps, rng=None, score_mode="exact", c_q=C_Q, c_c=C_C,
                         relerr=SCORE_RELERR, reference=True) -> SolveReport:
    """Ridge regression by ridge-leverage row sampling followed by column sampling.

    Rows are drawn with probability proportional to the ridge leverage scores
    (exact or sketched); the reduced ``q x d`` problem is then handed to
    :func:`algorithm3_ridge`.
    """
    A = as_matrix(A)
    b = as_vector(b, A.shape[0])
    _check_eps(eps)
    if not lam > 0:
        raise ParameterError(f"lambda must be positive, got {lam}")
    seed = _seed_of(rng)
    rng = make_rng(rng)
    notes = []
    if score_mode == "exact":
        F = svd(A)
        if F.degenerate:
            raise DegenerateInputError("matrix has rank 0")
        scores, r, norm = ridge_row_scores(F, lam).scores, F.rank, F.sigma_max
    elif score_mode == "sketched":
        sv, s = sketched_scores(A, relerr, rng, lam=lam)
        scores, r, norm = sv.scores, s.shape[0], float(s[0])
    else:
        raise ParameterError(f"unknown score_mode {score_mode!r}")
    _warn_large_lambda(lam, norm, notes)
    q = ridge_row_count(r, eps, c_q)
    S = draw_row_sampler(scores / scores.sum(), q, rng)
    inner = sampled_ridge(A, b, lam, eps, S, rng, score_mode="exact", c_c=c_c)
    report = SolveReport(solution=inner.solution, objective=0.0,
                         samples_used={"q": q, "c": inner.samples_used["c"]},
                         score_mode=score_mode, seed=seed,
                         cost_counters={"distinct_rows": int(np.unique(S.indices).size),
                                        **inner.cost_counters},
                         notes=notes)
    return _finish_ridge(report, A, b, lam, reference)
