"""Hybrid quantum-classical regression pipelines on the simulated primitives.

Leverage states stand in for classical score computation: rows are drawn by
measuring a state, and the probabilities needed for the importance weights
are recovered by amplitude estimation. The reduced problem is then solved
classically, exactly as in the classical pipelines.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateInputError, ParameterError
from ..linalg import as_matrix, as_vector
from ..rng import make_rng
from ..sampling import SamplingMatrix, apply_sampler
from ..solvers import (
    C_C,
    C_Q,
    SCORE_RELERR,
    SolveReport,
    _check_eps,
    _finish_ridge,
    _ratio,
    _seed_of,
    _warn_large_lambda,
    ls_sample_count,
    ridge_row_count,
    sampled_ridge,
    solve_ls_direct,
    solve_reduced_ls,
)
from .amplitude import DEFAULT_BOOST, estimate_rank, estimate_relative, leverage_amplitude
from .encoding import BlockEncoding
from .states import (
    CostLedger,
    LowSuccessWarning,
    prepare_col_leverage_state,
    prepare_ridge_leverage_state,
    rank_encoding,
    sample_leverage,
)

RANK_EPS = 0.1
DEFAULT_EPS_HAT = 0.05


def score_grid_floor(n, eps):
    """Initial grid size ``ceil(sqrt(2n/eps))``; sampled scores are ``Omega(eps/n)``."""
    return max(8, math.ceil(math.sqrt(2 * n / eps)))


@dataclass
class PreparedLs:
    """Encoding of ``W ~ U V^T`` for one matrix, reusable across seeds."""

    encoding: BlockEncoding
    eps_hat: float


def prepare_ls_sampler(A, eps_hat=DEFAULT_EPS_HAT) -> PreparedLs:
    """Build the sign-transformed encoding used by :func:`algorithm2_quantum_ls`.

    The transition width uses ``sigma_r`` and ``k = r`` from an exact SVD
    (oracle-provided); the polynomial is tight enough for rank estimation.
    The construction is deterministic and can be shared by many randomized
    runs.
    """
    return PreparedLs(rank_encoding(as_matrix(A), RANK_EPS, eps_hat), eps_hat)


def _estimate_scores(W, indices, relerr, start, rng, boost, side):
    """Relative-error amplitude estimates of the leverage scores at ``indices``."""
    out = {}
    calls = rounds = 0
    for j in np.unique(indices):
        a = leverage_amplitude(W, int(j), side)
        res = estimate_relative(a, relerr, rng, boost, start=start)
        out[int(j)] = res.estimate
        calls += res.oracle_calls
        rounds += res.rounds
    return out, calls, rounds


def _sampler_from_estimates(side, ambient, draws, est, total):
    probs = np.array([est[int(j)] / total for j in draws])
    return SamplingMatrix.from_probabilities(side, ambient, draws, probs)


def algorithm2_quantum_ls(A, b, eps, rng=None, prepared: PreparedLs | None = None, c_q=C_Q,
                          relerr=SCORE_RELERR, boost=DEFAULT_BOOST, reference=True) -> SolveReport:
    """Least squares with rows drawn from a simulated leverage state.

    Steps: estimate the rank from the post-selection amplitude, draw
    ``q = ceil(c_q (r ln(r+1) + r/eps))`` rows by measuring the row register,
    estimate each sampled score to relative error ``relerr`` and solve the
    reweighted reduced problem.
    """
    A = as_matrix(A)
    b = as_vector(b, A.shape[0])
    _check_eps(eps)
    seed = _seed_of(rng)
    rng = make_rng(rng)
    n, d = A.shape
    prepared = prepare_ls_sampler(A) if prepared is None else prepared
    beW = prepared.encoding
    ledger = CostLedger()
    r_est, rank_res = estimate_rank(beW, RANK_EPS, rng, boost, return_details=True)
    ledger.charge(block_applications=rank_res.oracle_calls * beW.queries_per_use,
                  ae_iterations=rank_res.rounds)
    r = max(1, round(r_est))
    q = ls_sample_count(r, eps, c_q)
    state, _, ledger = prepare_col_leverage_state(beW, ledger)
    draws = sample_leverage(state, "row", q, rng)
    # each draw needs its own state preparation
    ledger.charge(block_applications=(q - 1) * ledger.block_applications)
    est, calls, rounds = _estimate_scores(beW.block, draws, relerr, score_grid_floor(n, eps),
                                          rng, boost, "row")
    ledger.charge(block_applications=calls * beW.queries_per_use, ae_iterations=rounds)
    S = _sampler_from_estimates("row", n, draws, est, r_est)
    x, counters = solve_reduced_ls(apply_sampler(S, A), apply_sampler(S, b))
    counters.update({"distinct_rows": len(est), "rank_estimate": r_est, **ledger.to_dict()})
    counters["theoretical_cost_string"] = (
        f"{ledger.theoretical_cost_string}; total O~(sqrt(q) * state cost + q d^(omega-1)) "
        f"with q={q}, d={d}")
    report = SolveReport(solution=x, objective=float(np.linalg.norm(A @ x - b)),
                         samples_used={"q": q}, score_mode="quantum-sim", seed=seed,
                         cost_counters=counters, notes=list(beW.meta.get("notes", [])))
    if reference:
        x_opt = solve_ls_direct(A, b)
        report.reference_objective = float(np.linalg.norm(A @ x_opt - b))
        report.ratio = _ratio(report.objective, report.reference_objective, np.linalg.norm(b))
    return report


@dataclass
class PreparedRidge:
    """Deterministic encodings for :func:`algorithm4_quantum_ridge` on one ``(A, lam)``."""

    rank_encoding: BlockEncoding
    ridge_encoding: BlockEncoding
    lam: float
    eps_hat: float


def prepare_ridge_sampler(A, lam, eps_hat=DEFAULT_EPS_HAT) -> PreparedRidge:
    """Build the polar and ridge encodings once; amplitude estimates are redrawn per run."""
    A = as_matrix(A)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LowSuccessWarning)
        ridge = prepare_ridge_leverage_state(A, lam, eps_hat, rng=0)
    return PreparedRidge(rank_encoding(A, RANK_EPS, eps_hat), ridge.encoding, float(lam), eps_hat)


def algorithm4_quantum_ridge(A, b, lam, eps, rng=None, prepared: PreparedRidge | None = None,
                             c_q=C_Q, c_c=C_C, relerr=SCORE_RELERR, boost=DEFAULT_BOOST,
                             reference=True) -> SolveReport:
    """Ridge regression with rows drawn from a simulated ridge leverage state.

    Draws ``q = ceil(c_q (r/eps) ln(r+1))`` rows from the ridge leverage
    state, weights them with amplitude-estimated ridge scores normalized by
    the estimated statistical dimension, and hands ``(S A, S b)`` to the
    column-sampling ridge solver.
    """
    A = as_matrix(A)
    b = as_vector(b, A.shape[0])
    _check_eps(eps)
    if not lam > 0:
        raise ParameterError(f"lambda must be positive, got {lam}")
    if not np.any(A):
        raise DegenerateInputError("matrix has rank 0")
    seed = _seed_of(rng)
    rng = make_rng(rng)
    n, d = A.shape
    if prepared is None:
        prepared = prepare_ridge_sampler(A, lam)
    elif prepared.lam != lam:
        raise ParameterError(f"prepared for lambda={prepared.lam}, called with {lam}")
    notes = []
    _warn_large_lambda(lam, prepared.rank_encoding.meta["norm"], notes)
    ledger = CostLedger()
    r_est, rank_res = estimate_rank(prepared.rank_encoding, RANK_EPS, rng, boost,
                                    return_details=True)
    ledger.charge(block_applications=rank_res.oracle_calls
                  * prepared.rank_encoding.queries_per_use, ae_iterations=rank_res.rounds)
    r = max(1, round(r_est))
    beW = prepared.ridge_encoding
    top = beW.block[:n]
    fro2 = float(np.sum(top * top))
    sd_res = estimate_relative(fro2 / d, relerr, rng, boost)
    sd_est = d * sd_res.estimate
    ledger.charge(block_applications=sd_res.oracle_calls * beW.queries_per_use,
                  ae_iterations=sd_res.rounds)
    q = ridge_row_count(r, eps, c_q)
    p = np.sum(top * top, axis=1) / fro2
    draws = rng.choice(n, size=q, p=p)
    rounds_per_state = math.ceil(math.sqrt(d / fro2))
    ledger.charge(block_applications=q * rounds_per_state * beW.queries_per_use,
                  amplification_rounds=q * rounds_per_state)
    est, calls, rounds = _estimate_scores(top, draws, relerr, score_grid_floor(n, eps), rng,
                                          boost, "row")
    ledger.charge(block_applications=calls * beW.queries_per_use, ae_iterations=rounds)
    S = _sampler_from_estimates("row", n, draws, est, sd_est)
    inner = sampled_ridge(A, b, lam, eps, S, rng, c_c=c_c)
    ledger.theoretical_cost_string = (
        f"O~(T * (alpha/lambda) * sqrt(d/sd) * sqrt(q) + q d^(omega-1)) with "
        f"alpha={prepared.rank_encoding.alpha:.4g}, lambda={lam:.4g}, d={d}, "
        f"sd~{sd_est:.4g}, q={q}")
    counters = {"distinct_rows": len(est), "rank_estimate": r_est, "sd_estimate": sd_est,
                **inner.cost_counters, **ledger.to_dict()}
    report = SolveReport(solution=inner.solution, objective=0.0,
                         samples_used={"q": q, "c": inner.samples_used["c"]},
                         score_mode="quantum-sim", seed=seed, cost_counters=counters,
                         notes=notes + ["sigma_r, rank and sd for the precision budget "
                                        "taken from an exact SVD (oracle-provided)"])
    return _finish_ridge(report, A, b, lam, reference)
