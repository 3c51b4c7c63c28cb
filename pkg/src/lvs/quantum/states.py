"""Leverage-score states, their sampling, and the precision budget.

States are stored as dense amplitude tensors. The column leverage state of
``W`` is ``sum_j |j> (x) W|j> / ||W||_F``; measuring its first register
samples columns by leverage, its second register samples rows.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from ..errors import DegenerateInputError, ParameterError
from ..linalg import as_matrix, statistical_dimension, svd
from ..rng import make_rng
from .amplitude import DEFAULT_BOOST, estimate_relative
from .encoding import BlockEncoding, apply_svt, dilate_block_encoding, extend_block_encoding
from .polynomial import build_sign_polynomial

MAX_DELTA = 0.16
LOW_SUCCESS = 1e-3


class LowSuccessWarning(UserWarning):
    """Post-selection succeeds so rarely that amplification dominates the cost."""


@dataclass(frozen=True)
class PureState:
    """Real amplitudes over a product of labelled registers."""

    amplitudes: np.ndarray
    labels: tuple

    def __post_init__(self):
        norm = float(np.linalg.norm(self.amplitudes))
        if abs(norm - 1.0) > 1e-10:
            raise ParameterError(f"state is not normalized (norm {norm})")
        if len(self.labels) != self.amplitudes.ndim:
            raise ParameterError("one label per register is required")

    @property
    def register_shape(self):
        return self.amplitudes.shape

    def marginal(self, label):
        """Measurement distribution of the register called ``label``."""
        axis = self.labels.index(label)
        probs = self.amplitudes ** 2
        other = tuple(i for i in range(probs.ndim) if i != axis)
        p = probs.sum(axis=other) if other else probs
        return p / p.sum()


@dataclass
class CostLedger:
    """Simulated query counts alongside the asymptotic cost they stand for."""

    block_applications: int = 0
    amplification_rounds: int = 0
    ae_iterations: int = 0
    theoretical_cost_string: str = ""
    notes: list = field(default_factory=list)

    def charge(self, block_applications=0, amplification_rounds=0, ae_iterations=0):
        self.block_applications += int(block_applications)
        self.amplification_rounds += int(amplification_rounds)
        self.ae_iterations += int(ae_iterations)

    def to_dict(self):
        return asdict(self)


def state_cost_string(alpha, sigma_r, n, d, r):
    """Instantiate ``(T alpha/sigma_r) sqrt(min(n,d)/r)`` for one state preparation."""
    val = alpha / sigma_r * math.sqrt(min(n, d) / r)
    return (f"O~(T * {val:.4g}) = (T*alpha/sigma_r)*sqrt(min(n,d)/r) with alpha={alpha:.4g}, "
            f"sigma_r={sigma_r:.4g}, n={n}, d={d}, r={r}")


def precision_budget(eps_hat, delta, alpha, d, k):
    """Precision needed for a leverage distribution within ``eps_hat`` of ideal.

    Parameters
    ----------
    eps_hat : float
        Target distance between distributions, in ``(0, 1]``.
    delta : float
        Transition half-width of the sign polynomial.
    alpha : float
        Normalization of the input encoding.
    d : int
        Number of columns of the encoded matrix.
    k : float
        Frobenius mass ``||U V^T||_F^2`` of the ideal block (the rank, or the
        statistical dimension for ridge scores).

    Returns
    -------
    eps_tilde : float
        Operator-norm accuracy ``eps_hat sqrt(k/d)`` required of the
        transformed block.
    eps_raw : float
        Accuracy of the input encoding that keeps the transformation error
        below ``eps_tilde``:
        ``eps_tilde^2 delta^2 / (256 alpha log^2(8 sqrt(alpha) / (eps_tilde delta)))``.
    """
    for name, v in (("eps_hat", eps_hat), ("delta", delta), ("alpha", alpha), ("d", d), ("k", k)):
        if not v > 0:
            raise ParameterError(f"{name} must be positive, got {v}")
    if eps_hat > 1:
        raise ParameterError(f"eps_hat must be at most 1, got {eps_hat}")
    eps_tilde = eps_hat * math.sqrt(k / d)
    log_term = math.log(8 * math.sqrt(alpha) / (eps_tilde * delta))
    eps_raw = eps_tilde ** 2 * delta ** 2 / alpha / 256 / log_term ** 2
    return eps_tilde, eps_raw


def perturbation_mass(eps_tilde, d, k):
    """``(2 sqrt(dk) + d eps_tilde) eps_tilde``, the Frobenius-mass slack of a perturbed block."""
    return (2 * math.sqrt(d * k) + d * eps_tilde) * eps_tilde


def distribution_l1_bound(eps_tilde, d, k):
    """Worst-case ``||P - P~||_1`` when the block is perturbed by ``eps_tilde`` in operator norm."""
    x = perturbation_mass(eps_tilde, d, k)
    return 2 * x / (k - x) if x < k else math.inf


def prepare_col_leverage_state(beW: BlockEncoding, ledger=None):
    """Post-selected column leverage state of the encoded ``W``.

    Returns
    -------
    state : PureState
        Registers ``("column", "row")`` with amplitudes ``W[i, j] / ||W||_F``.
    success_prob : float
        ``||W||_F^2 / d``, the probability that post-selection succeeds.
    ledger : CostLedger
    """
    W = beW.block
    fro2 = float(np.sum(W * W))
    if fro2 == 0.0:
        raise DegenerateInputError("encoded matrix is zero; the leverage state has no support")
    d = W.shape[1]
    success = fro2 / d
    ledger = CostLedger() if ledger is None else ledger
    rounds = math.ceil(math.sqrt(1.0 / success))
    ledger.charge(block_applications=rounds * beW.queries_per_use, amplification_rounds=rounds)
    meta = beW.meta
    if "svt_source_alpha" in meta and meta.get("sigma_min_block"):
        n = W.shape[0]
        alpha = meta["svt_source_alpha"]
        sigma = meta["sigma_min_block"] * alpha
        ledger.theoretical_cost_string = state_cost_string(
            alpha, sigma, n, d, max(1, round(fro2)))
    state = PureState((W / math.sqrt(fro2)).T.copy(), ("column", "row"))
    return state, success, ledger


def prepare_row_leverage_state(beW: BlockEncoding, ledger=None):
    """Row-side analogue built from ``W^T``: registers ``("row", "column")``."""
    W = beW.block
    fro2 = float(np.sum(W * W))
    if fro2 == 0.0:
        raise DegenerateInputError("encoded matrix is zero; the leverage state has no support")
    ledger = CostLedger() if ledger is None else ledger
    success = fro2 / W.shape[0]
    rounds = math.ceil(math.sqrt(1.0 / success))
    ledger.charge(block_applications=rounds * beW.queries_per_use, amplification_rounds=rounds)
    return PureState(W / math.sqrt(fro2), ("row", "column")), success, ledger


def sample_leverage(state: PureState, which, count, rng=None):
    """Measure the ``which`` register (``"row"`` or ``"column"``) ``count`` times."""
    if which not in state.labels:
        raise ParameterError(f"state has registers {state.labels}, not {which!r}")
    p = state.marginal(which)
    return make_rng(rng).choice(p.size, size=int(count), p=p)


def sign_delta(sigma_min, alpha):
    """``sigma_min / (3 alpha)``, capped below the polynomial's admissible 1/6."""
    return min(sigma_min / (3 * alpha), MAX_DELTA)


def polar_encoding(A, eps_hat=0.05, sigma_r=None, k=None, max_poly_eps=0.49):
    """Encoding of ``W ~ U V^T`` for ``A`` with the precision set by :func:`precision_budget`.

    ``sigma_r`` and ``k`` (the rank) default to values from an exact SVD;
    the returned notes say so. ``max_poly_eps`` caps the sign-polynomial
    error, which matters when ``||W||_F^2`` itself is estimated.
    """
    A = as_matrix(A)
    be = dilate_block_encoding(A)
    notes = []
    if sigma_r is None or k is None:
        F = svd(A)
        if F.degenerate:
            raise DegenerateInputError("matrix has rank 0")
        sigma_r = F.sigma_min if sigma_r is None else sigma_r
        k = F.rank if k is None else k
        notes.append("sigma_r and rank taken from an exact SVD (oracle-provided)")
    delta = sign_delta(sigma_r, be.alpha)
    eps_tilde, eps_raw = precision_budget(eps_hat, delta, be.alpha, A.shape[1], k)
    poly = build_sign_polynomial(delta, min(eps_tilde / 2, max_poly_eps, 0.49))
    beW = apply_svt(be, poly)
    beW.meta.update({"eps_tilde": eps_tilde, "eps_raw": eps_raw, "notes": notes})
    return beW


def rank_encoding(A, eps, eps_hat=0.05):
    """Polar encoding accurate enough to read the rank off ``||W||_F^2``.

    ``Q`` maps every nonzero singular value into ``[1 - 2p, 1]`` for
    polynomial error ``p``, so ``||W||_F^2 >= r (1 - 2p)^2``; ``p = eps/8``
    keeps that bias near ``eps/2`` relative.
    """
    return polar_encoding(A, eps_hat, max_poly_eps=eps / 8)


class RidgeLeverageState(NamedTuple):
    state: PureState
    success_prob: float
    sd_estimate: float
    ledger: CostLedger
    encoding: BlockEncoding


def prepare_ridge_leverage_state(A, lam, eps_hat=0.05, rng=None, boost=DEFAULT_BOOST,
                                 sd_relerr=0.25):
    """Ridge leverage state ``sum_i |i> (x) V U_hat^T |i> / ||U_hat||_F``.

    Encodes ``[A; lam I]``, maps its singular values to ~1 with a sign
    polynomial of half-width ``lam / (3 (alpha + lam))`` and keeps the first
    ``n`` rows. The post-selection probability is ``sd_lam(A) / d``; its
    amplitude-estimation estimate gives ``sd_estimate``.
    """
    A = as_matrix(A)
    if not lam > 0:
        raise ParameterError(f"lambda must be positive, got {lam}")
    rng = make_rng(rng)
    n, d = A.shape
    be = dilate_block_encoding(A)
    ledger = CostLedger()
    norm = be.meta["norm"]
    if lam > norm:
        msg = f"lambda={lam:g} exceeds ||A||={norm:g}"
        warnings.warn(msg, LowSuccessWarning, stacklevel=2)
        ledger.notes.append(msg)
    ext = extend_block_encoding(be, lam)
    delta = sign_delta(lam, ext.alpha)
    # the budget needs the ideal Frobenius mass; it is taken from the exact spectrum
    sd = statistical_dimension(svd(A).singulars, lam) if np.any(A) else 0.0
    ledger.notes.append("statistical dimension for the precision budget taken from an exact SVD")
    if sd == 0.0:
        raise DegenerateInputError("A is zero; the ridge leverage state has no support")
    eps_tilde, eps_raw = precision_budget(eps_hat, delta, ext.alpha, d, sd)
    poly = build_sign_polynomial(delta, min(eps_tilde / 2, 0.49))
    beW = apply_svt(ext, poly)
    beW.meta.update({"eps_tilde": eps_tilde, "eps_raw": eps_raw})
    top = beW.block[:n]
    fro2 = float(np.sum(top * top))
    success = fro2 / d
    if success < LOW_SUCCESS:
        msg = f"post-selection probability {success:.3g} is very small"
        warnings.warn(msg, LowSuccessWarning, stacklevel=2)
        ledger.notes.append(msg)
    rounds = math.ceil(math.sqrt(1.0 / success))
    ledger.charge(block_applications=rounds * beW.queries_per_use, amplification_rounds=rounds)
    est = estimate_relative(success, sd_relerr, rng, boost)
    ledger.charge(block_applications=est.oracle_calls * beW.queries_per_use,
                  ae_iterations=est.rounds)
    val = (ext.alpha / lam) * math.sqrt(d / sd)
    ledger.theoretical_cost_string = (
        f"O~(T * {val:.4g}) = (T*alpha/lambda)*sqrt(d/sd_lambda(A)) with alpha={be.alpha:.4g}, "
        f"lambda={lam:.4g}, d={d}, sd={sd:.4g}")
    state = PureState(top / math.sqrt(fro2), ("row", "column"))
    return RidgeLeverageState(state, success, d * est.estimate, ledger, beW)
