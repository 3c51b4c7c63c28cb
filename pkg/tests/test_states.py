import math
import warnings

import numpy as np
import pytest

from lvs.errors import DegenerateInputError, ParameterError
from lvs.instances import random_lowrank
from lvs.linalg import (
    col_leverage_scores,
    ridge_row_scores,
    row_leverage_scores,
    statistical_dimension,
    svd,
)
from lvs.metrics import empirical_distribution, tv_distance
from lvs.quantum.encoding import BlockEncoding
from lvs.quantum.states import (
    CostLedger,
    LowSuccessWarning,
    PureState,
    distribution_l1_bound,
    perturbation_mass,
    polar_encoding,
    precision_budget,
    prepare_col_leverage_state,
    prepare_ridge_leverage_state,
    prepare_row_leverage_state,
    rank_encoding,
    sample_leverage,
)

from conftest import lowrank


def encoding_of(W):
    return BlockEncoding(np.asarray(W, dtype=float), 1.0, 1)


# --- precision budget --------------------------------------------------

def test_budget_examples():
    assert precision_budget(0.1, 0.1, 1.0, 10, 10)[0] == pytest.approx(0.1)
    assert precision_budget(0.1, 0.1, 1.0, 100, 1)[0] == pytest.approx(0.01)


def test_budget_raw_precision_formula():
    et, raw = precision_budget(0.1, 0.05, 2.0, 16, 4)
    log = math.log(8 * math.sqrt(2.0) / (et * 0.05))
    assert raw == pytest.approx(et ** 2 * 0.05 ** 2 / 2.0 / 256 / log ** 2)
    assert raw < et


def test_budget_mass_sweep():
    # perturbation_mass = k * eps_hat * (2 + eps_hat) exactly for this eps_tilde
    g = np.random.default_rng(0)
    for _ in range(1000):
        eh = g.uniform(1e-4, 1)
        d = int(g.integers(1, 5000))
        k = g.uniform(0.01, d)
        et, _ = precision_budget(eh, 0.1, 1.0, d, k)
        x = perturbation_mass(et, d, k)
        assert x == pytest.approx(k * eh * (2 + eh), rel=1e-9)
        assert x <= 3 * k * eh * (1 + 1e-12)


def test_l1_bound():
    assert distribution_l1_bound(0.0, 10, 3) == 0.0
    assert distribution_l1_bound(10.0, 10, 3) == math.inf


@pytest.mark.parametrize("args", [(0, .1, 1, 1, 1), (.1, 0, 1, 1, 1), (.1, .1, 1, 1, 0),
                                  (1.5, .1, 1, 1, 1)])
def test_budget_rejects(args):
    with pytest.raises(ParameterError):
        precision_budget(*args)


# --- column / row leverage states -------------------------------------

def test_identity_state():
    st, p, ledger = prepare_col_leverage_state(encoding_of(np.eye(2)))
    np.testing.assert_allclose(st.amplitudes, np.eye(2) / math.sqrt(2))
    assert st.labels == ("column", "row") and st.register_shape == (2, 2)
    assert p == 1.0
    assert ledger.amplification_rounds == 1


def test_diag_state():
    st, p, ledger = prepare_col_leverage_state(encoding_of(np.diag([1.0, 0.0])))
    expected = np.zeros((2, 2))
    expected[0, 0] = 1.0
    np.testing.assert_allclose(st.amplitudes, expected)
    assert p == 0.5
    assert ledger.amplification_rounds == math.ceil(math.sqrt(2))


def test_random_polar_state(rng):
    A = lowrank(rng, 12, 8, 3)
    F = svd(A)
    W = F.U @ F.V.T
    st, p, _ = prepare_col_leverage_state(encoding_of(W))
    np.testing.assert_allclose(st.marginal("column"), col_leverage_scores(F).scores / 3,
                               atol=1e-9)
    np.testing.assert_allclose(st.marginal("row"), row_leverage_scores(F).scores / 3,
                               atol=1e-9)
    assert p == pytest.approx(3 / 8)


def test_row_column_duality(rng):
    W = svd(lowrank(rng, 9, 6, 4))
    W = W.U @ W.V.T
    col_state, _, _ = prepare_col_leverage_state(encoding_of(W))
    row_state, _, _ = prepare_row_leverage_state(encoding_of(W))
    np.testing.assert_allclose(row_state.marginal("row"), col_state.marginal("row"), atol=1e-14)
    np.testing.assert_allclose(row_state.marginal("column"), col_state.marginal("column"),
                               atol=1e-14)


def test_zero_state():
    with pytest.raises(DegenerateInputError):
        prepare_col_leverage_state(encoding_of(np.zeros((2, 2))))
    with pytest.raises(DegenerateInputError):
        prepare_row_leverage_state(encoding_of(np.zeros((2, 2))))


def test_pure_state_validation():
    with pytest.raises(ParameterError):
        PureState(np.ones(3), ("row",))
    with pytest.raises(ParameterError):
        PureState(np.eye(2) / math.sqrt(2), ("row",))


def test_cost_string_and_ledger(rng):
    A = lowrank(rng, 20, 6, 3)
    _, _, ledger = prepare_col_leverage_state(polar_encoding(A))
    assert "sigma_r" in ledger.theoretical_cost_string
    assert ledger.block_applications > 0
    d = ledger.to_dict()
    before = dict(d)
    ledger.charge(block_applications=3)
    assert ledger.block_applications == before["block_applications"] + 3


# --- sampling ----------------------------------------------------------

def test_sample_diag_search():
    A = np.diag([0.0, 1, 0, 1])
    st, _, _ = prepare_col_leverage_state(polar_encoding(A))
    draws = sample_leverage(st, "row", 2000, 0)
    assert set(draws.tolist()) == {1, 3}
    np.testing.assert_allclose(st.marginal("row"), [0, 0.5, 0, 0.5], atol=1e-12)


def test_sample_identity_uniform():
    st, _, _ = prepare_col_leverage_state(encoding_of(np.eye(2)))
    freq = empirical_distribution(sample_leverage(st, "column", 10_000, 1), 2)
    assert np.max(np.abs(freq - 0.5)) <= 0.02


def test_sample_random_tv(rng):
    A = lowrank(rng, 15, 6, 4)
    st, _, _ = prepare_col_leverage_state(polar_encoding(A, 0.05))
    exact = row_leverage_scores(svd(A)).distribution()
    assert tv_distance(st.marginal("row"), exact) <= 0.05
    emp = empirical_distribution(sample_leverage(st, "row", 10_000, rng), 15)
    assert tv_distance(emp, exact) <= 0.05


def test_sample_unknown_register():
    st, _, _ = prepare_col_leverage_state(encoding_of(np.eye(2)))
    with pytest.raises(ParameterError):
        sample_leverage(st, "ancilla", 3)


def test_budgeted_tv_within_eps_hat(rng):
    for _ in range(10):
        n, d = int(rng.integers(4, 20)), int(rng.integers(2, 6))
        A = lowrank(rng, n, d, int(rng.integers(1, min(n, d) + 1)))
        st, _, _ = prepare_col_leverage_state(polar_encoding(A, 0.05))
        assert tv_distance(st.marginal("row"), row_leverage_scores(svd(A)).distribution()) \
            <= 0.05


# --- ridge leverage state ----------------------------------------------

def test_ridge_identity(rng):
    res = prepare_ridge_leverage_state(np.eye(2), 1.0, 0.05, rng)
    np.testing.assert_allclose(res.state.marginal("row"), [0.5, 0.5], atol=1e-12)
    allowed = perturbation_mass(res.encoding.meta["eps_tilde"], 2, 1.0) / 2
    assert abs(res.success_prob - 0.5) <= allowed
    assert res.state.labels == ("row", "column")


def test_ridge_diag(rng):
    res = prepare_ridge_leverage_state(np.diag([3.0, 4.0]), 1.0, 0.05, rng)
    ideal = np.array([9 / 10, 16 / 17])
    assert tv_distance(res.state.marginal("row"), ideal / ideal.sum()) <= 0.05
    sd = statistical_dimension([3, 4], 1.0)
    assert abs(res.success_prob - sd / 2) <= perturbation_mass(
        res.encoding.meta["eps_tilde"], 2, sd) / 2


def test_ridge_marginal_matches_ridge_scores(rng):
    A = lowrank(rng, 25, 6, 4)
    lam = 0.4 * np.linalg.norm(A, 2)
    res = prepare_ridge_leverage_state(A, lam, 0.05, rng)
    exact = ridge_row_scores(A, lam).distribution()
    assert tv_distance(res.state.marginal("row"), exact) <= 0.05
    sd = statistical_dimension(svd(A).singulars, lam)
    assert abs(res.sd_estimate - sd) <= 0.35 * sd
    assert "sd_lambda" in res.ledger.theoretical_cost_string


def test_ridge_large_lambda_warns(rng):
    with pytest.warns(LowSuccessWarning):
        res = prepare_ridge_leverage_state(np.eye(3), 100.0, 0.05, rng)
    assert res.success_prob < 1e-3
    assert res.ledger.notes


def test_ridge_rejects_lambda():
    with pytest.raises(ParameterError):
        prepare_ridge_leverage_state(np.eye(2), 0.0)


def test_ridge_zero_matrix():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LowSuccessWarning)
        with pytest.raises(DegenerateInputError):
            prepare_ridge_leverage_state(np.zeros((3, 2)), 1.0)


@pytest.mark.parametrize("r", [1, 4, 10])
@pytest.mark.parametrize("eps", [0.05, 0.1, 0.3])
def test_rank_encoding_mass_bias(rng, r, eps):
    A = random_lowrank(12, 10, r, decay=0.8, rng=rng)
    W = rank_encoding(A, eps, eps_hat=0.5).block
    fro2 = float(np.sum(W * W))
    # Q maps the nonzero singular values into [1 - 2p, 1] with p = eps/8
    assert r * (1 - eps / 4) ** 2 - 1e-9 <= fro2 <= r + 1e-9
    assert np.linalg.matrix_rank(W, tol=1e-6) == r
