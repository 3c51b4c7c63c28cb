import math

import numpy as np
import pytest

from lvs.errors import ParameterError
from lvs.quantum.amplitude import (
    ae_bound,
    ae_median,
    ae_simulate,
    estimate_leverage_score,
    estimate_rank,
    estimate_relative,
    outcome_distribution,
)
from lvs.quantum.encoding import BlockEncoding
from lvs.quantum.states import polar_encoding, rank_encoding

from conftest import lowrank


def encoding_of(W):
    return BlockEncoding(np.asarray(W, dtype=float), 1.0, 1)


def test_outcome_distribution_normalized():
    for a in (0.0, 0.13, 0.5, 0.77, 1.0):
        for M in (1, 3, 8, 100):
            p = outcome_distribution(a, M)
            assert p.shape == (M,) and abs(p.sum() - 1) <= 1e-12 and np.all(p >= 0)


def test_zero_amplitude_exact(rng):
    assert np.all(ae_simulate(0.0, 37, rng, size=200) == 0.0)


def test_half_on_grid(rng):
    np.testing.assert_allclose(ae_simulate(0.5, 4, rng, size=200), 0.5, atol=1e-15)


def test_one_on_grid(rng):
    np.testing.assert_allclose(ae_simulate(1.0, 16, rng, size=50), 1.0, atol=1e-15)


def test_bound_at_03():
    expected = 2 * math.pi * math.sqrt(0.21) / 100 + math.pi ** 2 / 1e4
    assert ae_bound(0.3, 100) == pytest.approx(expected, rel=1e-12)
    assert ae_bound(0.3, 100) == pytest.approx(0.0298, abs=1e-4)


def test_lemma_bound_frequency(rng):
    est = ae_simulate(0.3, 100, rng, size=10_000)
    assert np.mean(np.abs(est - 0.3) <= ae_bound(0.3, 100)) >= 8 / math.pi ** 2


@pytest.mark.parametrize("M", [8, 32, 128])
def test_contract_grid(M, rng):
    floor = 8 / math.pi ** 2 - 0.02
    for a in np.round(np.arange(0, 1.0001, 0.05), 10):
        est = ae_simulate(a, M, rng, size=10_000)
        assert np.mean(np.abs(est - a) <= ae_bound(a, M) + 1e-12) >= floor


def test_rejects_grid():
    with pytest.raises(ParameterError):
        ae_simulate(0.5, 0)


def test_median_concentrates(rng):
    a, M = 0.2, 64
    meds = [ae_median(a, M, 15, rng) for _ in range(300)]
    assert np.mean(np.abs(np.array(meds) - a) <= ae_bound(a, M)) >= 0.99


@pytest.mark.parametrize("a", [1e-3, 0.02, 0.3, 0.9])
def test_relative_estimate(a, rng):
    hits = sum(abs(estimate_relative(a, 0.25, rng).estimate - a) <= 0.25 * a for _ in range(50))
    assert hits >= 48


def test_relative_respects_start_and_cap(rng):
    res = estimate_relative(1e-9, 0.1, rng, start=64, max_grid=256)
    assert res.grid == 256
    assert estimate_relative(0.5, 0.5, rng, start=100).grid >= 100


def test_leverage_examples(rng):
    assert abs(estimate_leverage_score(encoding_of(np.eye(2)), 0, 0.1, rng=rng) - 1) <= 0.11
    assert estimate_leverage_score(encoding_of(np.diag([1.0, 0.0])), 1, 0.1, rng=rng) == 0.0


def test_leverage_bound_random(rng):
    A = lowrank(rng, 10, 10, 4)
    W = polar_encoding(A).block
    eps, ok, total = 0.05, 0, 0
    for j in range(10):
        L = float(W[:, j] @ W[:, j])
        for _ in range(40):
            est = estimate_leverage_score(encoding_of(W), j, eps, 15, rng)
            ok += abs(est - L) <= eps * math.sqrt(L) + eps ** 2
            total += 1
    assert ok / total >= 0.95


def test_leverage_row_side(rng):
    W = np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]])
    assert estimate_leverage_score(encoding_of(W), 1, 0.1, rng=rng, side="row") == 0.0


@pytest.mark.parametrize("eps", [0.0, 1.0])
def test_leverage_rejects_eps(eps):
    with pytest.raises(ParameterError):
        estimate_leverage_score(encoding_of(np.eye(2)), 0, eps)


def test_rank_examples(rng):
    r = estimate_rank(encoding_of(np.diag([1.0, 1, 0, 0])), 0.1, rng)
    assert 2 * 0.9 <= r <= 2 * 1.1
    assert estimate_rank(encoding_of(np.eye(6)), 0.1, rng) == pytest.approx(6, abs=1e-12)
    assert estimate_rank(encoding_of(np.zeros((3, 3))), 0.1, rng) == 0.0


def test_rank_random_16(rng):
    A = lowrank(rng, 16, 16, 5)
    beW = rank_encoding(A, 0.1)
    hits = sum(abs(estimate_rank(beW, 0.1, np.random.default_rng(s)) - 5) <= 0.5
               for s in range(100))
    assert hits >= 90


@pytest.mark.parametrize("r", [1, 2, 4, 7, 9])
def test_rank_across_ranks(r, rng):
    beW = rank_encoding(lowrank(rng, 9, 12, r), 0.1)
    hits = sum(abs(estimate_rank(beW, 0.1, rng) - r) <= 0.1 * r for _ in range(50))
    assert hits >= 45


def test_rank_details(rng):
    value, res = estimate_rank(encoding_of(np.eye(4)[:, :2] @ np.eye(2, 4)), 0.1, rng,
                               return_details=True)
    assert res.rounds >= 1 and res.oracle_calls >= 15 * res.grid
    assert value == pytest.approx(4 * res.estimate)
