import math

import numpy as np
import pytest

from lvs.errors import DegenerateInputError, InputError, ParameterError
from lvs.linalg import row_leverage_scores, svd
from lvs.sampling import (
    PROB_FLOOR,
    SamplingMatrix,
    apply_sampler,
    approx_leverage_scores_sketched,
    approx_ridge_scores_sketched,
    countsketch,
    draw_column_sampler,
    draw_row_sampler,
    sketched_scores,
)
from lvs.linalg import ridge_row_scores
from lvs.solvers import ls_sample_count

from conftest import lowrank


def test_row_sampler_uniform_pair():
    S = draw_row_sampler([0.5, 0.5], 2, 0)
    np.testing.assert_allclose(S.weights, [1.0, 1.0])


def test_row_sampler_point_mass():
    S = draw_row_sampler([1.0, 0.0], 5, 0)
    assert S.indices.tolist() == [0] * 5


def test_row_sampler_frequencies():
    S = draw_row_sampler([0.25] * 4, 10_000, 7)
    freq = np.bincount(S.indices, minlength=4) / 10_000
    assert np.max(np.abs(freq - 0.25)) <= 0.02


def test_zero_probability_never_drawn(rng):
    p = np.array([0.0, 0.3, 0.0, 0.7, 0.0])
    for seed in range(50):
        S = draw_row_sampler(p, 100, seed)
        assert set(S.indices.tolist()) <= {1, 3}


@pytest.mark.parametrize("q", [0, -3])
def test_sampler_rejects_count(q):
    with pytest.raises(ParameterError):
        draw_row_sampler([1.0], q, 0)


def test_sampler_rejects_non_distribution():
    with pytest.raises(InputError):
        draw_row_sampler([0.5, 0.6], 3, 0)


def test_probability_floor():
    S = SamplingMatrix.from_probabilities("row", 3, [0, 2], [0.0, 0.5])
    assert S.probs[0] == PROB_FLOOR
    assert np.all(np.isfinite(S.weights))


def test_sampling_matrix_validation():
    with pytest.raises(InputError):
        SamplingMatrix("row", 2, np.array([2]), np.array([1.0]))
    with pytest.raises(InputError):
        SamplingMatrix("row", 2, np.array([0]), np.array([0.0]))
    with pytest.raises(ParameterError):
        SamplingMatrix("diagonal", 2, np.array([0]), np.array([1.0]))


def test_apply_identity_sampler():
    n, q = 2, 2
    S = SamplingMatrix("row", n, np.arange(n), np.full(n, math.sqrt(n / q)))
    np.testing.assert_allclose(apply_sampler(S, np.eye(2)), np.eye(2))


def test_apply_single_draw():
    w = 0.7
    S = SamplingMatrix("row", 3, np.array([1]), np.array([w]))
    np.testing.assert_allclose(apply_sampler(S, [[1, 2], [3, 4], [5, 6]]), [[3 * w, 4 * w]])
    np.testing.assert_allclose(apply_sampler(S, np.array([1.0, 2, 3])), [2 * w])


def test_apply_column_side_and_dense_agree(rng):
    A = rng.standard_normal((4, 6))
    R = draw_column_sampler(np.full(6, 1 / 6), 9, rng)
    np.testing.assert_allclose(apply_sampler(R, A), A @ R.to_dense())
    S = draw_row_sampler(np.full(4, 0.25), 5, rng)
    np.testing.assert_allclose(apply_sampler(S, A), S.to_dense() @ A)


def test_apply_dimension_mismatch():
    S = SamplingMatrix("row", 3, np.array([0]), np.array([1.0]))
    with pytest.raises(InputError):
        apply_sampler(S, np.eye(2))


def test_frobenius_unbiased(rng):
    A = rng.standard_normal((30, 4))
    p = np.sum(A * A, axis=1) / np.sum(A * A)
    vals = [np.sum(apply_sampler(draw_row_sampler(p, 5, rng), A) ** 2) for _ in range(10_000)]
    assert abs(np.mean(vals) / np.sum(A * A) - 1) <= 0.03


def test_gram_unbiased(rng):
    A = rng.standard_normal((50, 5))
    p = row_leverage_scores(svd(A)).distribution()
    acc = np.zeros((5, 5))
    for _ in range(10_000):
        SA = apply_sampler(draw_row_sampler(p, 10, rng), A)
        acc += SA.T @ SA
    G = A.T @ A
    assert np.linalg.norm(acc / 10_000 - G) / np.linalg.norm(G) <= 0.05


def test_subspace_embedding(rng):
    A = rng.standard_normal((2000, 10))
    F = svd(A)
    p = row_leverage_scores(F).distribution()
    q = ls_sample_count(10, 0.25)
    hits = 0
    for _ in range(100):
        s = np.linalg.svd(apply_sampler(draw_row_sampler(p, q, rng), F.U), compute_uv=False)
        hits += (s.min() >= 1 - 1 / math.sqrt(2)) and (s.max() <= 1 + 1 / math.sqrt(2))
    assert hits >= 90


def test_countsketch_preserves_column_sums_of_squares_in_expectation(rng):
    A = rng.standard_normal((200, 3))
    est = np.mean([np.sum(countsketch(A, 40, rng) ** 2) for _ in range(2000)])
    assert abs(est / np.sum(A * A) - 1) <= 0.03


def test_sketched_identity():
    s = approx_leverage_scores_sketched(np.eye(10), 0.25, 0).scores
    assert np.all(np.abs(s - 1) <= 0.25)


def _max_relerr(A, rng):
    exact = row_leverage_scores(svd(A)).scores
    est = approx_leverage_scores_sketched(A, 0.25, rng).scores
    keep = exact >= svd(A).rank / (10 * A.shape[0])
    return np.max(np.abs(est[keep] - exact[keep]) / exact[keep])


def test_sketched_gaussian_500x10():
    A = np.random.default_rng(3).standard_normal((500, 10))
    good = sum(_max_relerr(A, np.random.default_rng(s)) <= 0.25 for s in range(100))
    assert good >= 90


def test_sketched_large_n_uses_countsketch():
    A = np.random.default_rng(4).standard_normal((5000, 10))
    good = sum(_max_relerr(A, np.random.default_rng(s)) <= 0.25 for s in range(20))
    assert good >= 18


def test_sketched_rank_deficient_total(rng):
    A = lowrank(rng, 100, 10, 5)
    sv, s = sketched_scores(A, 0.25, rng)
    assert s.shape[0] == 5
    assert abs(sv.total - 5) <= 0.2 * 5


def test_sketched_ridge_scores(rng):
    A = rng.standard_normal((3000, 8))
    lam = 0.5 * np.linalg.norm(A, 2)
    exact = ridge_row_scores(A, lam).scores
    est = approx_ridge_scores_sketched(A, lam, 0.25, rng).scores
    assert np.max(np.abs(est - exact) / exact) <= 0.25


def test_sketched_zero_matrix():
    with pytest.raises(DegenerateInputError):
        approx_leverage_scores_sketched(np.zeros((5, 2)))


@pytest.mark.parametrize("relerr", [0.0, 1.0, 1.5])
def test_sketched_rejects_relerr(relerr):
    with pytest.raises(ParameterError):
        approx_leverage_scores_sketched(np.eye(3), relerr)
