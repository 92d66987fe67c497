from __future__ import annotations

import math

import numpy as np
import pytest

from app_conf import LossMode
from dtos.config import LossConfig
from errors import DimensionError, EmptyBatchError
from services.hashing.hash_model import HashModelParams, backward, forward, init_params
from services.hashing.label_similarity import PairSimilarity, SimilarityMode, pairwise_similarity
from services.hashing.objective import (
    PairBatch,
    cost_breakdown,
    cost_gradient,
    cross_entropy_loss,
    hard_pair_loss,
    inner_product_logit,
    pair_loss,
    quantization_loss,
    quantization_subgradient,
    sigmoid,
    soft_pair_loss,
    total_cost,
)
from tests.helpers import random_labels


def _all_pairs(labels: np.ndarray, codes: np.ndarray | None = None) -> PairBatch:
    left, right = np.triu_indices(labels.shape[0], k=1)
    sims = pairwise_similarity(labels)
    batch = PairBatch(left=left, right=right, similarity=sims.values[left, right], hard=sims.hard[left, right])
    return batch if codes is None else batch.with_codes(codes)


def _codes_away_from_kinks(rng: np.random.Generator, rows: int, bits: int) -> np.ndarray:
    magnitude = rng.uniform(0.05, 0.95, size=(rows, bits))
    return magnitude * rng.choice([-1.0, 1.0], size=(rows, bits))


@pytest.mark.parametrize("s", [0, 1])
def test_hard_pair_loss_at_zero_logit_is_log_two(s: int) -> None:
    assert abs(hard_pair_loss(0.0, s) - math.log(2)) < 1e-12


def test_hard_pair_loss_rejects_soft_targets() -> None:
    with pytest.raises(ValueError, match="0 or 1"):
        hard_pair_loss(0.0, 0.5)  # type: ignore[arg-type]


def test_cross_entropy_is_stable_for_large_logits() -> None:
    assert cross_entropy_loss(1000.0, 1.0) == pytest.approx(0.0, abs=1e-12)
    assert cross_entropy_loss(-1000.0, 0.0) == pytest.approx(0.0, abs=1e-12)
    assert cross_entropy_loss(1000.0, 0.0) == pytest.approx(1000.0)
    assert math.isfinite(cross_entropy_loss(-1000.0, 1.0))


def test_sigmoid_is_stable() -> None:
    values = sigmoid(np.array([-1000.0, 0.0, 1000.0]))
    np.testing.assert_array_equal(values, [0.0, 0.5, 1.0])


@pytest.mark.parametrize(
    ("u_i", "s"),
    [
        ([1.0, 1.0, -1.0, -1.0], 0.5),
        ([1.0, 1.0, 1.0, -1.0], 0.75),
        ([1.0, -1.0, -1.0, -1.0], 0.25),
    ],
)
def test_soft_pair_loss_vanishes_at_target_inner_product(u_i: list[float], s: float) -> None:
    u_j = [1.0, 1.0, 1.0, 1.0]
    assert float(np.dot(u_i, u_j)) == 2 * s * 4 - 4
    assert soft_pair_loss(u_i, u_j, s, 4) == 0.0


def test_soft_pair_loss_value() -> None:
    # (0 + 4) / 2 - 0.25 * 4 = 1
    assert soft_pair_loss([0.0, 0.0, 0.0, 0.0], [0.5, 0.5, 0.5, 0.5], 0.25, 4) == 1.0


def test_quantization_loss_is_zero_only_for_exact_signs() -> None:
    assert quantization_loss([1.0, -1.0, 1.0], [-1.0, -1.0, 1.0]) == 0.0
    assert quantization_loss([1.0, -1.0, 0.999], [-1.0, -1.0, 1.0]) > 0.0
    assert quantization_loss([0.0, 0.0], [0.0, 0.0]) == 4.0


def test_quantization_subgradient_signs() -> None:
    np.testing.assert_array_equal(quantization_subgradient([-0.5, 0.0, 0.5]), [1.0, -1.0, -1.0])


def test_length_mismatch_raises() -> None:
    with pytest.raises(DimensionError):
        inner_product_logit([1.0, 2.0], [1.0], 0.5)


def test_pair_loss_dispatches_by_mode() -> None:
    u_i = np.array([0.5, -0.2, 0.8, 0.1])
    u_j = np.array([0.3, 0.4, -0.6, 0.9])
    cfg = LossConfig(bits=4)
    omega = cfg.resolved_alpha * float(u_i @ u_j)

    hard = PairSimilarity(1.0, SimilarityMode.HARD)
    soft = PairSimilarity(0.5, SimilarityMode.SOFT)
    assert pair_loss(u_i, u_j, hard, cfg) == pytest.approx(hard_pair_loss(omega, 1))
    assert pair_loss(u_i, u_j, soft, cfg) == pytest.approx(cfg.resolved_gamma * soft_pair_loss(u_i, u_j, 0.5, 4))

    ce = LossConfig(bits=4, mode=LossMode.CE)
    assert pair_loss(u_i, u_j, soft, ce) == pytest.approx(cross_entropy_loss(omega, 0.5))
    mse = LossConfig(bits=4, mode=LossMode.MSE)
    assert pair_loss(u_i, u_j, hard, mse) == pytest.approx(mse.resolved_gamma * soft_pair_loss(u_i, u_j, 1.0, 4))


@pytest.mark.parametrize("mode", list(LossMode))
def test_total_cost_is_pair_mean(rng: np.random.Generator, mode: LossMode) -> None:
    labels = random_labels(rng, 6, 4)
    codes = _codes_away_from_kinks(rng, 6, 8)
    batch = _all_pairs(labels, codes)
    cfg = LossConfig(bits=8, mode=mode, lambda_=0.3)

    expected = []
    for p in range(len(batch)):
        i, j, sim = batch.pair(p)
        expected.append(pair_loss(codes[i], codes[j], sim, cfg) + cfg.lambda_ * quantization_loss(codes[i], codes[j]))

    breakdown = cost_breakdown(batch, cfg)
    assert total_cost(batch, cfg) == pytest.approx(float(np.mean(expected)), rel=1e-12)
    assert breakdown.total == pytest.approx(breakdown.similarity + cfg.lambda_ * breakdown.quantization, rel=1e-12)


@pytest.mark.parametrize("mode", list(LossMode))
def test_cost_gradient_matches_finite_differences(rng: np.random.Generator, mode: LossMode) -> None:
    labels = random_labels(rng, 5, 4)
    codes = _codes_away_from_kinks(rng, 5, 6)
    batch = _all_pairs(labels, codes)
    cfg = LossConfig(bits=6, mode=mode)

    analytic = cost_gradient(batch, cfg)
    h = 1e-6
    numeric = np.zeros_like(codes)
    for idx in np.ndindex(codes.shape):
        plus, minus = codes.copy(), codes.copy()
        plus[idx] += h
        minus[idx] -= h
        numeric[idx] = (total_cost(batch.with_codes(plus), cfg) - total_cost(batch.with_codes(minus), cfg)) / (2 * h)
    np.testing.assert_allclose(analytic, numeric, rtol=1e-6, atol=1e-9)


def test_empty_batch_raises(loss_cfg: LossConfig) -> None:
    empty = np.zeros(0, dtype=np.intp)
    batch = PairBatch(left=empty, right=empty, similarity=np.zeros(0), hard=np.zeros(0, dtype=bool))
    batch = batch.with_codes(np.zeros((3, loss_cfg.bits)))
    with pytest.raises(EmptyBatchError):
        total_cost(batch, loss_cfg)
    with pytest.raises(EmptyBatchError):
        cost_gradient(batch, loss_cfg)


def test_self_pairs_are_rejected() -> None:
    with pytest.raises(DimensionError):
        PairBatch(
            left=np.array([0, 1]),
            right=np.array([1, 1]),
            similarity=np.array([0.5, 1.0]),
            hard=np.array([False, True]),
        )


def _batch_cost(params: HashModelParams, x: np.ndarray, pairs: PairBatch, cfg: LossConfig) -> float:
    codes, _ = forward(params, x)
    return total_cost(pairs.with_codes(codes), cfg)


def test_end_to_end_parameter_gradients_match_finite_differences() -> None:
    """100 件のランダム構成で、連鎖律によるパラメータ勾配が中心差分と一致する."""
    rng = np.random.default_rng(7)
    h = 1e-5
    checked = 0
    for _ in range(100):
        d = int(rng.integers(2, 9))
        bits = int(rng.choice([4, 8]))
        batch_size = int(rng.integers(2, 7))
        hidden = () if rng.random() < 0.5 else (int(rng.integers(2, 6)),)
        params = init_params(d, bits, hidden, rng)
        x = rng.normal(size=(batch_size, d))
        labels = random_labels(rng, batch_size, 4, density=0.5)
        pairs = _all_pairs(labels)
        cfg = LossConfig(bits=bits, mode=LossMode(str(rng.choice(["joint", "ce", "mse"]))))

        codes, trace = forward(params, x)
        if (np.abs(codes) < 1e-3).any():
            continue
        grads = backward(trace, params, cost_gradient(pairs.with_codes(codes), cfg))

        for analytic, array in zip(grads.arrays(), params.arrays(), strict=True):
            numeric = np.zeros_like(array)
            for idx in np.ndindex(array.shape):
                original = array[idx]
                array[idx] = original + h
                plus = _batch_cost(params, x, pairs, cfg)
                array[idx] = original - h
                minus = _batch_cost(params, x, pairs, cfg)
                array[idx] = original
                numeric[idx] = (plus - minus) / (2 * h)
            scale = max(float(np.abs(analytic).max()), float(np.abs(numeric).max()), 1e-8)
            assert float(np.abs(analytic - numeric).max()) / scale < 1e-5
        checked += 1
    assert checked >= 50


def test_hard_pair_loss_pushes_in_one_direction() -> None:
    omegas = np.linspace(-20.0, 20.0, 401)
    similar = np.array([hard_pair_loss(float(w), 1) for w in omegas])
    dissimilar = np.array([hard_pair_loss(float(w), 0) for w in omegas])
    assert (np.diff(similar) < 0).all()
    assert (np.diff(dissimilar) > 0).all()


@pytest.mark.parametrize("mode", list(LossMode))
def test_repeating_every_pair_leaves_the_mean_cost_unchanged(rng: np.random.Generator, mode: LossMode) -> None:
    labels = random_labels(rng, 7, 4)
    codes = _codes_away_from_kinks(rng, 7, 8)
    batch = _all_pairs(labels, codes)
    doubled = PairBatch(
        left=np.concatenate([batch.left, batch.left]),
        right=np.concatenate([batch.right, batch.right]),
        similarity=np.concatenate([batch.similarity, batch.similarity]),
        hard=np.concatenate([batch.hard, batch.hard]),
        codes=codes,
    )
    cfg = LossConfig(bits=8, mode=mode)
    assert abs(total_cost(doubled, cfg) - total_cost(batch, cfg)) < 1e-12
    np.testing.assert_allclose(cost_gradient(doubled, cfg), cost_gradient(batch, cfg), rtol=0, atol=1e-12)
