from __future__ import annotations

import math

import numpy as np
import pytest

from errors import DimensionError, NoRelevantItemsError
from services.retrieval import reference
from services.retrieval.metrics import (
    RelevanceProfile,
    acg_at,
    average_precision,
    dcg_at,
    has_relevant,
    mean_average_precision,
    ndcg_at,
    precision_at,
    weighted_average_precision,
)

HAND = RelevanceProfile.of([2, 0, 1])


def test_hand_worked_acg() -> None:
    assert acg_at(HAND, 3) == pytest.approx(1.0, abs=1e-4)
    assert acg_at(HAND, 1) == 2.0
    assert acg_at(RelevanceProfile.of([0, 0, 0]), 3) == 0.0


def test_hand_worked_dcg_and_ndcg() -> None:
    assert dcg_at(HAND, 3) == pytest.approx(3.5, abs=1e-12)
    ideal = 3 + 1 / math.log2(3)
    assert ndcg_at(HAND, 3) == pytest.approx(3.5 / ideal, abs=1e-12)
    assert ndcg_at(HAND, 3) == pytest.approx(0.9640, abs=1e-4)


def test_ndcg_edge_cases() -> None:
    assert ndcg_at(RelevanceProfile.of([3, 2, 2, 0]), 4) == 1.0
    assert ndcg_at(RelevanceProfile.of([0, 0, 0]), 3) == 0.0


def test_hand_worked_average_precision() -> None:
    assert average_precision(HAND, 3) == pytest.approx(0.8333, abs=1e-4)
    assert average_precision(RelevanceProfile.of([1, 1, 1]), 3) == 1.0
    assert average_precision(RelevanceProfile.of([0, 0, 0]), 3) == 0.0
    assert not has_relevant(RelevanceProfile.of([0, 0, 0]), 3)


def test_hand_worked_wap() -> None:
    assert weighted_average_precision([HAND], 3).value == pytest.approx(1.5, abs=1e-4)
    assert weighted_average_precision([RelevanceProfile.of([1, 1, 1, 1])], 4).value == 1.0


def test_precision_at() -> None:
    assert precision_at(HAND, 3) == pytest.approx(2 / 3)
    assert precision_at(HAND, 1) == 1.0


def test_map_averages_relevant_queries_only() -> None:
    perfect = RelevanceProfile.of([1, 0, 0])
    half = RelevanceProfile.of([0, 1, 0])
    empty = RelevanceProfile.of([0, 0, 0])
    score = mean_average_precision([perfect, half, empty], 3)
    assert score.value == pytest.approx(0.75)
    assert score.num_queries == 3
    assert score.num_relevant_free == 1
    assert mean_average_precision([HAND], 3).value == average_precision(HAND, 3)


def test_map_and_wap_reject_degenerate_inputs() -> None:
    with pytest.raises(ValueError, match="at least one query"):
        mean_average_precision([], 3)
    with pytest.raises(NoRelevantItemsError):
        mean_average_precision([RelevanceProfile.of([0, 0])], 2)
    with pytest.raises(NoRelevantItemsError):
        weighted_average_precision([RelevanceProfile.of([0, 0])], 2)


@pytest.mark.parametrize("n", [0, 4])
def test_invalid_cutoffs(n: int) -> None:
    error = ValueError if n < 1 else DimensionError
    with pytest.raises(error):
        acg_at(HAND, n)


def test_profile_rejects_negative_counts() -> None:
    with pytest.raises(DimensionError):
        RelevanceProfile.of([1, -1])


def test_metrics_match_naive_reference() -> None:
    rng = np.random.default_rng(99)
    for _ in range(200):
        num_queries = int(rng.integers(1, 21))
        db_size = int(rng.integers(1, 101))
        max_labels = int(rng.integers(1, 7))
        n = int(rng.integers(1, db_size + 1))
        raw = rng.integers(0, max_labels + 1, size=(num_queries, db_size))
        raw[rng.random((num_queries, db_size)) < 0.4] = 0
        profiles = [RelevanceProfile.of(row) for row in raw]
        lists = [row.tolist() for row in raw]

        for profile, shared in zip(profiles, lists, strict=True):
            assert abs(acg_at(profile, n) - reference.naive_acg(shared, n)) < 1e-12
            assert abs(dcg_at(profile, n) - reference.naive_dcg(shared, n)) < 1e-12 * max(1.0, reference.naive_dcg(shared, n))
            assert abs(ndcg_at(profile, n) - reference.naive_ndcg(shared, n)) < 1e-12
            assert abs(average_precision(profile, n) - reference.naive_ap(shared, n)) < 1e-12
            assert abs(precision_at(profile, n) - reference.naive_precision(shared, n)) < 1e-12

        if any(has_relevant(p, n) for p in profiles):
            assert abs(mean_average_precision(profiles, n).value - reference.naive_map(lists, n)) < 1e-12
            assert abs(weighted_average_precision(profiles, n).value - reference.naive_wap(lists, n)) < 1e-12


def test_ndcg_is_maximal_for_descending_order(rng: np.random.Generator) -> None:
    for _ in range(50):
        shared = rng.integers(0, 4, size=12)
        best = ndcg_at(RelevanceProfile.of(np.sort(shared)[::-1]), 12)
        for _ in range(10):
            assert ndcg_at(RelevanceProfile.of(rng.permutation(shared)), 12) <= best + 1e-12


def test_moving_a_relevant_item_earlier_never_lowers_ap(rng: np.random.Generator) -> None:
    for _ in range(100):
        shared = rng.integers(0, 3, size=15)
        swaps = [i for i in range(14) if shared[i] == 0 and shared[i + 1] > 0]
        if not swaps:
            continue
        i = swaps[int(rng.integers(len(swaps)))]
        improved = shared.copy()
        improved[i], improved[i + 1] = improved[i + 1], improved[i]
        assert average_precision(RelevanceProfile.of(improved), 15) >= average_precision(RelevanceProfile.of(shared), 15)


def test_metric_ranges(rng: np.random.Generator) -> None:
    for _ in range(50):
        shared = rng.integers(0, 5, size=20)
        profile = RelevanceProfile.of(shared)
        assert 0.0 <= ndcg_at(profile, 20) <= 1.0
        assert 0.0 <= average_precision(profile, 20) <= 1.0
        assert 0.0 <= acg_at(profile, 20) <= 4.0


def test_relevant_free_is_judged_within_the_cutoff() -> None:
    late = RelevanceProfile.of([0, 0, 0, 2])
    early = RelevanceProfile.of([1, 0, 0, 0])
    top_three = mean_average_precision([late, early], 3)
    assert top_three.num_relevant_free == 1
    assert top_three.value == 1.0
    full = mean_average_precision([late, early], 4)
    assert full.num_relevant_free == 0
    assert full.value == pytest.approx((0.25 + 1.0) / 2)
