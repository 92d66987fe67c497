from __future__ import annotations

import math

import numpy as np
import pytest

from app_conf import SimilarityGranularity
from errors import LabelError
from services.hashing.label_similarity import (
    SimilarityMode,
    as_label_matrix,
    classify_pair,
    cosine_label_similarity,
    pairwise_similarity,
    shared_label_counts,
    similarity_matrix,
)
from tests.helpers import random_labels


def test_identical_label_sets_are_hard_one() -> None:
    sim = classify_pair([1, 0, 1, 1], [1, 0, 1, 1])
    assert sim.value == 1.0
    assert sim.mode is SimilarityMode.HARD


def test_disjoint_label_sets_are_hard_zero() -> None:
    sim = classify_pair([1, 1, 0, 0], [0, 0, 1, 1])
    assert sim.value == 0.0
    assert sim.is_hard


def test_partial_overlap_is_soft_cosine() -> None:
    sim = classify_pair([1, 1, 0], [1, 0, 0])
    assert sim.mode is SimilarityMode.SOFT
    assert sim.value == pytest.approx(1 / math.sqrt(2), abs=1e-15)


def test_cosine_is_symmetric() -> None:
    a, b = [1, 1, 0, 1, 0], [0, 1, 1, 1, 1]
    assert cosine_label_similarity(a, b) == cosine_label_similarity(b, a)
    assert cosine_label_similarity(a, b) == pytest.approx(2 / math.sqrt(12))


def test_large_identical_sets_stay_exactly_hard() -> None:
    labels = np.ones(997, dtype=np.int64)
    sim = classify_pair(labels, labels)
    assert sim.value == 1.0
    assert sim.is_hard


@pytest.mark.parametrize(
    ("l_i", "l_j"),
    [
        ([0, 0, 0], [1, 0, 0]),
        ([1, 0, 0], [1, 0]),
        ([1, 2, 0], [1, 0, 0]),
    ],
)
def test_invalid_label_vectors_raise(l_i: list[int], l_j: list[int]) -> None:
    with pytest.raises(LabelError):
        classify_pair(l_i, l_j)


def test_empty_row_error_names_the_record() -> None:
    with pytest.raises(LabelError, match="record 2"):
        as_label_matrix([[1, 0], [0, 1], [0, 0]])


def test_pairwise_matches_scalar_classification(rng: np.random.Generator) -> None:
    left = random_labels(rng, 12, 6)
    right = random_labels(rng, 9, 6)
    sims = pairwise_similarity(left, right)
    for i in range(len(left)):
        for j in range(len(right)):
            expected = classify_pair(left[i], right[j])
            assert sims[i, j].mode is expected.mode
            assert sims[i, j].value == pytest.approx(expected.value, abs=1e-15)


def test_similarity_matrix_diagonal_and_symmetry(rng: np.random.Generator) -> None:
    labels = random_labels(rng, 15, 5)
    sims = similarity_matrix(labels)
    assert len(sims) == 15
    assert np.array_equal(np.diag(sims.values), np.ones(15))
    assert sims.hard.diagonal().all()
    assert np.array_equal(sims.values, sims.values.T)


def test_coarse_similarity_marks_any_overlap_as_one() -> None:
    labels = np.array([[1, 1, 0], [1, 0, 0], [0, 0, 1]])
    sims = pairwise_similarity(labels, granularity=SimilarityGranularity.COARSE)
    assert sims.hard.all()
    assert sims[0, 1].value == 1.0
    assert sims[0, 2].value == 0.0
    assert sims[1, 2].value == 0.0


def test_shared_label_counts() -> None:
    database = np.array([[1, 1, 0], [0, 0, 1], [1, 1, 1]])
    assert shared_label_counts([1, 1, 0], database).tolist() == [2, 0, 2]
    with pytest.raises(LabelError):
        shared_label_counts([1, 0], database)


def test_hard_classification_agrees_with_set_logic(rng: np.random.Generator) -> None:
    for _ in range(1000):
        classes = int(rng.integers(1, 9))
        l_i, l_j = random_labels(rng, 2, classes, density=float(rng.uniform(0.1, 0.9)))
        set_i, set_j = set(np.flatnonzero(l_i)), set(np.flatnonzero(l_j))
        sim = classify_pair(l_i, l_j)
        if set_i == set_j:
            assert (sim.value, sim.mode) == (1.0, SimilarityMode.HARD)
        elif not set_i & set_j:
            assert (sim.value, sim.mode) == (0.0, SimilarityMode.HARD)
        else:
            assert sim.mode is SimilarityMode.SOFT
            assert 0.0 < sim.value < 1.0


def test_similarity_is_invariant_to_class_order(rng: np.random.Generator) -> None:
    labels = random_labels(rng, 20, 7)
    shuffled = labels[:, rng.permutation(7)]
    original, permuted = similarity_matrix(labels), similarity_matrix(shuffled)
    np.testing.assert_array_equal(original.values, permuted.values)
    np.testing.assert_array_equal(original.hard, permuted.hard)


def test_similarity_matrix_follows_item_order(rng: np.random.Generator) -> None:
    labels = random_labels(rng, 20, 6)
    order = rng.permutation(20)
    original, reordered = similarity_matrix(labels), similarity_matrix(labels[order])
    np.testing.assert_array_equal(reordered.values, original.values[np.ix_(order, order)])
    np.testing.assert_array_equal(reordered.hard, original.hard[np.ix_(order, order)])
