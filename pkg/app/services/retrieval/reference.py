"""Naive loop implementations of the retrieval metrics.

No vectorization, no shared helpers and no incremental state: every value is
recomputed from the raw shared-label counts. Used as an oracle for the
optimized paths in ``services.retrieval.metrics``.
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from collections.abc import Sequence


def naive_acg(shared: Sequence[int], n: int) -> float:
    total = 0
    for i in range(n):
        total += shared[i]
    return total / n


def naive_dcg(shared: Sequence[int], n: int) -> float:
    total = 0.0
    for i in range(n):
        total += (2 ** shared[i] - 1) / math.log2(i + 2)
    return total


def naive_ndcg(shared: Sequence[int], n: int) -> float:
    ideal = sorted((shared[i] for i in range(n)), reverse=True)
    z = naive_dcg(ideal, n)
    if z == 0:
        return 0.0
    return naive_dcg(shared, n) / z


def naive_precision(shared: Sequence[int], n: int) -> float:
    hits = 0
    for i in range(n):
        if shared[i] > 0:
            hits += 1
    return hits / n


def naive_ap(shared: Sequence[int], n: int) -> float:
    num_relevant = 0
    for i in range(n):
        if shared[i] > 0:
            num_relevant += 1
    if num_relevant == 0:
        return 0.0
    total = 0.0
    for i in range(n):
        if shared[i] > 0:
            hits = 0
            for j in range(i + 1):
                if shared[j] > 0:
                    hits += 1
            total += hits / (i + 1)
    return total / num_relevant


def naive_wap_query(shared: Sequence[int], n: int) -> float:
    num_relevant = 0
    for i in range(n):
        if shared[i] > 0:
            num_relevant += 1
    if num_relevant == 0:
        return 0.0
    total = 0.0
    for i in range(n):
        if shared[i] > 0:
            total += naive_acg(shared, i + 1)
    return total / num_relevant


def naive_map(profiles: Sequence[Sequence[int]], n: int) -> float:
    values = [naive_ap(p, n) for p in profiles if any(p[i] > 0 for i in range(n))]
    return sum(values) / len(values)


def naive_wap(profiles: Sequence[Sequence[int]], n: int) -> float:
    values = [naive_wap_query(p, n) for p in profiles if any(p[i] > 0 for i in range(n))]
    return sum(values) / len(values)


def naive_hamming(a: Sequence[int], b: Sequence[int]) -> int:
    """Per-bit comparison of two {-1, +1} sign vectors."""
    count = 0
    for x, y in zip(a, b, strict=True):
        if x != y:
            count += 1
    return count
