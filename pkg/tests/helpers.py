from __future__ import annotations

import numpy as np


def random_labels(rng: np.random.Generator, rows: int, classes: int, density: float = 0.4) -> np.ndarray:
    """空行のない多値ホットラベル行列."""
    labels = (rng.random((rows, classes)) < density).astype(np.int64)
    empty = ~labels.any(axis=1)
    labels[empty, rng.integers(classes, size=int(empty.sum()))] = 1
    return labels


def random_signs(rng: np.random.Generator, rows: int, bits: int) -> np.ndarray:
    return rng.choice(np.array([-1, 1], dtype=np.int64), size=(rows, bits))
