"""Shared synthetic-data helpers for the test suite."""

import numpy as np
import pytest

from contrabatch import EmbeddingPair, normalize_rows


def random_pair(n: int, d: int, seed: int) -> EmbeddingPair:
    """Unit-norm rows drawn from a seeded standard normal."""
    rng = np.random.default_rng(seed)
    return EmbeddingPair(
        normalize_rows(rng.standard_normal((n, d))),
        normalize_rows(rng.standard_normal((n, d))),
    )


def clustered_pair(n: int, d: int, clusters: int, noise: float, seed: int):
    """Tight clusters around random unit centers; returns (pair, labels)."""
    rng = np.random.default_rng(seed)
    centers = normalize_rows(rng.standard_normal((clusters, d)))
    labels = np.repeat(np.arange(clusters), n // clusters)
    x = centers[labels] + noise * rng.standard_normal((n, d))
    y = centers[labels] + noise * rng.standard_normal((n, d))
    return EmbeddingPair(normalize_rows(x), normalize_rows(y)), labels


def two_cluster_pair() -> EmbeddingPair:
    """Eight 2-D rows: four on the x-axis, four on the y-axis, X == Y."""
    m = np.array([[1.0, 0.0]] * 4 + [[0.0, 1.0]] * 4)
    return EmbeddingPair(m, m.copy())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
