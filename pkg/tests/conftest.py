import numpy as np
import pytest

from sbmlab.graph import Graph


def random_graph(rng, n=None, mean_degree=2.5):
    """Sparse Erdos-Renyi-style test graph; may be disconnected or empty."""
    if n is None:
        n = int(rng.integers(4, 14))
    p = min(1.0, mean_degree / n)
    mask = rng.random((n, n)) < p
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if mask[i, j]]
    return Graph(n, np.asarray(edges, dtype=np.int64).reshape(-1, 2))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
