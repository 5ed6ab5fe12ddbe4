import numpy as np
import pytest

from msbm import ClassLabels, MultiGraph, ProbArray


def multigraph_from_edges(n, t, edges):
    """Build a MultiGraph from a list of (layer, i, j) edges."""
    layers = np.zeros((t, n, n), dtype=np.uint8)
    for lt, i, j in edges:
        layers[lt, i, j] = layers[lt, j, i] = 1
    return MultiGraph(layers)


def random_multigraph(rng, n, t, density=0.4):
    layers = np.zeros((t, n, n), dtype=np.uint8)
    iu = np.triu_indices(n, 1)
    for lt in range(t):
        draw = (rng.random(iu[0].size) < density).astype(np.uint8)
        layers[lt][iu] = draw
        layers[lt][(iu[1], iu[0])] = draw
    return MultiGraph(layers)


def constant_prob_array(M, t):
    M = np.asarray(M, dtype=float)
    return ProbArray(np.repeat(M[None], t, axis=0))


def random_symmetric_prob(rng, t, k, lo=0.05, hi=0.95):
    M = rng.uniform(lo, hi, size=(t, k, k))
    return ProbArray((M + np.swapaxes(M, 1, 2)) / 2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def labels(k, seq):
    return ClassLabels(k, np.array(seq, dtype=np.int64))
