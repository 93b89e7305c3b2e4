import numpy as np

from mxspec.core import DynamicCoupling, MultiplexNetwork


def random_network(rng, n=None, k=None):
    """Small random weighted directed multiplex for identity/oracle tests."""
    n = n or int(rng.integers(1, 7))
    k = k or int(rng.integers(1, 4))
    layers = []
    for _ in range(k):
        mat = rng.random((n, n)) * 10
        mat[rng.random((n, n)) < 0.5] = 0.0
        np.fill_diagonal(mat, 0.0)
        layers.append(mat)
    return MultiplexNetwork(n=n, k=k, layers=tuple(layers))


def random_coupling(rng, n, k):
    return DynamicCoupling(rng.random((k, k, n)) * 2)
