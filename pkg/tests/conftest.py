import numpy as np
import pytest

from byzmac.mac_core import Mac, builtin_channel, identity_channel


@pytest.fixture
def erasure():
    return builtin_channel("erasure")


@pytest.fixture
def xor():
    return builtin_channel("xor")


@pytest.fixture
def ex3():
    return builtin_channel("parallel_ex3")


@pytest.fixture
def ident():
    return identity_channel(2, 2)


def random_mac(rng, nx, ny, nz, sparsity=0.0):
    w = rng.random((nx, ny, nz))
    if sparsity:
        w[rng.random(w.shape) < sparsity] = 0.0
        w[..., 0] += 1e-3
    return Mac(w / w.sum(axis=-1, keepdims=True))


def overwritable2_mac(rng, nx=3, ny=2, nz=3, overrides=1):
    """Random channel where user 1 can erase user 2.

    The first ``overrides`` inputs of user 1 produce outputs that ignore y;
    every other input pair mixes those override outputs.
    """
    v = rng.dirichlet(np.ones(nz), size=overrides)
    w = np.zeros((nx, ny, nz))
    for x in range(nx):
        for y in range(ny):
            if x < overrides:
                w[x, y] = v[x]
            else:
                w[x, y] = rng.dirichlet(np.ones(overrides)) @ v
    return Mac(w / w.sum(axis=-1, keepdims=True))
