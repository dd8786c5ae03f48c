"""The numba and numpy kernels must agree."""

import os
import subprocess
import sys

import numpy as np
import pytest

from toricgh import kernels
from toricgh.guillemin import make_chart
from toricgh import catalog


@pytest.fixture(scope="module")
def chart_arrays():
    c = make_chart(catalog.load("pentagon:1/2"))
    P = c.polytope.base
    normals = np.array([f.normal for f in P.facets], float)
    offsets = np.array([float(f.offset) for f in P.facets])
    return normals, offsets


def interior(rng, m):
    # points inside the pentagon [0,2]x[0,1] minus the corner x + y > 5/2
    X = rng.uniform([0.05, 0.05], [1.95, 0.95], size=(4 * m, 2))
    return X[X.sum(axis=1) < 2.45][:m]


def test_hessians(rng, chart_arrays):
    nb, np_ = kernels.implementations("hessians")
    X = interior(rng, 200)
    np.testing.assert_allclose(nb(X, *chart_arrays), np_(X, *chart_arrays), rtol=1e-12)


def test_segment_lengths(rng, chart_arrays):
    nb, np_ = kernels.implementations("segment_lengths")
    X = interior(rng, 200)
    dX, dY = rng.normal(size=X.shape) * 0.1, rng.normal(size=X.shape) * 0.1
    np.testing.assert_allclose(nb(X, dX, dY, *chart_arrays), np_(X, dX, dY, *chart_arrays), rtol=1e-12)


def test_sinkhorn(rng):
    nb, np_ = kernels.implementations("sinkhorn_log")
    x, y = rng.uniform(size=(30, 2)), rng.uniform(size=(40, 2))
    C = ((x[:, None] - y[None]) ** 2).sum(-1)
    a, b = rng.dirichlet(np.ones(30)), rng.dirichlet(np.ones(40))
    args = (C, np.log(a), np.log(b), 0.05)
    f1, g1, it1, e1 = nb(*args, np.zeros(30), np.zeros(40), 500, 1e-12)
    f2, g2, it2, e2 = np_(*args, np.zeros(30), np.zeros(40), 500, 1e-12)
    assert it1 == it2
    np.testing.assert_allclose(f1, f2, atol=1e-10)
    np.testing.assert_allclose(g1, g2, atol=1e-10)


@pytest.fixture(scope="module")
def dist_pair():
    rng = np.random.default_rng(5)
    def metric(n):
        p = rng.uniform(size=(n, 2))
        return np.sqrt(((p[:, None] - p[None]) ** 2).sum(-1))
    return metric(60), metric(45), rng.integers(0, 45, size=60)


def test_distortions(dist_pair):
    D1, D2, assign = dist_pair
    nb, np_ = kernels.implementations("all_pairs_distortion")
    full = nb(D1, D2, assign)
    assert full == pytest.approx(np_(D1, D2, assign), abs=1e-15)
    brute = np.abs(D1 - D2[np.ix_(assign, assign)]).max()
    assert full == pytest.approx(brute, abs=1e-15)
    nb, np_ = kernels.implementations("pair_distortion")
    I, J = np.triu_indices(60, 1)
    assert nb(D1, D2, assign, I, J) == pytest.approx(np_(D1, D2, assign, I, J), abs=1e-15)
    assert nb(D1, D2, assign, I, J) == pytest.approx(full, abs=1e-15)


def test_coverage_and_orbits(dist_pair):
    _, D2, _ = dist_pair
    image = np.array([0, 3, 7, 20])
    nb, np_ = kernels.implementations("coverage_radius")
    assert nb(D2, image) == np_(D2, image)
    nb, np_ = kernels.implementations("orbit_diameters")
    D = dist_pair[0][:60, :60]
    np.testing.assert_array_equal(nb(D, 15, 4), np_(D, 15, 4))


def test_env_switch():
    code = "from toricgh import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, TORICGH_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
