import math
from fractions import Fraction as F

import numpy as np
import pytest

from toricgh import catalog
from toricgh.errors import BadConfig, BoundaryOrExterior, NotDelzant, TooLarge
from toricgh.guillemin import (
    ToricManifoldSample,
    collar_length,
    fixed_points,
    hessian,
    hessians,
    load_sample,
    make_chart,
    metric_length,
    orbit_volume,
    potential,
    sample_manifold,
    save_sample,
)
from toricgh.polytope import volume

UNIT = make_chart(catalog.segment(1))
SQ = make_chart(catalog.UNIT_SQUARE)


def test_potential():
    assert potential(UNIT, [0.5]) == pytest.approx(-math.log(2) / 2, abs=1e-15)
    assert potential(SQ, [0.5, 0.5]) == pytest.approx(-math.log(2), abs=1e-15)
    for x in ([0.0, 0.5], [1.0, 0.3], [1.5, 0.5]):
        with pytest.raises(BoundaryOrExterior):
            potential(SQ, x)


def test_chart_requires_delzant():
    with pytest.raises(NotDelzant):
        make_chart(catalog.load("triangle_bad"))


def test_hessian_examples():
    assert hessian(UNIT, [0.5]).G[0, 0] == pytest.approx(2)
    assert np.allclose(hessian(SQ, [0.5, 0.5]).G, 2 * np.eye(2))
    for lam in (F(1, 2), 2, 5):
        c = make_chart(catalog.segment(lam))
        assert hessian(c, [float(lam) / 2]).G[0, 0] == pytest.approx(2 / float(lam))
    with pytest.raises(BoundaryOrExterior):
        hessian(SQ, [1.0, 0.5])


def test_metric_tensor_invariants(rng):
    P = catalog.random_delzant_polygon(rng)
    c = make_chart(P)
    X = rng.dirichlet(np.ones(len(P.vertices)), size=50) @ P.vertex_array
    for x in X:
        T = hessian(c, x)
        assert np.allclose(T.G, T.G.T)
        assert np.allclose(T.G @ T.G_inv, np.eye(2), atol=1e-10)
        assert T.is_positive_definite()
    assert np.allclose(hessians(c, X)[3], hessian(c, X[3]).G)


def test_blowup_toward_facet():
    top = [np.linalg.eigvalsh(hessian(SQ, [d, 0.5]).G).max() for d in np.geomspace(0.5, 1e-6, 30)]
    assert all(b > a for a, b in zip(top, top[1:]))
    assert top[-1] > 1e5


def test_metric_length():
    assert metric_length(SQ, [[0.5, 0.5, 0, 0], [0.5, 0.5, 0, 0]]) == 0
    # full fiber loop as 8 steps of 1/8 (each segment uses the shortest torus representative)
    loop = [[0.5, 0.5, k / 8, 0] for k in range(9)]
    assert metric_length(SQ, loop) == pytest.approx(1 / math.sqrt(2), rel=1e-12)
    for lam in (1, 2, 4):
        c = make_chart(catalog.segment(lam))
        eps = 1e-6 * lam
        xs = lam / 2 - (lam / 2 - eps) * np.cos(np.linspace(0, np.pi, 20001))
        path = np.stack([xs, np.zeros_like(xs)], axis=1)
        assert metric_length(c, path) == pytest.approx(math.pi * math.sqrt(lam / 2), rel=2e-3)


def test_metric_length_refines_consistently():
    path = np.array([[0.2, 0.3, 0.0, 0.1], [0.7, 0.6, 0.3, 0.2], [0.8, 0.2, 0.35, 0.45]])

    def refine(p):
        mids = (p[1:] + p[:-1]) / 2
        out = np.empty((2 * len(p) - 1, p.shape[1]))
        out[0::2], out[1::2] = p, mids
        return out

    a = metric_length(SQ, refine(refine(path)))
    b = metric_length(SQ, refine(refine(refine(path))))
    assert abs(a - b) <= 0.01 * b


def test_orbit_volume():
    assert orbit_volume(SQ, [0.5, 0.5]) == pytest.approx(0.5)
    for lam in (1, 2, 3):
        c = make_chart(catalog.segment(lam))
        assert orbit_volume(c, [lam / 2]) == pytest.approx(math.sqrt(lam / 2))
    vals = [orbit_volume(SQ, [d, 0.5]) for d in np.geomspace(0.5, 1e-4, 40)]
    assert all(b < a for a, b in zip(vals[-11:], vals[-10:]))


def test_orbit_volume_matches_fiber_loops(rng):
    P = catalog.RECTANGLE
    c = make_chart(P)
    for x in rng.uniform([0.1, 0.1], [1.9, 0.9], size=(10, 2)):
        loops = [metric_length(c, [[x[0], x[1], *(k / 16 * np.eye(2)[j])] for k in range(17)]) for j in range(2)]
        assert loops[0] * loops[1] == pytest.approx(orbit_volume(c, x), rel=0.02)


def test_collar_length():
    c = make_chart(catalog.segment(2))
    # exact: int_0^a sqrt(1/(x(2-x))) dx = 2 asin(sqrt(a/2))
    for a in (0.05, 0.3, 1.0):
        assert collar_length(c, [a], [0.0]) == pytest.approx(2 * math.asin(math.sqrt(a / 2)), rel=1e-8)


def test_fixed_points():
    assert fixed_points(catalog.UNIT_SQUARE)[1] == 4
    assert fixed_points(catalog.load("simplex2"))[1] == 3
    verts, chi = fixed_points(catalog.pentagon(F(1, 2)))
    assert chi == 5 and len(verts) == 5


@pytest.fixture(scope="module")
def square_sample():
    return sample_manifold(SQ, F(1, 10), F(1, 10), 4)


def test_sample_measure_exact(square_sample):
    assert square_sample.total_measure_exact == 1
    assert square_sample.measure.sum() == pytest.approx(1, abs=1e-12)
    P = catalog.pentagon(F(1, 3))
    S = sample_manifold(make_chart(P), F(1, 10), F(1, 10), 2)
    assert S.total_measure_exact == volume(P)
    # fibers carry uniform weight
    w = S.measure[: S.n_base * S.n_fiber].reshape(S.n_base, S.n_fiber)
    assert np.allclose(w, w[:, :1])


def test_shift_isometries(square_sample):
    S = square_sample
    D = S.distance_matrix()
    m = S.torus_res
    assert np.array_equal(S.shift_permutation((m, 0)), np.arange(S.n_nodes))
    assert np.array_equal(S.shift_permutation((0, 0)), np.arange(S.n_nodes))
    for g in ((1, 0), (0, 1), (1, 3)):
        p = S.shift_permutation(g)
        assert np.array_equal(np.sort(p), np.arange(S.n_nodes))
        assert np.array_equal(D[np.ix_(p, p)], D)


def test_distance_matrix_is_metric(square_sample):
    D = square_sample.distance_matrix()
    assert np.array_equal(D, D.T)
    assert np.all(np.diag(D) == 0)
    idx = np.random.default_rng(0).integers(0, len(D), size=(200, 3))
    i, j, k = idx.T
    assert np.all(D[i, k] <= D[i, j] + D[j, k] + 1e-12)


def test_fiber_antipodes_on_segment():
    c = make_chart(catalog.segment(2))
    S = sample_manifold(c, F(1, 20), F(1, 20), 16)
    b = int(np.argmin(np.abs(S.base_points[:, 0] - 1)))
    x = S.base_points[b, 0]
    d = S.distances_from([S.node(b, 0)])[0, S.node(b, 8)]
    assert d <= math.sqrt(x * (2 - x)) / 2 + 1e-12


def test_geodesic_converges_to_pi():
    c = make_chart(catalog.segment(2))
    errs = []
    for h, m in ((F(1, 25), 16), (F(1, 50), 32)):
        S = sample_manifold(c, h, h, m)
        errs.append(abs(S.vertex_distance(0, 1) - math.pi))
    assert errs[1] < errs[0] <= 0.05 * math.pi


def test_bad_configs():
    with pytest.raises(BadConfig):
        sample_manifold(SQ, F(1, 5), F(1, 10), 4)
    with pytest.raises(BadConfig):
        sample_manifold(SQ, F(1, 10), 0, 4)
    with pytest.raises(BadConfig):
        sample_manifold(SQ, F(1, 10), F(1, 10), 1)
    with pytest.raises(BadConfig):
        sample_manifold(SQ, F(1, 10), F(3, 5), 4)
    with pytest.raises(TooLarge):
        sample_manifold(SQ, F(1, 10), F(1, 10), 8, max_nodes=1000)


def test_serialization_round_trip(square_sample, tmp_path):
    path = tmp_path / "s.bin"
    save_sample(square_sample, path)
    S = load_sample(path)
    assert S.n_nodes == square_sample.n_nodes
    assert (S.graph != square_sample.graph).nnz == 0
    assert np.array_equal(S.measure, square_sample.measure)
    assert S.total_measure_exact == 1
    assert S.to_bytes() == square_sample.to_bytes()
    with pytest.raises(BadConfig):
        ToricManifoldSample.from_bytes(b"garbage" * 4)
