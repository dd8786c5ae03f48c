import math
from fractions import Fraction as F

import numpy as np
import pytest

from toricgh import catalog
from toricgh.distances import (
    d_hausdorff,
    d_volume,
    d_wasserstein,
    discretize,
    monge_map_estimate,
    solve_ot,
    support_function,
    w2_convergence_check,
    wasserstein_upper_bound,
)
from toricgh.errors import AssumptionViolated, DimensionMismatch, TooLarge
from toricgh.polytope import HPolytope, translate, volume

SQUARE = catalog.UNIT_SQUARE
BIG = HPolytope.box([0, 0], [2, 2])
R = catalog.RECTANGLE


def test_hausdorff_examples():
    P = catalog.pentagon(F(1, 2))
    assert d_hausdorff(P, P) == 0
    assert d_hausdorff(SQUARE, BIG) == pytest.approx(math.sqrt(2), abs=1e-12)
    for t in (F(1, 2), F(1, 5), F(1, 64)):
        assert d_hausdorff(catalog.pentagon(t), R) == pytest.approx(float(t) / math.sqrt(2), abs=1e-12)
    with pytest.raises(DimensionMismatch):
        d_hausdorff(SQUARE, catalog.segment(1))


def _dirs(theta):
    return np.stack([np.cos(theta), np.sin(theta)], axis=1)


def test_hausdorff_matches_support_functions(rng):
    n = 10**4
    step = 2 * np.pi / n
    theta = np.arange(n) * step
    for _ in range(5):
        P, Q = catalog.random_polygon(rng), catalog.random_polygon(rng)
        gap = np.abs(support_function(P, _dirs(theta)) - support_function(Q, _dirs(theta)))
        dh = d_hausdorff(P, Q)
        # |h_P - h_Q| is Lipschitz in the angle with constant <= 2 max|v|
        lip = 2 * max(np.linalg.norm(P.vertex_array, axis=1).max(), np.linalg.norm(Q.vertex_array, axis=1).max())
        assert gap.max() <= dh + 1e-12
        assert dh - gap.max() <= lip * step / 2
        local = theta[gap.argmax()] + np.linspace(-step, step, n)
        fine = np.abs(support_function(P, _dirs(local)) - support_function(Q, _dirs(local))).max()
        assert dh == pytest.approx(fine, abs=1e-6)


def test_volume_examples():
    assert d_volume(SQUARE, BIG) == 3
    assert d_volume(SQUARE, translate(SQUARE, (2, 0))) == 2
    for t in (F(1, 2), F(1, 3)):
        assert d_volume(catalog.pentagon(t), R) == t * t / 2
    assert d_volume(SQUARE, SQUARE) == 0


def test_wasserstein_identity_and_translation():
    P = catalog.pentagon(F(1, 2))
    r = d_wasserstein(P, P)
    assert r.value <= r.error_bound
    v = np.array([0.5, -0.25])
    r = d_wasserstein(P, translate(P, (F(1, 2), F(-1, 4))))
    assert abs(r.value - np.linalg.norm(v)) <= r.error_bound


def test_wasserstein_1d_oracle():
    for solver in ("exact", "entropic"):
        r = d_wasserstein(catalog.segment(1), catalog.segment(2), h=F(1, 100), solver=solver)
        assert r.value == pytest.approx(1 / math.sqrt(3), rel=2e-3)
        assert abs(r.value - 1 / math.sqrt(3)) <= r.error_bound


def test_plan_marginals():
    P, Q = catalog.pentagon(F(1, 2)), catalog.load("simplex2x2")
    ex = d_wasserstein(P, Q, h=F(1, 8), solver="exact")
    en = d_wasserstein(P, Q, h=F(1, 8), solver="entropic")
    assert ex.plan.max_residual <= 1e-9
    assert en.plan.max_residual <= 1e-6
    assert abs(en.value - ex.value) <= en.details["solver_gap"] + 1e-3


def test_refinement_consistency():
    P, Q = catalog.pentagon(F(1, 2)), catalog.load("simplex2x2")
    vals = [(h, d_wasserstein(P, Q, h=h).value) for h in (F(1, 5), F(1, 10), F(1, 20))]
    for (h0, a), (_, b) in zip(vals, vals[1:]):
        assert abs(a - b) <= 3 * float(h0) * math.sqrt(2)


def test_discretize():
    mu = discretize(catalog.pentagon(F(1, 3)), F(1, 10))
    assert mu.weights.sum() == pytest.approx(1, abs=1e-14)
    with pytest.raises(TooLarge):
        discretize(BIG, F(1, 100), max_support=100)


def test_solve_ot_tiny():
    a = np.array([0.5, 0.5])
    X = np.array([[0.0], [1.0]])
    Y = np.array([[0.0], [3.0]])
    value, plan, gap, _ = solve_ot(a, X, a, Y, "exact")
    assert value == pytest.approx(math.sqrt(0.5 * 4), abs=1e-12)
    assert gap == 0


def test_upper_bound():
    P = catalog.pentagon(F(1, 2))
    assert wasserstein_upper_bound(R, R) == 0
    assert wasserstein_upper_bound(P, R) == pytest.approx(202 * math.sqrt(5) * math.sqrt(1 / 15), rel=1e-12)
    with pytest.raises(AssumptionViolated):
        wasserstein_upper_bound(HPolytope.box([0, 0], [400, 400]), SQUARE)


def test_upper_bound_dominates(rng):
    for _ in range(100):
        P, Q = catalog.random_polygon(rng), catalog.random_polygon(rng)
        r = d_wasserstein(P, Q, h=F(1, 4))
        assert r.value <= wasserstein_upper_bound(P, Q) + r.error_bound


def test_monge_maps():
    h = F(1, 10)
    P = catalog.pentagon(F(1, 2))
    T = monge_map_estimate(P, P, h)
    assert np.abs(T.displacement()).max() <= 2 * float(h) * math.sqrt(2)
    T = monge_map_estimate(P, translate(P, (1, 0)), h)
    assert np.abs(T.displacement() - [1, 0]).max() <= 2 * float(h) * math.sqrt(2)
    T = monge_map_estimate(catalog.segment(1), catalog.segment(2), F(1, 50))
    assert np.abs(T.images[:, 0] - 2 * T.points[:, 0]).max() <= 3 / 50


def test_w2_convergence_check():
    rep = w2_convergence_check([R, R], R, names=["x1", "sq"])
    assert all(r.max_discrepancy == 0 for r in rep.rows)
    seq = [translate(R, (F(1, i), 0)) for i in (1, 2, 4)]
    rep = w2_convergence_check(seq, R, names=["x1"])
    assert [r.discrepancies["x1"] for r in rep.rows] == pytest.approx([1, 0.5, 0.25])
    assert rep.consistent
    ts = [F(1, 2**k) for k in range(1, 5)]
    rep = w2_convergence_check([catalog.pentagon(t) for t in ts], R, names=["x1"])
    d = [r.discrepancies["x1"] for r in rep.rows]
    assert all(b < a for a, b in zip(d, d[1:]))
    assert all(v <= 2 * float(t) ** 2 for v, t in zip(d, ts))
