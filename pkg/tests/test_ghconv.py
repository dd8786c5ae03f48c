import math
from fractions import Fraction as F

import numpy as np
import pytest

from toricgh import catalog, ghconv
from toricgh.errors import BadK, DimensionMismatch, NormalFanMismatch, NotDelzant, UnknownTestFunction
from toricgh.guillemin import make_chart, sample_manifold
from toricgh.polytope import volume

H = F(1, 10)
R = catalog.RECTANGLE
SQ = catalog.UNIT_SQUARE


def sample(P, h=H, m=4):
    return sample_manifold(make_chart(P), h, h, m)


@pytest.fixture(scope="module")
def square():
    return sample(SQ)


@pytest.fixture(scope="module")
def rect():
    return sample(R)


# -- faces and normals


def test_face_report_trivial():
    for k in (0, 1):
        m = ghconv.face_convergence_report(R, R, k)
        assert all(p.gap == 0 for p in m.pairs)
        assert not m.unmatched_source and not m.unmatched_target
    m = ghconv.face_convergence_report(R, R, 1)
    assert all(row[2] == 0 and row[3] == 0 for row in m.facet_data)


@pytest.mark.parametrize("t", [F(1, 2), F(1, 4), F(1, 16)])
def test_face_report_pentagon(t):
    P = catalog.pentagon(t)
    edges = ghconv.face_convergence_report(P, R, 1, tolerance=float(t))
    assert len(edges.pairs) == 4 and all(p.gap <= float(t) + 1e-12 for p in edges.pairs)
    gaps = [p.gap for p in edges.pairs]
    assert gaps == sorted(gaps)
    (left,) = edges.unmatched_source
    if t < F(1, 2):
        # at t = 1/2 the cut edge and the short vertical edge tie on gap
        cut_face = ghconv.faces(P, 1)[left]
        assert ghconv.face_measure(P, cut_face) == pytest.approx(float(t) * math.sqrt(2))
    verts = ghconv.face_convergence_report(P, R, 0, tolerance=float(t))
    assert len(verts.pairs) == 4 and len(verts.unmatched_source) == 1
    assert all(p.gap <= float(t) + 1e-12 for p in verts.pairs)
    assert verts.semicontinuity_holds is True


def test_essential_threshold():
    P = catalog.pentagon(F(1, 2))
    m = ghconv.face_convergence_report(P, R, 1, tolerance=1.0, essential_fraction=0.5)
    # an edge is essential only if its length is at least half the limit diameter
    assert [p.essential for p in m.pairs] == [p.measure >= 0.5 * math.sqrt(5) for p in m.pairs]


def test_face_report_errors():
    with pytest.raises(BadK):
        ghconv.face_convergence_report(R, R, 2)
    with pytest.raises(DimensionMismatch):
        ghconv.face_convergence_report(R, catalog.load("cube"), 0)


def test_normal_stability_examples():
    rep = ghconv.normal_stability([catalog.dilation(k) for k in range(1, 6)], SQ)
    assert rep.stable and not rep.facet_count_mismatch
    assert {t.normal for t in rep.tracks} == {(1, 0), (0, 1), (-1, 0), (0, -1)}
    rep = ghconv.normal_stability([catalog.pentagon(F(1, i)) for i in range(1, 7)], R)
    assert rep.facet_count_mismatch and not rep.stable
    rep = ghconv.normal_stability([catalog.rectangle(i) for i in range(1, 7)], R)
    assert rep.stable
    top = next(t for t in rep.tracks if t.normal == (0, -1))
    assert list(top.offsets) == [-(1 + F(1, i)) for i in range(1, 7)]
    with pytest.raises(NotDelzant):
        ghconv.normal_stability([catalog.load("triangle_bad")], catalog.load("simplex2"))


# -- maps and distortions


def test_identity_maps(square):
    f = ghconv.build_approx_map(square, square)
    assert np.array_equal(f.assign, np.arange(square.n_nodes))
    rep = ghconv.eqgh_distortion(f)
    assert (rep.eps_iso, rep.eps_surj, rep.eps_equiv) == (0, 0, 0)
    assert rep.iso_exhaustive


def test_shift_is_isometry(square):
    for g in ((1, 0), (2, 3)):
        rep = ghconv.eqgh_distortion(ghconv.shift_map(square, g))
        assert (rep.eps_iso, rep.eps_surj, rep.eps_equiv) == (0, 0, 0)


def test_wrong_automorphism_detected(square):
    rho = -np.eye(2, dtype=np.int64)
    rep = ghconv.eqgh_distortion(ghconv.identity_map(square, rho))
    D = square.distance_matrix()
    step = max(D[np.arange(square.n_nodes), square.shift_permutation(g)].max() for g in square.generators())
    assert rep.eps_iso == 0 and rep.eps_surj == 0
    assert rep.eps_equiv >= step - 1e-12


def test_fan_mismatch(rect):
    with pytest.raises(NormalFanMismatch):
        ghconv.build_approx_map(sample(catalog.pentagon(F(1, 4))), rect)
    with pytest.raises(NormalFanMismatch):
        ghconv.build_approx_map(sample(catalog.load("simplex2x2")), sample(HPolytope_box2()))


def HPolytope_box2():
    return catalog.HPolytope.box([0, 0], [2, 2])


def test_dilation_shrinks_distortion(square):
    reps = [ghconv.eqgh_distortion(ghconv.build_approx_map(sample(catalog.dilation(k)), square)) for k in (1, 3)]
    assert reps[1].eps_iso < reps[0].eps_iso
    assert all(r.eps_surj <= square.diameter() for r in reps)


def test_subsampled_pairs_flagged(square):
    f = ghconv.build_approx_map(sample(catalog.dilation(2)), square)
    full = ghconv.eqgh_distortion(f)
    sub = ghconv.eqgh_distortion(f, max_pairs=1000, seed=3)
    assert not sub.iso_exhaustive and sub.eps_iso <= full.eps_iso
    assert ghconv.eqgh_distortion(f, max_pairs=1000, seed=3).eps_iso == sub.eps_iso


def test_gh_bounds_identical(square):
    b = ghconv.gh_bounds(square, square)
    assert b.lower == 0 and b.upper <= square.stencil_scale


def test_gh_bounds_segments():
    X = sample_manifold(make_chart(catalog.segment(2)), F(1, 40), F(1, 40), 32)
    Y = sample_manifold(make_chart(catalog.segment(8)), F(1, 10), F(1, 10), 32)
    b = ghconv.gh_bounds(X, Y, max_pairs=10**7)
    assert b.distortion.iso_exhaustive
    assert b.lower == pytest.approx(math.pi / 2, rel=0.05)
    assert b.lower <= b.upper


def test_gh_bounds_random_pairs():
    rng = np.random.default_rng(7)
    for _ in range(20):
        P, Q = catalog.random_delzant_polygon(rng, cuts=1), catalog.random_delzant_polygon(rng, cuts=1)
        b = ghconv.gh_bounds(sample(P, F(1, 4), 2), sample(Q, F(1, 4), 2))
        assert 0 <= b.lower <= b.upper


# -- fixed points, reconstruction, fiber averages


def test_fixed_points_identity(square):
    rep = ghconv.fixed_point_tracking([square], square, [ghconv.identity_map(square)])
    (row,) = rep.rows
    assert row.fp_gap == 0 and row.fp_count == row.limit_vertices == 4


def test_fixed_points_pentagon_greedy(rect):
    fam = [sample(catalog.pentagon(F(1, 2**k))) for k in (1, 2)]
    rep = ghconv.fixed_point_tracking(fam, rect, [ghconv.greedy_approx_map(S, rect) for S in fam])
    assert all(r.fp_count == 5 > r.limit_vertices == 4 for r in rep.rows)
    assert rep.count_inequality_holds


def test_near_fixed_proxies(rect):
    exact, near = ghconv.fixed_point_proxies(rect)
    assert set(exact) <= set(near)
    od = rect.orbit_diameters()
    assert np.all(od[exact] == 0)
    # one minimal base column next to each corner
    cols = {int(x) // rect.n_fiber for x in near if x < rect.n_base * rect.n_fiber}
    assert len(cols) == 4


def test_reconstruction_identity(square):
    rc = ghconv.reconstruct_polytope(SQ, square, ghconv.identity_map(square), SQ)
    assert rc.inside_gap == 0
    assert rc.dH_gap <= square.stencil_scale


def test_reconstruction_rectangles(rect):
    gaps = []
    for i in (1, 2, 4):
        Pi = catalog.rectangle(i)
        S = sample(Pi)
        rc = ghconv.reconstruct_polytope(Pi, S, ghconv.build_approx_map(S, rect), R)
        assert rc.inside_gap <= float(H) * math.sqrt(2)
        gaps.append(rc.dH_gap)
    assert all(b <= a + 1e-12 for a, b in zip(gaps, gaps[1:]))


def test_fiber_average_constant(square):
    S = sample(catalog.dilation(2))
    f = ghconv.build_approx_map(S, square)
    fa = ghconv.fiber_average("one", S, f, SQ)
    assert fa.integral_exact == volume(catalog.dilation(2))
    assert fa.gap == pytest.approx(float(volume(catalog.dilation(2)) - 1), abs=1e-15)
    assert fa.target == 1


def test_fiber_average_identity(square):
    fa = ghconv.fiber_average("x1", square, ghconv.identity_map(square), SQ)
    # nodes stand in for their cells: error at most one inset width times the boundary cell mass
    assert fa.gap <= 2 * float(H)
    assert fa.section_gap == 0
    with pytest.raises(UnknownTestFunction):
        ghconv.fiber_average("cos", square, ghconv.identity_map(square), SQ)


def test_fiber_average_rectangles(rect):
    gaps = []
    for i in (1, 2, 4, 8):
        S = sample(catalog.rectangle(i))
        gaps.append(ghconv.fiber_average("x1x1", S, ghconv.build_approx_map(S, rect), R).gap)
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    # exact integrals differ by 8/(3i), so the gap should track 1/i
    assert gaps[-1] < 0.15 * gaps[0]
