"""Numerical signatures of polytope and equivariant Gromov-Hausdorff convergence.

Face matching and normal stability work on exact polytopes; approximation
maps, distortions, fixed points, reconstruction and fiber averages work on
:class:`~toricgh.guillemin.ToricManifoldSample` graphs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from . import kernels, testfunctions
from .delzant import is_delzant
from .errors import BadConfig, BadK, DimensionMismatch, NormalFanMismatch, NotDelzant
from .guillemin import ToricManifoldSample
from .polytope import AnyPolytope, HPolytope, as_h, diameter, face_measure, faces, point_distances

DEFAULT_MAX_PAIRS = 10**6


# ---------------------------------------------------------------------------
# faces and normals


def _face_gap(P: HPolytope, F, Q: HPolytope, G) -> float:
    """Symmetric Hausdorff distance between two faces (convex: vertex sups suffice)."""
    A = P.vertex_array[list(F.vertices)]
    B = Q.vertex_array[list(G.vertices)]
    return max(_dist_to_face(A, Q, G).max(), _dist_to_face(B, P, F).max())


def _dist_to_face(X: np.ndarray, P: HPolytope, F) -> np.ndarray:
    # nearest point of a face lies in the relative interior of one of its subfaces,
    # where it is the orthogonal projection onto that subface's affine hull
    verts = frozenset(F.vertices)
    best = np.full(len(X), np.inf)
    A, b = P.normal_matrix, P.offset_vector
    V = P.vertex_array
    for k in range(F.dim + 1):
        pool = P.face_lattice[k] if k < P.dim else ()
        cands = [G for G in pool if G <= verts]
        for G in cands:
            ids = sorted(G)
            o = V[ids[0]]
            if k == 0:
                proj = np.broadcast_to(o, X.shape)
            else:
                basis, _, _ = np.linalg.svd((V[ids[1:]] - o).T, full_matrices=False)
                Qb = basis[:, :k]
                proj = o + ((X - o) @ Qb) @ Qb.T
            inside = np.all(proj @ A.T - b >= -1e-9, axis=1)
            # the projection must also satisfy the face's own equalities, which it does by construction
            ok = inside & np.all(np.abs(proj @ A[list(_active(P, verts))].T - b[list(_active(P, verts))]) <= 1e-9, axis=1)
            d = np.linalg.norm(X - proj, axis=1)
            best = np.where(ok & (d < best), d, best)
    return best


def _active(P: HPolytope, verts: frozenset[int]) -> frozenset[int]:
    return frozenset(r for r, fv in enumerate(P.facet_vertices) if verts <= fv)


@dataclass(frozen=True)
class FacePair:
    source: int
    target: int
    gap: float
    measure: float
    essential: bool


@dataclass(frozen=True)
class FaceMatch:
    k: int
    pairs: tuple[FacePair, ...]
    unmatched_source: tuple[int, ...]
    unmatched_target: tuple[int, ...]
    n_source: int
    n_target: int
    tolerance: float
    # facet case only: (source normal, target normal, unit-normal gap, normalised offset gap)
    facet_data: tuple[tuple, ...] = ()

    @property
    def semicontinuity_holds(self) -> bool | None:
        """``#k-faces(P) <= #k-faces(P_i)`` whenever all matched gaps are below tolerance."""
        if not all(p.gap <= self.tolerance for p in self.pairs):
            return None
        return self.n_target <= self.n_source


def face_convergence_report(
    Pi: AnyPolytope, P: AnyPolytope, k: int, tolerance: float = 1.0, essential_fraction: float = 1e-3
) -> FaceMatch:
    """Greedy smallest-gap matching of the k-faces of ``Pi`` to those of ``P``."""
    Pi, P = as_h(Pi), as_h(P)
    if Pi.dim != P.dim:
        raise DimensionMismatch(f"dims {Pi.dim} and {P.dim}")
    if not 0 <= k < P.dim:
        raise BadK(f"k must be in [0, {P.dim - 1}]")
    Fs, Ft = faces(Pi, k), faces(P, k)
    gaps = np.array([[_face_gap(Pi, F, P, G) for G in Ft] for F in Fs])
    threshold = essential_fraction * diameter(P) ** k
    meas = [face_measure(Pi, F) for F in Fs]
    # ties go to the larger source face
    order = sorted((gaps[i, j], -meas[i], i, j) for i in range(len(Fs)) for j in range(len(Ft)))
    used_s, used_t, pairs = set(), set(), []
    for g, _, i, j in order:
        if i in used_s or j in used_t:
            continue
        used_s.add(i)
        used_t.add(j)
        pairs.append(FacePair(i, j, float(g), meas[i], bool(meas[i] >= threshold and g <= tolerance)))
    facet_data = ()
    if k == P.dim - 1:
        rows = []
        for p in pairs:
            fs = Pi.facets[next(iter(Fs[p.source].facets))]
            ft = P.facets[next(iter(Ft[p.target].facets))]
            ns, nt = np.array(fs.normal, float), np.array(ft.normal, float)
            us, ut = ns / np.linalg.norm(ns), nt / np.linalg.norm(nt)
            off = abs(float(fs.offset) / np.linalg.norm(ns) - float(ft.offset) / np.linalg.norm(nt))
            rows.append((fs.normal, ft.normal, float(np.linalg.norm(us - ut)), off))
        facet_data = tuple(rows)
    return FaceMatch(
        k,
        tuple(pairs),
        tuple(i for i in range(len(Fs)) if i not in used_s),
        tuple(j for j in range(len(Ft)) if j not in used_t),
        len(Fs),
        len(Ft),
        tolerance,
        facet_data,
    )


@dataclass(frozen=True)
class NormalTrack:
    facet: int
    normal: tuple[int, ...]
    matched: tuple[tuple[int, ...], ...]
    offsets: tuple[Fraction, ...]
    eventually_constant: bool
    converges_to_limit: bool


@dataclass(frozen=True)
class NormalStabilityReport:
    tracks: tuple[NormalTrack, ...]
    facet_counts: tuple[int, ...]
    limit_facets: int

    @property
    def facet_count_mismatch(self) -> bool:
        return self.facet_counts[-1] != self.limit_facets

    @property
    def stable(self) -> bool:
        return not self.facet_count_mismatch and all(t.eventually_constant and t.converges_to_limit for t in self.tracks)


def normal_stability(sequence: Sequence[AnyPolytope], P: AnyPolytope) -> NormalStabilityReport:
    """Track the primitive normals of the facets of ``P_i`` closest to each facet of ``P``."""
    seq = [as_h(Q) for Q in sequence]
    P = as_h(P)
    for Q in seq + [P]:
        if not is_delzant(Q).passed:
            raise NotDelzant(f"{Q!r} is not Delzant")
    Ft = faces(P, P.dim - 1)
    tracks = []
    for j, G in enumerate(Ft):
        r = next(iter(G.facets))
        normals, offs = [], []
        for Q in seq:
            Fs = faces(Q, Q.dim - 1)
            target = np.asarray(P.facets[r].normal, float)
            target /= np.linalg.norm(target)

            def key(k):
                n = np.asarray(Q.facets[next(iter(Fs[k].facets))].normal, float)
                return (_face_gap(Q, Fs[k], P, G), float(np.linalg.norm(n / np.linalg.norm(n) - target)))

            i = min(range(len(Fs)), key=key)
            f = Q.facets[next(iter(Fs[i].facets))]
            normals.append(f.normal)
            offs.append(f.offset)
        half = normals[len(normals) // 2 :]
        const = all(v == half[0] for v in half)
        tracks.append(NormalTrack(r, P.facets[r].normal, tuple(normals), tuple(offs), const, const and half[0] == P.facets[r].normal))
    return NormalStabilityReport(tuple(tracks), tuple(Q.n_facets for Q in seq), P.n_facets)


# ---------------------------------------------------------------------------
# approximation maps


@dataclass(frozen=True, eq=False)
class ApproxMap:
    source: ToricManifoldSample
    target: ToricManifoldSample
    assign: np.ndarray
    rho: np.ndarray  # integer matrix acting on shift vectors mod m
    tag: str

    def __call__(self, nodes):
        return self.assign[nodes]


def _widths(P: HPolytope) -> np.ndarray:
    return (P.vertex_array @ P.normal_matrix.T - P.offset_vector).max(axis=0)


def _fiber_map(src: ToricManifoldSample, tgt: ToricManifoldSample) -> np.ndarray:
    if src.torus_res == tgt.torus_res:
        return np.arange(src.n_fiber)
    J = np.rint(src.fiber_index * tgt.torus_res / src.torus_res).astype(np.int64) % tgt.torus_res
    pos = np.zeros(len(J), dtype=np.int64)
    for k in range(src.dim):
        pos = pos * tgt.torus_res + J[:, k]
    return pos


def _assemble(src, tgt, base_img, vert_img, tag, rho=None) -> ApproxMap:
    tree = cKDTree(tgt.base_points)
    _, bt = tree.query(base_img)
    fmap = _fiber_map(src, tgt)
    assign = (np.asarray(bt)[:, None] * tgt.n_fiber + fmap[None, :]).ravel()
    vt = cKDTree(tgt.vertex_points)
    _, vv = vt.query(vert_img)
    assign = np.concatenate([assign, tgt.vertex_nodes[np.atleast_1d(vv)]])
    if rho is None:
        rho = np.eye(src.dim, dtype=np.int64)
    return ApproxMap(src, tgt, assign.astype(np.int64), rho, tag)


def build_approx_map(sample_i: ToricManifoldSample, sample: ToricManifoldSample) -> ApproxMap:
    """Chart-affine approximation map between samples with identical normal fans.

    Every source base point is sent to the least-squares solution of
    ``l_r(y) / w_r = l_i^r(x) / w_i^r`` (``w`` the width of the polytope in the
    facet's direction), snapped to the nearest target base node; fibers map
    identically and ``rho`` is the identity.
    """
    Pi, P = sample_i.polytope, sample.polytope
    if Pi.dim != P.dim:
        raise DimensionMismatch(f"dims {Pi.dim} and {P.dim}")
    if Pi.n_facets != P.n_facets:
        raise NormalFanMismatch(f"facet counts {Pi.n_facets} vs {P.n_facets}")
    tnormals = {f.normal: r for r, f in enumerate(P.facets)}
    try:
        perm = [tnormals[f.normal] for f in Pi.facets]
    except KeyError as exc:
        raise NormalFanMismatch(f"normal {exc.args[0]} has no partner in the limit polytope") from None
    wi, w = _widths(Pi), _widths(P)
    A = P.normal_matrix[perm]
    lam = P.offset_vector[perm]
    w = w[perm]

    def image(X):
        U = (X @ Pi.normal_matrix.T - Pi.offset_vector) / wi
        rhs = lam[None, :] + U * w[None, :]
        Y, *_ = np.linalg.lstsq(A, rhs.T, rcond=None)
        return Y.T

    return _assemble(sample_i, sample, image(sample_i.base_points), image(sample_i.vertex_points), "chart-affine")


def greedy_approx_map(sample_i: ToricManifoldSample, sample: ToricManifoldSample) -> ApproxMap:
    """Bounding-box affine map of the moment images, snapped to nearest nodes."""
    Pi, P = sample_i.polytope, sample.polytope
    if Pi.dim != P.dim:
        raise DimensionMismatch(f"dims {Pi.dim} and {P.dim}")
    lo_i, hi_i = Pi.vertex_array.min(axis=0), Pi.vertex_array.max(axis=0)
    lo, hi = P.vertex_array.min(axis=0), P.vertex_array.max(axis=0)

    def image(X):
        return lo + (X - lo_i) * (hi - lo) / (hi_i - lo_i)

    return _assemble(sample_i, sample, image(sample_i.base_points), image(sample_i.vertex_points), "greedy")


def shift_map(sample: ToricManifoldSample, shift: Sequence[int], rho=None) -> ApproxMap:
    """The torus element ``shift / m`` as a self-map of a sample (an exact isometry)."""
    rho = np.eye(sample.dim, dtype=np.int64) if rho is None else np.asarray(rho, dtype=np.int64)
    return ApproxMap(sample, sample, sample.shift_permutation(shift), rho, "shift")


def identity_map(sample: ToricManifoldSample, rho=None) -> ApproxMap:
    return shift_map(sample, [0] * sample.dim, rho)


@dataclass(frozen=True)
class DistortionReport:
    eps_iso: float
    eps_surj: float
    eps_equiv: float
    iso_exhaustive: bool = True

    @property
    def eps(self) -> float:
        return max(self.eps_iso, self.eps_surj, self.eps_equiv)


def eqgh_distortion(
    f: ApproxMap, exhaustive: bool | None = None, max_pairs: int = DEFAULT_MAX_PAIRS, seed: int = 0
) -> DistortionReport:
    """Metric distortion, covering radius and equivariance defect of ``f``.

    Pairs are scanned exhaustively when there are at most ``max_pairs`` of
    them (or ``exhaustive`` is set); otherwise ``max_pairs`` random pairs are
    drawn with a fixed seed and ``eps_iso`` is only a lower bound.
    """
    D1 = f.source.distance_matrix()
    D2 = f.target.distance_matrix()
    N = f.source.n_nodes
    total = N * (N - 1) // 2
    full = exhaustive if exhaustive is not None else total <= max_pairs
    if full:
        iso = kernels.all_pairs_distortion(D1, D2, f.assign)
    else:
        rng = np.random.default_rng(seed)
        I = rng.integers(0, N, size=max_pairs)
        J = rng.integers(0, N, size=max_pairs)
        iso = kernels.pair_distortion(D1, D2, f.assign, I, J)
    surj = kernels.coverage_radius(D2, np.unique(f.assign))
    equiv = 0.0
    m = f.target.torus_res
    for g in f.source.generators():
        ps = f.source.shift_permutation(g)
        pt = f.target.shift_permutation((f.rho @ np.asarray(g)) % m)
        equiv = max(equiv, float(D2[f.assign[ps], pt[f.assign]].max()))
    return DistortionReport(float(iso), float(surj), equiv, bool(full))


@dataclass(frozen=True)
class GHBounds:
    lower: float
    upper: float
    tag: str
    distortion: DistortionReport
    certified: bool  # False when eps_iso came from pair subsampling


def gh_bounds(X: ToricManifoldSample, Y: ToricManifoldSample, max_pairs: int = DEFAULT_MAX_PAIRS) -> GHBounds:
    """Lower bound ``|Diam X - Diam Y| / 2``; upper bound ``(eps_iso + 2 eps_surj) / 2``
    minimised over candidate maps in both directions."""
    lower = abs(X.diameter() - Y.diameter()) / 2
    cands = []
    for a, b in ((X, Y), (Y, X)):
        try:
            cands.append(build_approx_map(a, b))
        except NormalFanMismatch:
            cands.append(greedy_approx_map(a, b))
    best = None
    for f in cands:
        rep = eqgh_distortion(f, max_pairs=max_pairs)
        up = 0.5 * (rep.eps_iso + 2 * rep.eps_surj)
        if best is None or up < best[0]:
            best = (up, f.tag, rep)
    return GHBounds(lower, best[0], best[1], best[2], best[2].iso_exhaustive)


# ---------------------------------------------------------------------------
# fixed points, reconstruction, fiber averages


@dataclass(frozen=True)
class FixedPointRow:
    fp_count: int
    proxy_count: int
    fp_gap: float
    limit_vertices: int

    @property
    def count_ok(self) -> bool:
        return self.fp_count >= self.limit_vertices


@dataclass(frozen=True)
class FixedPointReport:
    rows: tuple[FixedPointRow, ...]

    @property
    def count_inequality_holds(self) -> bool:
        return all(r.count_ok for r in self.rows)


def fixed_point_proxies(sample: ToricManifoldSample) -> tuple[np.ndarray, np.ndarray]:
    """``(exact, near)``.

    ``exact`` are the nodes fixed by the whole shift group. ``near`` adds every
    node over a base point whose orbit diameter is a local minimum among its
    grid neighbours: the places where orbits are as small as the sample can
    resolve them.
    """
    od = sample.orbit_diameters()
    B, F = sample.n_base, sample.n_fiber
    odb = od[: B * F].reshape(B, F).max(axis=1)
    idx = np.rint(sample.base_points / float(sample.h) - 0.5).astype(np.int64)
    tree = cKDTree(idx)
    nbrs = tree.query_ball_point(idx, r=1.0, p=np.inf)
    minima = [b for b in range(B) if all(odb[b] <= odb[c] + 1e-12 for c in nbrs[b])]
    exact = sample.vertex_nodes
    fib = np.arange(F)
    near = np.concatenate([(np.asarray(minima, dtype=np.int64)[:, None] * F + fib).ravel(), exact])
    return exact, near


def fixed_point_tracking(
    family: Sequence[ToricManifoldSample], limit: ToricManifoldSample, maps: Sequence[ApproxMap]
) -> FixedPointReport:
    """Where do (near-)fixed points of each sample land under its approximation map?

    ``fp_gap`` is the largest distance from the image of a near-fixed node to
    the vertex-fiber region of the limit, i.e. the limit's own near-fixed set.
    """
    _, region = fixed_point_proxies(limit)
    dv = limit.distances_from(region).min(axis=0)
    rows = []
    for S, f in zip(family, maps):
        exact, near = fixed_point_proxies(S)
        gap = float(dv[f.assign[near]].max()) if len(near) else 0.0
        rows.append(FixedPointRow(len(exact), len(near), gap, limit.n_vertices))
    return FixedPointReport(tuple(rows))


@dataclass(frozen=True)
class Reconstruction:
    cloud: np.ndarray
    dH_gap: float
    inside_gap: float


def _scan_points(P: HPolytope, h: float) -> np.ndarray:
    pts = [P.vertex_array]
    step = h / 4
    if P.dim == 1:
        lo, hi = P.vertex_array.min(), P.vertex_array.max()
        return np.linspace(lo, hi, max(2, int(math.ceil((hi - lo) / step)) + 1))[:, None]
    for e in faces(P, 1):
        a, b = P.vertex_array[list(e.vertices)]
        k = max(2, int(math.ceil(np.linalg.norm(b - a) / step)) + 1)
        t = np.linspace(0, 1, k)[:, None]
        pts.append(a + t * (b - a))
    lo, hi = P.vertex_array.min(axis=0), P.vertex_array.max(axis=0)
    axes = [np.arange(lo[i], hi[i] + step / 2, step) for i in range(P.dim)]
    G = np.array(list(itertools.product(*axes)))
    inside = np.all(G @ P.normal_matrix.T - P.offset_vector >= 0, axis=1)
    pts.append(G[inside])
    return np.concatenate(pts, axis=0)


def section_nodes(sample: ToricManifoldSample) -> np.ndarray:
    """The section at fiber coordinate zero over every base node, plus the fixed points."""
    return np.concatenate([np.arange(sample.n_base) * sample.n_fiber, sample.vertex_nodes])


def reconstruct_polytope(
    Pi: AnyPolytope, sample_i: ToricManifoldSample, f: ApproxMap, limit: AnyPolytope
) -> Reconstruction:
    """Point cloud ``F_i = mu o f_i o S_i`` over the grid of ``P_i`` and its Hausdorff gap to ``P``."""
    P = as_h(limit)
    nodes = section_nodes(sample_i)
    cloud = np.unique(f.target.moment[f.assign[nodes]], axis=0)
    inside = float(point_distances(cloud, P).max())
    scan = _scan_points(P, float(sample_i.h))
    d, _ = cKDTree(cloud).query(scan)
    return Reconstruction(cloud, max(inside, float(d.max())), inside)


@dataclass(frozen=True)
class FiberAverage:
    name: str
    integral: float  # int_{P_i} phi_i dL
    target: float  # int_P phi dL
    section_integral: float  # int_{P_i} phi o F_i dL
    volume_i: Fraction
    integral_exact: Fraction | None = None

    @property
    def gap(self) -> float:
        return abs(self.integral - self.target)

    @property
    def section_gap(self) -> float:
        return abs(self.integral - self.section_integral) / float(self.volume_i)


def fiber_average(name: str, sample_i: ToricManifoldSample, f: ApproxMap, limit: AnyPolytope) -> FiberAverage:
    """Discrete disintegration: average ``phi(mu(f(x)))`` over each fiber, then
    integrate against the exact base cell volumes of ``P_i``."""
    P = as_h(limit)
    tf = testfunctions.get(name, P.dim)
    B, F = sample_i.n_base, sample_i.n_fiber
    img = f.target.moment[f.assign[: B * F]]
    vals = tf(img).reshape(B, F)
    phi_i = vals.mean(axis=1)
    w = sample_i.base_weights
    integral = float(np.dot(w, phi_i))
    sec = float(np.dot(w, vals[:, 0]))
    exact = None
    if name == "one":
        exact = sample_i.total_measure_exact
        integral = float(exact)
        sec = float(exact)
    return FiberAverage(name, integral, tf.integral(P), sec, sample_i.total_measure_exact, exact)
