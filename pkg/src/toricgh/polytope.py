"""Exact convex polytopes in H- and V-representation.

All combinatorial work (vertex enumeration, redundancy removal, face lattice,
volume and moments) is done in exact rational arithmetic with
:class:`fractions.Fraction`. Metric quantities (diameter, point distances)
are returned as floats.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from . import lattice
from .errors import BadK, Degenerate, DimensionMismatch, Empty, Unbounded
from .lattice import as_fraction

Point = tuple[Fraction, ...]


@dataclass(frozen=True)
class Facet:
    """Half-space ``<x, normal> - offset >= 0`` with a primitive integer normal."""

    normal: tuple[int, ...]
    offset: Fraction

    def value(self, x: Sequence) -> Fraction:
        return sum((as_fraction(a) * b for a, b in zip(x, self.normal)), Fraction(0)) - self.offset

    @classmethod
    def normalized(cls, normal: Sequence, offset) -> "Facet":
        """Scale a rational inequality so the normal becomes primitive integral."""
        fr = [as_fraction(x) for x in normal]
        prim = lattice.primitive(fr)
        # positive scale factor s with prim = s * normal
        k = next(i for i, x in enumerate(fr) if x != 0)
        s = Fraction(prim[k]) / fr[k]
        return cls(prim, as_fraction(offset) * s)


@dataclass(frozen=True)
class Face:
    dim: int
    facets: frozenset[int]
    vertices: tuple[int, ...]


def _affine_dim(points: Sequence[Point]) -> int:
    if not points:
        return -1
    p0 = points[0]
    diffs = [[a - b for a, b in zip(p, p0)] for p in points[1:]]
    return lattice.rank(diffs) if diffs else 0


def _pointed_vertices(normals: list[list[Fraction]], offsets: list[Fraction], n: int) -> list[Point]:
    """Vertices of ``{x : A x >= b}`` for ``A`` of full column rank."""
    found: set[Point] = set()
    m = len(normals)
    for rows in itertools.combinations(range(m), n):
        x = lattice.solve([normals[r] for r in rows], [offsets[r] for r in rows])
        if x is None:
            continue
        pt = tuple(x)
        if pt in found:
            continue
        if all(sum((a * b for a, b in zip(normals[r], pt)), Fraction(0)) >= offsets[r] for r in range(m)):
            found.add(pt)
    return sorted(found)


def _enumerate_vertices(n: int, normals: list[list[Fraction]], offsets: list[Fraction]) -> list[Point]:
    m = len(normals)
    R, piv = lattice.rref(normals) if normals else ([], [])
    if len(piv) < n:
        # Nontrivial lineality space. Feasibility is decided on the pivot columns,
        # which span the same column space.
        if piv:
            reduced = [[row[c] for c in piv] for row in normals]
            if _pointed_vertices(reduced, offsets, len(piv)):
                raise Unbounded("constraint normals do not span R^n")
            raise Empty("infeasible constraint system")
        if all(o <= 0 for o in offsets):
            raise Unbounded("no constraints")
        raise Empty("infeasible constraint system")
    verts = _pointed_vertices(normals, offsets, n)
    if not verts:
        raise Empty("infeasible constraint system")
    # extreme rays of the recession cone are cut out by n-1 independent rows
    for rows in itertools.combinations(range(m), n - 1):
        sub = [normals[r] for r in rows]
        ns = lattice.nullspace(sub, n)
        if len(ns) != 1:
            continue
        d = ns[0]
        for sgn in (1, -1):
            if all(sgn * sum((a * b for a, b in zip(normals[r], d)), Fraction(0)) >= 0 for r in range(m)):
                raise Unbounded("recession cone is nontrivial")
    if _affine_dim(verts) < n:
        raise Degenerate("polytope is not full-dimensional")
    return verts


@dataclass(frozen=True, eq=False)
class HPolytope:
    """Bounded full-dimensional polytope ``{x : <x, nu_r> >= lambda_r for all r}``.

    The constructor normalises every normal to a primitive integer vector,
    drops duplicates and redundant inequalities (keeping the first occurrence
    order) and raises :class:`Unbounded`, :class:`Empty` or :class:`Degenerate`
    on invalid input.
    """

    dim: int
    facets: tuple[Facet, ...]

    def __post_init__(self):
        if self.dim < 1:
            raise Degenerate("dimension must be positive")
        raw = []
        seen = set()
        for f in self.facets:
            if not isinstance(f, Facet):
                f = Facet.normalized(*f)
            else:
                f = Facet.normalized(f.normal, f.offset)
            if len(f.normal) != self.dim:
                raise DimensionMismatch(f"facet normal {f.normal} has wrong length for dim {self.dim}")
            if f not in seen:
                seen.add(f)
                raw.append(f)
        normals = [[Fraction(x) for x in f.normal] for f in raw]
        offsets = [f.offset for f in raw]
        verts = _enumerate_vertices(self.dim, normals, offsets)
        keep = []
        for f in raw:
            tight = [v for v in verts if f.value(v) == 0]
            if _affine_dim(tight) == self.dim - 1:
                keep.append(f)
        object.__setattr__(self, "facets", tuple(keep))
        object.__setattr__(self, "_verts", tuple(verts))

    @classmethod
    def from_inequalities(cls, normals: Iterable[Sequence], offsets: Iterable) -> "HPolytope":
        normals = [tuple(v) for v in normals]
        pairs = [Facet.normalized(v, o) for v, o in zip(normals, offsets)]
        if not normals:
            raise Degenerate("no inequalities")
        return cls(len(normals[0]), tuple(pairs))

    @classmethod
    def box(cls, lower: Sequence, upper: Sequence) -> "HPolytope":
        n = len(lower)
        facets = []
        for i in range(n):
            e = [0] * n
            e[i] = 1
            facets.append(Facet(tuple(e), as_fraction(lower[i])))
        for i in range(n):
            e = [0] * n
            e[i] = -1
            facets.append(Facet(tuple(e), -as_fraction(upper[i])))
        return cls(n, tuple(facets))

    # -- equality is as point sets
    def __eq__(self, other):
        if not isinstance(other, HPolytope):
            return NotImplemented
        return self.dim == other.dim and set(self.facets) == set(other.facets)

    def __hash__(self):
        return hash((self.dim, frozenset(self.facets)))

    def __repr__(self):
        fs = ", ".join(f"{f.normal}>={f.offset}" for f in self.facets)
        return f"HPolytope(dim={self.dim}, [{fs}])"

    @property
    def vertices(self) -> tuple[Point, ...]:
        """Vertices in lexicographic order."""
        return self._verts

    @property
    def n_facets(self) -> int:
        return len(self.facets)

    @cached_property
    def normal_matrix(self) -> np.ndarray:
        return np.array([f.normal for f in self.facets], dtype=float)

    @cached_property
    def offset_vector(self) -> np.ndarray:
        return np.array([float(f.offset) for f in self.facets])

    @cached_property
    def vertex_array(self) -> np.ndarray:
        return np.array([[float(c) for c in v] for v in self.vertices])

    @cached_property
    def facet_vertices(self) -> tuple[frozenset[int], ...]:
        return tuple(
            frozenset(i for i, v in enumerate(self.vertices) if f.value(v) == 0) for f in self.facets
        )

    @cached_property
    def vertex_facets(self) -> tuple[frozenset[int], ...]:
        return tuple(
            frozenset(r for r, fv in enumerate(self.facet_vertices) if i in fv)
            for i in range(len(self.vertices))
        )

    def contains(self, x: Sequence) -> bool:
        """Exact membership test for rational points."""
        return all(f.value(x) >= 0 for f in self.facets)

    def _face_dim(self, ids: frozenset[int]) -> int:
        return _affine_dim([self.vertices[i] for i in sorted(ids)])

    @cached_property
    def face_lattice(self) -> dict[int, tuple[frozenset[int], ...]]:
        """Proper faces by dimension, each as a set of vertex indices."""
        n = self.dim
        levels: dict[int, list[frozenset[int]]] = {n - 1: list(dict.fromkeys(self.facet_vertices))}
        for k in range(n - 1, 0, -1):
            nxt: list[frozenset[int]] = []
            seen = set()
            for F in levels[k]:
                for fv in self.facet_vertices:
                    G = F & fv
                    if G and G != F and G not in seen and self._face_dim(G) == k - 1:
                        seen.add(G)
                        nxt.append(G)
            levels[k - 1] = nxt
        return {k: tuple(sorted(v, key=sorted)) for k, v in levels.items()}

    def _subfaces(self, F: frozenset[int], k: int) -> list[frozenset[int]]:
        out = []
        for fv in self.facet_vertices:
            G = F & fv
            if G and G != F and G not in out and self._face_dim(G) == k - 1:
                out.append(G)
        return out

    @cached_property
    def triangulation(self) -> tuple[tuple[int, ...], ...]:
        """Fan triangulation from the lexicographically smallest vertex, recursively."""

        def tri(F: frozenset[int], k: int) -> list[tuple[int, ...]]:
            if k == 0:
                return [(min(F),)]
            apex = min(F)  # vertices are stored lex-sorted
            out = []
            for G in self._subfaces(F, k):
                if apex in G:
                    continue
                out.extend((apex,) + s for s in tri(G, k - 1))
            return out

        return tuple(tri(frozenset(range(len(self.vertices))), self.dim))

    @cached_property
    def _face_projectors(self) -> list[tuple[np.ndarray, np.ndarray]]:
        out = []
        V = self.vertex_array
        for k in range(self.dim):
            for F in self.face_lattice[k]:
                ids = sorted(F)
                o = V[ids[0]]
                if k == 0:
                    out.append((o, np.zeros((self.dim, 0))))
                    continue
                D = (V[ids[1:]] - o).T
                basis, _, _ = np.linalg.svd(D, full_matrices=False)
                out.append((o, basis[:, :k]))
        return out


@dataclass(frozen=True, eq=False)
class VPolytope:
    """Convex hull of finitely many rational points, reduced to its vertices."""

    dim: int
    vertices: tuple[Point, ...]

    def __post_init__(self):
        pts = sorted({tuple(as_fraction(c) for c in p) for p in self.vertices})
        if any(len(p) != self.dim for p in pts):
            raise DimensionMismatch("point has wrong dimension")
        if _affine_dim(pts) < self.dim:
            raise Degenerate("points do not span a full-dimensional polytope")
        H = _hull_facets(self.dim, pts)
        object.__setattr__(self, "vertices", H.vertices)
        object.__setattr__(self, "_h", H)

    @classmethod
    def from_points(cls, points: Iterable[Sequence]) -> "VPolytope":
        pts = [tuple(p) for p in points]
        if not pts:
            raise Degenerate("no points")
        return cls(len(pts[0]), tuple(pts))

    def __eq__(self, other):
        if not isinstance(other, VPolytope):
            return NotImplemented
        return self.dim == other.dim and self.vertices == other.vertices

    def __hash__(self):
        return hash((self.dim, self.vertices))


AnyPolytope = HPolytope | VPolytope


def as_h(P: AnyPolytope) -> HPolytope:
    if isinstance(P, HPolytope):
        return P
    if isinstance(P, VPolytope):
        return P._h
    raise TypeError(f"not a polytope: {P!r}")


def _hull_facets(n: int, pts: list[Point]) -> HPolytope:
    cands: dict[Facet, None] = {}
    if n == 1:
        lo, hi = min(pts)[0], max(pts)[0]
        return HPolytope(1, (Facet((1,), lo), Facet((-1,), -hi)))
    for combo in itertools.combinations(range(len(pts)), n):
        p0 = pts[combo[0]]
        diffs = [[a - b for a, b in zip(pts[i], p0)] for i in combo[1:]]
        ns = lattice.nullspace(diffs, n)
        if len(ns) != 1:
            continue
        nu = lattice.primitive(ns[0])
        lam = sum((a * b for a, b in zip(nu, p0)), Fraction(0))
        vals = [sum((a * b for a, b in zip(nu, p)), Fraction(0)) - lam for p in pts]
        if all(v >= 0 for v in vals):
            cands[Facet(nu, lam)] = None
        elif all(v <= 0 for v in vals):
            cands[Facet(tuple(-x for x in nu), -lam)] = None
    facets = sorted(cands, key=lambda f: (f.normal, f.offset), reverse=True)
    return HPolytope(n, tuple(facets))


# ---------------------------------------------------------------------------
# Operations


def vertex_enumeration(P: HPolytope) -> VPolytope:
    P = as_h(P)
    return VPolytope(P.dim, P.vertices)


def halfspace_reconstruction(V: VPolytope | Iterable[Sequence]) -> HPolytope:
    """Irredundant H-representation with primitive normals, facets sorted descending."""
    if isinstance(V, VPolytope):
        pts = list(V.vertices)
        n = V.dim
    else:
        pts = sorted({tuple(as_fraction(c) for c in p) for p in V})
        if not pts:
            raise Degenerate("no points")
        n = len(pts[0])
    if _affine_dim(pts) < n:
        raise Degenerate("affine hull has dimension < n")
    return _hull_facets(n, pts)


def intersect(P: AnyPolytope, Q: AnyPolytope) -> HPolytope:
    P, Q = as_h(P), as_h(Q)
    if P.dim != Q.dim:
        raise DimensionMismatch(f"dims {P.dim} and {Q.dim}")
    try:
        return HPolytope(P.dim, P.facets + Q.facets)
    except Degenerate as exc:
        raise Empty("intersection has empty interior") from exc


def translate(P: AnyPolytope, v: Sequence) -> HPolytope:
    P = as_h(P)
    v = [as_fraction(x) for x in v]
    return HPolytope(
        P.dim,
        tuple(Facet(f.normal, f.offset + sum((a * b for a, b in zip(f.normal, v)), Fraction(0))) for f in P.facets),
    )


def scale(P: AnyPolytope, s) -> HPolytope:
    """Dilation ``s * P`` about the origin for ``s > 0``."""
    P = as_h(P)
    s = as_fraction(s)
    if s <= 0:
        raise ValueError("scale factor must be positive")
    return HPolytope(P.dim, tuple(Facet(f.normal, f.offset * s) for f in P.facets))


def _simplex_det(P: HPolytope, simplex: tuple[int, ...]) -> Fraction:
    v0 = P.vertices[simplex[0]]
    rows = [[a - b for a, b in zip(P.vertices[i], v0)] for i in simplex[1:]]
    return abs(lattice.det(rows))


def volume(P: AnyPolytope) -> Fraction:
    P = as_h(P)
    return sum((_simplex_det(P, s) for s in P.triangulation), Fraction(0)) / math.factorial(P.dim)


def _raw_moments(P: HPolytope) -> tuple[Fraction, list[Fraction], list[list[Fraction]]]:
    n = P.dim
    vol = Fraction(0)
    m1 = [Fraction(0)] * n
    m2 = [[Fraction(0)] * n for _ in range(n)]
    fact = math.factorial(n)
    for s in P.triangulation:
        vs = [P.vertices[i] for i in s]
        w = _simplex_det(P, s) / fact
        tot = [sum(c) for c in zip(*vs)]
        vol += w
        for i in range(n):
            m1[i] += w * tot[i] / (n + 1)
        c = w / ((n + 1) * (n + 2))
        for i in range(n):
            for j in range(n):
                m2[i][j] += c * (sum(v[i] * v[j] for v in vs) + tot[i] * tot[j])
    return vol, m1, m2


def moments(P: AnyPolytope) -> tuple[tuple[Fraction, ...], Fraction]:
    """Exact barycenter and variance ``(1/|P|) int ||x - b||^2``."""
    b, cov = covariance(P)
    return b, sum((cov[i][i] for i in range(len(b))), Fraction(0))


def covariance(P: AnyPolytope) -> tuple[tuple[Fraction, ...], list[list[Fraction]]]:
    """Exact barycenter and covariance matrix of the uniform measure on ``P``."""
    P = as_h(P)
    vol, m1, m2 = _raw_moments(P)
    b = tuple(x / vol for x in m1)
    cov = [[m2[i][j] / vol - b[i] * b[j] for j in range(P.dim)] for i in range(P.dim)]
    return b, cov


def integral_monomials(P: AnyPolytope) -> tuple[Fraction, list[Fraction], list[list[Fraction]]]:
    """``(int 1, int x_i, int x_i x_j)`` over ``P`` with respect to Lebesgue measure."""
    return _raw_moments(as_h(P))


def diameter(P: AnyPolytope) -> float:
    return math.sqrt(float(diameter_squared(P)))


def diameter_squared(P: AnyPolytope) -> Fraction:
    V = as_h(P).vertices
    best = Fraction(0)
    for a, b in itertools.combinations(V, 2):
        d = sum(((x - y) ** 2 for x, y in zip(a, b)), Fraction(0))
        best = max(best, d)
    return best


def point_distances(X: np.ndarray, P: AnyPolytope, tol: float = 1e-12) -> np.ndarray:
    """Euclidean distance from each row of ``X`` to ``P``.

    A point counts as inside when every ``l_r(x) >= -tol``. Otherwise the
    nearest point is the projection onto the affine hull of some face that
    lands inside ``P``; all faces are scanned.
    """
    P = as_h(P)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != P.dim:
        raise DimensionMismatch(f"point has dim {X.shape[1]}, polytope {P.dim}")
    A, b = P.normal_matrix, P.offset_vector
    inside = np.all(X @ A.T - b >= -tol, axis=1)
    out = np.zeros(len(X))
    todo = ~inside
    if not todo.any():
        return out
    Y = X[todo]
    best = np.full(len(Y), np.inf)
    scale = 1.0 + np.abs(P.vertex_array).max()
    for o, Q in P._face_projectors:
        rel = Y - o
        proj = o + (rel @ Q) @ Q.T
        ok = np.all(proj @ A.T - b >= -1e-9 * scale, axis=1)
        d = np.linalg.norm(Y - proj, axis=1)
        best = np.where(ok & (d < best), d, best)
    out[todo] = best
    return out


def point_distance(x: Sequence[float], P: AnyPolytope) -> float:
    return float(point_distances(np.asarray(x, dtype=float)[None, :], P)[0])


def faces(P: AnyPolytope, k: int) -> list[Face]:
    P = as_h(P)
    if not 0 <= k <= P.dim - 1:
        raise BadK(f"k must be in [0, {P.dim - 1}], got {k}")
    out = []
    for F in P.face_lattice[k]:
        active = frozenset(r for r, fv in enumerate(P.facet_vertices) if F <= fv)
        out.append(Face(k, active, tuple(sorted(F))))
    return out


def face_points(P: AnyPolytope, face: Face) -> np.ndarray:
    return as_h(P).vertex_array[list(face.vertices)]


def face_measure(P: AnyPolytope, face: Face) -> float:
    """``k``-dimensional Hausdorff measure of a face."""
    P = as_h(P)
    k = face.dim
    if k == 0:
        return 1.0
    F = frozenset(face.vertices)

    def tri(G: frozenset[int], j: int) -> list[tuple[int, ...]]:
        if j == 0:
            return [(min(G),)]
        apex = min(G)
        res = []
        for H in P._subfaces(G, j):
            if apex not in H:
                res.extend((apex,) + s for s in tri(H, j - 1))
        return res

    V = P.vertex_array
    total = 0.0
    for s in tri(F, k):
        D = V[list(s[1:])] - V[s[0]]
        total += math.sqrt(max(np.linalg.det(D @ D.T), 0.0)) / math.factorial(k)
    return total


def symmetric_difference_volume(P: AnyPolytope, Q: AnyPolytope) -> Fraction:
    P, Q = as_h(P), as_h(Q)
    if P.dim != Q.dim:
        raise DimensionMismatch(f"dims {P.dim} and {Q.dim}")
    try:
        common = volume(intersect(P, Q))
    except Empty:
        common = Fraction(0)
    return volume(P) + volume(Q) - 2 * common


# ---------------------------------------------------------------------------
# Grid cells and quadrature


@dataclass(frozen=True)
class Cell:
    index: tuple[int, ...]
    volume: Fraction
    centroid: Point


def _clip_polygon(poly: list[tuple[Fraction, Fraction]], f: Facet) -> list[tuple[Fraction, Fraction]]:
    out = []
    m = len(poly)
    for i in range(m):
        p, q = poly[i], poly[(i + 1) % m]
        fp, fq = f.value(p), f.value(q)
        if fp >= 0:
            out.append(p)
        if (fp > 0 and fq < 0) or (fp < 0 and fq > 0):
            t = fp / (fp - fq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return out


def _polygon_area_centroid(poly) -> tuple[Fraction, Point]:
    a = Fraction(0)
    cx = Fraction(0)
    cy = Fraction(0)
    m = len(poly)
    for i in range(m):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % m]
        cr = x0 * y1 - x1 * y0
        a += cr
        cx += (x0 + x1) * cr
        cy += (y0 + y1) * cr
    a /= 2
    if a == 0:
        return Fraction(0), (Fraction(0), Fraction(0))
    return a, (cx / (6 * a), cy / (6 * a))


def grid_cells(P: AnyPolytope, h) -> Iterator[Cell]:
    """Exact clipping of the axis grid ``prod [k_i h, (k_i + 1) h]`` against ``P``.

    Yields only cells meeting ``P`` in positive volume, in lexicographic
    order of their integer index.
    """
    P = as_h(P)
    h = as_fraction(h)
    if h <= 0:
        raise ValueError("cell size must be positive")
    n = P.dim
    V = P.vertices
    lo = [math.floor(min(v[i] for v in V) / h) for i in range(n)]
    hi = [math.ceil(max(v[i] for v in V) / h) for i in range(n)]
    A, b = P.normal_matrix, P.offset_vector
    hf = float(h)
    corners = np.array(list(itertools.product((0, 1), repeat=n)), dtype=float)
    full_vol = h**n
    for idx in itertools.product(*(range(lo[i], hi[i]) for i in range(n))):
        base = np.array(idx, dtype=float) * hf
        vals = (base + corners * hf) @ A.T - b
        if np.any(np.all(vals < -1e-9, axis=0)):
            continue
        center = tuple((k * h + h / 2) for k in idx)
        if np.all(vals > 1e-9):
            yield Cell(idx, full_vol, center)
            continue
        if n == 1:
            a = max(idx[0] * h, V[0][0])
            c = min((idx[0] + 1) * h, V[-1][0])
            if c > a:
                yield Cell(idx, c - a, ((a + c) / 2,))
            continue
        if n == 2:
            x0, y0 = idx[0] * h, idx[1] * h
            poly = [(x0, y0), (x0 + h, y0), (x0 + h, y0 + h), (x0, y0 + h)]
            for f in P.facets:
                poly = _clip_polygon(poly, f)
                if len(poly) < 3:
                    break
            if len(poly) < 3:
                continue
            area, cen = _polygon_area_centroid(poly)
            if area > 0:
                yield Cell(idx, area, cen)
            continue
        box = HPolytope.box([k * h for k in idx], [(k + 1) * h for k in idx])
        try:
            piece = intersect(P, box)
        except Empty:
            continue
        bc, _ = moments(piece)
        yield Cell(idx, volume(piece), bc)


def _simplex_rule(n: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Collapsed-coordinate Gauss rule on the unit simplex (barycentric steps)."""
    g, w = np.polynomial.legendre.leggauss(order)
    g = (g + 1) / 2
    w = w / 2
    U = np.array(list(itertools.product(g, repeat=n)))
    W = np.prod(np.array(list(itertools.product(w, repeat=n))), axis=1)
    S = np.cumprod(U, axis=1)
    jac = np.ones(len(U))
    for k in range(n - 1):
        jac *= U[:, k] ** (n - 1 - k)
    return S, W * jac


def integrate(P: AnyPolytope, fn: Callable[[np.ndarray], np.ndarray], order: int = 12) -> float:
    """Lebesgue integral of a smooth vectorised function over ``P``."""
    P = as_h(P)
    n = P.dim
    S, W = _simplex_rule(n, order)
    V = P.vertex_array
    total = 0.0
    for simplex in P.triangulation:
        vs = V[list(simplex)]
        steps = vs[1:] - vs[:-1]
        X = vs[0] + S @ steps
        vol = abs(np.linalg.det(vs[1:] - vs[0]))
        total += vol * float(np.dot(W, fn(X)))
    return total


# ---------------------------------------------------------------------------
# JSON


def _frac_str(x: Fraction) -> str:
    x = as_fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def to_json(P: AnyPolytope, as_vertices: bool = False) -> dict:
    if isinstance(P, VPolytope) or as_vertices:
        return {"dim": P.dim, "vertices": [[_frac_str(c) for c in v] for v in as_h(P).vertices]}
    return {
        "dim": P.dim,
        "facets": [{"normal": list(f.normal), "offset": _frac_str(f.offset)} for f in P.facets],
    }


def from_json(obj: dict | str) -> HPolytope:
    if isinstance(obj, str):
        obj = json.loads(obj)
    n = int(obj["dim"])
    if "facets" in obj:
        facets = tuple(
            Facet.normalized([Fraction(x) for x in f["normal"]], Fraction(str(f["offset"]))) for f in obj["facets"]
        )
        return HPolytope(n, facets)
    if "vertices" in obj:
        pts = [tuple(Fraction(str(c)) for c in v) for v in obj["vertices"]]
        return VPolytope(n, tuple(pts))._h
    raise ValueError("polytope JSON needs 'facets' or 'vertices'")
