"""Delzant verification, the AGL(n, Z) action and the kernel-torus data."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import lattice
from .errors import BadBound, DimensionMismatch, Empty, NotDelzant
from .lattice import as_fraction
from .polytope import (
    AnyPolytope,
    Facet,
    HPolytope,
    as_h,
    covariance,
    faces,
    moments,
    symmetric_difference_volume,
)


@dataclass(frozen=True)
class VertexCertificate:
    vertex: tuple[Fraction, ...]
    edge_dirs: tuple[tuple[int, ...], ...]
    det: int
    simple: bool
    rational: bool
    smooth: bool

    def to_json(self) -> dict:
        return {
            "vertex": [str(c) for c in self.vertex],
            "edge_dirs": [list(d) for d in self.edge_dirs],
            "det": self.det,
            "simple": self.simple,
            "rational": self.rational,
            "smooth": self.smooth,
        }


@dataclass(frozen=True)
class DelzantPolytope:
    base: HPolytope
    certificates: tuple[VertexCertificate, ...]

    @property
    def dim(self) -> int:
        return self.base.dim


@dataclass(frozen=True)
class DelzantReport:
    passed: bool
    vertices: tuple[VertexCertificate, ...]
    polytope: DelzantPolytope | None

    @property
    def failures(self) -> list[VertexCertificate]:
        return [c for c in self.vertices if not c.smooth]

    def to_json(self) -> dict:
        return {"passed": self.passed, "vertices": [c.to_json() for c in self.vertices]}


def _edge_neighbors(P: HPolytope) -> dict[int, list[int]]:
    nb: dict[int, list[int]] = {i: [] for i in range(len(P.vertices))}
    if P.dim == 1:
        nb[0].append(1)
        nb[1].append(0)
        return nb
    for e in faces(P, 1):
        a, b = e.vertices
        nb[a].append(b)
        nb[b].append(a)
    return {i: sorted(v) for i, v in nb.items()}


def is_delzant(P: AnyPolytope) -> DelzantReport:
    """Check simplicity, rationality and smoothness at every vertex.

    Edge directions are primitive integer vectors ordered by the index of the
    neighbouring vertex in the lexicographic vertex order; ``det`` is the
    determinant of the matrix with these directions as rows (0 when the vertex
    is not simple).
    """
    P = as_h(P)
    n = P.dim
    nb = _edge_neighbors(P)
    certs = []
    for i, v in enumerate(P.vertices):
        dirs = []
        rational = True
        for j in nb[i]:
            w = P.vertices[j]
            diff = [a - b for a, b in zip(w, v)]
            dirs.append(lattice.primitive(diff))
        simple = len(P.vertex_facets[i]) == n and len(dirs) == n
        d = lattice.integer_det(dirs) if len(dirs) == n else 0
        certs.append(VertexCertificate(v, tuple(dirs), d, simple, rational, simple and abs(d) == 1))
    ok = all(c.smooth for c in certs)
    return DelzantReport(ok, tuple(certs), DelzantPolytope(P, tuple(certs)) if ok else None)


def require_delzant(P: AnyPolytope | DelzantPolytope) -> DelzantPolytope:
    if isinstance(P, DelzantPolytope):
        return P
    rep = is_delzant(P)
    if not rep.passed:
        bad = rep.failures[0]
        raise NotDelzant(f"not Delzant at vertex {tuple(str(c) for c in bad.vertex)} (det {bad.det})")
    return rep.polytope


# ---------------------------------------------------------------------------
# AGL(n, Z)


@dataclass(frozen=True)
class UnimodularAffineMap:
    """``x -> A x + t`` with ``A`` integral and ``|det A| = 1``."""

    A: tuple[tuple[int, ...], ...]
    t: tuple[Fraction, ...]

    def __post_init__(self):
        A = tuple(tuple(int(x) for x in row) for row in self.A)
        t = tuple(as_fraction(x) for x in self.t)
        if len(t) != len(A) or any(len(r) != len(A) for r in A):
            raise DimensionMismatch("A must be square and match t")
        if abs(lattice.integer_det(A)) != 1:
            raise ValueError("matrix is not unimodular")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "t", t)

    @classmethod
    def linear(cls, A) -> "UnimodularAffineMap":
        A = [list(r) for r in np.asarray(A).tolist()]
        return cls(A, (0,) * len(A))

    @classmethod
    def translation(cls, t) -> "UnimodularAffineMap":
        n = len(t)
        return cls([[int(i == j) for j in range(n)] for i in range(n)], t)

    @property
    def dim(self) -> int:
        return len(self.t)

    def __matmul__(self, other: "UnimodularAffineMap") -> "UnimodularAffineMap":
        A = [[sum(self.A[i][k] * other.A[k][j] for k in range(self.dim)) for j in range(self.dim)] for i in range(self.dim)]
        t = [sum(self.A[i][k] * other.t[k] for k in range(self.dim)) + self.t[i] for i in range(self.dim)]
        return UnimodularAffineMap(A, t)

    def inverse(self) -> "UnimodularAffineMap":
        Ai = lattice.inverse(self.A)
        A = [[int(x) for x in row] for row in Ai]
        t = [-sum(Ai[i][k] * self.t[k] for k in range(self.dim)) for i in range(self.dim)]
        return UnimodularAffineMap(A, t)

    def __call__(self, x: Sequence) -> tuple[Fraction, ...]:
        x = [as_fraction(c) for c in x]
        return tuple(sum(self.A[i][k] * x[k] for k in range(self.dim)) + self.t[i] for i in range(self.dim))


def apply_map(P: AnyPolytope, g: UnimodularAffineMap) -> HPolytope:
    """Image ``g(P)``; facet order is preserved."""
    P = as_h(P)
    if P.dim != g.dim:
        raise DimensionMismatch(f"polytope dim {P.dim}, map dim {g.dim}")
    Ainv = lattice.inverse(g.A)
    n = P.dim
    facets = []
    for f in P.facets:
        # <A^-1 (y - t), nu> >= lam  <=>  <y, A^-T nu> >= lam + <t, A^-T nu>
        nu = [sum(Ainv[k][i] * f.normal[k] for k in range(n)) for i in range(n)]
        lam = f.offset + sum((a * b for a, b in zip(g.t, nu)), Fraction(0))
        facets.append(Facet(tuple(int(x) for x in nu), lam))
    return HPolytope(n, tuple(facets))


def corner_cut(P: AnyPolytope, vertex: Sequence, depth) -> HPolytope:
    """Blow up a smooth vertex: add the facet with normal the sum of the
    normals meeting there, cutting at lattice depth ``depth`` (> 0)."""
    P = as_h(P)
    vertex = tuple(as_fraction(c) for c in vertex)
    i = P.vertices.index(vertex)
    rs = sorted(P.vertex_facets[i])
    if len(rs) != P.dim:
        raise NotDelzant("corner cut needs a simple vertex")
    nu = [sum(P.facets[r].normal[k] for r in rs) for k in range(P.dim)]
    lam = sum((P.facets[r].offset for r in rs), Fraction(0)) + as_fraction(depth)
    return HPolytope(P.dim, P.facets + (Facet.normalized(nu, lam),))


# ---------------------------------------------------------------------------
# Delzant construction data


@dataclass(frozen=True)
class ConstructionData:
    n_facets: int
    projection: tuple[tuple[int, ...], ...]  # n x N, columns are facet normals
    offsets: tuple[Fraction, ...]
    kernel_basis: tuple[tuple[int, ...], ...]  # (N - n) rows

    def verify(self) -> bool:
        proj_zero = all(
            sum(row[j] * k[j] for j in range(self.n_facets)) == 0 for k in self.kernel_basis for row in self.projection
        )
        saturated = (not self.kernel_basis) or lattice.elementary_divisors(self.kernel_basis) == [1] * len(self.kernel_basis)
        surjective = lattice.elementary_divisors(self.projection) == [1] * len(self.projection)
        return proj_zero and saturated and surjective


def construction_data(P: DelzantPolytope | AnyPolytope) -> ConstructionData:
    D = require_delzant(P)
    B = D.base
    N, n = B.n_facets, B.dim
    proj = tuple(tuple(f.normal[i] for f in B.facets) for i in range(n))
    K = lattice.integer_kernel(proj)
    return ConstructionData(N, proj, tuple(f.offset for f in B.facets), tuple(tuple(r) for r in K))


# ---------------------------------------------------------------------------
# moduli: minimum variance representatives and D^V upper bounds


@dataclass(frozen=True)
class MinVarianceResult:
    variance: Fraction
    representatives: tuple[HPolytope, ...]
    matrices: tuple[tuple[tuple[int, ...], ...], ...]
    boundary_hit: bool


def _scaled_cov(P: HPolytope) -> tuple[tuple[Fraction, ...], np.ndarray, int]:
    b, cov = covariance(P)
    den = 1
    for row in cov:
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
    S = np.array([[int(x * den) for x in row] for row in cov], dtype=object)
    return b, S, den


def _variances_scaled(mats: np.ndarray, S: np.ndarray) -> list[int]:
    # Var(A P) * den = trace(A S A^T), exact with Python ints
    out = []
    for A in mats.astype(object):
        out.append(int(np.trace(A.dot(S).dot(A.T))))
    return out


def min_variance_representatives(P: AnyPolytope, bound: int = 3) -> MinVarianceResult:
    """All ``g P`` minimising the variance over ``|A_ij| <= bound``, centred at the origin."""
    if bound < 1:
        raise BadBound("search bound must be >= 1")
    P = as_h(P)
    b, S, den = _scaled_cov(P)
    mats = lattice.unimodular_matrices(P.dim, bound)
    vals = _variances_scaled(mats, S)
    best = min(vals)
    reps: dict[HPolytope, None] = {}
    winners = []
    for A, v in zip(mats, vals):
        if v != best:
            continue
        A_int = [[int(x) for x in r] for r in A]
        shift = [-sum(A_int[i][k] * b[k] for k in range(P.dim)) for i in range(P.dim)]
        Q = apply_map(P, UnimodularAffineMap(A_int, shift))
        winners.append(tuple(tuple(r) for r in A_int))
        reps.setdefault(Q, None)
    hit = any(max(abs(x) for r in A for x in r) == bound for A in winners)
    return MinVarianceResult(Fraction(best, den), tuple(reps), tuple(winners), hit)


def _refine_translation(P: HPolytope, Q: HPolytope, A, t0, tol: float) -> Fraction:
    g = UnimodularAffineMap(A, (0,) * P.dim)
    AP = apply_map(P, g)

    def cost(t):
        return symmetric_difference_volume(apply_map(AP, UnimodularAffineMap.translation(t)), Q)

    t = list(t0)
    best = cost(t)
    step = Fraction(1, 4)
    while step >= tol and best > 0:
        improved = False
        for k in range(P.dim):
            for sgn in (1, -1):
                cand = list(t)
                cand[k] += sgn * step
                c = cost(cand)
                if c < best:
                    best, t, improved = c, cand, True
                    break
        if not improved:
            step /= 2
    return best


def moduli_distance_upper(
    P: AnyPolytope, Q: AnyPolytope, bound: int = 3, refine_top: int = 3, tol: float = 1e-9
) -> float:
    """Upper bound on the moduli distance ``inf_g d^V(g P, Q)``.

    Matrices are scanned shell by shell (largest entry = 1, 2, ..., bound);
    within each shell the barycenter-aligned candidates are ranked by exact
    ``d^V`` and the best ``refine_top`` are polished by coordinate descent on
    the translation. The running minimum over shells makes the result
    non-increasing in ``bound``.
    """
    if bound < 1:
        raise BadBound("search bound must be >= 1")
    P, Q = as_h(P), as_h(Q)
    if P.dim != Q.dim:
        raise DimensionMismatch(f"dims {P.dim} and {Q.dim}")
    bP, _ = moments(P)
    bQ, _ = moments(Q)
    best = symmetric_difference_volume(P, Q)
    for shell in range(1, bound + 1):
        mats = lattice.unimodular_matrices(P.dim, shell, shell_only=True)
        seeds = []
        for A in mats:
            A_int = [[int(x) for x in r] for r in A]
            t0 = [bQ[i] - sum(A_int[i][k] * bP[k] for k in range(P.dim)) for i in range(P.dim)]
            g = UnimodularAffineMap(A_int, t0)
            seeds.append((symmetric_difference_volume(apply_map(P, g), Q), A_int, t0))
        seeds.sort(key=lambda s: s[0])
        for val, A_int, t0 in seeds[:refine_top]:
            best = min(best, val)
            if best == 0:
                return 0.0
            best = min(best, _refine_translation(P, Q, A_int, t0, tol))
    return float(best)
