"""Guillemin potential and metric on ``P° x T^n``, and finite samples of ``M_P``.

The torus is ``T^n = (R/Z)^n``, so the Liouville volume of ``M_P`` is ``|P|``.
"""

from __future__ import annotations

import io
import itertools
import json
import math
import struct
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import dijkstra
from scipy.spatial import cKDTree

from . import kernels
from .delzant import DelzantPolytope, require_delzant
from .errors import BadConfig, BoundaryOrExterior, TooLarge
from .lattice import as_fraction
from .polytope import AnyPolytope, HPolytope, as_h, from_json, grid_cells, moments, to_json

MAX_NODES = 200_000
MAX_DENSE = 6000
SAMPLE_MAGIC = b"TGHSMPL\x00"
SAMPLE_VERSION = 1


@dataclass(frozen=True, eq=False)
class GuilleminChart:
    polytope: DelzantPolytope
    normals: np.ndarray
    offsets: np.ndarray

    @property
    def dim(self) -> int:
        return self.polytope.dim

    @property
    def base(self) -> HPolytope:
        return self.polytope.base

    def forms(self, X) -> np.ndarray:
        """Affine forms ``l_r(x)`` (one column per facet)."""
        return np.atleast_2d(np.asarray(X, dtype=float)) @ self.normals.T - self.offsets

    def require_interior(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.dim:
            raise BoundaryOrExterior(f"point dimension {X.shape[1]} != {self.dim}")
        if not np.all(self.forms(X) > 0):
            raise BoundaryOrExterior("point not in the interior of P")
        return X


def make_chart(P: AnyPolytope | DelzantPolytope) -> GuilleminChart:
    D = require_delzant(P)
    return GuilleminChart(D, D.base.normal_matrix, D.base.offset_vector)


def _chart(c) -> GuilleminChart:
    return c if isinstance(c, GuilleminChart) else make_chart(c)


def potential(chart, x) -> float:
    """``(1/2) sum_r l_r(x) log l_r(x)``."""
    chart = _chart(chart)
    X = chart.require_interior(x)
    L = chart.forms(X)[0]
    return float(0.5 * np.sum(L * np.log(L)))


@dataclass(frozen=True)
class MetricTensor:
    G: np.ndarray
    G_inv: np.ndarray
    x: np.ndarray

    def is_positive_definite(self) -> bool:
        try:
            np.linalg.cholesky(self.G)
            return True
        except np.linalg.LinAlgError:
            return False


def hessian(chart, x) -> MetricTensor:
    """Closed form ``(1/2) sum_r nu_r nu_r^T / l_r(x)``."""
    chart = _chart(chart)
    X = chart.require_interior(x)
    G = kernels.hessians(X, chart.normals, chart.offsets)[0]
    return MetricTensor(G, np.linalg.inv(G), X[0])


def hessians(chart, X) -> np.ndarray:
    chart = _chart(chart)
    X = chart.require_interior(X)
    return kernels.hessians(X, chart.normals, chart.offsets)


def wrap_fiber(dy: np.ndarray) -> np.ndarray:
    """Shortest representative of a torus displacement in ``[-1/2, 1/2)``."""
    return dy - np.floor(dy + 0.5)


def metric_length(chart, path) -> float:
    """Length of a polyline in ``P° x T^n`` with the metric frozen at segment midpoints.

    ``path`` has shape ``(k, 2n)``: base coordinates then fiber coordinates.
    """
    chart = _chart(chart)
    path = np.atleast_2d(np.asarray(path, dtype=float))
    n = chart.dim
    if len(path) < 2:
        return 0.0
    X, Y = path[:, :n], path[:, n:]
    chart.require_interior(X)
    mid = 0.5 * (X[1:] + X[:-1])
    dx = X[1:] - X[:-1]
    dy = wrap_fiber(Y[1:] - Y[:-1])
    return float(kernels.segment_lengths(mid, dx, dy, chart.normals, chart.offsets).sum())


def orbit_volume(chart, x) -> float:
    """Volume of the flat torus ``{x} x T^n`` with metric ``G^-1``: ``det(G)^(-1/2)``."""
    T = hessian(chart, x)
    return float(1.0 / math.sqrt(np.linalg.det(T.G)))


def collar_length(chart, x, vertex, order: int = 48) -> float:
    """Metric length of the straight base segment from interior ``x`` to a vertex.

    The integrand blows up like ``1/sqrt(dist)`` at the vertex; the
    substitution ``s = 1 - tau^2`` removes the singularity before Gauss-Legendre.
    """
    chart = _chart(chart)
    x = np.asarray(x, dtype=float)
    v = np.asarray(vertex, dtype=float)
    g, w = np.polynomial.legendre.leggauss(order)
    tau = (g + 1) / 2
    w = w / 2
    s = 1 - tau**2
    pts = x + s[:, None] * (v - x)
    d = np.broadcast_to(v - x, pts.shape)
    speed = kernels.segment_lengths(pts, np.ascontiguousarray(d), np.zeros_like(pts), chart.normals, chart.offsets)
    return float(np.sum(w * speed * 2 * tau))


def fixed_points(P: AnyPolytope | DelzantPolytope) -> tuple[tuple, int]:
    """Torus fixed points (their moment images are the vertices) and ``chi(M_P)``."""
    D = require_delzant(P)
    return D.base.vertices, len(D.base.vertices)


# ---------------------------------------------------------------------------
# finite samples


@dataclass(eq=False)
class ToricManifoldSample:
    """Graph approximation of ``(M_P, d, vol)``.

    Nodes ``b * F + f`` pair base grid point ``b`` (inside the inset ``P_delta``)
    with fiber lattice point ``f`` (``F = m^n`` points ``j/m``); the last
    ``V`` nodes are the torus fixed points over the vertices of ``P``.
    """

    chart: GuilleminChart
    h: Fraction
    delta: Fraction
    torus_res: int
    seed: int
    base_points: np.ndarray
    base_weights_exact: tuple[Fraction, ...]
    vertex_points: np.ndarray
    graph: sparse.csr_matrix
    stencil_scale: float

    @property
    def dim(self) -> int:
        return self.chart.dim

    @property
    def polytope(self) -> HPolytope:
        return self.chart.base

    @property
    def n_base(self) -> int:
        return len(self.base_points)

    @property
    def n_fiber(self) -> int:
        return self.torus_res**self.dim

    @property
    def n_vertices(self) -> int:
        return len(self.vertex_points)

    @property
    def n_nodes(self) -> int:
        return self.n_base * self.n_fiber + self.n_vertices

    @property
    def vertex_nodes(self) -> np.ndarray:
        return np.arange(self.n_base * self.n_fiber, self.n_nodes)

    @cached_property
    def fiber_index(self) -> np.ndarray:
        return np.array(list(itertools.product(range(self.torus_res), repeat=self.dim)), dtype=np.int64).reshape(
            -1, self.dim
        )

    @cached_property
    def moment(self) -> np.ndarray:
        """Moment-map value of every node."""
        base = np.repeat(self.base_points, self.n_fiber, axis=0)
        return np.concatenate([base, self.vertex_points], axis=0)

    @cached_property
    def fiber_coords(self) -> np.ndarray:
        fib = np.tile(self.fiber_index, (self.n_base, 1)) / self.torus_res
        return np.concatenate([fib, np.zeros((self.n_vertices, self.dim))], axis=0)

    @cached_property
    def base_weights(self) -> np.ndarray:
        return np.array([float(w) for w in self.base_weights_exact])

    @cached_property
    def measure(self) -> np.ndarray:
        """Liouville node weights: base cell volume times ``1/m^n``; fixed points carry none."""
        m = np.repeat(self.base_weights / self.n_fiber, self.n_fiber)
        return np.concatenate([m, np.zeros(self.n_vertices)])

    @property
    def total_measure_exact(self) -> Fraction:
        return sum(self.base_weights_exact, Fraction(0))

    def node(self, base: int, fiber: int) -> int:
        return base * self.n_fiber + fiber

    def fiber_position(self, j: Sequence[int]) -> int:
        m = self.torus_res
        out = 0
        for c in j:
            out = out * m + int(c) % m
        return out

    def shift_permutation(self, shift: Sequence[int]) -> np.ndarray:
        """Node permutation of the torus element ``shift / m``; fixed points stay put."""
        m = self.torus_res
        new = (self.fiber_index + np.asarray(shift, dtype=np.int64)) % m
        pos = np.zeros(len(new), dtype=np.int64)
        for k in range(self.dim):
            pos = pos * m + new[:, k]
        base = np.arange(self.n_base)[:, None] * self.n_fiber
        perm = (base + pos[None, :]).ravel()
        return np.concatenate([perm, self.vertex_nodes])

    def generators(self) -> list[np.ndarray]:
        return [tuple(int(i == k) for i in range(self.dim)) for k in range(self.dim)]

    @cached_property
    def _dense(self) -> np.ndarray:
        if self.n_nodes > MAX_DENSE:
            raise TooLarge(f"{self.n_nodes} nodes exceed the dense distance cap {MAX_DENSE}")
        # the graph is invariant under fiber shifts, so one source per orbit suffices:
        # d(s_f(b, 0), y) = d((b, 0), s_-f(y))
        B, F, m = self.n_base, self.n_fiber, self.torus_res
        reps = np.concatenate([np.arange(B) * F, self.vertex_nodes])
        R = dijkstra(self.graph, directed=False, indices=reps)
        D = np.empty((self.n_nodes, self.n_nodes))
        D[B * F :] = R[B:]
        for f, J in enumerate(self.fiber_index):
            D[f : B * F : F] = R[:B][:, self.shift_permutation((-J) % m)]
        return np.minimum(D, D.T)

    def distance_matrix(self) -> np.ndarray:
        return self._dense

    def distances_from(self, sources) -> np.ndarray:
        if "_dense" in self.__dict__:
            return self._dense[np.asarray(sources)]
        return dijkstra(self.graph, directed=False, indices=np.asarray(sources))

    def diameter(self) -> float:
        return float(self.distance_matrix().max())

    def vertex_distance(self, i: int, j: int) -> float:
        """Graph distance between the fixed points over vertices ``i`` and ``j``."""
        a, b = self.vertex_nodes[i], self.vertex_nodes[j]
        return float(self.distances_from([a])[0, b])

    @cached_property
    def fiber_resolution(self) -> float:
        """Metric length of one fiber step ``1/m`` at the barycenter (largest axis)."""
        b, _ = moments(self.polytope)
        T = hessian(self.chart, [float(c) for c in b])
        return float(np.sqrt(np.diag(T.G_inv)).max() / self.torus_res)

    def orbit_diameters(self) -> np.ndarray:
        """Diameter of each torus orbit (fiber column); zero at fixed points."""
        D = self.distance_matrix()
        od = kernels.orbit_diameters(D, self.n_base, self.n_fiber)
        return np.concatenate([np.repeat(od, self.n_fiber), np.zeros(self.n_vertices)])

    # -- serialisation

    def to_bytes(self) -> bytes:
        g = self.graph.tocsr()
        meta = {
            "polytope": to_json(self.polytope),
            "h": str(self.h),
            "delta": str(self.delta),
            "torus_res": self.torus_res,
            "seed": self.seed,
            "n_base": self.n_base,
            "n_vertices": self.n_vertices,
            "dim": self.dim,
            "nnz": int(g.nnz),
            "stencil_scale": self.stencil_scale,
            "base_weights": [str(w) for w in self.base_weights_exact],
        }
        mb = json.dumps(meta, sort_keys=True).encode()
        buf = io.BytesIO()
        buf.write(SAMPLE_MAGIC)
        buf.write(struct.pack("<II", SAMPLE_VERSION, len(mb)))
        buf.write(mb)
        for arr, dt in (
            (self.base_points, "<f8"),
            (self.vertex_points, "<f8"),
            (g.indptr, "<i8"),
            (g.indices, "<i8"),
            (g.data, "<f8"),
            (self.measure, "<f8"),
        ):
            buf.write(np.ascontiguousarray(arr, dtype=dt).tobytes())
        return buf.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "ToricManifoldSample":
        if data[:8] != SAMPLE_MAGIC:
            raise BadConfig("not a toricgh sample file")
        version, mlen = struct.unpack("<II", data[8:16])
        if version != SAMPLE_VERSION:
            raise BadConfig(f"unsupported sample version {version}")
        meta = json.loads(data[16 : 16 + mlen])
        off = 16 + mlen
        n, B, V, nnz = meta["dim"], meta["n_base"], meta["n_vertices"], meta["nnz"]
        m = meta["torus_res"]
        N = B * m**n + V

        def take(count, dt):
            nonlocal off
            arr = np.frombuffer(data, dtype=dt, count=count, offset=off)
            off += arr.nbytes
            return arr.copy()

        base = take(B * n, "<f8").reshape(B, n)
        verts = take(V * n, "<f8").reshape(V, n)
        indptr = take(N + 1, "<i8")
        indices = take(nnz, "<i8")
        vals = take(nnz, "<f8")
        take(N, "<f8")  # measure is derived from the base weights
        chart = make_chart(from_json(meta["polytope"]))
        graph = sparse.csr_matrix((vals, indices, indptr), shape=(N, N))
        return cls(
            chart,
            Fraction(meta["h"]),
            Fraction(meta["delta"]),
            m,
            meta["seed"],
            base,
            tuple(Fraction(w) for w in meta["base_weights"]),
            verts,
            graph,
            meta["stencil_scale"],
        )


def _inset_nodes(P: HPolytope, h: Fraction, delta: Fraction) -> list[tuple[int, ...]]:
    """Grid indices ``k`` with cell center ``(k + 1/2) h`` at distance >= delta from the boundary."""
    n = P.dim
    V = P.vertices
    lo = [math.floor(min(v[i] for v in V) / h) for i in range(n)]
    hi = [math.ceil(max(v[i] for v in V) / h) for i in range(n)]
    norms2 = [sum(c * c for c in f.normal) for f in P.facets]
    out = []
    for idx in itertools.product(*(range(lo[i], hi[i]) for i in range(n))):
        c = [(k + Fraction(1, 2)) * h for k in idx]
        ok = True
        for f, nn in zip(P.facets, norms2):
            l = f.value(c)
            if l < 0 or l * l < delta * delta * nn:
                ok = False
                break
        if ok:
            out.append(idx)
    return out


def sample_manifold(
    chart,
    grid_h=Fraction(1, 20),
    delta=Fraction(1, 20),
    torus_res: int = 8,
    seed: int = 0,
    max_nodes: int = MAX_NODES,
) -> ToricManifoldSample:
    """Finite metric-measure sample of ``M_P`` with the Guillemin metric.

    Edges join every pair of grid neighbours in the full ``{-1,0,1}^{2n}``
    stencil (base and fiber steps, alone and combined), weighted by the
    midpoint metric length of the straight segment. Each fixed point is
    joined to all nodes over base points within ``sqrt(n) (delta + 2h)`` of
    its vertex by the exact collar length. Base weights are exact clipped
    grid-cell volumes, each cell given to the nearest base node, so the total
    measure is ``|P|`` exactly.
    """
    chart = _chart(chart)
    P = chart.base
    n = P.dim
    h, delta = as_fraction(grid_h), as_fraction(delta)
    m = int(torus_res)
    if h <= 0 or delta <= 0:
        raise BadConfig("grid_h and delta must be positive")
    if h > delta:
        raise BadConfig("grid_h must not exceed delta")
    if m < 2:
        raise BadConfig("torus_res must be >= 2")
    idx = _inset_nodes(P, h, delta)
    if not idx:
        raise BadConfig("no grid point lies in the delta-inset polytope")
    F = m**n
    Vn = len(P.vertices)
    if len(idx) * F + Vn > max_nodes:
        raise TooLarge(f"{len(idx) * F + Vn} nodes exceed cap {max_nodes}")
    hf = float(h)
    base_idx = np.array(idx, dtype=np.int64)
    base_pts = (base_idx + 0.5) * hf
    lookup = {k: i for i, k in enumerate(idx)}
    B = len(idx)

    # exact base weights
    tree = cKDTree(base_pts)
    acc = [Fraction(0)] * B
    for cell in grid_cells(P, h):
        b = lookup.get(cell.index)
        if b is None:
            _, b = tree.query([float(c) for c in cell.centroid])
        acc[int(b)] += cell.volume

    fiber_index = np.array(list(itertools.product(range(m), repeat=n)), dtype=np.int64).reshape(-1, n)

    def fpos(J):
        pos = np.zeros(len(J), dtype=np.int64)
        for k in range(n):
            pos = pos * m + (J[:, k] % m)
        return pos

    rows, cols, vals = [], [], []
    offsets = [o for o in itertools.product((-1, 0, 1), repeat=2 * n) if any(o)]
    offsets = [o for o in offsets if next(c for c in o if c) > 0]
    for o in offsets:
        ob, of = np.array(o[:n]), np.array(o[n:])
        tgt = [lookup.get(tuple(k)) for k in (base_idx + ob).tolist()]
        src = np.array([i for i, t in enumerate(tgt) if t is not None], dtype=np.int64)
        if len(src) == 0:
            continue
        dst = np.array([tgt[i] for i in src], dtype=np.int64)
        mid = 0.5 * (base_pts[src] + base_pts[dst])
        dx = np.broadcast_to(ob * hf, mid.shape).astype(float)
        dy = np.broadcast_to(wrap_fiber(of / m), mid.shape).astype(float)
        w = kernels.segment_lengths(
            np.ascontiguousarray(mid), np.ascontiguousarray(dx), np.ascontiguousarray(dy), chart.normals, chart.offsets
        )
        fsrc = np.arange(F)
        fdst = fpos(fiber_index + of)
        rows.append((src[:, None] * F + fsrc[None, :]).ravel())
        cols.append((dst[:, None] * F + fdst[None, :]).ravel())
        vals.append(np.repeat(w, F))
    stencil_scale = float(max(v.max() for v in vals)) if vals else 0.0

    radius = math.sqrt(n) * float(delta + 2 * h)
    verts = P.vertex_array
    for iv, v in enumerate(verts):
        near = tree.query_ball_point(v, radius)
        for b in sorted(near):
            w = collar_length(chart, base_pts[b], v)
            rows.append(np.full(F, B * F + iv, dtype=np.int64))
            cols.append(b * F + np.arange(F))
            vals.append(np.full(F, w))

    r = np.concatenate(rows)
    c = np.concatenate(cols)
    v = np.concatenate(vals)
    lo_, hi_ = np.minimum(r, c), np.maximum(r, c)
    order = np.lexsort((v, hi_, lo_))
    lo_, hi_, v = lo_[order], hi_[order], v[order]
    first = np.ones(len(lo_), dtype=bool)
    first[1:] = (lo_[1:] != lo_[:-1]) | (hi_[1:] != hi_[:-1])
    lo_, hi_, v = lo_[first], hi_[first], v[first]
    N = B * F + Vn
    graph = sparse.coo_matrix(
        (np.concatenate([v, v]), (np.concatenate([lo_, hi_]), np.concatenate([hi_, lo_]))), shape=(N, N)
    ).tocsr()
    return ToricManifoldSample(chart, h, delta, m, seed, base_pts, tuple(acc), verts, graph, stencil_scale)


def save_sample(sample: ToricManifoldSample, path) -> None:
    with open(path, "wb") as fh:
        fh.write(sample.to_bytes())


def load_sample(path) -> ToricManifoldSample:
    with open(path, "rb") as fh:
        return ToricManifoldSample.from_bytes(fh.read())
