"""Hausdorff, symmetric-difference and L2-Wasserstein distances between polytopes."""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.spatial.distance import cdist

from . import kernels, testfunctions
from .errors import AssumptionViolated, BadConfig, DimensionMismatch, SolverDiverged, TooLarge
from .lattice import as_fraction
from .polytope import (
    AnyPolytope,
    as_h,
    diameter,
    grid_cells,
    point_distances,
    symmetric_difference_volume,
    volume,
)

for _b in ("PYTORCH", "JAX", "TENSORFLOW", "CUPY"):
    os.environ.setdefault(f"POT_BACKEND_DISABLE_{_b}", "1")
from ot.lp import emd  # noqa: E402

log = logging.getLogger(__name__)

DEFAULT_H = Fraction(1, 20)
MAX_SUPPORT = 4000
EXACT_CAP = 4000
ANNEALING = (0.1, 0.03, 0.01, 0.003, 0.001)
SINKHORN_ITERS = 500


def _check_dims(P, Q):
    if as_h(P).dim != as_h(Q).dim:
        raise DimensionMismatch(f"dims {as_h(P).dim} and {as_h(Q).dim}")


# ---------------------------------------------------------------------------
# d^H and d^V


def d_hausdorff(P: AnyPolytope, Q: AnyPolytope) -> float:
    """Hausdorff distance; the sup over a convex polytope is attained at a vertex."""
    P, Q = as_h(P), as_h(Q)
    _check_dims(P, Q)
    a = point_distances(P.vertex_array, Q).max()
    b = point_distances(Q.vertex_array, P).max()
    return float(max(a, b))


def support_function(P: AnyPolytope, U: np.ndarray) -> np.ndarray:
    return (np.atleast_2d(U) @ as_h(P).vertex_array.T).max(axis=1)


def d_volume(P: AnyPolytope, Q: AnyPolytope) -> Fraction:
    """``|P| + |Q| - 2 |P ∩ Q|``, exact."""
    _check_dims(P, Q)
    return symmetric_difference_volume(P, Q)


# ---------------------------------------------------------------------------
# discretisation


@dataclass(frozen=True)
class DiscreteMeasure:
    points: np.ndarray
    weights: np.ndarray
    h: Fraction
    source: object = None

    def __len__(self):
        return len(self.weights)


def discretize(P: AnyPolytope, h=DEFAULT_H, max_support: int = MAX_SUPPORT) -> DiscreteMeasure:
    """Uniform probability measure on ``P`` lumped onto clipped grid cells.

    Each cell ``prod [k h, (k+1) h]`` meeting ``P`` contributes its exact
    clipped volume (divided by ``|P|``) at its clipped centroid.
    """
    P = as_h(P)
    h = as_fraction(h)
    if h <= 0:
        raise BadConfig("h must be positive")
    ext = P.vertex_array.max(axis=0) - P.vertex_array.min(axis=0)
    est = float(np.prod(ext / float(h) + 2))
    if est > 50 * max_support:
        raise TooLarge(f"grid of cell size {h} has ~{est:.0f} cells; cap {max_support}")
    cells = list(grid_cells(P, h))
    if len(cells) > max_support:
        raise TooLarge(f"{len(cells)} support points exceed cap {max_support}; increase h")
    vol = volume(P)
    pts = np.array([[float(c) for c in cell.centroid] for cell in cells])
    w = np.array([float(cell.volume / vol) for cell in cells])
    return DiscreteMeasure(pts, w / w.sum(), h, P)


# ---------------------------------------------------------------------------
# optimal transport


@dataclass(frozen=True)
class TransportPlan:
    rows: np.ndarray
    cols: np.ndarray
    mass: np.ndarray
    cost: float
    row_residual: float
    col_residual: float

    @property
    def max_residual(self) -> float:
        return max(self.row_residual, self.col_residual)

    def dense(self, n1: int, n2: int) -> np.ndarray:
        M = np.zeros((n1, n2))
        M[self.rows, self.cols] = self.mass
        return M


def _plan_from_dense(G: np.ndarray, a, b, C) -> TransportPlan:
    r, c = np.nonzero(G > 0)
    return TransportPlan(
        r,
        c,
        G[r, c],
        float((G * C).sum()),
        float(np.abs(G.sum(axis=1) - a).max()),
        float(np.abs(G.sum(axis=0) - b).max()),
    )


def _round_to_feasible(G, a, b):
    """Project an approximate plan onto the coupling polytope (Altschuler et al.)."""
    rs = G.sum(axis=1)
    G = G * np.minimum(1.0, a / np.where(rs > 0, rs, 1.0))[:, None]
    cs = G.sum(axis=0)
    G = G * np.minimum(1.0, b / np.where(cs > 0, cs, 1.0))[None, :]
    ea = a - G.sum(axis=1)
    eb = b - G.sum(axis=0)
    s = ea.sum()
    if s > 0:
        G = G + np.outer(ea, eb) / s
    return G


def _entropic_value(a, b, C, scale):
    loga, logb = np.log(a), np.log(b)
    f = np.zeros(len(a))
    g = np.zeros(len(b))
    err = np.inf
    eps = scale
    for frac in ANNEALING:
        eps = frac * scale
        f, g, _, err = kernels.sinkhorn_log(C, loga, logb, eps, f, g, SINKHORN_ITERS, 1e-10)
    if not (np.all(np.isfinite(f)) and np.all(np.isfinite(g))) or err > 1e-3:
        raise SolverDiverged(f"Sinkhorn marginal error {err:.3g} after annealing")
    G = np.exp((f[:, None] + g[None, :] - C) / eps)
    with np.errstate(divide="ignore", invalid="ignore"):
        kl = np.where(G > 0, G * np.log(G / np.outer(a, b)), 0.0).sum()
    return float((G * C).sum() + eps * kl), G, err


def solve_ot(a, X, b, Y, solver: str = "exact") -> tuple[float, TransportPlan, float, dict]:
    """Squared-distance OT between two weighted clouds.

    Returns ``(value, plan, solver_gap, info)`` where ``value`` estimates W2 and
    ``solver_gap`` bounds its distance to the exact discrete W2.
    """
    C = cdist(X, Y, "sqeuclidean")
    if solver == "exact":
        G = emd(a, b, C, numItermax=10_000_000)
        plan = _plan_from_dense(G, a, b, C)
        return math.sqrt(max(plan.cost, 0.0)), plan, 0.0, {"solver": "exact"}
    if solver != "entropic":
        raise BadConfig(f"unknown solver {solver!r}")
    scale = max(C.max(), 1e-12)
    ab, G, err = _entropic_value(a, b, C, scale)
    aa, _, _ = _entropic_value(a, a, cdist(X, X, "sqeuclidean"), scale)
    bb, _, _ = _entropic_value(b, b, cdist(Y, Y, "sqeuclidean"), scale)
    divergence = max(ab - 0.5 * (aa + bb), 0.0)
    plan = _plan_from_dense(_round_to_feasible(G, a, b), a, b, C)
    value = math.sqrt(divergence)
    gap = abs(math.sqrt(max(plan.cost, 0.0)) - value)
    return value, plan, gap, {"solver": "entropic", "sinkhorn_err": err}


@dataclass(frozen=True)
class WassersteinResult:
    value: float
    plan: TransportPlan
    error_bound: float
    details: dict = field(default_factory=dict)
    source: DiscreteMeasure | None = None
    target: DiscreteMeasure | None = None


def d_wasserstein(
    P: AnyPolytope,
    Q: AnyPolytope,
    h=DEFAULT_H,
    solver: str = "auto",
    max_support: int = MAX_SUPPORT,
    exact_cap: int = EXACT_CAP,
) -> WassersteinResult:
    """W2 between the uniform probability measures on ``P`` and ``Q``.

    ``error_bound`` = ``2 h sqrt(n)`` (each discretisation moves mass within
    one cell) plus the solver gap.
    """
    P, Q = as_h(P), as_h(Q)
    _check_dims(P, Q)
    mu = discretize(P, h, max_support)
    nu = discretize(Q, h, max_support)
    if solver == "auto":
        solver = "exact" if len(mu) + len(nu) <= exact_cap else "entropic"
    value, plan, gap, info = solve_ot(mu.weights, mu.points, nu.weights, nu.points, solver)
    disc = 2 * float(mu.h) * math.sqrt(P.dim)
    details = dict(info, h=str(mu.h), support=(len(mu), len(nu)), discretization_error=disc, solver_gap=gap,
                   marginal_residual=plan.max_residual)
    return WassersteinResult(value, plan, disc + gap, details, mu, nu)


def wasserstein_upper_bound(P: AnyPolytope, Q: AnyPolytope) -> float:
    """Explicit coupling bound ``2 * 101 * Diam(Q) * sqrt(d^V / min(|P|, |Q|))``.

    Valid under the standing assumption ``Diam(P) <= 100 Diam(Q)``.
    """
    P, Q = as_h(P), as_h(Q)
    _check_dims(P, Q)
    K = diameter(Q)
    if diameter(P) > 100 * K:
        raise AssumptionViolated("Diam(P) exceeds 100 Diam(Q)")
    dv = d_volume(P, Q)
    return 2 * 101 * K * math.sqrt(float(dv / min(volume(P), volume(Q))))


# ---------------------------------------------------------------------------
# Monge maps and weak convergence


@dataclass(frozen=True)
class MongeMap:
    points: np.ndarray
    images: np.ndarray
    weights: np.ndarray
    residual: float  # marginal residual of the underlying plan
    dispersion: float  # sqrt(sum plan_ij |y_j - T(x_i)|^2): zero iff the plan is a map
    h: Fraction

    def displacement(self) -> np.ndarray:
        return self.images - self.points


def monge_map_estimate(P: AnyPolytope, Q: AnyPolytope, h=DEFAULT_H, solver: str = "auto") -> MongeMap:
    """Barycentric projection ``T(x_i) = sum_j plan_ij y_j / sum_j plan_ij``."""
    res = d_wasserstein(P, Q, h, solver)
    mu, nu, plan = res.source, res.target, res.plan
    n1 = len(mu)
    mass = np.bincount(plan.rows, weights=plan.mass, minlength=n1)
    T = np.zeros_like(mu.points)
    for k in range(mu.points.shape[1]):
        T[:, k] = np.bincount(plan.rows, weights=plan.mass * nu.points[plan.cols, k], minlength=n1)
    T /= np.where(mass > 0, mass, 1.0)[:, None]
    spread = float(np.sum(plan.mass * np.sum((nu.points[plan.cols] - T[plan.rows]) ** 2, axis=1)))
    return MongeMap(mu.points, T, mu.weights, plan.max_residual, math.sqrt(spread), mu.h)


@dataclass(frozen=True)
class W2ConvergenceRow:
    index: int
    d_w: float
    d_w_err: float
    discrepancies: dict[str, float]

    @property
    def max_discrepancy(self) -> float:
        return max(self.discrepancies.values())

    def lipschitz_ok(self) -> bool:
        """Coordinates are 1-Lipschitz, so their discrepancy is at most W1 <= W2."""
        return all(
            v <= self.d_w + self.d_w_err + 1e-12 for k, v in self.discrepancies.items() if k[1:].isdigit()
        )


@dataclass(frozen=True)
class W2ConvergenceReport:
    rows: tuple[W2ConvergenceRow, ...]
    ball_radius: float
    dictionary_version: int = testfunctions.DICTIONARY_VERSION

    @property
    def consistent(self) -> bool:
        return all(r.lipschitz_ok() for r in self.rows)


def normalized_integrals(P: AnyPolytope, names: Sequence[str] | None = None) -> dict[str, float]:
    P = as_h(P)
    d = testfunctions.dictionary(P.dim)
    names = list(d) if names is None else list(names)
    vol = volume(P)
    out = {}
    for name in names:
        tf = testfunctions.get(name, P.dim)
        if tf.exact is not None:
            out[name] = float(tf.exact(P) / vol)
        else:
            out[name] = tf.integral(P) / float(vol)
    return out


def w2_convergence_check(
    sequence: Sequence[AnyPolytope],
    Q: AnyPolytope,
    h=DEFAULT_H,
    names: Sequence[str] | None = None,
    solver: str = "auto",
) -> W2ConvergenceReport:
    """d^W(P_i, Q) next to ``|int phi dm_{P_i} - int phi dm_Q|`` for dictionary functions."""
    Q = as_h(Q)
    seq = [as_h(P) for P in sequence]
    for P in seq:
        _check_dims(P, Q)
    target = normalized_integrals(Q, names)
    rows = []
    for i, P in enumerate(seq):
        res = d_wasserstein(P, Q, h, solver)
        vals = normalized_integrals(P, names)
        disc = {k: abs(vals[k] - target[k]) for k in target}
        rows.append(W2ConvergenceRow(i, res.value, res.error_bound, disc))
    radius = max(float(np.linalg.norm(R.vertex_array, axis=1).max()) for R in seq + [Q])
    return W2ConvergenceReport(tuple(rows), radius)
