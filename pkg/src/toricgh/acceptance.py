"""Acceptance suite: eleven property checks with analytic targets.

Each ``criterion_*`` function returns a :class:`CriterionResult`; nothing is
retried or relaxed. ``run_all`` is what ``toricgh reproduce`` executes.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import catalog, ghconv
from .delzant import is_delzant
from .distances import d_hausdorff, d_volume, d_wasserstein, wasserstein_upper_bound
from .errors import NormalFanMismatch
from .guillemin import fixed_points, hessian, make_chart, orbit_volume, potential, sample_manifold
from .polytope import translate, volume

SEED = 20240601


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    checks: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self, timing: bool = True) -> str:
        failed = [k for k, v in self.checks.items() if not v]
        tail = "" if self.passed else f"  failed: {', '.join(failed)}"
        clock = f" ({self.seconds:.1f}s)" if timing else ""
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d} {self.title}{clock}{tail}"


def _finish(number, title, checks, details, t0) -> CriterionResult:
    checks = {k: bool(v) for k, v in checks.items()}
    return CriterionResult(number, title, all(checks.values()), checks, details, time.perf_counter() - t0)


# ---------------------------------------------------------------------------


def criterion_1() -> CriterionResult:
    """Pentagon family against the rectangle: dH, dV exact; dW decreasing and bounded."""
    t0 = time.perf_counter()
    R = catalog.RECTANGLE
    rows = []
    for k in range(1, 9):
        t = Fraction(1, 2**k)
        P = catalog.pentagon(t)
        w = d_wasserstein(P, R)
        rows.append(
            dict(k=k, dH=d_hausdorff(P, R), dV=d_volume(P, R), dW=w.value, err=w.error_bound,
                 bound=wasserstein_upper_bound(P, R), t=t)
        )
    dW = [r["dW"] for r in rows]
    checks = {
        "dH = t/sqrt2": all(abs(r["dH"] - float(r["t"]) / math.sqrt(2)) <= 1e-9 for r in rows),
        "dV = t^2/2": all(r["dV"] == r["t"] ** 2 / 2 for r in rows),
        "dW decreasing": all(b < a for a, b in zip(dW, dW[1:])),
        "dW <= coupling bound": all(r["dW"] - r["err"] <= r["bound"] for r in rows),
        "runtime <= 120s": time.perf_counter() - t0 <= 120,
    }
    return _finish(1, "pentagon family: dH, dV exact, dW monotone", checks, {"rows": rows}, t0)


def criterion_2() -> CriterionResult:
    """Wasserstein oracles: 1D quantile value and translations."""
    t0 = time.perf_counter()
    w = d_wasserstein(catalog.segment(1), catalog.segment(2), h=Fraction(1, 200))
    exact = 1 / math.sqrt(3)
    rng = np.random.default_rng(SEED)
    v = (Fraction(1, 2), Fraction(1, 2))
    trans = []
    for _ in range(3):
        P = catalog.random_polygon(rng)
        r = d_wasserstein(P, translate(P, v))
        trans.append((r.value, 2 * float(Fraction(r.details["h"])) * math.sqrt(2)))
    norm = math.sqrt(0.5)
    checks = {
        "1D within 2%": abs(w.value - exact) <= 0.02 * exact,
        "translation within 2h sqrt(n)": all(abs(val - norm) <= tol for val, tol in trans),
    }
    return _finish(2, "Wasserstein oracle values", checks, {"1d": w.value, "translations": trans}, t0)


def criterion_3() -> CriterionResult:
    t0 = time.perf_counter()
    expect = {"square": True, "simplex2": True, "simplex2x2": True, "triangle_bad": False, "pentagon_0.5": True}
    got, checks = {}, {}
    for name, ok in expect.items():
        rep = is_delzant(catalog.load(name))
        got[name] = rep.to_json()
        checks[f"{name} {'pass' if ok else 'fail'}"] = rep.passed == ok
    bad = is_delzant(catalog.load("triangle_bad"))
    checks["triangle det -2"] = any(c.det == -2 for c in bad.failures)
    return _finish(3, "Delzant verification on the catalog", checks, got, t0)


def _fd_hessian(chart, x, step):
    H = np.zeros((len(x), len(x)))
    E = np.eye(len(x)) * step
    for i in range(len(x)):
        for j in range(len(x)):
            H[i, j] = (
                potential(chart, x + E[i] + E[j])
                - potential(chart, x + E[i] - E[j])
                - potential(chart, x - E[i] + E[j])
                + potential(chart, x - E[i] - E[j])
            ) / (4 * step * step)
    return H


def criterion_4() -> CriterionResult:
    """Hessian against finite differences; 1D geodesic pole to pole equals pi."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(5):
        P = catalog.random_delzant_polygon(rng)
        c = make_chart(P)
        V = P.vertex_array
        done = 0
        while done < 100:
            x = rng.dirichlet(np.ones(len(V))) @ V
            lmin = c.forms(x[None])[0].min()
            if lmin <= 0:
                continue
            done += 1
            G = hessian(c, x).G
            H = _fd_hessian(c, x, 3e-4 * lmin)
            worst = max(worst, float(np.abs(H - G).max() / np.abs(G).max()))
    seg = make_chart(catalog.segment(2))
    geo = []
    for h, m in ((Fraction(1, 25), 16), (Fraction(1, 50), 32), (Fraction(1, 100), 64)):
        S = sample_manifold(seg, h, h, m)
        geo.append(S.vertex_distance(0, 1))
    errs = [abs(g - math.pi) for g in geo]
    checks = {
        "hessian rel err <= 1e-6": worst <= 1e-6,
        "geodesic within 5% at h=1/50": errs[1] <= 0.05 * math.pi,
        "geodesic improves": errs[0] > errs[1] > errs[2],
    }
    return _finish(4, "Guillemin Hessian and 1D geodesic", checks, {"hessian_err": worst, "geodesics": geo}, t0)


def criterion_5() -> CriterionResult:
    t0 = time.perf_counter()
    h = Fraction(1, 10)
    checks, det = {}, {}
    R = catalog.RECTANGLE
    limit = sample_manifold(make_chart(R), h, h, 4)
    for name in ("square", "simplex2x2", "pentagon_0.5", "rect"):
        P = catalog.load(name)
        S = sample_manifold(make_chart(P), h, h, 4)
        det[name] = str(S.total_measure_exact)
        checks[f"{name} measure = |P|"] = S.total_measure_exact == volume(P)
        if P.n_facets == R.n_facets:
            f = ghconv.build_approx_map(S, limit)
        else:
            f = ghconv.greedy_approx_map(S, limit)
        fa = ghconv.fiber_average("one", S, f, R)
        checks[f"{name} phi=1 integral = |P_i|"] = fa.integral_exact == volume(P)
    return _finish(5, "Duistermaat-Heckman mass", checks, det, t0)


def criterion_6() -> CriterionResult:
    """Orbit volume collapses toward every facet of the unit square."""
    t0 = time.perf_counter()
    c = make_chart(catalog.UNIT_SQUARE)
    center = np.array([0.5, 0.5])
    v0 = orbit_volume(c, center)
    dists = np.geomspace(0.5, 1e-4, 40)
    checks, det = {}, {"center": v0}
    for r, f in enumerate(catalog.UNIT_SQUARE.facets):
        nu = np.array(f.normal, float)
        # the point at distance d from facet r along its inward normal through the center
        base = center - (center @ nu - float(f.offset)) * nu
        vals = np.array([orbit_volume(c, base + d * nu) for d in dists])
        tail = vals[-11:]
        checks[f"facet {r} strictly decreasing"] = np.all(np.diff(tail) < 0)
        checks[f"facet {r} below 1e-2 of center"] = vals[-1] < 1e-2 * v0
        det[f"facet {r} ratio at 1e-4"] = vals[-1] / v0
    return _finish(6, "orbit collapse at facets", checks, det, t0)


def _dilation_run(h=Fraction(1, 10), m=4):
    limit = sample_manifold(make_chart(catalog.UNIT_SQUARE), h, h, m)
    rows = []
    for k in range(1, 6):
        S = sample_manifold(make_chart(catalog.dilation(k)), h, h, m)
        rep = ghconv.eqgh_distortion(ghconv.build_approx_map(S, limit))
        gb = ghconv.gh_bounds(S, limit)
        rows.append(dict(k=k, iso=rep.eps_iso, surj=rep.eps_surj, equiv=rep.eps_equiv, lower=gb.lower, upper=gb.upper))
    return limit, rows


def criterion_7() -> CriterionResult:
    """Dilation family: distortions shrink to the grid floor; GH upper bound linear in 2^-k."""
    t0 = time.perf_counter()
    limit, rows = _dilation_run()
    floor = limit.stencil_scale
    checks = {}
    for key in ("iso", "surj", "equiv"):
        seq = [r[key] for r in rows]
        noise = 0.1 * max(seq)
        checks[f"eps_{key} non-increasing (10% noise)"] = all(b <= a + noise for a, b in zip(seq, seq[1:]))
        checks[f"eps_{key} final <= 2 floor"] = seq[-1] <= 2 * floor
    x = np.array([2.0 ** -r["k"] for r in rows])
    up = np.array([r["upper"] for r in rows])
    C = max(0.0, float(np.dot(x, up) / np.dot(x, x)))
    checks["gh_upper <= C 2^-k + 2 grid"] = bool(np.all(up <= C * x + 2 * floor))
    checks["lower <= upper"] = all(r["lower"] <= r["upper"] for r in rows)
    return _finish(7, "equivariant GH convergence of dilations", checks, {"rows": rows, "floor": floor, "C": C}, t0)


def criterion_8() -> CriterionResult:
    t0 = time.perf_counter()
    h = Fraction(1, 10)
    chi = {name: fixed_points(catalog.load(name))[1] for name in ("square", "simplex2", "pentagon_0.5")}
    checks = {"chi square 4": chi["square"] == 4, "chi simplex 3": chi["simplex2"] == 3, "chi pentagon 5": chi["pentagon_0.5"] == 5}
    R = catalog.RECTANGLE
    limit = sample_manifold(make_chart(R), h, h, 4)
    fam = [sample_manifold(make_chart(catalog.pentagon(Fraction(1, 2**k))), h, h, 4) for k in (1, 2, 3)]
    rep = ghconv.fixed_point_tracking(fam, limit, [ghconv.greedy_approx_map(S, limit) for S in fam])
    checks["pentagon proxies 5 >= 4"] = all(r.fp_count == 5 and r.count_ok for r in rep.rows)
    fam = [sample_manifold(make_chart(catalog.rectangle(i)), h, h, 4) for i in (1, 2, 4, 8)]
    rrep = ghconv.fixed_point_tracking(fam, limit, [ghconv.build_approx_map(S, limit) for S in fam])
    checks["rectangle gap <= 2 grid"] = rrep.rows[-1].fp_gap <= 2 * limit.stencil_scale
    det = {"chi": chi, "pentagon": rep.rows, "rectangle": rrep.rows, "grid": limit.stencil_scale}
    return _finish(8, "fixed points and Euler characteristic", checks, det, t0)


def criterion_9() -> CriterionResult:
    t0 = time.perf_counter()
    h = Fraction(1, 10)
    R = catalog.RECTANGLE
    limit = sample_manifold(make_chart(R), h, h, 4)
    rows = []
    for i in (1, 2, 3, 4, 5):
        Pi = catalog.rectangle(i)
        S = sample_manifold(make_chart(Pi), h, h, 4)
        rc = ghconv.reconstruct_polytope(Pi, S, ghconv.build_approx_map(S, limit), R)
        rows.append((i, rc.dH_gap, rc.inside_gap))
    hf = float(h)
    checks = {
        "dH_gap non-increasing": all(b[1] <= a[1] + 1e-12 for a, b in zip(rows, rows[1:])),
        "dH_gap <= 1/i + 2h sqrt2": all(g <= 1 / i + 2 * hf * math.sqrt(2) for i, g, _ in rows),
        "cloud inside P within h sqrt2": all(ins <= hf * math.sqrt(2) for _, _, ins in rows),
    }
    return _finish(9, "reconstruction of shrinking rectangles", checks, {"rows": rows}, t0)


def criterion_10() -> CriterionResult:
    t0 = time.perf_counter()
    h = Fraction(1, 10)
    S = sample_manifold(make_chart(catalog.pentagon(Fraction(1, 4))), h, h, 4)
    T = sample_manifold(make_chart(catalog.RECTANGLE), h, h, 4)
    try:
        ghconv.build_approx_map(S, T)
        raised, msg = False, ""
    except NormalFanMismatch as exc:
        raised, msg = True, str(exc)
    return _finish(10, "pentagon to rectangle raises NormalFanMismatch", {"raised": raised}, {"message": msg}, t0)


def criterion_11() -> CriterionResult:
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED + 11)
    Ps = [catalog.random_polygon(rng) for _ in range(6)]
    n = len(Ps)
    H = np.array([[d_hausdorff(a, b) for b in Ps] for a in Ps])
    V = np.array([[float(d_volume(a, b)) for b in Ps] for a in Ps])
    Vx = [[d_volume(a, b) for b in Ps] for a in Ps]
    W = np.zeros((n, n))
    E = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            r = d_wasserstein(Ps[i], Ps[j])
            W[i, j], E[i, j] = r.value, r.error_bound
    checks = {
        "dH symmetric": np.all(np.abs(H - H.T) <= 1e-9),
        "dV symmetric": all(Vx[i][j] == Vx[j][i] for i in range(n) for j in range(n)),
        "dW symmetric": np.all(np.abs(W - W.T) <= E + E.T),
        "dH identity": np.all(np.abs(np.diag(H)) <= 1e-9),
        "dV identity": all(Vx[i][i] == 0 for i in range(n)),
        "dW identity": np.all(np.diag(W) <= np.diag(E)),
    }
    for name, D, slack in (("dH", H, np.zeros_like(E) + 1e-9), ("dV", V, np.zeros_like(E) + 1e-9), ("dW", W, E)):
        ok = True
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if D[i, k] > D[i, j] + D[j, k] + slack[i, k] + slack[i, j] + slack[j, k]:
                        ok = False
        checks[f"{name} triangle"] = ok
    return _finish(11, "metric axioms on random polygons", checks, {"dH": H.tolist(), "dV": V.tolist(), "dW": W.tolist()}, t0)


CRITERIA: dict[int, Callable[[], CriterionResult]] = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5, 6: criterion_6,
    7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10, 11: criterion_11,
}


def run_all(only=None, progress: Callable[[str], None] | None = None) -> list[CriterionResult]:
    out = []
    for k, fn in CRITERIA.items():
        if only and k not in only:
            continue
        res = fn()
        out.append(res)
        if progress:
            progress(res.line())
    return out
