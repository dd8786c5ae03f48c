"""Convergence experiments along the built-in polytope families.

Each step ``i`` compares ``P_i`` with the limit polytope ``P`` through the
three polytope distances and through Guillemin samples of both manifolds.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import catalog, ghconv
from .distances import d_hausdorff, d_volume, d_wasserstein
from .errors import BadConfig, NormalFanMismatch
from .guillemin import make_chart, sample_manifold
from .polytope import HPolytope

CSV_SCHEMA_VERSION = 1
PHI_NAMES = ("one", "x1", "x2", "x1x1", "x1x2", "x2x2", "sq", "bump1", "bump2", "bump3")
COLUMNS = (
    "i dH dV dW dW_err facet_count eps_iso eps_surj eps_equiv gh_lower gh_upper fp_count fp_gap reconstruct_gap".split()
    + [f"fiber_gap_phi{k + 1}" for k in range(len(PHI_NAMES))]
)

FAMILIES: dict[str, tuple[Callable[[int], HPolytope], HPolytope]] = {
    "pentagon": (lambda i: catalog.pentagon(Fraction(1, 2**i)), catalog.RECTANGLE),
    "dilation": (catalog.dilation, catalog.UNIT_SQUARE),
    "rectangle": (catalog.rectangle, catalog.RECTANGLE),
}


@dataclass(frozen=True)
class ExperimentConfig:
    family: str
    steps: int = 5
    grid_h: Fraction = Fraction(1, 10)
    delta: Fraction = Fraction(1, 10)
    torus_res: int = 4
    seed: int = 0
    w_h: Fraction = Fraction(1, 20)
    max_pairs: int = ghconv.DEFAULT_MAX_PAIRS
    manifold: bool = True
    ball_radius: float = 4.0
    overrides: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.family not in FAMILIES:
            raise BadConfig(f"unknown family {self.family!r}; choose from {sorted(FAMILIES)}")
        if self.steps < 1:
            raise BadConfig("steps must be >= 1")
        if self.grid_h <= 0 or self.delta <= 0 or self.w_h <= 0 or self.torus_res < 2:
            raise BadConfig("resolutions must be positive and torus_res >= 2")
        if self.ball_radius <= 0:
            raise BadConfig("ball radius must be positive")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    return repr(float(x))


def run_experiment(cfg: ExperimentConfig, progress: Callable[[str], None] | None = None) -> list[dict]:
    """One row per step ``i = 1..steps``; keys are :data:`COLUMNS`."""
    cfg.validate()
    make, P = FAMILIES[cfg.family]
    limit = None
    if cfg.manifold:
        limit = sample_manifold(make_chart(P), cfg.grid_h, cfg.delta, cfg.torus_res, cfg.seed)
    rows = []
    for i in range(1, cfg.steps + 1):
        Pi = make(i)
        if max(math.hypot(*map(float, v)) for v in Pi.vertices) > cfg.ball_radius:
            raise BadConfig(f"step {i} leaves the declared ball of radius {cfg.ball_radius}")
        w = d_wasserstein(Pi, P, h=cfg.w_h)
        row = {
            "i": i,
            "dH": d_hausdorff(Pi, P),
            "dV": d_volume(Pi, P),
            "dW": w.value,
            "dW_err": w.error_bound,
            "facet_count": Pi.n_facets,
        }
        if limit is not None:
            Si = sample_manifold(make_chart(Pi), cfg.grid_h, cfg.delta, cfg.torus_res, cfg.seed)
            try:
                f = ghconv.build_approx_map(Si, limit)
            except NormalFanMismatch:
                f = ghconv.greedy_approx_map(Si, limit)
            rep = ghconv.eqgh_distortion(f, max_pairs=cfg.max_pairs, seed=cfg.seed)
            gb = ghconv.gh_bounds(Si, limit, max_pairs=cfg.max_pairs)
            fp = ghconv.fixed_point_tracking([Si], limit, [f]).rows[0]
            rc = ghconv.reconstruct_polytope(Pi, Si, f, P)
            row.update(
                eps_iso=rep.eps_iso,
                eps_surj=rep.eps_surj,
                eps_equiv=rep.eps_equiv,
                gh_lower=gb.lower,
                gh_upper=gb.upper,
                fp_count=fp.fp_count,
                fp_gap=fp.fp_gap,
                reconstruct_gap=rc.dH_gap,
            )
            for k, name in enumerate(PHI_NAMES):
                row[f"fiber_gap_phi{k + 1}"] = ghconv.fiber_average(name, Si, f, P).gap
        rows.append(row)
        if progress:
            progress(f"{cfg.family} step {i}/{cfg.steps} done")
    return rows


def to_csv(cfg: ExperimentConfig, rows: list[dict]) -> str:
    buf = io.StringIO()
    buf.write(
        f"# toricgh experiment csv v{CSV_SCHEMA_VERSION}; family={cfg.family}; grid_h={_fmt(cfg.grid_h)}; "
        f"delta={_fmt(cfg.delta)}; torus_res={cfg.torus_res}; seed={cfg.seed}; w_h={_fmt(cfg.w_h)}; "
        f"phi=" + ",".join(PHI_NAMES) + "\n"
    )
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(COLUMNS)
    for r in rows:
        wr.writerow([_fmt(r.get(c)) for c in COLUMNS])
    return buf.getvalue()
