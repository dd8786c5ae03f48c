"""Command-line entry point: ``toricgh <subcommand> ...``.

Exit status is 0 on success, 1 when an invoked check fails and 2 on bad
input, in which case a JSON error object is written to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, acceptance, catalog, ghconv
from ._accel import set_threads
from .delzant import is_delzant
from .distances import d_hausdorff, d_volume, d_wasserstein
from .errors import BadConfig, ToricGHError
from .experiment import ExperimentConfig, run_experiment, to_csv
from .guillemin import hessian, load_sample, make_chart, orbit_volume, potential, sample_manifold, save_sample


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise BadConfig(message)


def _default(o):
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    if hasattr(o, "__dataclass_fields__"):
        return {k: getattr(o, k) for k in o.__dataclass_fields__}
    return str(o)


def _dump(obj) -> str:
    return json.dumps(obj, default=_default, sort_keys=True, indent=1)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise BadConfig(f"not a number: {text!r}") from exc


def _point(text: str) -> list[float]:
    try:
        return [float(c) for c in text.split(",")]
    except ValueError as exc:
        raise BadConfig(f"bad point {text!r}") from exc


def _emit(args, payload: dict, text: str | None = None) -> None:
    if args.json or text is None:
        print(_dump(payload))
    else:
        print(text)


# ---------------------------------------------------------------------------


def cmd_check(args) -> int:
    P = catalog.load_polytope(args.polytope)
    rep = is_delzant(P)
    lines = [f"delzant: {'pass' if rep.passed else 'fail'}"]
    for c in rep.vertices:
        lines.append(f"  vertex ({', '.join(map(str, c.vertex))}): det {c.det}{'' if c.smooth else '  <-- not smooth'}")
    _emit(args, rep.to_json(), "\n".join(lines))
    return 0 if rep.passed else 1


def cmd_distance(args) -> int:
    A, B = catalog.load_polytope(args.a), catalog.load_polytope(args.b)
    if args.kind == "hausdorff":
        out = {"value": d_hausdorff(A, B), "error_bound": 0.0, "details": {}}
    elif args.kind == "volume":
        v = d_volume(A, B)
        out = {"value": str(v), "error_bound": 0.0, "details": {"float": float(v)}}
    else:
        r = d_wasserstein(A, B, h=_fraction(args.h), solver=args.solver)
        out = {"value": r.value, "error_bound": r.error_bound, "details": r.details}
    _emit(args, out, str(out["value"]))
    return 0


def cmd_guillemin(args) -> int:
    c = make_chart(catalog.load_polytope(args.polytope))
    x = _point(args.at)
    T = hessian(c, x)
    out = {"potential": potential(c, x), "G": T.G, "G_inv": T.G_inv, "orbit_volume": orbit_volume(c, x)}
    _emit(args, out)
    return 0


def cmd_sample(args) -> int:
    c = make_chart(catalog.load_polytope(args.polytope))
    seed = args.seed if args.seed is not None else args.global_seed
    S = sample_manifold(c, _fraction(args.h), _fraction(args.delta), args.torus_res, seed)
    save_sample(S, args.out)
    out = {"nodes": S.n_nodes, "base": S.n_base, "fiber": S.n_fiber, "fixed_points": S.n_vertices,
           "edges": int(S.graph.nnz // 2), "measure": str(S.total_measure_exact), "out": str(args.out)}
    _emit(args, out)
    return 0


def _load_or_sample(spec: str, args):
    if spec.endswith(".bin") and Path(spec).is_file():
        return load_sample(spec)
    c = make_chart(catalog.load_polytope(spec))
    return sample_manifold(c, _fraction(args.h), _fraction(args.delta), args.torus_res, args.global_seed)


def cmd_gh(args) -> int:
    X, Y = _load_or_sample(args.a, args), _load_or_sample(args.b, args)
    b = ghconv.gh_bounds(X, Y, max_pairs=args.max_pairs)
    out = {"lower": b.lower, "upper": b.upper, "map": b.tag, "certified": b.certified,
           "eps_iso": b.distortion.eps_iso, "eps_surj": b.distortion.eps_surj, "eps_equiv": b.distortion.eps_equiv}
    _emit(args, out)
    return 0


def cmd_experiment(args) -> int:
    cfg = ExperimentConfig(
        family=args.family,
        steps=args.steps,
        grid_h=_fraction(args.grid),
        delta=_fraction(args.delta),
        torus_res=args.torus_res,
        seed=args.global_seed,
        w_h=_fraction(args.w_h),
        max_pairs=args.max_pairs,
        manifold=not args.no_manifold,
    )
    text = to_csv(cfg, run_experiment(cfg))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_reproduce(args) -> int:
    only = {int(k) for k in args.only.split(",")} if args.only else None
    if only and not only <= set(acceptance.CRITERIA):
        raise BadConfig(f"criteria are numbered 1..{len(acceptance.CRITERIA)}")
    results = acceptance.run_all(only, progress=lambda line: print(line, file=sys.stderr))
    summary = {
        "version": __version__,
        "passed": all(r.passed for r in results),
        "criteria": [{"number": r.number, "title": r.title, "passed": r.passed, "checks": r.checks} for r in results],
    }
    if args.out:
        Path(args.out).write_text(_dump(summary) + "\n")
    _emit(args, summary, "\n".join(r.line(timing=False) for r in results))
    return 0 if summary["passed"] else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="toricgh", description="Polytope distances, Delzant checks and toric GH experiments.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--threads", type=int, default=0, help="numba worker threads (0 = default)")
    p.add_argument("--seed", dest="global_seed", type=int, default=0)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("check", help="verify the Delzant conditions")
    s.add_argument("--polytope", required=True, help="JSON file or catalog:<name>")
    s.set_defaults(fn=cmd_check)

    s = sub.add_parser("distance", help="d^H, d^V or d^W between two polytopes")
    s.add_argument("--kind", choices=("hausdorff", "volume", "wasserstein"), required=True)
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--h", default="1/20")
    s.add_argument("--solver", choices=("auto", "exact", "entropic"), default="auto")
    s.set_defaults(fn=cmd_distance)

    s = sub.add_parser("guillemin", help="potential, metric and orbit volume at a point")
    s.add_argument("--polytope", required=True)
    s.add_argument("--at", required=True, help="comma separated coordinates")
    s.set_defaults(fn=cmd_guillemin)

    s = sub.add_parser("sample", help="write a graph sample of the toric manifold")
    s.add_argument("--polytope", required=True)
    s.add_argument("--h", default="1/20")
    s.add_argument("--delta", default="1/20")
    s.add_argument("--torus-res", type=int, default=8)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_sample)

    s = sub.add_parser("gh", help="Gromov-Hausdorff bounds between two samples")
    s.add_argument("--a", required=True, help="sample .bin, polytope JSON or catalog:<name>")
    s.add_argument("--b", required=True)
    s.add_argument("--h", default="1/10")
    s.add_argument("--delta", default="1/10")
    s.add_argument("--torus-res", type=int, default=4)
    s.add_argument("--max-pairs", type=int, default=ghconv.DEFAULT_MAX_PAIRS)
    s.set_defaults(fn=cmd_gh)

    s = sub.add_parser("experiment", help="run a convergence family and write CSV")
    s.add_argument("--family", choices=("pentagon", "dilation", "rectangle"), required=True)
    s.add_argument("--steps", type=int, default=5)
    s.add_argument("--grid", default="1/10")
    s.add_argument("--delta", default="1/10")
    s.add_argument("--torus-res", type=int, default=4)
    s.add_argument("--w-h", default="1/20")
    s.add_argument("--max-pairs", type=int, default=ghconv.DEFAULT_MAX_PAIRS)
    s.add_argument("--no-manifold", action="store_true", help="polytope distances only")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_experiment)

    s = sub.add_parser("reproduce", help="run the acceptance suite")
    s.add_argument("--only", help="comma separated criterion numbers")
    s.add_argument("--out", help="write a JSON summary here")
    s.set_defaults(fn=cmd_reproduce)
    return p


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.threads:
            set_threads(args.threads)
        return args.fn(args)
    except ToricGHError as exc:
        print(json.dumps({"error": exc.code, "message": str(exc)}), file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": "bad_input", "message": str(exc)}), file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
