"""Built-in polytopes and parametrised families, addressable by name.

Fixed entries live as JSON files under ``data/``; families are generated.
Names may be given on the command line as ``catalog:<name>``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from .delzant import UnimodularAffineMap, apply_map, corner_cut, is_delzant
from .errors import BadConfig
from .lattice import as_fraction, unimodular_matrices
from .polytope import HPolytope, VPolytope, from_json, scale, to_json

RECTANGLE = HPolytope.box([0, 0], [2, 1])
UNIT_SQUARE = HPolytope.box([0, 0], [1, 1])


def pentagon(t) -> HPolytope:
    """``[0,2]x[0,1]`` with the corner ``(2,1)`` cut at lattice depth ``t``."""
    return corner_cut(RECTANGLE, (2, 1), as_fraction(t))


def rectangle(i: int) -> HPolytope:
    """``[0,2] x [0, 1 + 1/i]``."""
    return HPolytope.box([0, 0], [2, 1 + Fraction(1, int(i))])


def dilation(k: int, base: HPolytope = UNIT_SQUARE) -> HPolytope:
    """``(1 + 2^-k) base``."""
    return scale(base, 1 + Fraction(1, 2 ** int(k)))


def segment(length) -> HPolytope:
    return HPolytope.box([0], [as_fraction(length)])


def random_polygon(rng: np.random.Generator, n_points: int = 7, grid: int = 8, extent: int = 2) -> HPolytope:
    """Convex hull of random points on the ``1/grid`` lattice in ``[0, extent]^2``."""
    while True:
        pts = rng.integers(0, grid * extent + 1, size=(n_points, 2))
        if np.linalg.matrix_rank(pts[1:] - pts[0]) == 2:
            return VPolytope.from_points([[Fraction(int(c), grid) for c in p] for p in pts])._h


def random_delzant_polygon(rng: np.random.Generator, cuts: int = 2) -> HPolytope:
    """Square or triangle of random size, blown up at random vertices, then
    moved by a random unimodular map and lattice translation."""
    size = int(rng.integers(2, 4))
    if rng.integers(2):
        P = HPolytope.box([0, 0], [size, size])
    else:
        P = VPolytope.from_points([(0, 0), (size, 0), (0, size)])._h
    for _ in range(cuts):
        v = P.vertices[int(rng.integers(len(P.vertices)))]
        depth = Fraction(1, int(rng.integers(2, 5)))
        while depth > Fraction(1, 64):
            Q = corner_cut(P, v, depth)
            if Q.n_facets == P.n_facets + 1 and len(Q.vertices) == len(P.vertices) + 1:
                P = Q
                break
            depth /= 2
    mats = unimodular_matrices(2, 1)
    A = mats[int(rng.integers(len(mats)))]
    t = [int(c) for c in rng.integers(-2, 3, size=2)]
    P = apply_map(P, UnimodularAffineMap(tuple(map(tuple, A.tolist())), tuple(t)))
    assert is_delzant(P).passed
    return P


def _builtin() -> dict[str, HPolytope]:
    return {
        "square": UNIT_SQUARE,
        "simplex2": VPolytope.from_points([(0, 0), (1, 0), (0, 1)])._h,
        "simplex2x2": VPolytope.from_points([(0, 0), (2, 0), (0, 2)])._h,
        "triangle_bad": VPolytope.from_points([(0, 0), (1, 0), (0, 2)])._h,
        "pentagon_0.5": pentagon(Fraction(1, 2)),
        "rect": RECTANGLE,
        "cube": HPolytope.box([0, 0, 0], [1, 1, 1]),
        "segment_1": segment(1),
        "segment_2": segment(2),
        "segment_8": segment(8),
    }


def names() -> list[str]:
    return sorted(p.stem for p in resources.files(__package__).joinpath("data").iterdir() if p.name.endswith(".json"))


def load(name: str) -> HPolytope:
    """A catalog entry, or a family member such as ``pentagon:1/4``,
    ``rectangle:3`` or ``dilation:2``."""
    if ":" in name:
        fam, arg = name.split(":", 1)
        gens = {"pentagon": lambda a: pentagon(Fraction(a)), "rectangle": lambda a: rectangle(int(a)),
                "dilation": lambda a: dilation(int(a)), "segment": lambda a: segment(Fraction(a))}
        if fam not in gens:
            raise BadConfig(f"unknown family {fam!r}")
        try:
            return gens[fam](arg)
        except (ValueError, ZeroDivisionError) as exc:
            raise BadConfig(f"bad family parameter {arg!r}") from exc
    res = resources.files(__package__).joinpath("data", f"{name}.json")
    if not res.is_file():
        raise BadConfig(f"unknown catalog entry {name!r}; known: {names()}")
    return from_json(res.read_text())


def load_polytope(spec: str) -> HPolytope:
    """Resolve ``catalog:<name>`` or a path to a polytope JSON file."""
    if spec.startswith("catalog:"):
        return load(spec[len("catalog:"):])
    path = Path(spec)
    if not path.is_file():
        # bare catalog names are accepted too, e.g. "square.json"
        stem = path.name[:-5] if path.name.endswith(".json") else path.name
        if stem in names():
            return load(stem)
        raise BadConfig(f"no such file: {spec}")
    try:
        return from_json(path.read_text())
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise BadConfig(f"malformed polytope file {spec}: {exc}") from exc


def write_data(directory: Path) -> None:
    """Regenerate the JSON files shipped in ``data/``."""
    for name, P in _builtin().items():
        (directory / f"{name}.json").write_text(json.dumps(to_json(P), indent=1) + "\n")
