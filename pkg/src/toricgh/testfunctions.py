"""Closed, versioned dictionary of test functions used for weak-convergence checks.

Entries: the constant ``one``, coordinates ``x1..xn``, products ``x{k}x{l}``
(``k <= l``), the squared norm ``sq`` and three Gaussian bumps.
Polynomial entries carry exact integrals; bumps are integrated by quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import UnknownTestFunction
from .polytope import AnyPolytope, integral_monomials, integrate

DICTIONARY_VERSION = 1

# (center coordinate, width): center is c * (1, ..., 1)
_BUMPS = ((0.25, 0.5), (0.75, 0.35), (1.5, 0.75))


@dataclass(frozen=True)
class TestFunction:
    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    # exact Lebesgue integral over a polytope, or None for quadrature-only entries
    exact: Callable[[AnyPolytope], Fraction] | None = None

    __test__ = False  # not a pytest class

    def __call__(self, X: np.ndarray) -> np.ndarray:
        return self.fn(np.atleast_2d(X))

    def integral(self, P: AnyPolytope) -> float:
        """Lebesgue integral over ``P``."""
        if self.exact is not None:
            return float(self.exact(P))
        return integrate(P, self.fn, order=16)


def _coord(k):
    return lambda X: X[:, k]


def _prod(k, l):
    return lambda X: X[:, k] * X[:, l]


def _bump(c, w):
    return lambda X: np.exp(-np.sum((X - c) ** 2, axis=1) / (2 * w * w))


def dictionary(n: int) -> dict[str, TestFunction]:
    out: dict[str, TestFunction] = {}
    out["one"] = TestFunction("one", lambda X: np.ones(len(X)), lambda P: integral_monomials(P)[0])
    for k in range(n):
        out[f"x{k + 1}"] = TestFunction(f"x{k + 1}", _coord(k), lambda P, k=k: integral_monomials(P)[1][k])
    for k in range(n):
        for l in range(k, n):
            name = f"x{k + 1}x{l + 1}"
            out[name] = TestFunction(name, _prod(k, l), lambda P, k=k, l=l: integral_monomials(P)[2][k][l])
    out["sq"] = TestFunction(
        "sq",
        lambda X: np.sum(X * X, axis=1),
        lambda P: sum(integral_monomials(P)[2][k][k] for k in range(n)),
    )
    for i, (c, w) in enumerate(_BUMPS):
        out[f"bump{i + 1}"] = TestFunction(f"bump{i + 1}", _bump(c, w))
    return out


def get(name: str, n: int) -> TestFunction:
    d = dictionary(n)
    if name not in d:
        raise UnknownTestFunction(f"{name!r} not in dictionary v{DICTIONARY_VERSION}: {sorted(d)}")
    return d[name]
