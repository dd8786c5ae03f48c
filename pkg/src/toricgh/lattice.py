"""Exact linear algebra over Q and Z.

Rational matrices are lists of rows of :class:`fractions.Fraction`; integer
matrices are lists of rows of Python ints (arbitrary precision).
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Sequence

import numpy as np

Matrix = list[list]


def as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, float):
        # floats pass through str so 0.05 becomes 1/20, not its binary expansion
        return Fraction(repr(v))
    return Fraction(v)


def rref(rows: Sequence[Sequence[Fraction]]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    A = [[as_fraction(x) for x in r] for r in rows]
    if not A:
        return A, []
    m, n = len(A), len(A[0])
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        p = next((i for i in range(r, m) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(m):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    return A, pivots


def rank(rows) -> int:
    return len(rref(rows)[1])


def solve(A: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """Unique solution of the square system ``A x = b`` or ``None`` if singular."""
    n = len(A)
    if n == 2:
        # hot path for planar vertex enumeration
        a, bb = as_fraction(A[0][0]), as_fraction(A[0][1])
        c, d = as_fraction(A[1][0]), as_fraction(A[1][1])
        det = a * d - bb * c
        if det == 0:
            return None
        r0, r1 = as_fraction(b[0]), as_fraction(b[1])
        return [(r0 * d - bb * r1) / det, (a * r1 - r0 * c) / det]
    aug = [list(row) + [rhs] for row, rhs in zip(A, b)]
    R, piv = rref(aug)
    if len(piv) < n or piv[-1] == n:
        return None
    return [R[i][n] for i in range(n)]


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Basis of the right null space (rational)."""
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    R, piv = rref(rows)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * ncols
        v[fcol] = Fraction(1)
        for i, pc in enumerate(piv):
            v[pc] = -R[i][fcol]
        basis.append(v)
    return basis


def det(A: Sequence[Sequence]) -> Fraction:
    n = len(A)
    if n == 0:
        return Fraction(1)
    if n == 1:
        return as_fraction(A[0][0])
    if n == 2:
        return as_fraction(A[0][0]) * as_fraction(A[1][1]) - as_fraction(A[0][1]) * as_fraction(A[1][0])
    M = [[as_fraction(x) for x in r] for r in A]
    sign = 1
    out = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if M[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            M[c], M[p] = M[p], M[c]
            sign = -sign
        out *= M[c][c]
        for i in range(c + 1, n):
            f = M[i][c] / M[c][c]
            if f:
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return sign * out


def integer_det(A: Sequence[Sequence[int]]) -> int:
    d = det(A)
    assert d.denominator == 1
    return int(d)


def inverse(A: Sequence[Sequence]) -> Matrix:
    n = len(A)
    aug = [list(A[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    R, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in R]


def primitive(v: Sequence) -> tuple[int, ...]:
    """Integer primitive vector positively proportional to a rational vector."""
    fr = [as_fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    if g == 0:
        raise ValueError("zero vector has no primitive direction")
    return tuple(x // g for x in ints)


# ---------------------------------------------------------------------------
# Integer normal forms


def smith_normal_form(M: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Return ``(D, U, V)`` with ``U @ M @ V == D`` and ``U, V`` unimodular.

    ``D`` is diagonal with non-negative entries, each dividing the next.
    """
    A = [[int(x) for x in row] for row in M]
    m = len(A)
    n = len(A[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        A[dst] = [a + q * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for row in A:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            p = A[t][t]
            clean = True
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
                    clean = clean and A[i][t] == 0
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
                    clean = clean and A[t][j] == 0
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
    return A, U, V


def elementary_divisors(M: Sequence[Sequence[int]]) -> list[int]:
    D, _, _ = smith_normal_form(M)
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0)) if D[i][i]]


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> Matrix:
    """Row-style HNF: echelon, positive pivots, entries above pivots in ``[0, pivot)``.

    Zero rows are dropped.
    """
    A = [[int(x) for x in r] for r in rows]
    if not A:
        return []
    m, n = len(A), len(A[0])
    r = 0
    pivots = []
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if A[i][c]]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(A[i][c]))
            A[r], A[p] = A[p], A[r]
            done = True
            for i in range(r + 1, m):
                if A[i][c]:
                    q = A[i][c] // A[r][c]
                    A[i] = [a - q * b for a, b in zip(A[i], A[r])]
                    done = done and A[i][c] == 0
            if done:
                break
        if r < m and A[r][c]:
            if A[r][c] < 0:
                A[r] = [-x for x in A[r]]
            for i in range(r):
                q = A[i][c] // A[r][c]
                if q:
                    A[i] = [a - q * b for a, b in zip(A[i], A[r])]
            pivots.append(c)
            r += 1
    return [row for row in A[:r]]


def integer_kernel(M: Sequence[Sequence[int]]) -> Matrix:
    """Lattice basis of ``ker M ∩ Z^n`` (rows), in Hermite normal form."""
    n = len(M[0])
    D, _, V = smith_normal_form(M)
    r = sum(1 for i in range(min(len(D), n)) if D[i][i])
    basis = [[V[i][j] for i in range(n)] for j in range(r, n)]
    return hermite_normal_form(basis)


# ---------------------------------------------------------------------------
# GL(n, Z) enumeration


def unimodular_matrices(n: int, bound: int, shell_only: bool = False) -> np.ndarray:
    """All ``n x n`` integer matrices with entries in ``[-bound, bound]`` and ``|det| = 1``.

    Rows of the returned ``(k, n, n)`` int64 array are in lexicographic order of
    their flattened entries. With ``shell_only`` only matrices whose largest
    absolute entry equals ``bound`` are returned.
    """
    vals = np.arange(-bound, bound + 1, dtype=np.int64)
    out = []
    # chunk over the first row so memory stays at (2B+1)^(n^2 - n) per chunk
    rest = n * n - n
    tail = np.array(list(itertools.product(vals, repeat=rest)), dtype=np.int64).reshape(-1, rest)
    for first in itertools.product(vals, repeat=n):
        block = np.concatenate([np.broadcast_to(np.array(first), (len(tail), n)), tail], axis=1)
        mats = block.reshape(-1, n, n)
        if n == 2:
            d = mats[:, 0, 0] * mats[:, 1, 1] - mats[:, 0, 1] * mats[:, 1, 0]
        else:
            d = np.rint(np.linalg.det(mats.astype(float))).astype(np.int64)
        keep = np.abs(d) == 1
        if shell_only:
            keep &= np.abs(mats).reshape(len(mats), -1).max(axis=1) == bound
        if keep.any():
            out.append(mats[keep])
    if not out:
        return np.zeros((0, n, n), dtype=np.int64)
    return np.concatenate(out, axis=0)
