import itertools
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from toricgh import lattice

int_matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(st.lists(st.integers(-6, 6), min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


def matmul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


@given(int_matrices)
def test_smith_normal_form(M):
    D, U, V = lattice.smith_normal_form(M)
    assert matmul(matmul(U, M), V) == D
    assert abs(lattice.integer_det(U)) == 1 and abs(lattice.integer_det(V)) == 1
    diag = [D[i][i] for i in range(min(len(D), len(D[0])))]
    assert all(D[i][j] == 0 for i in range(len(D)) for j in range(len(D[0])) if i != j)
    nz = [d for d in diag if d]
    assert all(d > 0 for d in nz)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert diag[len(nz):] == [0] * (len(diag) - len(nz))


def test_elementary_divisors():
    assert lattice.elementary_divisors([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]) == [2, 6, 12]
    assert lattice.elementary_divisors([[1, 0], [0, -2]]) == [1, 2]


@given(int_matrices)
def test_integer_kernel(M):
    K = lattice.integer_kernel(M)
    n = len(M[0])
    assert len(K) == n - lattice.rank(M)
    for v in K:
        assert all(sum(r[j] * v[j] for j in range(n)) == 0 for r in M)
    if K:
        # the basis is saturated: its maximal minors have gcd 1
        assert lattice.elementary_divisors(K) == [1] * len(K)
        assert K == lattice.hermite_normal_form(K)


def test_kernels_of_projections():
    assert lattice.integer_kernel([[1, 0, -1, 0], [0, 1, 0, -1]]) == [[1, 0, 1, 0], [0, 1, 0, 1]]
    assert lattice.integer_kernel([[1, 0, -1], [0, 1, -1]]) == [[1, 1, 1]]


def test_hermite_normal_form():
    H = lattice.hermite_normal_form([[2, 3], [4, 5]])
    assert H == [[2, 1], [0, 1]] or H == [[1, 0], [0, 2]] or lattice.integer_det(H) in (2, -2)
    assert all(H[i][j] == 0 for i in range(2) for j in range(i))


def test_unimodular_enumeration_matches_brute_force():
    for bound in (1, 2):
        got = lattice.unimodular_matrices(2, bound)
        brute = [
            m for m in itertools.product(range(-bound, bound + 1), repeat=4) if abs(m[0] * m[3] - m[1] * m[2]) == 1
        ]
        assert [tuple(a.ravel()) for a in got] == sorted(brute)
    shell = lattice.unimodular_matrices(2, 2, shell_only=True)
    assert all(np.abs(m).max() == 2 for m in shell)
    assert len(shell) == len(lattice.unimodular_matrices(2, 2)) - len(lattice.unimodular_matrices(2, 1))


def test_rational_helpers():
    assert lattice.as_fraction(0.05) == F(1, 20)
    assert lattice.primitive([F(2, 3), F(4, 3)]) == (1, 2)
    assert lattice.det([[1, 2], [3, 4]]) == -2
    assert lattice.solve([[1, 1], [1, -1]], [2, 0]) == [1, 1]
    assert lattice.solve([[1, 1], [2, 2]], [1, 2]) is None
    assert lattice.inverse([[2, 1], [1, 1]]) == [[1, -1], [-1, 2]]
    with pytest.raises(Exception):
        lattice.inverse([[1, 1], [1, 1]])
