from __future__ import annotations

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.matrices.normalforms import smith_normal_form

from fusionlim import gfp
from fusionlim.intlin import Lattice, integer_kernel, matmul, quotient_invariants, smith_invariants

PRIMES = [2, 3, 5, 7]


def int_matrices(max_rows=5, max_cols=5, lo=-6, hi=6):
    return st.integers(1, max_rows).flatmap(
        lambda m: st.integers(1, max_cols).flatmap(
            lambda n: st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n), min_size=m, max_size=m)))


@given(A=int_matrices(), p=st.sampled_from(PRIMES))
@settings(max_examples=80, deadline=None)
def test_rank_nullity_and_nullspace(A, p):
    M = np.array(A, dtype=np.int64) % p
    N = gfp.nullspace(M, p)
    assert gfp.rank(M, p) + N.shape[1] == M.shape[1]
    assert gfp.is_zero(gfp.matmul(M, N, p))


@given(A=int_matrices(), p=st.sampled_from(PRIMES))
@settings(max_examples=60, deadline=None)
def test_rank_matches_sympy_over_gf(A, p):
    from sympy.polys.matrices import DomainMatrix
    from sympy import GF
    dm = DomainMatrix([[GF(p)(x) for x in row] for row in A], (len(A), len(A[0])), GF(p))
    assert gfp.rank(np.array(A, dtype=np.int64) % p, p) == dm.rank()


@given(A=int_matrices(4, 4), p=st.sampled_from(PRIMES))
@settings(max_examples=60, deadline=None)
def test_solve_returns_solution_when_consistent(A, p):
    M = np.array(A, dtype=np.int64) % p
    x = np.arange(M.shape[1], dtype=np.int64).reshape(-1, 1) % p
    b = gfp.matmul(M, x, p)
    y = gfp.solve(M, b, p)
    assert y is not None
    assert np.array_equal(gfp.matmul(M, y, p), b)


def test_solve_inconsistent_returns_none():
    M = np.array([[1, 0], [1, 0]], dtype=np.int64)
    assert gfp.solve(M, np.array([[0], [1]], dtype=np.int64), 2) is None


def test_inverse_roundtrip():
    A = np.array([[1, 2], [3, 4]], dtype=np.int64)
    Ai = gfp.inverse(A, 5)
    assert np.array_equal(gfp.matmul(A, Ai, 5), gfp.identity(2))


def test_check_prime_rejects_composites():
    for bad in (1, 4, 9, 101):
        with pytest.raises(ValueError):
            gfp.check_prime(bad)


def test_subquotient_dimension():
    Z = gfp.identity(3)
    B = np.array([[1], [1], [0]], dtype=np.int64)
    assert gfp.Subquotient(Z, B, 2).dim == 2


@given(A=int_matrices())
@settings(max_examples=80, deadline=None)
def test_smith_invariants_match_sympy(A):
    ours = smith_invariants(A)
    snf = smith_normal_form(sympy.Matrix(A), domain=sympy.ZZ)
    theirs = [abs(int(snf[i, i])) for i in range(min(snf.shape)) if snf[i, i] != 0]
    assert ours == theirs
    for a, b in zip(ours, ours[1:]):
        assert b % a == 0


@given(A=int_matrices())
@settings(max_examples=60, deadline=None)
def test_integer_kernel_is_kernel(A):
    K = integer_kernel(A)
    n = len(A[0])
    if K and K[0]:
        assert all(x == 0 for row in matmul(A, K, n) for x in row)
    assert (len(K[0]) if K else 0) == n - sympy.Matrix(A).rank()


def test_quotient_invariants_examples():
    assert quotient_invariants([[2, 0], [0, 3]], 2) == [6]
    assert quotient_invariants([[2], [0]], 2) == [2, 0]
    assert quotient_invariants([], 2) == [0, 0]


def test_lattice_membership():
    L = Lattice([[2, 0], [0, 4]], 2)
    assert L.contains([4, 8])
    assert not L.contains([1, 0])
    assert L.coords([2, 4]) is not None
