"""Exact integer linear algebra: column Hermite reduction and Smith normal form.

Matrices are lists of rows of Python ints, so arithmetic never overflows.
"""

from __future__ import annotations

from typing import Sequence

IntMatrix = list[list[int]]


def to_int_matrix(A, m: int | None = None, n: int | None = None) -> IntMatrix:
    rows = [[int(x) for x in row] for row in A]
    if m is not None and not rows:
        return [[0] * (n or 0) for _ in range(m)]
    return rows


def shape(A: IntMatrix, ncols: int | None = None) -> tuple[int, int]:
    m = len(A)
    n = len(A[0]) if m else (ncols or 0)
    return m, n


def transpose(A: IntMatrix, ncols: int = 0) -> IntMatrix:
    m, n = shape(A, ncols)
    return [[A[i][j] for i in range(m)] for j in range(n)]


def matmul(A: IntMatrix, B: IntMatrix, inner: int | None = None) -> IntMatrix:
    m = len(A)
    k = len(B) if inner is None else inner
    n = len(B[0]) if B else 0
    out = [[0] * n for _ in range(m)]
    for i in range(m):
        Ai = A[i]
        Oi = out[i]
        for t in range(k):
            a = Ai[t]
            if a:
                Bt = B[t]
                for j in range(n):
                    if Bt[j]:
                        Oi[j] += a * Bt[j]
    return out


def column_hermite(A: IntMatrix, ncols: int | None = None) -> tuple[IntMatrix, IntMatrix, list[int]]:
    """Column-reduce ``A`` to echelon form by unimodular column operations.

    Returns ``(H, U, pivot_rows)`` with ``A U = H``.  Column ``c`` of ``H``
    for ``c < len(pivot_rows)`` has its first nonzero entry, positive, in row
    ``pivot_rows[c]``; the remaining columns of ``H`` are zero, so the
    matching columns of ``U`` span the integer kernel of ``A``.
    """
    m, n = shape(A, ncols)
    H = [row[:] for row in A]
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def col_axpy(M, rows, dst, src, q):
        # column dst -= q * column src
        for i in range(rows):
            v = M[i][src]
            if v:
                M[i][dst] -= q * v

    def col_swap(M, rows, a, b):
        for i in range(rows):
            M[i][a], M[i][b] = M[i][b], M[i][a]

    def col_neg(M, rows, a):
        for i in range(rows):
            M[i][a] = -M[i][a]

    pivot_rows: list[int] = []
    r = 0
    for i in range(m):
        if r == n:
            break
        while True:
            nz = [j for j in range(r, n) if H[i][j] != 0]
            if not nz:
                break
            j0 = min(nz, key=lambda j: abs(H[i][j]))
            if j0 != r:
                col_swap(H, m, r, j0)
                col_swap(U, n, r, j0)
            done = True
            for j in range(r + 1, n):
                if H[i][j]:
                    q = H[i][j] // H[i][r]
                    col_axpy(H, m, j, r, q)
                    col_axpy(U, n, j, r, q)
                    if H[i][j]:
                        done = False
            if done:
                break
        if H[i][r] != 0:
            if H[i][r] < 0:
                col_neg(H, m, r)
                col_neg(U, n, r)
            # reduce earlier pivot columns modulo this pivot for a canonical shape
            for c in range(r):
                q = H[i][c] // H[i][r]
                if q:
                    col_axpy(H, m, c, r, q)
                    col_axpy(U, n, c, r, q)
            pivot_rows.append(i)
            r += 1
    return H, U, pivot_rows


def integer_kernel(A: IntMatrix, ncols: int | None = None) -> IntMatrix:
    """Basis of the integer kernel ``{x in Z^n : A x = 0}`` as columns (n x k)."""
    m, n = shape(A, ncols)
    if m == 0:
        return [[int(i == j) for j in range(n)] for i in range(n)]
    _, U, piv = column_hermite(A, n)
    r = len(piv)
    return [[U[i][j] for j in range(r, n)] for i in range(n)]


class Lattice:
    """The subgroup of Z^m spanned by given generator columns."""

    def __init__(self, gens: IntMatrix, m: int):
        self.m = m
        ncols = len(gens[0]) if gens else 0
        if m == 0 or ncols == 0:
            self.basis: IntMatrix = [[] for _ in range(m)]
            self.pivot_rows: list[int] = []
        else:
            H, _, piv = column_hermite(gens, ncols)
            r = len(piv)
            self.basis = [row[:r] for row in H]
            self.pivot_rows = piv
        self.rank = len(self.pivot_rows)

    def coords(self, v: Sequence[int]) -> list[int] | None:
        """Integer coordinates of ``v`` in :attr:`basis`, or None if ``v`` is outside."""
        res = [int(x) for x in v]
        y = []
        for c, i in enumerate(self.pivot_rows):
            h = self.basis[i][c]
            if res[i] % h:
                return None
            q = res[i] // h
            y.append(q)
            if q:
                for t in range(self.m):
                    b = self.basis[t][c]
                    if b:
                        res[t] -= q * b
        if any(res):
            return None
        return y

    def contains(self, v: Sequence[int]) -> bool:
        return self.coords(v) is not None


def smith_invariants(A: IntMatrix, ncols: int | None = None) -> list[int]:
    """Nonzero diagonal entries ``d_1 | d_2 | ...`` of the Smith normal form."""
    m, n = shape(A, ncols)
    M = [row[:] for row in A]
    diag: list[int] = []
    t = 0
    while t < min(m, n):
        entries = [(abs(M[i][j]), i, j) for i in range(t, m) for j in range(t, n) if M[i][j]]
        if not entries:
            break
        _, pi, pj = min(entries)
        M[t], M[pi] = M[pi], M[t]
        for row in M:
            row[t], row[pj] = row[pj], row[t]
        while True:
            changed = False
            piv = M[t][t]
            for i in range(t + 1, m):
                if M[i][t]:
                    q = M[i][t] // piv
                    if q:
                        Mi, Mt = M[i], M[t]
                        for j in range(t, n):
                            Mi[j] -= q * Mt[j]
                    if M[i][t]:
                        changed = True
            for j in range(t + 1, n):
                if M[t][j]:
                    q = M[t][j] // piv
                    if q:
                        for i in range(t, m):
                            M[i][j] -= q * M[i][t]
                    if M[t][j]:
                        changed = True
            if changed:
                # move the smallest remaining entry of row/column t to the pivot
                cands = [(abs(M[i][t]), i, t) for i in range(t, m) if M[i][t]]
                cands += [(abs(M[t][j]), t, j) for j in range(t, n) if M[t][j]]
                _, pi, pj = min(cands)
                M[t], M[pi] = M[pi], M[t]
                for row in M:
                    row[t], row[pj] = row[pj], row[t]
                continue
            # row and column cleared; enforce divisibility of the remainder
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if M[i][j] % piv:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            Mt, Mb = M[t], M[bad]
            for j in range(t, n):
                Mt[j] += Mb[j]
        diag.append(abs(M[t][t]))
        t += 1
    return diag


def quotient_invariants(sub_gens: IntMatrix, rank_ambient: int) -> list[int]:
    """Invariant factors of ``Z^r / L`` where ``L`` is spanned by ``sub_gens``.

    Entry 0 stands for a free summand Z; factors equal to 1 are dropped.
    """
    ncols = len(sub_gens[0]) if sub_gens else 0
    d = smith_invariants(sub_gens, ncols) if ncols and rank_ambient else []
    factors = [x for x in d if x != 1]
    factors += [0] * (rank_ambient - len(d))
    return sorted(factors, key=lambda x: (x == 0, x))
