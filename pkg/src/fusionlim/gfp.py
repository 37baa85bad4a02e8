"""Dense linear algebra over prime fields.

Matrices are ``numpy.int64`` arrays with entries reduced into ``[0, p)``.
Row reduction is the single kernel primitive; rank, nullspace, solving and
subspace bookkeeping are all built on top of :func:`rref`.

Vectors are columns: a linear map ``V -> W`` is a ``dim W x dim V`` array.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionBlowup

MAX_PRIME = 97
DIM_CAP = 4096


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def check_prime(p: int) -> int:
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)) or p > MAX_PRIME:
        raise ValueError(f"expected a prime p <= {MAX_PRIME}, got {p!r}")
    return int(p)


def as_matrix(A, p: int, shape: tuple[int, int] | None = None) -> np.ndarray:
    M = np.array(A, dtype=np.int64)
    if shape is not None:
        M = M.reshape(shape)
    return M % p


def zeros(m: int, n: int) -> np.ndarray:
    return np.zeros((m, n), dtype=np.int64)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def matmul(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    if A.shape[1] == 0 or A.shape[0] == 0 or B.shape[1] == 0:
        return zeros(A.shape[0], B.shape[1])
    # entries < 97, so partial sums stay far below 2**63 at DIM_CAP
    return (A @ B) % p


def rref(A: np.ndarray, p: int, ncols: int | None = None) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of ``A`` over F_p.

    Pivots are only searched in the first ``ncols`` columns (all by default);
    row operations still act on the full width, which lets callers reduce
    augmented matrices.
    """
    R = np.array(A, dtype=np.int64) % p
    m, n = R.shape
    if ncols is None:
        ncols = n
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == m:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            R[[r, i]] = R[[i, r]]
        inv = pow(int(R[r, c]), -1, p)
        if inv != 1:
            R[r, c:] = (R[r, c:] * inv) % p
        col = R[:, c].copy()
        col[r] = 0
        rows = np.flatnonzero(col)
        if rows.size:
            R[rows, c:] = (R[rows, c:] - np.outer(col[rows], R[r, c:])) % p
        pivots.append(c)
        r += 1
    return R, pivots


def rank(A: np.ndarray, p: int) -> int:
    if A.size == 0:
        return 0
    # reduce along the shorter side
    if A.shape[0] > A.shape[1]:
        A = A.T
    return len(rref(A, p)[1])


def nullspace(A: np.ndarray, p: int) -> np.ndarray:
    """Basis of ``{x : A x = 0}`` as the columns of an ``n x k`` matrix."""
    n = A.shape[1]
    if A.shape[0] == 0:
        return identity(n)
    R, pivots = rref(A, p)
    free = [c for c in range(n) if c not in set(pivots)]
    N = zeros(n, len(free))
    for k, f in enumerate(free):
        N[f, k] = 1
        for j, c in enumerate(pivots):
            N[c, k] = (-R[j, f]) % p
    return N


def column_basis(A: np.ndarray, p: int) -> np.ndarray:
    """Independent columns of ``A`` spanning its column space."""
    if A.shape[1] == 0:
        return zeros(A.shape[0], 0)
    _, pivots = rref(A, p)
    return A[:, pivots] % p


def is_zero(A: np.ndarray) -> bool:
    return not np.any(A)


class LinearSolver:
    """Solve ``A x = b`` repeatedly for a fixed ``A``.

    The row reduction ``E A = R`` is done once; each right-hand side then
    costs one matrix product.
    """

    def __init__(self, A: np.ndarray, p: int):
        self.p = p
        A = np.array(A, dtype=np.int64) % p
        self.m, self.n = A.shape
        if max(self.m, self.n) > DIM_CAP:
            raise DimensionBlowup(f"matrix of shape {A.shape} exceeds cap {DIM_CAP}")
        aug = np.concatenate([A, identity(self.m)], axis=1)
        R, pivots = rref(aug, p, ncols=self.n)
        self.pivots = pivots
        self.rank = len(pivots)
        self.E = R[:, self.n:]

    def solve(self, B: np.ndarray) -> np.ndarray | None:
        """A particular solution (free variables zero), or None if inconsistent.

        ``B`` may be a vector or a matrix of right-hand sides.
        """
        vec = B.ndim == 1
        Bm = B.reshape(-1, 1) if vec else B
        Y = matmul(self.E, Bm % self.p, self.p)
        if np.any(Y[self.rank:]):
            return None
        X = zeros(self.n, Bm.shape[1])
        X[self.pivots] = Y[: self.rank]
        return X[:, 0] if vec else X


def solve(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray | None:
    return LinearSolver(A, p).solve(B)


def inverse(A: np.ndarray, p: int) -> np.ndarray:
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    s = LinearSolver(A, p)
    if s.rank != n:
        raise ValueError("matrix is singular")
    return s.solve(identity(n))


class Basis:
    """A subspace of F_p^n given by independent columns, with coordinates."""

    def __init__(self, B: np.ndarray, p: int, independent: bool = False):
        self.p = p
        B = np.array(B, dtype=np.int64)
        B = (B.reshape(-1, 1) if B.ndim == 1 else B) % p
        self.ambient = B.shape[0]
        self.matrix = B if independent else column_basis(B, p)
        self.dim = self.matrix.shape[1]
        self._solver: LinearSolver | None = None

    @property
    def solver(self) -> LinearSolver:
        if self._solver is None:
            self._solver = LinearSolver(self.matrix, self.p)
        return self._solver

    def coords(self, V: np.ndarray) -> np.ndarray:
        X = self.solver.solve(V)
        if X is None:
            raise ValueError("vector not in subspace")
        return X

    def contains(self, V: np.ndarray) -> bool:
        return self.solver.solve(V) is not None


def span_sum(p: int, *mats: np.ndarray) -> np.ndarray:
    """Basis of the sum of the column spaces."""
    mats = [m for m in mats if m.shape[1]]
    if not mats:
        return zeros(0, 0)
    return column_basis(np.concatenate(mats, axis=1), p)


def extend_to_complement(W: np.ndarray, V: np.ndarray, p: int) -> np.ndarray:
    """Columns of ``V`` (in order) extending ``W`` to a basis of ``W + V``."""
    k = W.shape[1]
    both = np.concatenate([W, V], axis=1) if k else V
    _, pivots = rref(both, p)
    picked = [c - k for c in pivots if c >= k]
    return V[:, picked] % p


class Subquotient:
    """The quotient ``Z / B`` of subspaces ``B <= Z <= F_p^n``.

    ``basis`` holds cocycle-style representatives of a basis of the quotient;
    :meth:`coords` maps any element of ``Z`` to quotient coordinates.
    """

    def __init__(self, Z: np.ndarray, Bd: np.ndarray, p: int):
        self.p = p
        n = Z.shape[0]
        Bd = Bd.reshape(n, -1) % p if Bd.size else zeros(n, 0)
        Bd = column_basis(Bd, p) if Bd.shape[1] else zeros(n, 0)
        self.boundaries = Bd
        self.basis = extend_to_complement(Bd, Z % p, p)
        self.dim = self.basis.shape[1]
        self._solver = LinearSolver(np.concatenate([self.basis, Bd], axis=1), p)

    def coords(self, V: np.ndarray) -> np.ndarray:
        X = self._solver.solve(V)
        if X is None:
            raise ValueError("element is not a cycle")
        return X[: self.dim]
