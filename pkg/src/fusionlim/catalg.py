"""Modules over category algebras of finite categories.

A module is a contravariant functor ``C -> vect_k``.  ``act(f)`` for
``f: a -> b`` is the ``dim M(a) x dim M(b)`` matrix of ``M(f): M(b) -> M(a)``,
so ``act(g o f) = act(f) @ act(g)``.

Free modules are sums of representables ``X -> k Hom(X, Q)``; a morphism out
of one is given by the images of its generators (Yoneda), which is how
resolutions are stored.
"""

from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import gfp
from .category import FiniteCategory, Inclusion, Skeleton, skeleton as make_skeleton
from .errors import DimensionBlowup, InputError, NotFunctorial, SinkObjectMissing, WrongCategory
from .intlin import Lattice, integer_kernel, quotient_invariants

MAX_RESOLUTION_LENGTH = 12


class CatModule:
    """A contravariant functor to finite-dimensional F_p vector spaces."""

    def __init__(self, cat: FiniteCategory, p: int, dims: Sequence[int],
                 mats: Sequence[np.ndarray] | None, check: bool = True, name: str = ""):
        self.cat = cat
        self.p = gfp.check_prime(p)
        self.dims = [int(d) for d in dims]
        if len(self.dims) != cat.n_objects:
            raise InputError("one dimension per object required")
        self.name = name
        if mats is not None:
            self._mats = [gfp.as_matrix(m, self.p).reshape(self.dims[cat.src(f)], self.dims[cat.tgt(f)])
                          if np.size(m) else gfp.zeros(self.dims[cat.src(f)], self.dims[cat.tgt(f)])
                          for f, m in enumerate(mats)]
            if len(self._mats) != cat.n_morphisms:
                raise InputError("one matrix per morphism required")
        else:
            self._mats = None
        if check:
            self.check_functorial()

    def act(self, f: int) -> np.ndarray:
        return self._mats[f]

    def apply(self, f: int, v: np.ndarray) -> np.ndarray:
        """``M(f) v``."""
        return gfp.matmul(self.act(f), v, self.p)

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def check_functorial(self) -> None:
        cat, p = self.cat, self.p
        for a in range(cat.n_objects):
            if not np.array_equal(self.act(cat.identities[a]) % p, gfp.identity(self.dims[a])):
                raise NotFunctorial(f"identity at object {cat.objects[a]!r} does not act as 1")
        for (g, f), h in cat.table.items():
            lhs = self.act(h)
            rhs = gfp.matmul(self.act(f), self.act(g), p)
            if not np.array_equal(lhs, rhs):
                raise NotFunctorial(f"act(g o f) != act(f) act(g) for g={g}, f={f}")

    def is_iso_invertible(self) -> bool:
        for f in range(self.cat.n_morphisms):
            if self.cat.is_iso(f) and gfp.rank(self.act(f), self.p) != self.dims[self.cat.src(f)]:
                return False
        return True

    def __repr__(self) -> str:
        return f"CatModule({self.name or '?'} over {self.cat.name}, dims={self.dims})"

    # -- serialization ---------------------------------------------------

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "dims": self.dims,
            "matrices": [self.act(f).astype(int).reshape(-1).tolist() for f in range(self.cat.n_morphisms)],
        }

    @classmethod
    def from_json(cls, cat: FiniteCategory, obj: dict) -> "CatModule":
        try:
            p, dims, flat = int(obj["p"]), obj["dims"], obj["matrices"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed module JSON: {exc}") from exc
        if len(flat) != cat.n_morphisms:
            raise InputError(f"expected {cat.n_morphisms} matrices, got {len(flat)}")
        mats = []
        for f, m in enumerate(flat):
            shape = (dims[cat.src(f)], dims[cat.tgt(f)])
            if len(m) != shape[0] * shape[1]:
                raise InputError(f"matrix {f} has {len(m)} entries, expected {shape[0] * shape[1]}")
            mats.append(np.array(m, dtype=np.int64).reshape(shape))
        return cls(cat, p, dims, mats)

    def content_hash(self) -> str:
        h = hashlib.sha256()
        h.update(category_hash(self.cat).encode())
        h.update(json.dumps(self.to_json(), sort_keys=True).encode())
        return h.hexdigest()


def category_hash(cat: FiniteCategory) -> str:
    h = hashlib.sha256()
    h.update(repr([(m.src, m.tgt) for m in cat.morphisms]).encode())
    h.update(repr(sorted(cat.table.items())).encode())
    h.update(repr(cat.identities).encode())
    return h.hexdigest()


def constant_module(cat: FiniteCategory, p: int) -> CatModule:
    return CatModule(cat, p, [1] * cat.n_objects, [gfp.identity(1)] * cat.n_morphisms,
                     check=False, name="const")


def zero_module(cat: FiniteCategory, p: int) -> CatModule:
    return CatModule(cat, p, [0] * cat.n_objects, [gfp.zeros(0, 0)] * cat.n_morphisms,
                     check=False, name="zero")


def restrict_module(N: CatModule, inc: Inclusion) -> CatModule:
    if inc.ambient is not N.cat:
        raise InputError("module does not live on the ambient category of the inclusion")
    dims = [N.dims[a] for a in inc.obj_map]
    mats = [N.act(f) for f in inc.mor_map]
    return CatModule(inc.sub, N.p, dims, mats, check=False, name=f"{N.name}|")


def transport_from_skeleton(N: CatModule, sk: Skeleton, cat: FiniteCategory) -> CatModule:
    """Extend a module on the skeleton back to the full category via the comparison isos."""
    inc = sk.inclusion
    sub_mor = {f: k for k, f in enumerate(inc.mor_map)}
    dims = [N.dims[sk.rep[a]] for a in range(cat.n_objects)]
    mats = []
    for f in range(cat.n_morphisms):
        a, b = cat.src(f), cat.tgt(f)
        g = cat.compose(sk.to_rep[b], cat.compose(f, sk.from_rep[a]))
        mats.append(N.act(sub_mor[g]))
    return CatModule(cat, N.p, dims, mats, check=False, name=f"{N.name}^")


def induce_constant(inc: Inclusion, p: int) -> CatModule:
    """``k_C^D``: the constant module on ``C`` induced up to ``D``.

    At ``X`` the basis is the set of pairs ``(c, f: X -> c)`` modulo
    ``(c', u o f) ~ (c, f)`` for ``u: c -> c'`` in ``C``.
    """
    C, D = inc.sub, inc.ambient
    classes: list[list[int]] = []   # per object X: class id per pair
    pairs_at: list[list[tuple[int, int]]] = []
    for X in range(D.n_objects):
        pairs = [(c, f) for c in range(C.n_objects) for f in D.hom(X, inc.obj_map[c])]
        pos = {pr: k for k, pr in enumerate(pairs)}
        parent = list(range(len(pairs)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for k, (c, f) in enumerate(pairs):
            for u in C.out_of(c):
                c2 = C.tgt(u)
                k2 = pos[(c2, D.compose(inc.mor_map[u], f))]
                ra, rb = find(k), find(k2)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
        roots = sorted({find(k) for k in range(len(pairs))})
        rid = {r: i for i, r in enumerate(roots)}
        classes.append([rid[find(k)] for k in range(len(pairs))])
        pairs_at.append(pairs)
    dims = [len(set(c)) for c in classes]
    lookup = [{pr: classes[X][k] for k, pr in enumerate(pairs_at[X])} for X in range(D.n_objects)]
    mats = []
    for g in range(D.n_morphisms):
        Y, X = D.src(g), D.tgt(g)
        A = gfp.zeros(dims[Y], dims[X])
        for k, (c, f) in enumerate(pairs_at[X]):
            A[lookup[Y][(c, D.compose(f, g))], classes[X][k]] = 1
        mats.append(A)
    return CatModule(D, p, dims, mats, check=False, name="ind-const")


class FreeModule(CatModule):
    """``sum_i k Hom(-, Q_i)`` with basis ``(i, h)`` at ``X``, ``h: X -> Q_i``."""

    def __init__(self, cat: FiniteCategory, p: int, gens: Sequence[int]):
        self.gens = list(gens)
        self.basis: list[list[tuple[int, int]]] = []
        self.pos: list[dict[tuple[int, int], int]] = []
        for X in range(cat.n_objects):
            b = [(i, h) for i, Q in enumerate(self.gens) for h in cat.hom(X, Q)]
            self.basis.append(b)
            self.pos.append({e: k for k, e in enumerate(b)})
        super().__init__(cat, p, [len(b) for b in self.basis], None, check=False, name="free")
        self._push: dict[int, np.ndarray] = {}
        self._mat_cache: dict[int, np.ndarray] = {}

    def push(self, f: int) -> np.ndarray:
        """For ``f: Y -> X``, the position in ``F(Y)`` of the image of each basis vector of ``F(X)``."""
        idx = self._push.get(f)
        if idx is None:
            cat = self.cat
            Y, X = cat.src(f), cat.tgt(f)
            pos = self.pos[Y]
            idx = np.array([pos[(i, cat.compose(h, f))] for i, h in self.basis[X]], dtype=np.int64)
            self._push[f] = idx
        return idx

    def act(self, f: int) -> np.ndarray:
        A = self._mat_cache.get(f)
        if A is None:
            cat = self.cat
            A = gfp.zeros(self.dims[cat.src(f)], self.dims[cat.tgt(f)])
            idx = self.push(f)
            np.add.at(A, (idx, np.arange(len(idx))), 1)
            A %= self.p
            self._mat_cache[f] = A
        return A

    def apply(self, f: int, v: np.ndarray) -> np.ndarray:
        idx = self.push(f)
        out = np.zeros((self.dims[self.cat.src(f)],) + v.shape[1:], dtype=np.int64)
        np.add.at(out, idx, v)
        return out % self.p

    def generator(self, i: int) -> np.ndarray:
        Q = self.gens[i]
        v = gfp.zeros(self.dims[Q], 1)[:, 0]
        v[self.pos[Q][(i, self.cat.identities[Q])]] = 1
        return v


def free_module(cat: FiniteCategory, p: int, multiplicities: Mapping[int, int] | Sequence[int]) -> FreeModule:
    if isinstance(multiplicities, Mapping):
        gens = [a for a in sorted(multiplicities) for _ in range(multiplicities[a])]
    else:
        gens = [a for a, m in enumerate(multiplicities) for _ in range(m)]
    return FreeModule(cat, p, gens)


def map_from_free(F: FreeModule, M: CatModule, images: Sequence[np.ndarray], X: int) -> np.ndarray:
    """Component at ``X`` of the map ``F -> M`` sending generator ``i`` to ``images[i]``."""
    A = gfp.zeros(M.dims[X], F.dims[X])
    for k, (i, h) in enumerate(F.basis[X]):
        A[:, k] = M.apply(h, images[i].reshape(-1, 1))[:, 0]
    return A


# ---------------------------------------------------------------------------
# free resolutions


def _greedy_cover(M: CatModule, sub: list[np.ndarray], rng: np.random.Generator | None) -> tuple[list[int], list[np.ndarray]]:
    """Generators (object, vector in ``M(object)``) of the submodule with
    objectwise bases ``sub``; objects are processed sinks first."""
    cat, p = M.cat, M.p
    order = cat.sink_order()
    if rng is not None:
        reach = {a: sum(1 for b in range(cat.n_objects) if cat.hom(a, b)) for a in order}
        keys = rng.permutation(len(order))
        order = sorted(order, key=lambda a: (reach[a], keys[a]))
    W = [gfp.zeros(M.dims[X], 0) for X in range(cat.n_objects)]
    gens: list[int] = []
    vecs: list[np.ndarray] = []
    for Q in order:
        target = sub[Q]
        if target.shape[1] == 0:
            continue
        ends = cat.hom(Q, Q)
        while True:
            rank_w = W[Q].shape[1]
            if rank_w == target.shape[1]:
                break
            cands = gfp.extend_to_complement(W[Q], target, p)
            if rng is not None:
                cands = cands[:, rng.permutation(cands.shape[1])]
            best, best_dim = None, -1
            for c in range(min(cands.shape[1], 16)):
                v = cands[:, c:c + 1]
                orbit = np.concatenate([M.apply(u, v) for u in ends], axis=1)
                d = gfp.rank(np.concatenate([W[Q], orbit], axis=1), p)
                if d > best_dim:
                    best, best_dim = v, d
                if d == target.shape[1]:
                    break
            gens.append(Q)
            vecs.append(best[:, 0])
            for X in range(cat.n_objects):
                hs = cat.hom(X, Q)
                if hs:
                    new = np.concatenate([M.apply(h, best) for h in hs], axis=1)
                    W[X] = gfp.column_basis(np.concatenate([W[X], new], axis=1), p)
                    if W[X].shape[0] != M.dims[X]:
                        W[X] = gfp.zeros(M.dims[X], 0)
    for X in range(cat.n_objects):
        if W[X].shape[1] != sub[X].shape[1]:
            raise RuntimeError("cover does not generate the submodule")
    return gens, vecs


@dataclass
class Resolution:
    """``... -> F_1 -> F_0 -> M``.

    ``images[n][j]`` is the image of generator ``j`` of ``F_n``: a vector in
    ``M(Q_j)`` for ``n = 0`` and in ``F_{n-1}(Q_j)`` otherwise.
    """

    module: CatModule
    free: list[FreeModule]
    images: list[list[np.ndarray]]
    complete: bool = False
    _components: dict = field(default_factory=dict, repr=False)

    @property
    def length(self) -> int:
        return len(self.free) - 1

    def multiplicities(self, n: int) -> Counter:
        F = self.free[n]
        return Counter(F.cat.objects[Q] for Q in F.gens)

    def component(self, n: int, X: int) -> np.ndarray:
        """``d_n`` at ``X`` (``n >= 1``) or the augmentation (``n = 0``)."""
        key = (n, X)
        if key not in self._components:
            target = self.module if n == 0 else self.free[n - 1]
            self._components[key] = map_from_free(self.free[n], target, self.images[n], X)
        return self._components[key]

    def verify(self) -> None:
        """``d o d = 0`` and exactness at every computed degree."""
        p = self.module.p
        cat = self.module.cat
        for X in range(cat.n_objects):
            eps = self.component(0, X)
            if gfp.rank(eps, p) != self.module.dims[X]:
                raise AssertionError(f"augmentation not surjective at {cat.objects[X]!r}")
            prev_rank = self.module.dims[X]
            for n in range(len(self.free)):
                d = self.component(n, X)
                if n >= 1:
                    dd = gfp.matmul(self.component(n - 1, X), d, p)
                    if not gfp.is_zero(dd):
                        raise AssertionError(f"d o d != 0 at degree {n}")
                r = gfp.rank(d, p) if d.size else 0
                if n >= 1 and r + prev_rank != self.free[n - 1].dims[X]:
                    raise AssertionError(f"not exact at degree {n - 1}, object {cat.objects[X]!r}")
                prev_rank = r
            if self.complete and prev_rank != self.free[-1].dims[X]:
                raise AssertionError("last differential is not injective")


_RESOLUTION_CACHE: dict[tuple, Resolution] = {}


def free_resolution(M: CatModule, length: int, rng: np.random.Generator | None = None,
                    cap: int = gfp.DIM_CAP, use_cache: bool = True) -> Resolution:
    """Free resolution ``F_0 .. F_length`` of ``M`` by greedy covers."""
    if length > MAX_RESOLUTION_LENGTH:
        raise InputError(f"resolution length {length} exceeds {MAX_RESOLUTION_LENGTH}")
    key = (id(M.cat), M.content_hash(), cap) if use_cache and rng is None else None
    if key is not None and key in _RESOLUTION_CACHE:
        res = _RESOLUTION_CACHE[key]
        if res.module.cat is M.cat and (res.complete or res.length >= length):
            return res
    cat, p = M.cat, M.p
    sub = [gfp.identity(d) for d in M.dims]
    gens, vecs = _greedy_cover(M, sub, rng)
    free = [FreeModule(cat, p, gens)]
    images = [vecs]
    res = Resolution(M, free, images)
    for n in range(1, length + 1):
        F = free[-1]
        if max(F.dims, default=0) > cap:
            raise DimensionBlowup(f"F_{n - 1} has dimension {max(F.dims)} > cap {cap}")
        kernel = [gfp.nullspace(res.component(n - 1, X), p) if F.dims[X] else gfp.zeros(0, 0)
                  for X in range(cat.n_objects)]
        kernel = [k if k.shape[0] == F.dims[X] else gfp.zeros(F.dims[X], 0) for X, k in enumerate(kernel)]
        if all(k.shape[1] == 0 for k in kernel):
            res.complete = True
            break
        gens, vecs = _greedy_cover(F, kernel, rng)
        free.append(FreeModule(cat, p, gens))
        images.append(vecs)
    else:
        F = free[-1]
        if not F.gens:
            res.complete = True
    if key is not None:
        _RESOLUTION_CACHE[key] = res
    return res


# ---------------------------------------------------------------------------
# Ext, limits and natural transformations


def _hom_complex_differential(res: Resolution, N: CatModule, n: int) -> np.ndarray:
    """``delta_n: Hom(F_n, N) -> Hom(F_{n+1}, N)`` in block coordinates."""
    p = N.p
    Fn = res.free[n]
    offs_n = np.cumsum([0] + [N.dims[Q] for Q in Fn.gens])
    if n + 1 >= len(res.free):
        return gfp.zeros(0, int(offs_n[-1]))
    Fm = res.free[n + 1]
    offs_m = np.cumsum([0] + [N.dims[Q] for Q in Fm.gens])
    D = gfp.zeros(int(offs_m[-1]), int(offs_n[-1]))
    for j, Qj in enumerate(Fm.gens):
        v = res.images[n + 1][j]
        for k in np.flatnonzero(v):
            i, h = Fn.basis[Qj][k]
            D[offs_m[j]:offs_m[j + 1], offs_n[i]:offs_n[i + 1]] += int(v[k]) * N.act(h)
    return D % p


@dataclass(frozen=True)
class ExtResult:
    degree: int
    dim: int
    cocycles: np.ndarray  # representatives in Hom(F_n, N), as columns


def ext_from_resolution(res: Resolution, N: CatModule, n: int, want_basis: bool = False) -> ExtResult:
    if N.cat is not res.module.cat:
        raise WrongCategory("modules live on different categories")
    if N.p != res.module.p:
        raise InputError("modules over different fields")
    if n > res.length and not res.complete:
        raise InputError(f"resolution of length {res.length} cannot compute Ext^{n}")
    p = N.p
    if n >= len(res.free):
        return ExtResult(n, 0, gfp.zeros(0, 0))
    dn = _hom_complex_differential(res, N, n)
    dim_hom = dn.shape[1]
    prev = _hom_complex_differential(res, N, n - 1) if n >= 1 else gfp.zeros(dim_hom, 0)
    if not want_basis:
        r_n = gfp.rank(dn, p) if dn.size else 0
        r_prev = gfp.rank(prev, p) if prev.size else 0
        return ExtResult(n, dim_hom - r_n - r_prev, gfp.zeros(dim_hom, 0))
    Z = gfp.nullspace(dn, p) if dn.shape[0] else gfp.identity(dim_hom)
    sq = gfp.Subquotient(Z, prev, p)
    return ExtResult(n, sq.dim, sq.basis)


def ext(M: CatModule, N: CatModule, n: int, rng: np.random.Generator | None = None,
        cap: int = gfp.DIM_CAP, want_basis: bool = False) -> ExtResult:
    res = free_resolution(M, n + 1, rng=rng, cap=cap)
    return ext_from_resolution(res, N, n, want_basis=want_basis)


def ext_dims(M: CatModule, N: CatModule, maxdeg: int, rng: np.random.Generator | None = None,
             cap: int = gfp.DIM_CAP) -> list[int]:
    res = free_resolution(M, maxdeg + 1, rng=rng, cap=cap)
    return [ext_from_resolution(res, N, n).dim for n in range(maxdeg + 1)]


def higher_limits(cat: FiniteCategory, M: CatModule, maxdeg: int, use_skeleton: bool = True,
                  cap: int = gfp.DIM_CAP) -> list[int]:
    """``dim lim^n M`` for ``0 <= n <= maxdeg``."""
    if M.cat is not cat:
        raise WrongCategory("module does not live on this category")
    if use_skeleton:
        sk = skeleton_of(cat)
        M = restrict_module(M, sk.inclusion)
        cat = sk.cat
    return ext_dims(constant_module(cat, M.p), M, maxdeg, cap=cap)


def higher_limit(cat: FiniteCategory, M: CatModule, n: int, use_skeleton: bool = True,
                 cap: int = gfp.DIM_CAP) -> int:
    return higher_limits(cat, M, n, use_skeleton=use_skeleton, cap=cap)[n]


_SKELETONS: dict[int, tuple[FiniteCategory, Skeleton]] = {}


def skeleton_of(cat: FiniteCategory) -> Skeleton:
    """Memoized skeleton, so repeated calls share one category object."""
    hit = _SKELETONS.get(id(cat))
    if hit is not None and hit[0] is cat:
        return hit[1]
    sk = make_skeleton(cat)
    _SKELETONS[id(cat)] = (cat, sk)
    return sk


def limit(cat: FiniteCategory, M: CatModule) -> np.ndarray:
    """Basis (columns) of ``lim M`` inside ``prod_X M(X)``."""
    p = M.p
    offs = np.cumsum([0] + M.dims)
    rows = []
    for f in range(cat.n_morphisms):
        a, b = cat.src(f), cat.tgt(f)
        if f == cat.identities[a]:
            continue
        R = gfp.zeros(M.dims[a], int(offs[-1]))
        R[:, offs[b]:offs[b + 1]] += M.act(f)
        R[:, offs[a]:offs[a + 1]] -= gfp.identity(M.dims[a])
        rows.append(R % p)
    if not rows or offs[-1] == 0:
        return gfp.identity(int(offs[-1]))
    return gfp.nullspace(np.concatenate(rows, axis=0), p)


def embedded_limit(cat: FiniteCategory, M: CatModule, sink: int) -> np.ndarray:
    """``{x in M(S) : M(f) x = M(g) x for all f, g: P -> S}``, ``S`` = ``sink``."""
    p = M.p
    d = M.dims[sink]
    rows = []
    for P in range(cat.n_objects):
        hs = cat.hom(P, sink)
        if not hs:
            raise SinkObjectMissing(f"no morphism from {cat.objects[P]!r} to the sink")
        for h in hs[1:]:
            rows.append((M.act(h) - M.act(hs[0])) % p)
    if not rows or d == 0:
        return gfp.identity(d)
    return gfp.nullspace(np.concatenate(rows, axis=0), p)


def d2_closed_form(M: CatModule) -> tuple[int, int, int]:
    """``(lim^0, lim^1, lim^{>=2})`` over ``D_2`` from the pushout formula."""
    cat = M.cat
    objs = [frozenset({1}), frozenset({2}), frozenset({1, 2})]
    if sorted(cat.objects, key=sorted) != sorted(objs, key=sorted) or cat.n_morphisms != 5:
        raise WrongCategory("d2_closed_form requires the category D_2")
    i1, i2, i12 = (cat.object_index[o] for o in objs)
    f1, f2 = cat.hom(i12, i1)[0], cat.hom(i12, i2)[0]
    A1, A2 = M.act(f1), M.act(f2)
    d12 = M.dims[i12]
    both = np.concatenate([A1, A2], axis=1) if d12 else gfp.zeros(0, 0)
    r = gfp.rank(both, M.p) if both.size else 0
    lim0 = M.dims[i1] + M.dims[i2] - r
    lim1 = d12 - r
    return lim0, lim1, 0


def hom_module(M: CatModule, N: CatModule) -> np.ndarray:
    """Basis of natural transformations ``M => N``; each column stacks the
    components ``eta_X`` (``dim N(X) x dim M(X)``, column-major)."""
    if M.cat is not N.cat:
        raise WrongCategory("modules live on different categories")
    cat, p = M.cat, M.p
    sizes = [N.dims[X] * M.dims[X] for X in range(cat.n_objects)]
    offs = np.cumsum([0] + sizes)
    total = int(offs[-1])
    rows = []
    for f in range(cat.n_morphisms):
        Y, X = cat.src(f), cat.tgt(f)
        if f == cat.identities[Y] or N.dims[Y] * M.dims[X] == 0:
            continue
        # eta_Y @ M(f) - N(f) @ eta_X = 0
        R = gfp.zeros(N.dims[Y] * M.dims[X], total)
        R[:, offs[Y]:offs[Y + 1]] += np.kron(M.act(f).T, gfp.identity(N.dims[Y]))
        R[:, offs[X]:offs[X + 1]] -= np.kron(gfp.identity(M.dims[X]), N.act(f))
        rows.append(R % p)
    if not rows:
        return gfp.identity(total)
    return gfp.nullspace(np.concatenate(rows, axis=0), p)


def hom_component(M: CatModule, N: CatModule, eta: np.ndarray, X: int) -> np.ndarray:
    offs = np.cumsum([0] + [N.dims[Y] * M.dims[Y] for Y in range(M.cat.n_objects)])
    return eta[offs[X]:offs[X + 1]].reshape(M.dims[X], N.dims[X]).T


def random_module(cat: FiniteCategory, p: int, dims: Sequence[int], rng: np.random.Generator) -> CatModule:
    """A random module with prescribed dimensions: arrows without a nontrivial
    factorization are random and the rest are forced by composition.

    Only functorial on posets whose Hasse diagram has no two distinct paths
    between the same objects (such as ``D_2``); use :func:`random_image_module`
    elsewhere.
    """
    mats: list[np.ndarray | None] = [None] * cat.n_morphisms
    for a in range(cat.n_objects):
        mats[cat.identities[a]] = gfp.identity(dims[a])
    pending = [f for f in range(cat.n_morphisms) if mats[f] is None]
    # assign generating arrows (no nontrivial factorization) randomly
    for f in pending:
        a, b = cat.src(f), cat.tgt(f)
        factors = [c for c in range(cat.n_objects) if c not in (a, b) and cat.hom(a, c) and cat.hom(c, b)]
        if not factors:
            mats[f] = rng.integers(0, p, size=(dims[a], dims[b]))
    changed = True
    while changed:
        changed = False
        for (g, f), h in cat.table.items():
            if mats[h] is None and mats[f] is not None and mats[g] is not None:
                mats[h] = gfp.matmul(np.asarray(mats[f]) % p, np.asarray(mats[g]) % p, p)
                changed = True
    return CatModule(cat, p, dims, mats)


def random_image_module(cat: FiniteCategory, p: int, n_src: int, n_tgt: int,
                        rng: np.random.Generator) -> CatModule:
    """Image of a random map between random free modules; functorial on any category."""
    G = FreeModule(cat, p, sorted(int(x) for x in rng.integers(0, cat.n_objects, size=n_tgt)))
    F = FreeModule(cat, p, sorted(int(x) for x in rng.integers(0, cat.n_objects, size=n_src)))
    images = [rng.integers(0, p, size=G.dims[Q]) for Q in F.gens]
    W = [gfp.Basis(map_from_free(F, G, images, X), p) for X in range(cat.n_objects)]
    mats = []
    for f in range(cat.n_morphisms):
        a, b = cat.src(f), cat.tgt(f)
        if W[a].dim == 0 or W[b].dim == 0:
            mats.append(gfp.zeros(W[a].dim, W[b].dim))
            continue
        mats.append(W[a].coords(G.apply(f, W[b].matrix)))
    return CatModule(cat, p, [w.dim for w in W], mats, name="random-image")


# ---------------------------------------------------------------------------
# integral engine


class IntCatModule:
    """Contravariant functor to finitely generated abelian groups
    ``Z^d / diag(t)`` (``t_i = 0`` for a free coordinate)."""

    def __init__(self, cat: FiniteCategory, dims: Sequence[int], torsion: Sequence[Sequence[int]],
                 mats: Sequence[Sequence[Sequence[int]]], check: bool = True):
        self.cat = cat
        self.dims = [int(d) for d in dims]
        self.torsion = [[int(t) for t in ts] for ts in torsion]
        self.mats = [[[int(x) for x in row] for row in m] for m in mats]
        if check:
            self.check_functorial()

    def act(self, f: int) -> list[list[int]]:
        return self.mats[f]

    def _reduce(self, X: int, v: Sequence[int]) -> tuple[int, ...]:
        return tuple(x % t if t else x for x, t in zip(v, self.torsion[X]))

    def apply(self, f: int, v: Sequence[int]) -> list[int]:
        A = self.mats[f]
        return [sum(a * x for a, x in zip(row, v)) for row in A]

    def check_functorial(self) -> None:
        cat = self.cat
        for f in range(cat.n_morphisms):
            Y, X = cat.src(f), cat.tgt(f)
            # relations of X must map into relations of Y
            for i, t in enumerate(self.torsion[X]):
                e = [0] * self.dims[X]
                e[i] = t
                if any(self._reduce(Y, self.apply(f, e))):
                    raise NotFunctorial("action does not respect torsion relations")
        for (g, f), h in cat.table.items():
            Y = cat.src(f)
            for i in range(self.dims[cat.tgt(g)]):
                e = [0] * self.dims[cat.tgt(g)]
                e[i] = 1
                if self._reduce(Y, self.apply(h, e)) != self._reduce(Y, self.apply(f, self.apply(g, e))):
                    raise NotFunctorial("integral action is not functorial")

    @classmethod
    def from_fp(cls, M: CatModule) -> "IntCatModule":
        """``iota o M``: the F_p module viewed as an abelian group valued functor."""
        return cls(M.cat, M.dims, [[M.p] * d for d in M.dims],
                   [M.act(f).astype(int).tolist() for f in range(M.cat.n_morphisms)], check=False)

    @classmethod
    def constant(cls, cat: FiniteCategory) -> "IntCatModule":
        return cls(cat, [1] * cat.n_objects, [[0]] * cat.n_objects, [[[1]]] * cat.n_morphisms, check=False)


@dataclass
class IntResolution:
    """Integral free resolution of the constant module ``Z``; same layout as :class:`Resolution`."""

    cat: FiniteCategory
    free: list[FreeModule]
    images: list[list[list[int]]]
    complete: bool = False

    def component(self, n: int, X: int) -> list[list[int]]:
        F = self.free[n]
        if n == 0:
            return [[1] * F.dims[X]]
        prev = self.free[n - 1]
        A = [[0] * F.dims[X] for _ in range(prev.dims[X])]
        for k, (j, h) in enumerate(F.basis[X]):
            v = self.images[n][j]
            idx = prev.push(h)
            for src, c in enumerate(v):
                if c:
                    A[int(idx[src])][k] += c
        return A


def _int_cover(cat: FiniteCategory, F: FreeModule | None, sub: list[list[list[int]]]):
    """Generators for the submodule of ``F`` (or of constant ``Z`` if ``F`` is
    None) with objectwise lattice bases ``sub`` (columns)."""
    dims = [len(s) for s in sub]

    def apply(h, v):
        if F is None:
            return list(v)
        idx = F.push(h)
        out = [0] * F.dims[cat.src(h)]
        for s, c in enumerate(v):
            if c:
                out[int(idx[s])] += c
        return out

    W: list[list[list[int]]] = [[] for _ in range(cat.n_objects)]  # generator vectors per object
    lat = [Lattice([], dims[X]) for X in range(cat.n_objects)]
    gens, vecs = [], []
    for Q in cat.sink_order():
        ncols = len(sub[Q][0]) if sub[Q] else 0
        for c in range(ncols):
            v = [sub[Q][r][c] for r in range(dims[Q])]
            if lat[Q].contains(v):
                continue
            gens.append(Q)
            vecs.append(v)
            for X in range(cat.n_objects):
                hs = cat.hom(X, Q)
                if hs:
                    for h in hs:
                        W[X].append(apply(h, v))
                    cols = [list(r) for r in zip(*W[X])]
                    lat[X] = Lattice(cols, dims[X])
    return gens, vecs


def integral_resolution(cat: FiniteCategory, length: int, cap: int = gfp.DIM_CAP) -> IntResolution:
    if cat.n_objects > 12 or cat.n_morphisms > 200:
        raise InputError("integral engine is limited to 12 objects and 200 morphisms")
    gens, vecs = _int_cover(cat, None, [[[1]] for _ in range(cat.n_objects)])
    free = [FreeModule(cat, 2, gens)]
    res = IntResolution(cat, free, [vecs])
    for n in range(1, length + 1):
        F = free[-1]
        if max(F.dims, default=0) > cap:
            raise DimensionBlowup(f"F_{n - 1} has rank {max(F.dims)} > cap {cap}")
        kernel = []
        for X in range(cat.n_objects):
            A = res.component(n - 1, X)
            kernel.append(integer_kernel(A, F.dims[X]) if F.dims[X] else [])
        if all(not k or not k[0] for k in kernel):
            res.complete = True
            break
        kernel = [k if k and k[0] else [[] for _ in range(F.dims[X])] for X, k in enumerate(kernel)]
        gens, vecs = _int_cover(cat, F, kernel)
        free.append(FreeModule(cat, 2, gens))
        res.images.append(vecs)
    return res


def _int_hom_differential(res: IntResolution, N: IntCatModule, n: int) -> list[list[int]]:
    Fn = res.free[n]
    offs_n = np.cumsum([0] + [N.dims[Q] for Q in Fn.gens]).tolist()
    if n + 1 >= len(res.free):
        return []
    Fm = res.free[n + 1]
    offs_m = np.cumsum([0] + [N.dims[Q] for Q in Fm.gens]).tolist()
    D = [[0] * offs_n[-1] for _ in range(offs_m[-1])]
    for j, Qj in enumerate(Fm.gens):
        v = res.images[n + 1][j]
        for k, c in enumerate(v):
            if not c:
                continue
            i, h = Fn.basis[Qj][k]
            A = N.act(h)
            for r in range(len(A)):
                for s in range(len(A[r])):
                    if A[r][s]:
                        D[offs_m[j] + r][offs_n[i] + s] += c * A[r][s]
    return D


def _relations(N: IntCatModule, gens: Sequence[int]) -> list[list[int]]:
    """Relation columns of ``sum_i N(Q_i)`` as a list of column vectors."""
    ts = [t for Q in gens for t in N.torsion[Q]]
    cols = []
    for i, t in enumerate(ts):
        if t:
            e = [0] * len(ts)
            e[i] = t
            cols.append(e)
    return cols


def integral_ext_groups(res: IntResolution, N: IntCatModule, maxdeg: int) -> list[list[int]]:
    """Invariant factors of ``H^n Hom(F_*, N)`` for ``0 <= n <= maxdeg``."""
    out = []
    for n in range(maxdeg + 1):
        if n >= len(res.free):
            out.append([])
            continue
        gens_n = res.free[n].gens
        d = sum(N.dims[Q] for Q in gens_n)
        rel_n = _relations(N, gens_n)
        Dn = _int_hom_differential(res, N, n)
        if Dn:
            rel_m = _relations(N, res.free[n + 1].gens)
            # x is a cocycle iff Dn x lies in the relation lattice of degree n+1
            big = [Dn[r] + [-c[r] for c in rel_m] for r in range(len(Dn))]
            K = integer_kernel(big, d + len(rel_m))
            zcols = [[K[r][c] for r in range(d)] for c in range(len(K[0]) if K else 0)]
        else:
            zcols = [[int(r == c) for r in range(d)] for c in range(d)]
        Zlat = Lattice([list(r) for r in zip(*zcols)] if zcols else [], d)
        bcols = list(rel_n)
        if n >= 1:
            Dp = _int_hom_differential(res, N, n - 1)
            if Dp:
                bcols += [list(c) for c in zip(*Dp)]
        coords = []
        for v in bcols:
            c = Zlat.coords(v)
            if c is None:
                raise AssertionError("coboundary outside the cocycle lattice")
            coords.append(c)
        if Zlat.rank == 0:
            out.append([])
            continue
        mat = [list(r) for r in zip(*coords)] if coords else []
        out.append(quotient_invariants(mat, Zlat.rank) if coords else [0] * Zlat.rank)
    return out


def integral_higher_limits(cat: FiniteCategory, M: IntCatModule, maxdeg: int) -> list[list[int]]:
    """Invariant factors of ``lim^n M`` over ``Z`` (0 entries mean a free summand)."""
    res = integral_resolution(cat, maxdeg + 1)
    return integral_ext_groups(res, M, maxdeg)


def integral_higher_limit(cat: FiniteCategory, M: IntCatModule, n: int) -> list[int]:
    return integral_higher_limits(cat, M, n)[n]
