"""Mackey functors over a fusion system, with mod-p group cohomology as the main example.

A Mackey functor lives on the full orbit category ``O(F)``.  The
contravariant part is a :class:`CatModule`; the covariant part is a matrix
per morphism, ``trans[f]`` of shape ``dim M(tgt) x dim M(src)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable

import numpy as np

from . import gfp
from .catalg import CatModule, Resolution, constant_module, free_resolution, restrict_module
from .category import FiniteCategory, inclusion_by_labels, one_object_category
from .errors import DegreeTooLarge, GroupTooLarge, InputError
from .fusion import FusionSystem, Map, OrbitCategory, inner_class_rep, orbit_category
from .grouptheory import Perm, Subgroup, compose, conj, double_cosets, inverse

MAX_COHOMOLOGY_ORDER = 64
MAX_COHOMOLOGY_DEGREE = 4


@dataclass
class MackeyFunctor:
    base: OrbitCategory
    contravariant: CatModule
    trans: list[np.ndarray]
    name: str = ""

    @property
    def p(self) -> int:
        return self.contravariant.p

    @property
    def fusion(self) -> FusionSystem:
        return self.base.fusion

    @property
    def dims(self) -> list[int]:
        return self.contravariant.dims

    def res(self, f: int) -> np.ndarray:
        return self.contravariant.act(f)

    def tr(self, f: int) -> np.ndarray:
        return self.trans[f]

    def morphism(self, phi: Map, P: Subgroup, Q: Subgroup) -> int:
        """Orbit-category morphism index of ``phi: P -> Q``."""
        cat = self.base
        key = (cat.object_of_subgroup(P), cat.object_of_subgroup(Q), inner_class_rep(phi, Q))
        return cat.morphism_index[key]

    def inclusion(self, P: Subgroup, Q: Subgroup) -> int:
        return self.morphism(P.elements, P, Q)


@dataclass
class MackeyReport:
    ok: bool
    failures: list[str] = field(default_factory=list)
    witness: tuple | None = None


def check_mackey(M: MackeyFunctor) -> MackeyReport:
    """Check the three axioms exhaustively; stop at the first double-coset failure."""
    cat, p = M.base, M.p
    F = M.fusion
    rep = MackeyReport(True)
    # 1: both parts share values (by construction) and have the right shapes
    for f in range(cat.n_morphisms):
        a, b = cat.src(f), cat.tgt(f)
        if M.trans[f].shape != (M.dims[b], M.dims[a]):
            rep.ok = False
            rep.failures.append(f"transfer shape mismatch at morphism {f}")
            return rep
    # covariant functoriality
    for (g, f), h in cat.table.items():
        if not np.array_equal(M.trans[h], gfp.matmul(M.trans[g], M.trans[f], p)):
            rep.ok = False
            rep.failures.append(f"covariant part not functorial at ({g}, {f})")
            rep.witness = ("functoriality", g, f)
            return rep
    # 2: isomorphisms
    for f in range(cat.n_morphisms):
        g = cat.inverse_of(f)
        if g is not None and not np.array_equal(M.trans[f], M.res(g)):
            rep.ok = False
            rep.failures.append(f"M_*(phi) != M^*(phi^-1) at morphism {f}")
            rep.witness = ("iso", f)
            return rep
    # 3: double-coset formula for A, B <= C
    subs = F.subgroups
    for C in subs:
        inC = [X for X in subs if X.members <= C.members]
        for A in inC:
            trA = M.tr(M.inclusion(A, C))
            for B in inC:
                lhs = gfp.matmul(M.res(M.inclusion(B, C)), trA, p)
                rhs = gfp.zeros(M.dims[cat.object_of_subgroup(B)], M.dims[cat.object_of_subgroup(A)])
                for x in double_cosets(B, C, A):
                    xi = inverse(x)
                    A_cap = Subgroup(C.parent, [y for y in A.elements if conj(xi, y) in B])  # A ∩ B^x
                    B_cap = A_cap.conjugate(x)                                              # B ∩ xA
                    cx = tuple(conj(x, y) for y in A_cap.elements)
                    term = M.res(M.inclusion(A_cap, A))
                    term = gfp.matmul(M.tr(M.morphism(cx, A_cap, B_cap)), term, p)
                    term = gfp.matmul(M.tr(M.inclusion(B_cap, B)), term, p)
                    rhs = (rhs + term) % p
                if not np.array_equal(lhs, rhs):
                    rep.ok = False
                    rep.failures.append(f"double-coset formula fails for A={A}, B={B}, C={C}")
                    rep.witness = (A, B, C)
                    return rep
    return rep


def fixed_point_mackey(F: FusionSystem, p: int | None = None,
                       base: OrbitCategory | None = None) -> MackeyFunctor:
    """``M(P) = k``, restrictions the identity, transfer along ``P -> Q`` is ``[Q : phi(P)]``."""
    p = F.p if p is None else gfp.check_prime(p)
    cat = base if base is not None else orbit_category(F)
    contra = constant_module(cat, p)
    trans = []
    for f in range(cat.n_morphisms):
        P, Q = cat.subgroup(cat.src(f)), cat.subgroup(cat.tgt(f))
        trans.append(np.array([[(Q.order // P.order) % p]], dtype=np.int64))
    return MackeyFunctor(cat, contra, trans, name="fixed-point")


# ---------------------------------------------------------------------------
# group cohomology


def group_category(P: Subgroup) -> FiniteCategory:
    """``P`` as a one-object category; modules are right ``kP``-modules."""
    return one_object_category(P.elements, compose, P.identity, name=f"B{P.order}", label="*")


class GroupCohomology:
    """``H^j(P; F_p)`` from a free resolution of the trivial module over ``F_p P``."""

    def __init__(self, P: Subgroup, p: int, maxdeg: int):
        self.P = P
        self.p = p
        self.maxdeg = maxdeg
        self.cat = group_category(P)
        self.elem_morphism = {self.cat.morphisms[f].label: f for f in range(self.cat.n_morphisms)}
        self.trivial = constant_module(self.cat, p)
        self.res: Resolution = free_resolution(self.trivial, maxdeg + 1, use_cache=False)
        self._solvers: dict[int, gfp.LinearSolver] = {}
        self.H: dict[int, gfp.Subquotient] = {}
        for n in range(maxdeg + 1):
            self.H[n] = self._cohomology(n)

    def rank(self, n: int) -> int:
        return len(self.res.free[n].gens) if n < len(self.res.free) else 0

    def dim(self, n: int) -> int:
        return self.H[n].dim

    def _coboundary(self, n: int) -> np.ndarray:
        """``Hom(F_n, k) -> Hom(F_{n+1}, k)``; cochains are values on generators."""
        if n < 0:
            return gfp.zeros(self.rank(0), 0)
        r_n, r_m = self.rank(n), self.rank(n + 1)
        D = gfp.zeros(r_m, r_n)
        if r_m:
            F = self.res.free[n]
            for j, v in enumerate(self.res.images[n + 1]):
                for k in np.flatnonzero(v):
                    D[j, F.basis[0][k][0]] += v[k]
        return D % self.p

    def _cohomology(self, n: int) -> gfp.Subquotient:
        dn = self._coboundary(n)
        Z = gfp.nullspace(dn, self.p) if dn.shape[0] else gfp.identity(self.rank(n))
        B = self._coboundary(n - 1) if n >= 1 else gfp.zeros(self.rank(0), 0)
        return gfp.Subquotient(Z, B, self.p)

    def solver(self, n: int) -> gfp.LinearSolver:
        if n not in self._solvers:
            self._solvers[n] = gfp.LinearSolver(self.res.component(n, 0), self.p)
        return self._solvers[n]

    def act(self, n: int, g: Perm, v: np.ndarray) -> np.ndarray:
        """Right action of ``g`` on ``F_n``."""
        return self.res.free[n].apply(self.elem_morphism[g], v)

    def generator_sum(self, n: int, v: np.ndarray) -> np.ndarray:
        """A ``kP``-linear functional to ``k`` only sees, per generator, the coefficient sum."""
        F = self.res.free[n]
        out = np.zeros((self.rank(n),) + v.shape[1:], dtype=np.int64)
        gens = np.array([i for i, _ in F.basis[0]], dtype=np.int64)
        np.add.at(out, gens, v)
        return out % self.p


def restriction_chain_map(HP: GroupCohomology, HQ: GroupCohomology, phi: dict[Perm, Perm],
                          maxdeg: int) -> list[np.ndarray]:
    """Chain map ``F(P) -> Res_phi F(Q)`` over the identity of ``k``.

    Returns, per degree, the matrix whose column ``i`` is the image of
    generator ``i`` of ``F(P)_n`` in ``F(Q)_n``.
    """
    p = HP.p
    out = []
    for n in range(maxdeg + 1):
        FP, FQ = HP.res.free[n], HQ.res.free[n]
        cols = []
        for i in range(len(FP.gens)):
            if n == 0:
                target = np.array([1], dtype=np.int64)
                z = HQ.solver(0).solve(target.reshape(-1, 1))
            else:
                prev = out[-1]
                v = HP.res.images[n][i]
                rhs = np.zeros(HQ.res.free[n - 1].dims[0], dtype=np.int64)
                for k in np.flatnonzero(v):
                    gi, h = HP.res.free[n - 1].basis[0][k]
                    g = HP.cat.morphisms[h].label
                    rhs = (rhs + int(v[k]) * HQ.act(n - 1, phi[g], prev[:, gi])) % p
                z = HQ.solver(n).solve(rhs.reshape(-1, 1))
            if z is None:
                raise AssertionError("chain map lift failed")
            cols.append(z[:, 0])
        out.append(np.stack(cols, axis=1) if cols else gfp.zeros(FQ.dims[0], 0))
    return out


def induced_map(HP: GroupCohomology, HQ: GroupCohomology, phi: dict[Perm, Perm], n: int,
                chain: list[np.ndarray] | None = None) -> np.ndarray:
    """``phi^*: H^n(Q) -> H^n(P)`` as a ``dim H^n(P) x dim H^n(Q)`` matrix."""
    p = HP.p
    HQn, HPn = HQ.H[n], HP.H[n]
    if HQn.dim == 0 or HPn.dim == 0:
        return gfp.zeros(HPn.dim, HQn.dim)
    chain = chain if chain is not None else restriction_chain_map(HP, HQ, phi, n)
    T = HQ.generator_sum(n, chain[n]).T  # r_P x r_Q: pullback of cochains
    pulled = gfp.matmul(T, HQn.basis, p)
    return HPn.coords(pulled)


def left_transversal(Q: Subgroup, P: Subgroup, rng: np.random.Generator | None = None) -> list[Perm]:
    """Representatives ``t`` of the left cosets ``tP`` in ``Q``."""
    elems = list(Q.elements)
    if rng is not None:
        elems = [elems[k] for k in rng.permutation(len(elems))]
    seen: set[Perm] = set()
    reps = []
    for t in elems:
        if t in seen:
            continue
        reps.append(t)
        seen.update(compose(t, x) for x in P.elements)
    return reps


def transfer_map(HP: GroupCohomology, HQ: GroupCohomology, n: int,
                 rng: np.random.Generator | None = None) -> np.ndarray:
    """``tr_P^Q: H^n(P) -> H^n(Q)`` for ``P <= Q`` via a chain map
    ``Res_P F(Q) -> F(P)`` and the coset-sum formula."""
    p = HP.p
    P, Q = HP.P, HQ.P
    if HP.dim(n) == 0 or HQ.dim(n) == 0:
        return gfp.zeros(HQ.dim(n), HP.dim(n))
    T = left_transversal(Q, P, rng)
    split = {}
    for t in T:
        for x in P.elements:
            split[compose(t, x)] = (t, x)
    sigma: list[np.ndarray] = []  # full matrices F(Q)_m -> F(P)_m
    for m in range(n + 1):
        FQ, FP = HQ.res.free[m], HP.res.free[m]
        # images of the kP-basis elements (i, t)
        base_img: dict[tuple[int, Perm], np.ndarray] = {}
        for i in range(len(FQ.gens)):
            for t in T:
                if m == 0:
                    z = HP.solver(0).solve(np.array([[1]], dtype=np.int64))
                else:
                    # d((i, t)) = act(t)(d e_i) in F(Q)_{m-1}
                    de = HQ.res.images[m][i]
                    dv = HQ.act(m - 1, t, de.reshape(-1, 1))[:, 0]
                    rhs = gfp.matmul(sigma[m - 1], dv.reshape(-1, 1), p)
                    z = HP.solver(m).solve(rhs)
                if z is None:
                    raise AssertionError("transfer chain map lift failed")
                base_img[(i, t)] = z[:, 0]
        S = gfp.zeros(FP.dims[0], FQ.dims[0])
        for k, (i, h) in enumerate(FQ.basis[0]):
            t, x = split[HQ.cat.morphisms[h].label]
            S[:, k] = HP.act(m, x, base_img[(i, t)].reshape(-1, 1))[:, 0]
        sigma.append(S)
    HPn, HQn = HP.H[n], HQ.H[n]
    FQ = HQ.res.free[n]
    # u in Hom_kP(F(P)_n, k) -> u o sigma on F(Q)_n basis -> sum over (i, t)
    u_sigma = gfp.matmul(HP.generator_sum(n, sigma[n]).T, HPn.basis, p)  # dim F(Q)_n x dim H(P)
    out = gfp.zeros(len(FQ.gens), HPn.dim)
    for i in range(len(FQ.gens)):
        for t in T:
            k = FQ.pos[0][(i, HQ.elem_morphism[t])]
            out[i] += u_sigma[k]
    return HQn.coords(out % p)


class CohomologyData:
    """Per-subgroup cohomology objects, shared between fusion systems over ``S``."""

    def __init__(self, subgroups: list[Subgroup], p: int, maxdeg: int):
        self.subgroups = subgroups
        self.p = p
        self.maxdeg = maxdeg
        self._H: dict[int, GroupCohomology] = {}

    def H(self, i: int) -> GroupCohomology:
        if i not in self._H:
            self._H[i] = GroupCohomology(self.subgroups[i], self.p, self.maxdeg)
        return self._H[i]


def cohomology_mackey(F: FusionSystem, j: int, p: int | None = None,
                      base: OrbitCategory | None = None,
                      data: CohomologyData | None = None) -> MackeyFunctor:
    """``P -> H^j(P; F_p)`` with induced maps and transfers."""
    p = F.p if p is None else gfp.check_prime(p)
    if j > MAX_COHOMOLOGY_DEGREE or j < 0:
        raise DegreeTooLarge(f"cohomology degree must be in 0..{MAX_COHOMOLOGY_DEGREE}")
    if F.S.order > MAX_COHOMOLOGY_ORDER:
        raise GroupTooLarge(f"|S| = {F.S.order} exceeds {MAX_COHOMOLOGY_ORDER}")
    cat = base if base is not None else orbit_category(F)
    data = data if data is not None else CohomologyData(F.subgroups, p, j)
    dims = [data.H(i).dim(j) for i in cat.objects]
    res_mats, tr_mats = [], []
    tr_cache: dict[tuple[int, int], np.ndarray] = {}
    for f in range(cat.n_morphisms):
        a, b = cat.src(f), cat.tgt(f)
        P = cat.subgroup(a)
        HP, HQ = data.H(cat.objects[a]), data.H(cat.objects[b])
        phi_t = cat.rep(f)
        phi = dict(zip(P.elements, phi_t))
        res_mats.append(induced_map(HP, HQ, phi, j))
        # covariant: tr_{phi(P)}^Q o (phi^-1)^*
        r = F.subgroup_of_image(phi_t)
        HR = data.H(r)
        inv = dict(zip(phi_t, P.elements))
        back = induced_map(HR, HP, inv, j)           # H(P) -> H(R)
        key = (r, cat.objects[b])
        if key not in tr_cache:
            tr_cache[key] = transfer_map(HR, HQ, j)  # H(R) -> H(Q)
        tr_mats.append(gfp.matmul(tr_cache[key], back, p))
    contra = CatModule(cat, p, dims, res_mats, check=False, name=f"H^{j}")
    return MackeyFunctor(cat, contra, tr_mats, name=f"H^{j}")


def inner_automorphisms_trivial(H: GroupCohomology, n: int) -> bool:
    """Every ``c_q`` (``q`` in ``P``) induces the identity on ``H^n(P)``."""
    P = H.P
    for q in P.generators:
        phi = {y: conj(q, y) for y in P.elements}
        if not np.array_equal(induced_map(H, H, phi, n), gfp.identity(H.dim(n))):
            return False
    return True


def bar_cohomology_dims(P: Subgroup, p: int, maxdeg: int) -> list[int]:
    """Brute-force ``dim H^n(P; F_p)`` from inhomogeneous bar cochains."""
    elems = list(P.elements)
    idx = {g: i for i, g in enumerate(elems)}
    N = len(elems)
    mul = [[idx[compose(a, b)] for b in elems] for a in elems]

    def coboundary(n: int) -> np.ndarray:
        # C^n = functions on P^n; (df)(g_1..g_{n+1})
        rows = N ** (n + 1)
        cols = N ** n
        D = gfp.zeros(rows, cols)
        for r, gs in enumerate(product(range(N), repeat=n + 1)):
            def col(t):
                c = 0
                for x in t:
                    c = c * N + x
                return c
            D[r, col(gs[1:])] += 1
            for i in range(n):
                merged = gs[:i] + (mul[gs[i]][gs[i + 1]],) + gs[i + 2:]
                D[r, col(merged)] += (-1) ** (i + 1)
            D[r, col(gs[:n])] += (-1) ** (n + 1)
        return D % p

    ranks = [gfp.rank(coboundary(n), p) for n in range(maxdeg + 1)]
    return [N ** n - ranks[n] - (ranks[n - 1] if n else 0) for n in range(maxdeg + 1)]


def restrict_to_orbit_subcategory(M: MackeyFunctor, family: Iterable[int | Subgroup],
                                  F: FusionSystem | None = None) -> CatModule:
    """Contravariant part restricted to ``O_C(F)`` (``F`` defaults to the functor's own system;
    a subsystem gives a non-full subcategory matched by labels)."""
    F = F if F is not None else M.fusion
    sub = orbit_category(F, family)
    inc = inclusion_by_labels(sub, M.base)
    return restrict_module(M.contravariant, inc)


def corrupt_transfer(M: MackeyFunctor, f: int) -> MackeyFunctor:
    """A copy with transfer along morphism ``f`` perturbed (negative control)."""
    trans = [t.copy() for t in M.trans]
    if trans[f].size == 0:
        raise InputError("cannot corrupt a zero-dimensional transfer")
    trans[f][0, 0] = (trans[f][0, 0] + 1) % M.p
    return MackeyFunctor(M.base, M.contravariant, trans, name=M.name + "*")
