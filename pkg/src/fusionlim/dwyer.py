"""Coset posets of finite groups and the coset-graph model for amalgams.

For a finite group ``G`` we build the poset of pairs ``(Hx, P)`` and compute
the homology of ``C_G(P) \\ N^P`` directly from its chains.  For an amalgam
``G1 *_S G2`` we use a finite bipartite graph whose first homology models
``Ab(C_G(P)/Z(P)) (x) F_p``, and assemble it into a module over ``O_C(F)``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import gfp
from .catalg import CatModule
from .errors import FamilyNotConjugationClosed, InputError, NotCentric
from .fusion import FusionSystem, Map, OrbitCategory, orbit_category
from .grouptheory import (FiniteGroup, Perm, Subgroup, centralizer, compose, conj, hom_G,
                          inverse, is_p_power, named_group, subgroups_of)

HOMOLOGY_DEGREE_CAP = 4


def is_conjugation_closed(G: FiniteGroup, family: Iterable[Subgroup]) -> bool:
    fam = {P.members for P in family}
    for P in family:
        for g in G.generators:
            if P.conjugate(g).members not in fam:
                return False
    return True


def is_product_closed(family: Sequence[Subgroup]) -> bool:
    """If ``PQ`` is a subgroup for ``P, Q`` in the family, it is in the family."""
    fam = {P.members for P in family}
    for P in family:
        for Q in family:
            prod = frozenset(compose(a, b) for a in P.elements for b in Q.elements)
            if prod not in fam and P.join(*Q.generators).order == len(prod):
                return False
    return True


@dataclass
class CosetPoset:
    """Objects ``(Hx, P)`` with ``x P x^-1 <= H``; ``Hx`` is named by its smallest element."""

    G: FiniteGroup
    H: Subgroup
    family: list[Subgroup]
    objects: list[tuple[Perm, int]]
    coset_of: dict[Perm, Perm] = field(repr=False)

    def leq(self, a: tuple[Perm, int], b: tuple[Perm, int]) -> bool:
        return a[0] == b[0] and self.family[a[1]].members <= self.family[b[1]].members

    def act(self, g: Perm, obj: tuple[Perm, int]) -> tuple[Perm, int]:
        """``g . (Hx, P) = (H x g^-1, g P g^-1)``."""
        x, i = obj
        return (self.coset_of[compose(x, inverse(g))], self._fam_index[self.family[i].conjugate(g).members])

    @property
    def _fam_index(self) -> dict:
        idx = self.__dict__.get("_fi")
        if idx is None:
            idx = {P.members: i for i, P in enumerate(self.family)}
            self.__dict__["_fi"] = idx
        return idx


def build_coset_poset(G: FiniteGroup, H: Subgroup, family: Sequence[Subgroup],
                      require_products: bool = False) -> CosetPoset:
    family = sorted({P.members: P for P in family}.values(), key=Subgroup.sort_key)
    if not is_conjugation_closed(G, family):
        raise FamilyNotConjugationClosed("family is not closed under G-conjugation")
    if require_products and not is_product_closed(family):
        raise FamilyNotConjugationClosed("family is not closed under products")
    coset_of: dict[Perm, Perm] = {}
    reps = []
    for x in G.elements:
        if x in coset_of:
            continue
        reps.append(x)
        for h in H.elements:
            coset_of[compose(h, x)] = x
    objects = []
    for x in reps:
        for i, P in enumerate(family):
            if all(conj(x, y) in H for y in P.generators):
                objects.append((x, i))
    return CosetPoset(G, H, family, objects, coset_of)


@dataclass
class ChainComplex:
    """``C_n`` with boundaries ``d_n: C_n -> C_{n-1}`` (``boundaries[n]``, ``n >= 1``)."""

    dims: list[int]
    boundaries: dict[int, np.ndarray]
    p: int

    def check(self) -> None:
        for n in range(2, len(self.dims)):
            prod = gfp.matmul(self.boundaries[n - 1], self.boundaries[n], self.p)
            if not gfp.is_zero(prod):
                raise AssertionError(f"d o d != 0 at degree {n}")

    def homology(self, maxdeg: int) -> list[int]:
        out = []
        for n in range(maxdeg + 1):
            dn = self.boundaries.get(n)
            dn1 = self.boundaries.get(n + 1)
            r_out = gfp.rank(dn, self.p) if n >= 1 and dn is not None and dn.size else 0
            r_in = gfp.rank(dn1, self.p) if dn1 is not None and dn1.size else 0
            out.append(self.dims[n] - r_out - r_in)
        return out


def fixed_quotient_complex(poset: CosetPoset, P: Subgroup, p: int,
                           maxdeg: int = HOMOLOGY_DEGREE_CAP) -> ChainComplex:
    """Chains of ``C_G(P) \\ (nerve)^P`` up to degree ``maxdeg + 1``."""
    fixed = [o for o in poset.objects if all(poset.act(g, o) == o for g in P.generators)]
    fixed_set = set(fixed)
    by_coset: dict[Perm, list[tuple[Perm, int]]] = {}
    for o in fixed:
        by_coset.setdefault(o[0], []).append(o)
    up: dict[tuple, list[tuple]] = {}
    for objs in by_coset.values():
        for a in objs:
            up[a] = sorted(b for b in objs if b != a and poset.leq(a, b))
    chains: list[list[tuple]] = [[(o,) for o in sorted(fixed)]]
    for n in range(1, maxdeg + 2):
        chains.append([c + (b,) for c in chains[-1] for b in up[c[-1]]])
    C = centralizer(poset.G, P).elements
    orbit_id: list[dict[tuple, int]] = []
    reps: list[list[tuple]] = []
    for n, cs in enumerate(chains):
        ids: dict[tuple, int] = {}
        rs = []
        for c in cs:
            if c in ids:
                continue
            k = len(rs)
            rs.append(c)
            for g in C:
                img = tuple(poset.act(g, o) for o in c)
                if img[0] not in fixed_set:
                    raise AssertionError("centralizer does not preserve fixed points")
                ids[img] = k
        orbit_id.append(ids)
        reps.append(rs)
    dims = [len(r) for r in reps]
    bounds = {}
    for n in range(1, len(reps)):
        D = gfp.zeros(dims[n - 1], dims[n])
        for k, c in enumerate(reps[n]):
            for i in range(n + 1):
                face = c[:i] + c[i + 1:]
                D[orbit_id[n - 1][face], k] += (-1) ** i
        bounds[n] = D % p
    return ChainComplex(dims, bounds, p)


def fixed_quotient_homology(poset: CosetPoset, P: Subgroup, p: int,
                            maxdeg: int = HOMOLOGY_DEGREE_CAP) -> list[int]:
    """``dim H_n(C_G(P) \\ N^P; F_p)`` for ``0 <= n <= maxdeg``."""
    cx = fixed_quotient_complex(poset, P, p, maxdeg)
    return cx.homology(maxdeg)


def predicted_h0(G: FiniteGroup, H: Subgroup, P: Subgroup) -> int:
    """``|H \\ Hom_G(P, H)|``: maps up to postcomposition with ``H``-conjugation."""
    maps = {m.images for m in hom_G(G, P, H)}
    seen: set[tuple] = set()
    count = 0
    for phi in sorted(maps):
        if phi in seen:
            continue
        count += 1
        for h in H.elements:
            seen.add(tuple(conj(h, y) for y in phi))
    return count


FAMILY_KINDS = ("all", "p-subgroups", "trivial", "overgroups")
ORACLE_POOL = ("S3", "C6", "D8", "Q8", "D10", "A4", "D12", "S4", "A5", "PSL27")


def is_normal(G: FiniteGroup, N: Subgroup) -> bool:
    return all(N.conjugate(g).members == N.members for g in G.generators)


def family_of(G: FiniteGroup, kind: str, p: int = 2, N: Subgroup | None = None,
              subgroups: Sequence[Subgroup] | None = None) -> list[Subgroup]:
    """Conjugation- and product-closed families: all subgroups, ``p``-subgroups,
    ``{1}``, or the overgroups of a normal subgroup ``N``."""
    if kind == "trivial":
        return [G.subgroup([])]
    subs = list(subgroups) if subgroups is not None else subgroups_of(G.whole)
    if kind == "all":
        return subs
    if kind == "p-subgroups":
        return [K for K in subs if is_p_power(K.order, p)]
    if kind == "overgroups":
        if N is None or not is_normal(G, N):
            raise InputError("overgroup family needs a normal subgroup N")
        return [K for K in subs if N.members <= K.members]
    raise InputError(f"unknown family kind {kind!r}; expected one of {FAMILY_KINDS}")


@dataclass
class OracleCase:
    group: str
    H: Subgroup
    P: Subgroup
    family: str
    p: int
    homology: list[int]
    predicted: int
    asserted: bool      # False when the family is not product-closed or misses P

    @property
    def ok(self) -> bool:
        return not self.asserted or (self.homology[0] == self.predicted and not any(self.homology[1:]))

    def to_json(self) -> dict:
        return {"group": self.group, "H": self.H.to_json(), "P": self.P.to_json(), "family": self.family,
                "p": self.p, "homology": self.homology, "predicted_h0": self.predicted,
                "asserted": self.asserted, "ok": self.ok}


def run_oracle(G: FiniteGroup, H: Subgroup, P: Subgroup, family: Sequence[Subgroup], p: int,
               maxdeg: int = HOMOLOGY_DEGREE_CAP, family_name: str = "") -> OracleCase:
    """Homology of the fixed-point quotient against ``|H \\ Hom_G(P, H)|``.

    The comparison is only asserted when the family is closed under products
    and contains ``P``."""
    poset = build_coset_poset(G, H, family)
    hom = fixed_quotient_homology(poset, P, p, maxdeg)
    asserted = P.members in {K.members for K in poset.family} and is_product_closed(poset.family)
    return OracleCase(G.name, H, P, family_name, p, hom, predicted_h0(G, H, P), asserted)


def random_oracle_cases(rng: np.random.Generator, count: int, pool: Sequence[str] = ORACLE_POOL,
                        maxdeg: int = HOMOLOGY_DEGREE_CAP) -> list[OracleCase]:
    """Random ``(G, H, P)``: ``H`` generated by random elements, a random family kind, ``P`` drawn from the family."""
    groups = {name: named_group(name) for name in pool}
    subs_cache: dict[str, list[Subgroup]] = {}
    out = []
    for _ in range(count):
        name = pool[int(rng.integers(len(pool)))]
        G = groups[name]
        if name not in subs_cache:
            subs_cache[name] = subgroups_of(G.whole)
        subs = subs_cache[name]
        elts = G.elements

        def rand_sub(k: int) -> Subgroup:
            return G.subgroup([elts[int(rng.integers(len(elts)))] for _ in range(k)])

        H = rand_sub(int(rng.integers(1, 3)))
        primes = [q for q in (2, 3, 5, 7) if G.order % q == 0]
        p = primes[int(rng.integers(len(primes)))]
        kind = FAMILY_KINDS[int(rng.integers(len(FAMILY_KINDS)))]
        N = None
        if kind == "overgroups":
            normals = [K for K in subs if is_normal(G, K)]
            N = normals[int(rng.integers(len(normals)))]
        fam = family_of(G, kind, p, N, subgroups=subs)
        P = fam[int(rng.integers(len(fam)))]
        label = kind if N is None else f"{kind}({N.order})"
        out.append(run_oracle(G, H, P, fam, p, maxdeg, family_name=label))
    return out


# ---------------------------------------------------------------------------
# amalgam coset graph


@dataclass
class CosetGraph:
    """Bipartite graph: ``V_S`` classes joined to their ``V_1`` and ``V_2`` classes."""

    P: Subgroup
    vs: list[Map]                 # representative per V_S class
    vs_of: dict[Map, int]         # every map -> V_S class
    vi: list[list[Map]]           # representatives per V_i class, i = 0, 1
    vi_of: list[dict[Map, int]]
    edges: list[tuple[int, int, int]]  # (V_S class, side i, V_i class)
    p: int

    @property
    def n_vertices(self) -> int:
        return len(self.vs) + len(self.vi[0]) + len(self.vi[1])

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def _vertex(self, kind: int, k: int) -> int:
        # kind 0 = V_S, 1 = V_1, 2 = V_2
        if kind == 0:
            return k
        if kind == 1:
            return len(self.vs) + k
        return len(self.vs) + len(self.vi[0]) + k

    def incidence(self) -> np.ndarray:
        D = gfp.zeros(self.n_vertices, self.n_edges)
        for e, (s, i, c) in enumerate(self.edges):
            D[self._vertex(0, s), e] -= 1
            D[self._vertex(i + 1, c), e] += 1
        return D % self.p

    def forest(self) -> tuple[list[int], list[int], int]:
        """(tree edges, non-tree edges, component count) of a BFS spanning forest."""
        adj: dict[int, list[tuple[int, int]]] = {v: [] for v in range(self.n_vertices)}
        for e, (s, i, c) in enumerate(self.edges):
            a, b = self._vertex(0, s), self._vertex(i + 1, c)
            adj[a].append((e, b))
            adj[b].append((e, a))
        seen = [False] * self.n_vertices
        tree: list[int] = []
        comps = 0
        for root in range(self.n_vertices):
            if seen[root]:
                continue
            comps += 1
            seen[root] = True
            queue = deque([root])
            while queue:
                v = queue.popleft()
                for e, w in sorted(adj[v]):
                    if not seen[w]:
                        seen[w] = True
                        tree.append(e)
                        queue.append(w)
        tree.sort()
        tset = set(tree)
        return tree, [e for e in range(self.n_edges) if e not in tset], comps

    @property
    def h1_dim(self) -> int:
        _, _, c = self.forest()
        return self.n_edges - self.n_vertices + c

    def cycle_basis(self) -> tuple[np.ndarray, list[int]]:
        """Fundamental cycles (columns over edges), one per non-tree edge."""
        tree, non_tree, _ = self.forest()
        D = self.incidence()
        basis = gfp.zeros(self.n_edges, len(non_tree))
        if non_tree:
            solver = gfp.LinearSolver(D[:, tree], self.p) if tree else None
            for k, e in enumerate(non_tree):
                basis[e, k] = 1
                if solver is not None:
                    zt = solver.solve((-D[:, e]) % self.p)
                    if zt is None:
                        raise AssertionError("fundamental cycle does not close")
                    basis[tree, k] = zt
        return basis, non_tree

    def edge_list(self) -> str:
        lines = []
        for s, i, c in self.edges:
            lines.append(f"S{s} G{i + 1}:{c}")
        return "\n".join(lines) + "\n"


def _classes(maps: Sequence[Map], orbit) -> tuple[list[Map], dict[Map, int]]:
    reps: list[Map] = []
    of: dict[Map, int] = {}
    for phi in sorted(maps):
        if phi in of:
            continue
        k = len(reps)
        reps.append(phi)
        for psi in orbit(phi):
            of[psi] = k
    return reps, of


def amalgam_graph(F: FusionSystem, F1: FusionSystem, F2: FusionSystem, P: Subgroup | int) -> CosetGraph:
    i = P if isinstance(P, int) else F.index(P)
    P = F.subgroups[i]
    if not F.is_centric(i):
        raise NotCentric(f"{P} is not F-centric")
    S = F.S
    maps = F.hom(i, S)
    mapset = set(maps)

    def s_orbit(phi):
        return {tuple(conj(s, y) for y in phi) for s in S.elements}

    vs, vs_of = _classes(maps, s_orbit)
    vi, vi_of = [], []
    for Fi in (F1, F2):
        def fi_orbit(phi, Fi=Fi):
            R = F.subgroup_of_image(phi)
            Rg = F.subgroups[R]
            out = set()
            for theta in Fi.maps[R]:
                out.add(tuple(theta[Rg.position[y]] for y in phi))
            return out & mapset

        reps, of = _classes(maps, fi_orbit)
        vi.append(reps)
        vi_of.append(of)
    edges = [(s, side, vi_of[side][vs[s]]) for s in range(len(vs)) for side in (0, 1)]
    return CosetGraph(P, vs, vs_of, vi, vi_of, edges, F.p)


def graph_map(GQ: CosetGraph, GP: CosetGraph, phi: Map, Q: Subgroup) -> np.ndarray:
    """Edge map ``E(Q) -> E(P)``, ``[psi] -> [psi o phi]`` for ``phi: P -> Q``."""
    index = {e: k for k, e in enumerate(GP.edges)}
    A = gfp.zeros(GP.n_edges, GQ.n_edges)
    for k, (s, side, _) in enumerate(GQ.edges):
        psi = GQ.vs[s]
        comp = tuple(psi[Q.position[y]] for y in phi)
        s2 = GP.vs_of[comp]
        A[index[(s2, side, GP.vi_of[side][GP.vs[s2]])], k] = 1
    return A


def cgpc_module(F: FusionSystem, F1: FusionSystem, F2: FusionSystem,
                base: OrbitCategory | None = None, family: Iterable[int] | None = None,
                p: int | None = None) -> CatModule:
    """``P -> H_1(amalgam_graph(P); F_p)`` as a module over ``O_C(F)``."""
    p = F.p if p is None else p
    if base is None:
        base = orbit_category(F, F.centric_family() if family is None else family)
    graphs = {}
    cycle = {}
    for a in range(base.n_objects):
        g = amalgam_graph(F, F1, F2, base.objects[a])
        if g.p != p:
            g = CosetGraph(g.P, g.vs, g.vs_of, g.vi, g.vi_of, g.edges, p)
        graphs[a] = g
        cycle[a] = g.cycle_basis()
    dims = [cycle[a][0].shape[1] for a in range(base.n_objects)]
    mats = []
    for f in range(base.n_morphisms):
        a, b = base.src(f), base.tgt(f)
        A = graph_map(graphs[b], graphs[a], base.rep(f), base.subgroup(b))
        img = gfp.matmul(A, cycle[b][0], p)
        non_tree = cycle[a][1]
        mats.append(img[non_tree, :] if non_tree else gfp.zeros(0, dims[b]))
    return CatModule(base, p, dims, mats, check=True, name="C_GpC")
