"""Fusion systems over a finite p-group, their centric subgroups and orbit categories.

A morphism ``P -> S`` is stored as its graph: the tuple of images of
``P.elements``.  ``Hom_F(P, Q)`` is the set of stored maps out of ``P``
whose image lies in ``Q``.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Mapping, Sequence

from .category import FiniteCategory
from .errors import (FamilyNotOverconjugationClosed, InputError, MismatchedAmbientGroup,
                     NotPSubgroup)
from .gfp import check_prime
from .grouptheory import (FiniteGroup, Perm, Subgroup, center, centralizer, compose, conj,
                          is_p_power, is_sylow, subgroups_of, transporter)

Map = tuple[Perm, ...]


def extend_hom(P: Subgroup, gen_images: Sequence[Perm]) -> Map:
    """The homomorphism on ``P`` determined by images of ``P.generators``."""
    images = {P.identity: P.identity}
    queue = deque([P.identity])
    while queue:
        x = queue.popleft()
        for g, hg in zip(P.generators, gen_images):
            y = compose(x, g)
            if y not in images:
                images[y] = compose(images[x], hg)
                queue.append(y)
    return tuple(images[y] for y in P.elements)


class FusionSystem:
    """A (not necessarily saturated) fusion system over ``S``."""

    def __init__(self, S: Subgroup, p: int, maps: Mapping[int, Iterable[Map]],
                 subgroups: Sequence[Subgroup] | None = None, name: str = ""):
        self.S = S
        self.p = check_prime(p)
        if not is_p_power(S.order, self.p):
            raise NotPSubgroup(f"|S| = {S.order} is not a power of {p}")
        self.subgroups: list[Subgroup] = list(subgroups) if subgroups is not None else subgroups_of(S)
        self._index = {P.members: i for i, P in enumerate(self.subgroups)}
        self.maps: list[frozenset[Map]] = [frozenset(maps.get(i, ())) for i in range(len(self.subgroups))]
        self.name = name

    # -- indexing --------------------------------------------------------

    def index(self, P: Subgroup | Iterable[Perm]) -> int:
        key = P.members if isinstance(P, Subgroup) else frozenset(P)
        try:
            return self._index[key]
        except KeyError:
            raise InputError("not a subgroup of S") from None

    def subgroup_of_image(self, phi: Map) -> int:
        return self._index[frozenset(phi)]

    def __eq__(self, other) -> bool:
        return isinstance(other, FusionSystem) and self.S == other.S and self.maps == other.maps

    def __hash__(self):
        return hash((self.S, tuple(self.maps)))

    def __repr__(self) -> str:
        return f"FusionSystem({self.name or '?'}, |S|={self.S.order}, morphisms={self.n_morphisms})"

    @property
    def n_morphisms(self) -> int:
        return sum(len(m) for m in self.maps)

    # -- morphisms -------------------------------------------------------

    def hom(self, P: Subgroup | int, Q: Subgroup | int) -> list[Map]:
        i = P if isinstance(P, int) else self.index(P)
        Qs = (self.subgroups[Q] if isinstance(Q, int) else Q).members
        return sorted(phi for phi in self.maps[i] if Qs.issuperset(phi))

    def aut(self, P: Subgroup | int) -> list[Map]:
        return self.hom(P, P)

    def conjugacy_class(self, P: Subgroup | int) -> list[Subgroup]:
        i = P if isinstance(P, int) else self.index(P)
        idx = sorted({self.subgroup_of_image(phi) for phi in self.maps[i]})
        return [self.subgroups[j] for j in idx]

    def classes(self) -> list[list[int]]:
        """Partition of subgroup indices into F-conjugacy classes."""
        seen: set[int] = set()
        out = []
        for i in range(len(self.subgroups)):
            if i in seen:
                continue
            cls = sorted({self.subgroup_of_image(phi) for phi in self.maps[i]})
            seen.update(cls)
            out.append(cls)
        return out

    def is_centric(self, P: Subgroup | int) -> bool:
        for Q in self.conjugacy_class(P):
            if centralizer(self.S, Q) != center(Q):
                return False
        return True

    def centric_family(self) -> list[int]:
        return [i for i in range(len(self.subgroups)) if self.is_centric(i)]

    def all_family(self) -> list[int]:
        return list(range(len(self.subgroups)))

    def is_overconjugation_closed(self, family: Iterable[int]) -> bool:
        fam = set(family)
        for i in fam:
            for phi in self.maps[i]:
                img = frozenset(phi)
                for j, Q in enumerate(self.subgroups):
                    if j not in fam and img <= Q.members:
                        return False
        return True

    def apply(self, phi: Map, P: Subgroup, y: Perm) -> Perm:
        return phi[P.position[y]]

    # -- serialization ---------------------------------------------------

    def to_json(self) -> dict:
        elt = {x: k for k, x in enumerate(self.S.elements)}
        homs = []
        for i, P in enumerate(self.subgroups):
            gpos = [P.position[g] for g in P.generators]
            homs.append(sorted([elt[phi[k]] for k in gpos] for phi in self.maps[i]))
        return {
            "p": self.p,
            "name": self.name,
            "group": self.S.parent.to_json(),
            "S": self.S.to_json(),
            "subgroups": [P.to_json() for P in self.subgroups],
            "homs": homs,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "FusionSystem":
        from .grouptheory import group_from_json
        try:
            G = group_from_json(obj["group"])
            S = G.subgroup(obj["S"])
            subgroups = subgroups_of(S)
            index = {P.members: i for i, P in enumerate(subgroups)}
            maps: dict[int, list[Map]] = {}
            for gens, table in zip(obj["subgroups"], obj["homs"]):
                P = S.subgroup([tuple(g) for g in gens]) if gens else S.subgroup([])
                i = index[P.members]
                maps[i] = [extend_hom(P, [S.elements[k] for k in row]) for row in table]
            return cls(S, int(obj["p"]), maps, subgroups=subgroups, name=obj.get("name", ""))
        except (KeyError, TypeError, IndexError) as exc:
            raise InputError(f"malformed fusion system JSON: {exc}") from exc


def _conjugation_maps(G_elements: Iterable[Perm], P: Subgroup, theta: dict | None,
                      theta_inv: dict | None) -> set[Map]:
    out = set()
    if theta is None:
        for x in G_elements:
            out.add(tuple(conj(x, y) for y in P.elements))
    else:
        for x in G_elements:
            out.add(tuple(theta_inv[conj(x, theta[y])] for y in P.elements))
    return out


def fusion_of_group(S: Subgroup, G: FiniteGroup | Subgroup, p: int,
                    embedding: Mapping[Perm, Perm] | None = None,
                    subgroups: Sequence[Subgroup] | None = None, name: str = "") -> FusionSystem:
    """``F_S(G)``: all conjugation maps between subgroups of ``S``.

    With ``embedding`` (an injective homomorphism ``S -> G`` given as an
    element dictionary) the system is computed for the image of ``S`` in
    ``G`` and transported back to ``S``.
    """
    p = check_prime(p)
    if not is_p_power(S.order, p):
        raise NotPSubgroup(f"|S| = {S.order} is not a power of {p}")
    subgroups = list(subgroups) if subgroups is not None else subgroups_of(S)
    if embedding is None:
        for g in S.generators:
            if g not in G:
                raise NotPSubgroup("S is not contained in G")
        target = S
        theta = theta_inv = None
    else:
        theta = dict(embedding)
        theta_inv = {v: k for k, v in theta.items()}
        parent = G.parent if isinstance(G, Subgroup) else G
        target = Subgroup(parent, theta.values())
    maps = {}
    for i, P in enumerate(subgroups):
        if theta is None:
            P_in_G = P
        else:
            P_in_G = Subgroup(target.parent, (theta[y] for y in P.elements))
        xs = transporter(G, P_in_G, target)
        maps[i] = _conjugation_maps(xs, P, theta, theta_inv)
    F = FusionSystem(S, p, maps, subgroups=subgroups, name=name or f"F_S({getattr(G, 'name', '') or 'G'})")
    F.sylow = is_sylow(G, target, p)
    return F


def generate_fusion(S: Subgroup, systems: Sequence[FusionSystem], name: str = "") -> FusionSystem:
    """Smallest fusion system over ``S`` containing every input and ``F_S(S)``."""
    if not systems:
        raise InputError("need at least one fusion system")
    p = systems[0].p
    for F in systems:
        if F.S != S or F.p != p:
            raise MismatchedAmbientGroup("fusion systems over different groups or primes")
    subgroups = systems[0].subgroups
    index = {P.members: i for i, P in enumerate(subgroups)}
    # positions of each subgroup's elements inside each overgroup
    restrict_pos: dict[int, list[tuple[int, list[int]]]] = {}
    for i, P in enumerate(subgroups):
        restrict_pos[i] = [(j, [P.position[y] for y in R.elements])
                           for j, R in enumerate(subgroups) if j != i and R.members <= P.members]

    maps: list[set[Map]] = [set() for _ in subgroups]
    by_image: list[set[tuple[int, Map]]] = [set() for _ in subgroups]
    queue: deque[tuple[int, Map]] = deque()

    def add(i: int, phi: Map) -> None:
        if phi not in maps[i]:
            maps[i].add(phi)
            by_image[index[frozenset(phi)]].add((i, phi))
            queue.append((i, phi))

    base = fusion_of_group(S, S, p, subgroups=subgroups)
    for F in [base, *systems]:
        for i, ms in enumerate(F.maps):
            for phi in ms:
                add(i, phi)

    while queue:
        i, phi = queue.popleft()
        P = subgroups[i]
        for j, pos in restrict_pos[i]:
            add(j, tuple(phi[k] for k in pos))
        r = index[frozenset(phi)]
        R = subgroups[r]
        # inverse: R -> P
        inv = dict(zip(phi, P.elements))
        add(r, tuple(inv[y] for y in R.elements))
        # psi o phi for psi out of im(phi)
        for psi in list(maps[r]):
            add(i, tuple(psi[R.position[y]] for y in phi))
        # phi o chi for chi landing on P
        for t, chi in list(by_image[i]):
            add(t, tuple(phi[P.position[y]] for y in chi))
    return FusionSystem(S, p, {i: m for i, m in enumerate(maps)}, subgroups=subgroups,
                        name=name or "<" + ", ".join(F.name for F in systems) + ">")


# ---------------------------------------------------------------------------
# orbit categories


def inner_class_rep(phi: Map, Q: Subgroup) -> Map:
    """Canonical representative of ``Inn(Q) o phi``: the smallest image tuple."""
    return min(tuple(conj(q, y) for y in phi) for q in Q.elements)


class OrbitCategory(FiniteCategory):
    """``O_C(F)``: objects are subgroup indices of ``F`` in ``family``, morphisms are
    ``Inn(Q)``-classes of ``F``-maps labelled by their canonical representative."""

    fusion: FusionSystem
    family: list[int]

    def subgroup(self, obj: int) -> Subgroup:
        return self.fusion.subgroups[self.objects[obj]]

    def rep(self, f: int) -> Map:
        return self.morphisms[f].label

    def object_of_subgroup(self, P: Subgroup | int) -> int:
        i = P if isinstance(P, int) else self.fusion.index(P)
        return self.object_index[i]


def orbit_category(F: FusionSystem, family: Iterable[int | Subgroup] | None = None,
                   check: bool = False, name: str = "") -> OrbitCategory:
    """Orbit category of ``F`` restricted to ``family`` (default: all subgroups)."""
    if family is None:
        fam = F.all_family()
    else:
        fam = sorted({x if isinstance(x, int) else F.index(x) for x in family},
                     key=lambda i: F.subgroups[i].sort_key())
    if not F.is_overconjugation_closed(fam):
        raise FamilyNotOverconjugationClosed("family is not closed under F-overconjugation")
    subs = F.subgroups

    def hom(a: int, b: int):
        Q = subs[b]
        return sorted({inner_class_rep(phi, Q) for phi in F.hom(a, b)})

    def comp(g, f, a, b, c):
        Q, R = subs[b], subs[c]
        pos = Q.position
        return inner_class_rep(tuple(g[pos[y]] for y in f), R)

    cat = OrbitCategory.from_functions(fam, hom, comp, lambda a: subs[a].elements,
                                       name=name or f"O({F.name})", check=check)
    cat.fusion = F
    cat.family = list(fam)
    return cat


def check_orbit_composition(cat: OrbitCategory) -> bool:
    """Composition is independent of the chosen inner-class representatives."""
    for (gi, fi), hi in cat.table.items():
        f, g = cat.morphisms[fi], cat.morphisms[gi]
        Q = cat.subgroup(f.tgt)
        R = cat.subgroup(g.tgt)
        for q in Q.elements:
            f2 = tuple(conj(q, y) for y in f.label)
            for r in R.elements:
                g2 = tuple(conj(r, y) for y in g.label)
                comp = tuple(g2[Q.position[y]] for y in f2)
                if inner_class_rep(comp, R) != cat.morphisms[hi].label:
                    return False
    return True
