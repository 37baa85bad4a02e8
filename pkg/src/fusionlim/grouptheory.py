"""Small permutation groups with full element enumeration.

Permutations are tuples of 0-based images.  The product ``compose(a, b)`` is
the composite "``b`` first, then ``a``", so conjugation ``c_x(y) = x y x^-1``
matches the usual left-action notation.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

from .errors import InputError, InvalidPermutation, OrderBoundExceeded
from .intlin import quotient_invariants

Perm = tuple[int, ...]

ORDER_BOUND = 20000
DEGREE_BOUND = 32
SUBGROUP_ENUM_BOUND = 256


def identity_perm(degree: int) -> Perm:
    return tuple(range(degree))


def compose(a: Perm, b: Perm) -> Perm:
    return tuple(a[i] for i in b)


def inverse(a: Perm) -> Perm:
    out = [0] * len(a)
    for i, ai in enumerate(a):
        out[ai] = i
    return tuple(out)


def conj(x: Perm, y: Perm) -> Perm:
    """``x y x^-1``."""
    # (x y x^-1)(x[i]) = x[y[i]]
    out = [0] * len(x)
    for i, xi in enumerate(x):
        out[xi] = x[y[i]]
    return tuple(out)


def validate_perm(images: Sequence[int], degree: int) -> Perm:
    try:
        perm = tuple(int(i) for i in images)
    except (TypeError, ValueError) as exc:
        raise InvalidPermutation(f"not an image array: {images!r}") from exc
    if len(perm) != degree or sorted(perm) != list(range(degree)):
        raise InvalidPermutation(f"{list(images)} is not a permutation of 0..{degree - 1}")
    return perm


def perm_from_cycles(degree: int, cycles: Iterable[Sequence[int]]) -> Perm:
    out = list(range(degree))
    for cyc in cycles:
        for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
            out[a] = b
    return validate_perm(out, degree)


def element_order(a: Perm) -> int:
    e = identity_perm(len(a))
    x, n = a, 1
    while x != e:
        x = compose(a, x)
        n += 1
    return n


def _closure(gens: Sequence[Perm], degree: int, bound: int) -> list[Perm]:
    e = identity_perm(degree)
    seen = {e}
    queue = deque([e])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = compose(x, g)
            if y not in seen:
                seen.add(y)
                if len(seen) > bound:
                    raise OrderBoundExceeded(f"group order exceeds bound {bound}")
                queue.append(y)
    return sorted(seen)


class FiniteGroup:
    """A permutation group, enumerated completely on construction."""

    def __init__(self, degree: int, generators: Sequence[Sequence[int]], name: str = "",
                 bound: int = ORDER_BOUND):
        if degree < 1 or degree > DEGREE_BOUND:
            raise InputError(f"degree must be in 1..{DEGREE_BOUND}, got {degree}")
        self.degree = degree
        self.generators: tuple[Perm, ...] = tuple(validate_perm(g, degree) for g in generators)
        self.name = name
        self.elements: tuple[Perm, ...] = tuple(_closure(self.generators, degree, bound))
        self._set = frozenset(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def identity(self) -> Perm:
        return identity_perm(self.degree)

    def __contains__(self, x) -> bool:
        return x in self._set

    def __len__(self) -> int:
        return len(self.elements)

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name or '?'}, order={self.order})"

    @cached_property
    def whole(self) -> "Subgroup":
        return Subgroup(self, self.elements)

    def subgroup(self, gens: Iterable[Sequence[int]]) -> "Subgroup":
        gens = [validate_perm(g, self.degree) for g in gens]
        for g in gens:
            if g not in self._set:
                raise InputError(f"{list(g)} is not an element of {self.name or 'the group'}")
        return Subgroup(self, _closure(gens, self.degree, self.order))

    def to_json(self) -> dict:
        return {"degree": self.degree, "generators": [list(g) for g in self.generators],
                "name": self.name}


def group_from_generators(degree: int, generators: Sequence[Sequence[int]], name: str = "",
                          bound: int = ORDER_BOUND) -> FiniteGroup:
    return FiniteGroup(degree, generators, name=name, bound=bound)


class Subgroup:
    """A subgroup of a :class:`FiniteGroup`, stored by its sorted element tuple.

    Equality and hashing use the element set only, so the same subgroup
    found along different routes compares equal.
    """

    __slots__ = ("parent", "elements", "_set", "_hash", "_gens", "_pos", "name")

    def __init__(self, parent: FiniteGroup, elements: Iterable[Perm], name: str = ""):
        self.parent = parent
        self.elements: tuple[Perm, ...] = tuple(sorted(set(elements)))
        self._set = frozenset(self.elements)
        self._hash = hash(self._set)
        self._gens: tuple[Perm, ...] | None = None
        self._pos: dict[Perm, int] | None = None
        self.name = name

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def members(self) -> frozenset:
        return self._set

    @property
    def degree(self) -> int:
        return self.parent.degree

    @property
    def identity(self) -> Perm:
        return identity_perm(self.parent.degree)

    @property
    def position(self) -> dict[Perm, int]:
        if self._pos is None:
            self._pos = {x: i for i, x in enumerate(self.elements)}
        return self._pos

    @property
    def generators(self) -> tuple[Perm, ...]:
        """A small generating set, chosen greedily in element order."""
        if self._gens is None:
            gens: list[Perm] = []
            span = {self.identity}
            for x in self.elements:
                if x not in span:
                    gens.append(x)
                    span = set(_closure(gens, self.degree, self.order))
                    if len(span) == self.order:
                        break
            self._gens = tuple(gens)
        return self._gens

    def __contains__(self, x) -> bool:
        return x in self._set

    def __eq__(self, other) -> bool:
        return isinstance(other, Subgroup) and self._set == other._set

    def __hash__(self) -> int:
        return self._hash

    def __le__(self, other: "Subgroup") -> bool:
        return self._set <= other._set

    def __lt__(self, other: "Subgroup") -> bool:
        return self._set < other._set

    def __len__(self) -> int:
        return len(self.elements)

    def __repr__(self) -> str:
        label = self.name or "<" + ", ".join(_cycle_str(g) for g in self.generators) + ">"
        return f"Subgroup({label}, order={self.order})"

    def sort_key(self) -> tuple:
        return (self.order, self.elements)

    def is_abelian(self) -> bool:
        gens = self.generators
        return all(compose(a, b) == compose(b, a) for a in gens for b in gens)

    def conjugate(self, x: Perm) -> "Subgroup":
        """``x S x^-1``."""
        return Subgroup(self.parent, (conj(x, y) for y in self.elements))

    def intersection(self, other: "Subgroup") -> "Subgroup":
        return Subgroup(self.parent, self._set & other._set)

    def join(self, *extra: Perm) -> "Subgroup":
        return Subgroup(self.parent, _closure(list(self.generators) + list(extra),
                                              self.degree, self.parent.order))

    def subgroup(self, gens: Iterable[Perm]) -> "Subgroup":
        return Subgroup(self.parent, _closure(list(gens), self.degree, self.order))

    def to_json(self) -> list[list[int]]:
        return [list(g) for g in self.generators]


def _cycle_str(g: Perm) -> str:
    seen, parts = set(), []
    for i in range(len(g)):
        if i in seen or g[i] == i:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(j)
            j = g[j]
        parts.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(parts) or "()"


def is_p_power(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def p_part(n: int, p: int) -> int:
    out = 1
    while n % p == 0:
        n //= p
        out *= p
    return out


def subgroups_of(S: Subgroup, bound: int = SUBGROUP_ENUM_BOUND) -> list[Subgroup]:
    """All subgroups of ``S``, each once, sorted by order then elements."""
    if S.order > bound:
        raise OrderBoundExceeded(f"subgroup enumeration limited to order {bound}, got {S.order}")
    trivial = Subgroup(S.parent, [S.identity])
    found = {trivial.members: trivial}
    frontier = [trivial]
    while frontier:
        nxt = []
        for H in frontier:
            for g in S.elements:
                if g in H:
                    continue
                K = H.join(g)
                if K.members not in found:
                    found[K.members] = K
                    nxt.append(K)
        frontier = nxt
    return sorted(found.values(), key=Subgroup.sort_key)


def transporter(G: FiniteGroup | Subgroup, P: Subgroup, Q: Subgroup) -> list[Perm]:
    """``N_G(P, Q) = {x in G : x P x^-1 <= Q}``."""
    if P.order > Q.order:
        return []
    gens = P.generators
    return [x for x in G.elements if all(conj(x, y) in Q for y in gens)]


@dataclass(frozen=True)
class ConjugationMap:
    """``c_x : source -> target``, identified by its graph on ``source.elements``."""

    source: Subgroup
    target: Subgroup
    conjugator: Perm = field(compare=False, hash=False)
    images: tuple[Perm, ...] = ()

    def __call__(self, y: Perm) -> Perm:
        return self.images[self.source.position[y]]


def hom_G(G: FiniteGroup | Subgroup, P: Subgroup, Q: Subgroup) -> list[ConjugationMap]:
    """``Hom_G(P, Q)``: conjugation maps, deduplicated as maps."""
    seen: dict[tuple, ConjugationMap] = {}
    for x in transporter(G, P, Q):
        images = tuple(conj(x, y) for y in P.elements)
        if images not in seen:
            seen[images] = ConjugationMap(P, Q, x, images)
    return [seen[k] for k in sorted(seen)]


def double_cosets(B: Subgroup, C: Subgroup, A: Subgroup) -> list[Perm]:
    """One representative (the smallest element) of each double coset in ``B\\C/A``."""
    assigned: set[Perm] = set()
    reps = []
    for x in C.elements:
        if x in assigned:
            continue
        reps.append(x)
        for b in B.elements:
            bx = compose(b, x)
            for a in A.elements:
                assigned.add(compose(bx, a))
    return reps


def centralizer(G: FiniteGroup | Subgroup, P: Subgroup) -> Subgroup:
    parent = G.parent if isinstance(G, Subgroup) else G
    gens = P.generators
    return Subgroup(parent, [x for x in G.elements if all(compose(x, y) == compose(y, x) for y in gens)])


def normalizer(G: FiniteGroup | Subgroup, P: Subgroup) -> Subgroup:
    parent = G.parent if isinstance(G, Subgroup) else G
    return Subgroup(parent, transporter(G, P, P))


def center(P: Subgroup) -> Subgroup:
    return centralizer(P, P)


def is_sylow(G: FiniteGroup | Subgroup, P: Subgroup, p: int) -> bool:
    return is_p_power(P.order, p) and P.order == p_part(len(G.elements), p) and P.members <= set(G.elements)


def commutator_subgroup(P: Subgroup) -> Subgroup:
    comms = {compose(compose(a, b), compose(inverse(a), inverse(b)))
             for a in P.elements for b in P.elements}
    return P.subgroup(sorted(comms))


def abelianization(P: Subgroup) -> list[int]:
    """Invariant factors of ``P / [P, P]`` (0 would mean Z; never occurs here).

    The exponent vectors of a spanning tree of the Cayley graph of the
    quotient give a relation matrix whose Smith form yields the factors.
    """
    D = commutator_subgroup(P)
    gens = P.generators
    k = len(gens)
    if k == 0:
        return []
    coset_of: dict[Perm, int] = {}
    reps: list[Perm] = []
    for y in P.elements:
        if y in coset_of:
            continue
        cid = len(reps)
        reps.append(y)
        for d in D.elements:
            coset_of[compose(y, d)] = cid
    vec: dict[int, list[int]] = {coset_of[P.identity]: [0] * k}
    relations: list[list[int]] = []
    queue = deque([coset_of[P.identity]])
    while queue:
        c = queue.popleft()
        for i, g in enumerate(gens):
            c2 = coset_of[compose(reps[c], g)]
            v = vec[c][:]
            v[i] += 1
            if c2 not in vec:
                vec[c2] = v
                queue.append(c2)
            else:
                rel = [a - b for a, b in zip(v, vec[c2])]
                if any(rel):
                    relations.append(rel)
    cols = [list(r) for r in zip(*relations)] if relations else [[] for _ in range(k)]
    if not relations:
        return [0] * k
    return quotient_invariants(cols, k)


@dataclass(frozen=True)
class GroupQueries:
    centralizer: Subgroup
    normalizer: Subgroup
    center: Subgroup
    is_sylow: bool
    abelianization: tuple[int, ...]


def group_queries(G: FiniteGroup | Subgroup, P: Subgroup, p: int) -> GroupQueries:
    return GroupQueries(
        centralizer=centralizer(G, P),
        normalizer=normalizer(G, P),
        center=center(P),
        is_sylow=is_sylow(G, P, p),
        abelianization=tuple(abelianization(P)),
    )


# ---------------------------------------------------------------------------
# named groups and JSON input

def cyclic(n: int) -> FiniteGroup:
    return FiniteGroup(n, [tuple((i + 1) % n for i in range(n))] if n > 1 else [], name=f"C{n}")


def symmetric(n: int) -> FiniteGroup:
    gens = []
    if n > 1:
        gens.append(perm_from_cycles(n, [[0, 1]]))
    if n > 2:
        gens.append(perm_from_cycles(n, [list(range(n))]))
    return FiniteGroup(n, gens, name=f"S{n}")


def alternating(n: int) -> FiniteGroup:
    gens = [perm_from_cycles(n, [[0, 1, i]]) for i in range(2, n)]
    return FiniteGroup(n, gens, name=f"A{n}")


def dihedral(order: int) -> FiniteGroup:
    """Dihedral group of the given order acting on ``order // 2`` points."""
    n = order // 2
    if order % 2 or n < 2:
        raise InputError(f"dihedral order must be even and >= 4, got {order}")
    if n == 2:
        return FiniteGroup(4, [perm_from_cycles(4, [[0, 1], [2, 3]]),
                               perm_from_cycles(4, [[0, 2], [1, 3]])], name="D4")
    rot = tuple((i + 1) % n for i in range(n))
    ref = tuple((-i) % n for i in range(n))
    return FiniteGroup(n, [rot, ref], name=f"D{order}")


def quaternion() -> FiniteGroup:
    # regular representation of Q8 on {±1, ±i, ±j, ±k}
    i = perm_from_cycles(8, [[0, 2, 1, 3], [4, 6, 5, 7]])
    j = perm_from_cycles(8, [[0, 4, 1, 5], [2, 7, 3, 6]])
    return FiniteGroup(8, [i, j], name="Q8")


def psl27() -> FiniteGroup:
    """PSL(2,7) on the projective line {0..6, inf=7}: z->z+1 and z->-1/z."""
    return FiniteGroup(8, [(1, 2, 3, 4, 5, 6, 0, 7), (7, 6, 3, 2, 5, 4, 1, 0)], name="PSL27")


def klein_four() -> FiniteGroup:
    return FiniteGroup(4, [perm_from_cycles(4, [[0, 1], [2, 3]]),
                           perm_from_cycles(4, [[0, 2], [1, 3]])], name="V4")


def named_group(name: str) -> FiniteGroup:
    key = name.strip().upper()
    if key in ("V4", "KLEIN4"):
        return klein_four()
    if key == "Q8":
        return quaternion()
    if key in ("PSL27", "L32", "PSL(2,7)", "GL(3,2)"):
        return psl27()
    if len(key) >= 2 and key[1:].isdigit():
        n = int(key[1:])
        if key[0] == "C":
            return cyclic(n)
        if key[0] == "S":
            return symmetric(n)
        if key[0] == "A":
            return alternating(n)
        if key[0] == "D":
            return dihedral(n)
    raise InputError(f"unknown group name {name!r}")


def group_from_json(obj, base_dir: Path | None = None) -> FiniteGroup:
    """Build a group from ``{"degree", "generators", "name"}``, a library name,
    or ``{"file": path}``."""
    if isinstance(obj, str):
        return named_group(obj)
    if not isinstance(obj, dict):
        raise InputError(f"group reference must be a name or an object, got {type(obj).__name__}")
    if "file" in obj:
        path = Path(obj["file"])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        return load_group(path)
    try:
        degree = int(obj["degree"])
        gens = obj["generators"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"group object needs 'degree' and 'generators': {exc}") from exc
    return FiniteGroup(degree, gens, name=str(obj.get("name", "")))


def load_group(path: str | Path) -> FiniteGroup:
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc
    return group_from_json(obj, base_dir=path.parent)
