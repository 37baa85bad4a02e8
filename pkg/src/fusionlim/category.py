"""Finite categories given by an explicit, verified composition table."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Hashable, Sequence

from .errors import InputError, NotASubcategory


@dataclass(frozen=True)
class Morphism:
    src: int
    tgt: int
    label: Hashable


class FiniteCategory:
    """Objects ``0..n-1`` with labels, morphisms ``0..m-1`` with labels.

    ``compose(g, f)`` is ``g o f`` for ``f: a -> b`` and ``g: b -> c``.
    """

    def __init__(self, objects: Sequence[Hashable], morphisms: Sequence[Morphism],
                 identities: Sequence[int], table: dict[tuple[int, int], int],
                 name: str = "", check: bool = True):
        self.objects = list(objects)
        self.morphisms = list(morphisms)
        self.identities = list(identities)
        self.table = table
        self.name = name
        self.object_index = {ob: i for i, ob in enumerate(self.objects)}
        if len(self.object_index) != len(self.objects):
            raise InputError("duplicate object labels")
        self._hom: dict[tuple[int, int], list[int]] = {}
        for i, m in enumerate(self.morphisms):
            self._hom.setdefault((m.src, m.tgt), []).append(i)
        self.morphism_index = {(m.src, m.tgt, m.label): i for i, m in enumerate(self.morphisms)}
        if check:
            self.verify()

    @classmethod
    def from_functions(cls, objects: Sequence[Hashable],
                       hom: Callable[[Hashable, Hashable], Sequence[Hashable]],
                       compose: Callable[[Hashable, Hashable, Hashable, Hashable, Hashable], Hashable],
                       identity: Callable[[Hashable], Hashable],
                       name: str = "", check: bool = True) -> "FiniteCategory":
        """Build from label-level callbacks.

        ``hom(a, b)`` lists morphism labels, ``compose(g, f, a, b, c)`` returns
        the label of ``g o f`` for ``f: a -> b``, ``g: b -> c``.
        """
        morphisms = []
        for i, a in enumerate(objects):
            for j, b in enumerate(objects):
                for lab in hom(a, b):
                    morphisms.append(Morphism(i, j, lab))
        index = {(m.src, m.tgt, m.label): k for k, m in enumerate(morphisms)}
        by_src: dict[int, list[int]] = {}
        for k, m in enumerate(morphisms):
            by_src.setdefault(m.src, []).append(k)
        table = {}
        for fi, f in enumerate(morphisms):
            for gi in by_src.get(f.tgt, []):
                g = morphisms[gi]
                lab = compose(g.label, f.label, objects[f.src], objects[f.tgt], objects[g.tgt])
                key = (f.src, g.tgt, lab)
                if key not in index:
                    raise InputError(f"composite {lab!r} missing from hom set")
                table[(gi, fi)] = index[key]
        try:
            identities = [index[(i, i, identity(a))] for i, a in enumerate(objects)]
        except KeyError as exc:
            raise InputError("identity morphism missing") from exc
        return cls(objects, morphisms, identities, table, name=name, check=check)

    # -- basic queries ---------------------------------------------------

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def n_morphisms(self) -> int:
        return len(self.morphisms)

    def hom(self, a: int, b: int) -> list[int]:
        return self._hom.get((a, b), [])

    def compose(self, g: int, f: int) -> int:
        return self.table[(g, f)]

    def src(self, f: int) -> int:
        return self.morphisms[f].src

    def tgt(self, f: int) -> int:
        return self.morphisms[f].tgt

    def out_of(self, a: int) -> list[int]:
        return [f for b in range(self.n_objects) for f in self.hom(a, b)]

    def into(self, b: int) -> list[int]:
        return [f for a in range(self.n_objects) for f in self.hom(a, b)]

    def verify(self) -> None:
        """Exhaustive identity and associativity check."""
        for f, m in enumerate(self.morphisms):
            if self.table.get((self.identities[m.tgt], f)) != f or \
                    self.table.get((f, self.identities[m.src])) != f:
                raise InputError(f"identity law fails at morphism {f}")
        for f, mf in enumerate(self.morphisms):
            for g in self.out_of(mf.tgt):
                gf = self.table[(g, f)]
                for h in self.out_of(self.morphisms[g].tgt):
                    if self.table[(h, gf)] != self.table[(self.table[(h, g)], f)]:
                        raise InputError(f"associativity fails at ({h}, {g}, {f})")

    def inverse_of(self, f: int) -> int | None:
        m = self.morphisms[f]
        for g in self.hom(m.tgt, m.src):
            if self.table[(g, f)] == self.identities[m.src] and self.table[(f, g)] == self.identities[m.tgt]:
                return g
        return None

    def is_iso(self, f: int) -> bool:
        return self.inverse_of(f) is not None

    def sink_order(self) -> list[int]:
        """Objects ordered so that ``b`` precedes ``a`` whenever a non-invertible
        ``a -> b`` exists (for EI categories: strictly fewer reachable objects)."""
        reach = [sum(1 for b in range(self.n_objects) if self.hom(a, b)) for a in range(self.n_objects)]
        return sorted(range(self.n_objects), key=lambda a: (reach[a], a))

    def components(self) -> list[list[int]]:
        parent = list(range(self.n_objects))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for m in self.morphisms:
            parent[find(m.src)] = find(m.tgt)
        groups: dict[int, list[int]] = {}
        for a in range(self.n_objects):
            groups.setdefault(find(a), []).append(a)
        return sorted(groups.values())

    def __repr__(self) -> str:
        return f"FiniteCategory({self.name or '?'}, objects={self.n_objects}, morphisms={self.n_morphisms})"


@dataclass(frozen=True)
class Inclusion:
    """A faithful, injective-on-objects functor ``sub -> ambient``."""

    sub: FiniteCategory
    ambient: FiniteCategory
    obj_map: tuple[int, ...]
    mor_map: tuple[int, ...]

    @property
    def is_full(self) -> bool:
        for a in range(self.sub.n_objects):
            for b in range(self.sub.n_objects):
                if len(self.sub.hom(a, b)) != len(self.ambient.hom(self.obj_map[a], self.obj_map[b])):
                    return False
        return True


def identity_inclusion(cat: FiniteCategory) -> Inclusion:
    return Inclusion(cat, cat, tuple(range(cat.n_objects)), tuple(range(cat.n_morphisms)))


def full_subcategory(cat: FiniteCategory, objs: Sequence[int], name: str = "") -> Inclusion:
    objs = list(objs)
    pos = {a: i for i, a in enumerate(objs)}
    mor_map, morphisms = [], []
    new_index = {}
    for a in objs:
        for b in objs:
            for f in cat.hom(a, b):
                new_index[f] = len(morphisms)
                mor_map.append(f)
                m = cat.morphisms[f]
                morphisms.append(Morphism(pos[a], pos[b], m.label))
    table = {}
    for fi, f in enumerate(mor_map):
        for g in cat.out_of(cat.tgt(f)):
            if g in new_index:
                table[(new_index[g], fi)] = new_index[cat.compose(g, f)]
    identities = [new_index[cat.identities[a]] for a in objs]
    sub = FiniteCategory([cat.objects[a] for a in objs], morphisms, identities, table,
                         name=name or f"{cat.name}|full", check=False)
    return Inclusion(sub, cat, tuple(objs), tuple(mor_map))


def inclusion_by_labels(sub: FiniteCategory, ambient: FiniteCategory) -> Inclusion:
    """Match objects and morphisms by label; verify that composition is preserved."""
    try:
        obj_map = tuple(ambient.object_index[ob] for ob in sub.objects)
    except KeyError as exc:
        raise NotASubcategory(f"object {exc.args[0]!r} missing from ambient category") from exc
    mor_map = []
    for m in sub.morphisms:
        key = (obj_map[m.src], obj_map[m.tgt], m.label)
        if key not in ambient.morphism_index:
            raise NotASubcategory(f"morphism {m.label!r} missing from ambient category")
        mor_map.append(ambient.morphism_index[key])
    for (g, f), h in sub.table.items():
        if ambient.compose(mor_map[g], mor_map[f]) != mor_map[h]:
            raise NotASubcategory("composition is not preserved")
    return Inclusion(sub, ambient, obj_map, tuple(mor_map))


@dataclass(frozen=True)
class Skeleton:
    """A skeleton together with comparison isomorphisms.

    ``rep[a]`` is the position in ``inclusion.sub`` of the representative of
    object ``a``; ``to_rep[a]: a -> rep`` and ``from_rep[a]: rep -> a`` are
    mutually inverse morphisms of the ambient category.
    """

    inclusion: Inclusion
    rep: tuple[int, ...]
    to_rep: tuple[int, ...]
    from_rep: tuple[int, ...]

    @property
    def cat(self) -> FiniteCategory:
        return self.inclusion.sub


def skeleton(cat: FiniteCategory) -> Skeleton:
    reps: list[int] = []
    rep = [-1] * cat.n_objects
    to_rep = [-1] * cat.n_objects
    from_rep = [-1] * cat.n_objects
    for a in range(cat.n_objects):
        for k, r in enumerate(reps):
            found = False
            for f in cat.hom(a, r):
                g = cat.inverse_of(f)
                if g is not None:
                    rep[a], to_rep[a], from_rep[a] = k, f, g
                    found = True
                    break
            if found:
                break
        else:
            rep[a] = len(reps)
            to_rep[a] = from_rep[a] = cat.identities[a]
            reps.append(a)
    inc = full_subcategory(cat, reps, name=f"{cat.name}|skeleton")
    return Skeleton(inc, tuple(rep), tuple(to_rep), tuple(from_rep))


def dn_category(n: int) -> FiniteCategory:
    """Nonempty subsets of {1..n} under reverse inclusion: ``I -> J`` iff ``J <= I``."""
    if n < 1 or n > 10:
        raise InputError(f"n must be in 1..10, got {n}")
    objects = [frozenset(c) for r in range(1, n + 1) for c in combinations(range(1, n + 1), r)]
    return FiniteCategory.from_functions(
        objects,
        hom=lambda a, b: [(a, b)] if b <= a else [],
        compose=lambda g, f, a, b, c: (a, c),
        identity=lambda a: (a, a),
        name=f"D{n}", check=n <= 4,
    )


def poset_category(objects: Sequence[Hashable], leq: Callable[[Hashable, Hashable], bool],
                   name: str = "") -> FiniteCategory:
    """One arrow ``a -> b`` whenever ``leq(a, b)``."""
    return FiniteCategory.from_functions(
        objects,
        hom=lambda a, b: [(a, b)] if leq(a, b) else [],
        compose=lambda g, f, a, b, c: (a, c),
        identity=lambda a: (a, a),
        name=name,
    )


def one_object_category(elements: Sequence[Hashable], mul: Callable[[Hashable, Hashable], Hashable],
                        identity: Hashable, name: str = "", label: Hashable = "*") -> FiniteCategory:
    """A monoid (typically a group) as a one-object category; ``g o f = mul(g, f)``."""
    elements = list(elements)
    return FiniteCategory.from_functions(
        [label],
        hom=lambda a, b: elements,
        compose=lambda g, f, a, b, c: mul(g, f),
        identity=lambda a: identity,
        name=name,
    )
