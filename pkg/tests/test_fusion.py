from __future__ import annotations

import json

import pytest

from fusionlim.category import dn_category, one_object_category, poset_category, skeleton
from fusionlim.errors import FamilyNotOverconjugationClosed, MismatchedAmbientGroup, NotPSubgroup
from fusionlim.fusion import (FusionSystem, check_orbit_composition, fusion_of_group, generate_fusion,
                              inner_class_rep, orbit_category)
from fusionlim.grouptheory import center, centralizer, compose, conj, cyclic, element_order, hom_G, symmetric


def check_fusion_axioms(F: FusionSystem) -> None:
    """Inclusions, S-conjugation, composition, restriction and inverses."""
    subs = F.subgroups
    S = F.S
    for i, P in enumerate(subs):
        maps = F.maps[i]
        assert P.elements in maps
        for s in S.elements:
            assert tuple(conj(s, y) for y in P.elements) in maps
        for phi in maps:
            j = F.subgroup_of_image(phi)
            inv = dict(zip(phi, P.elements))
            assert tuple(inv[y] for y in subs[j].elements) in F.maps[j]
            for psi in F.maps[j]:
                assert tuple(psi[subs[j].position[y]] for y in phi) in maps
            for k, R in enumerate(subs):
                if R.members <= P.members:
                    assert tuple(phi[P.position[y]] for y in R.elements) in F.maps[k]


def test_fusion_of_group_examples(a4_fusion):
    S3 = symmetric(3)
    C2 = S3.subgroup([(1, 0, 2)])
    F = fusion_of_group(C2, S3, 2)
    assert all(len(F.maps[i]) == 1 for i in range(len(F.subgroups)))
    V = a4_fusion.S
    assert len(a4_fusion.aut(V)) == 3
    c2s = [P for P in a4_fusion.subgroups if P.order == 2]
    assert len(a4_fusion.conjugacy_class(c2s[0])) == 3
    check_fusion_axioms(a4_fusion)


def test_fusion_of_group_matches_hom_g(s4_fusion):
    G = symmetric(4)
    for i, P in enumerate(s4_fusion.subgroups):
        for j, Q in enumerate(s4_fusion.subgroups):
            assert set(s4_fusion.hom(i, j)) == {m.images for m in hom_G(G, P, Q)}
    check_fusion_axioms(s4_fusion)


def test_fusion_of_group_rejects_non_p_group():
    S3 = symmetric(3)
    with pytest.raises(NotPSubgroup):
        fusion_of_group(S3.whole, S3, 2)


def test_generate_fusion_examples(a4_fusion, small_p_groups):
    F = small_p_groups["D8"]
    assert generate_fusion(F.S, [F]) == F
    assert generate_fusion(a4_fusion.S, [a4_fusion, a4_fusion]) == a4_fusion
    S3, C6 = symmetric(3), cyclic(6)
    C2 = S3.subgroup([(1, 0, 2)])
    F1 = fusion_of_group(C2, S3, 2)
    theta = {C2.identity: C6.identity, (1, 0, 2): (3, 4, 5, 0, 1, 2)}
    F2 = fusion_of_group(C2, C6, 2, embedding=theta, subgroups=F1.subgroups)
    assert generate_fusion(C2, [F1, F2]) == F1


def test_generate_fusion_is_monotone_and_idempotent(s4_fusion):
    S = s4_fusion.S
    FS = fusion_of_group(S, S, 2, subgroups=s4_fusion.subgroups)
    G = generate_fusion(S, [FS, s4_fusion])
    assert G == s4_fusion
    for i in range(len(FS.subgroups)):
        assert FS.maps[i] <= G.maps[i]
    assert generate_fusion(S, [G]) == G


def test_generate_fusion_twisted_closes_up():
    S4 = symmetric(4)
    D = S4.subgroup([(1, 2, 3, 0), (2, 1, 0, 3)])
    F1 = fusion_of_group(D, S4, 2)
    r, s, s2 = (1, 2, 3, 0), (2, 1, 0, 3), (3, 2, 1, 0)
    # extend r -> r, s -> s2 over the whole of D
    words = {D.identity: D.identity}
    frontier = [D.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g, h in ((r, r), (s, s2)):
                y = compose(x, g)
                if y not in words:
                    words[y] = compose(words[x], h)
                    nxt.append(y)
        frontier = nxt
    F2 = fusion_of_group(D, S4, 2, embedding=words, subgroups=F1.subgroups)
    F = generate_fusion(D, [F1, F2])
    check_fusion_axioms(F)
    klein = [i for i, P in enumerate(F.subgroups) if P.order == 4 and max(map(element_order, P.elements)) == 2]
    assert len(klein) == 2
    assert all(len(F.aut(i)) == 6 for i in klein)


def test_generate_fusion_mismatch(small_p_groups):
    with pytest.raises(MismatchedAmbientGroup):
        generate_fusion(small_p_groups["V4"].S, [small_p_groups["V4"], small_p_groups["D8"]])


def test_conjugacy_classes_partition(s4_fusion, small_p_groups):
    for F in [s4_fusion, *small_p_groups.values()]:
        classes = F.classes()
        flat = sorted(i for c in classes for i in c)
        assert flat == list(range(len(F.subgroups)))
        for c in classes:
            for i in c:
                assert sorted(F.index(Q) for Q in F.conjugacy_class(i)) == c
    V = small_p_groups["V4"]
    assert all(len(c) == 1 for c in V.classes())
    assert V.conjugacy_class(V.S) == [V.S]


def test_is_centric_examples(a4_fusion, small_p_groups, s4_fusion):
    assert a4_fusion.is_centric(a4_fusion.S)
    c2 = next(P for P in a4_fusion.subgroups if P.order == 2)
    assert not a4_fusion.is_centric(c2)
    D = small_p_groups["D8"]
    Z = center(D.S)
    assert not D.is_centric(Z)
    orders = sorted(s4_fusion.subgroups[i].order for i in s4_fusion.centric_family())
    assert orders == [4, 4, 4, 8]
    fours = [s4_fusion.subgroups[i] for i in s4_fusion.centric_family() if s4_fusion.subgroups[i].order == 4]
    assert sorted(max(map(element_order, P.elements)) for P in fours) == [2, 2, 4]


def test_centric_means_self_centralizing(s4_fusion):
    S = s4_fusion.S
    for i, P in enumerate(s4_fusion.subgroups):
        expect = all(centralizer(S, Q) == center(Q) for Q in s4_fusion.conjugacy_class(i))
        assert s4_fusion.is_centric(i) == expect


def test_orbit_category_examples(a4_fusion, small_p_groups):
    O = orbit_category(a4_fusion, [a4_fusion.S])
    assert O.n_objects == 1 and O.n_morphisms == 3
    V = small_p_groups["V4"]
    Ofull = orbit_category(V)
    for a in range(Ofull.n_objects):
        for b in range(Ofull.n_objects):
            P, Q = Ofull.subgroup(a), Ofull.subgroup(b)
            assert len(Ofull.hom(a, b)) == (1 if P.members <= Q.members else 0)
    D = small_p_groups["D8"]
    Os = orbit_category(D, [D.S])
    assert Os.n_morphisms == 1  # Out_F(S) trivial for F_S(S)


def test_orbit_category_rejects_unclosed_family(a4_fusion):
    c2 = next(i for i, P in enumerate(a4_fusion.subgroups) if P.order == 2)
    with pytest.raises(FamilyNotOverconjugationClosed):
        orbit_category(a4_fusion, [c2])


def test_orbit_hom_sizes_and_composition(s4_fusion):
    O = orbit_category(s4_fusion, check=True)
    assert check_orbit_composition(O)
    for a in range(O.n_objects):
        for b in range(O.n_objects):
            Q = O.subgroup(b)
            maps = s4_fusion.hom(O.objects[a], O.objects[b])
            orbits = {inner_class_rep(phi, Q) for phi in maps}
            assert len(O.hom(a, b)) == len(orbits)


def test_orbit_hom_to_s_counts_s_classes(s4_fusion):
    O = orbit_category(s4_fusion, s4_fusion.centric_family())
    G, S = symmetric(4), s4_fusion.S
    top = O.object_of_subgroup(S)
    for a in range(O.n_objects):
        P = O.subgroup(a)
        maps = {m.images for m in hom_G(G, P, S)}
        classes = set()
        for phi in maps:
            classes.add(min(tuple(conj(s, y) for y in phi) for s in S.elements))
        assert len(O.hom(a, top)) == len(classes)


def test_skeleton_examples(a4_fusion):
    P = poset_category([1, 2, 3], lambda a, b: a <= b)
    assert skeleton(P).cat.n_objects == 3
    one = one_object_category([0, 1, 2], lambda a, b: (a + b) % 3, 0)
    assert skeleton(one).cat.n_objects == 1
    O = orbit_category(a4_fusion)
    sk = skeleton(O)
    assert sk.cat.n_objects == 3
    for a in range(O.n_objects):
        assert O.compose(sk.from_rep[a], sk.to_rep[a]) == O.identities[a]


def test_dn_category_examples():
    assert dn_category(1).n_objects == 1 and dn_category(1).n_morphisms == 1
    D2 = dn_category(2)
    assert D2.n_objects == 3
    top = D2.object_index[frozenset({1, 2})]
    assert len([f for f in D2.out_of(top) if f != D2.identities[top]]) == 2
    D3 = dn_category(3)
    assert D3.n_objects == 7 and D3.n_morphisms == 19


def test_fusion_json_roundtrip(s4_fusion):
    obj = json.loads(json.dumps(s4_fusion.to_json()))
    assert FusionSystem.from_json(obj) == s4_fusion
