from __future__ import annotations

import numpy as np
import pytest

from fusionlim import gfp
from fusionlim.catalg import constant_module, hom_module, limit
from fusionlim.dwyer import (amalgam_graph, build_coset_poset, cgpc_module, family_of,
                             fixed_quotient_complex, fixed_quotient_homology, is_product_closed,
                             predicted_h0, random_oracle_cases, run_oracle)
from fusionlim.errors import FamilyNotConjugationClosed, InputError, NotCentric
from fusionlim.grouptheory import alternating, named_group, subgroups_of, symmetric

TRANSPOSITION = (1, 0, 2)


def test_coset_poset_with_whole_group_is_contractible():
    G = symmetric(3)
    fam = family_of(G, "all")
    poset = build_coset_poset(G, G.whole, fam)
    assert len(poset.objects) == len(fam)
    for P in fam:
        assert fixed_quotient_homology(poset, P, 2, 3) == [1, 0, 0, 0]


def test_coset_poset_object_count():
    G = symmetric(3)
    H = G.subgroup([TRANSPOSITION])
    poset = build_coset_poset(G, H, family_of(G, "all"))
    # three cosets, each meeting {1} and exactly one conjugate of H
    assert len(poset.objects) == 6
    assert len({o[0] for o in poset.objects}) == 3


def test_trivial_family_gives_discrete_quotient():
    G = symmetric(3)
    one = G.subgroup([])
    poset = build_coset_poset(G, one, family_of(G, "trivial"))
    assert len(poset.objects) == 6
    assert fixed_quotient_homology(poset, one, 3, 2) == [1, 0, 0]
    assert predicted_h0(G, one, one) == 1


def test_boundary_squares_to_zero():
    G = alternating(4)
    H = G.subgroup([(1, 2, 0, 3)])
    poset = build_coset_poset(G, H, family_of(G, "all"))
    for P in poset.family[:4]:
        fixed_quotient_complex(poset, P, 2, 3).check()


@pytest.mark.parametrize("gname,hgens,pgens,p", [
    ("S3", [(1, 0, 2)], [(1, 0, 2)], 2),
    ("S3", [(1, 2, 0)], [(1, 2, 0)], 3),
    ("A4", [(1, 0, 3, 2), (2, 3, 0, 1)], [(1, 0, 3, 2)], 2),
    ("S4", [(1, 2, 3, 0), (2, 1, 0, 3)], [(1, 0, 3, 2)], 2),
    ("D8", [(1, 2, 3, 0)], [(2, 3, 0, 1)], 2),
])
def test_oracle_examples(gname, hgens, pgens, p):
    G = named_group(gname)
    case = run_oracle(G, G.subgroup(hgens), G.subgroup(pgens), family_of(G, "all"), p, 3, "all")
    assert case.asserted
    assert case.ok, case.to_json()


def test_predicted_h0_examples():
    G = symmetric(3)
    C2 = G.subgroup([TRANSPOSITION])
    assert predicted_h0(G, G.whole, C2) == 1
    # each of the three injections C2 -> C2' is its own H-class, but only one lands in H
    assert predicted_h0(G, C2, C2) == 1
    assert predicted_h0(G, C2, G.subgroup([(1, 2, 0)])) == 0


def test_random_oracle_cases_small():
    cases = random_oracle_cases(np.random.default_rng(7), 8, pool=("S3", "D8", "A4"), maxdeg=3)
    assert len(cases) == 8
    assert all(c.ok for c in cases), [c.to_json() for c in cases if not c.ok]


def test_family_checks():
    G = symmetric(3)
    with pytest.raises(FamilyNotConjugationClosed):
        build_coset_poset(G, G.whole, [G.subgroup([]), G.subgroup([TRANSPOSITION])])
    with pytest.raises(InputError):
        family_of(G, "overgroups", N=G.subgroup([TRANSPOSITION]))
    with pytest.raises(InputError):
        family_of(G, "bogus")
    subs = subgroups_of(G.whole)
    assert is_product_closed(subs)
    twos = family_of(G, "p-subgroups", 2)
    # a product of two distinct transposition groups has 4 elements, so it is never a subgroup
    assert is_product_closed(twos)
    A4 = alternating(4)
    twos4 = family_of(A4, "p-subgroups", 2)
    assert is_product_closed(twos4)
    threes4 = family_of(A4, "p-subgroups", 3)
    assert is_product_closed(threes4)


def test_a4_amalgam_graph(amalgams):
    am = amalgams("a4_a4_v4")
    F = am.F
    g = amalgam_graph(F, am.F1, am.F2, F.S)
    assert len(g.vs) == 3 and [len(v) for v in g.vi] == [1, 1]
    assert g.n_edges == 6 and g.n_vertices == 5
    assert g.h1_dim == 2
    _, _, comps = g.forest()
    assert g.h1_dim == g.n_edges - g.n_vertices + comps


def test_cycle_basis_lies_in_kernel(amalgams):
    for name in ("a4_a4_v4", "s4_s4_d8", "s4_s4_d8_twisted"):
        am = amalgams(name)
        for i in am.F.centric_family():
            g = amalgam_graph(am.F, am.F1, am.F2, i)
            Z, _ = g.cycle_basis()
            assert gfp.is_zero(gfp.matmul(g.incidence(), Z, g.p))
            assert gfp.rank(Z, g.p) == g.h1_dim


def test_control_graph_is_a_forest(amalgams):
    am = amalgams("control_d8")
    for i in am.F.centric_family():
        assert amalgam_graph(am.F, am.F1, am.F2, i).h1_dim == 0


def test_graph_rejects_noncentric(amalgams):
    am = amalgams("a4_a4_v4")
    with pytest.raises(NotCentric):
        amalgam_graph(am.F, am.F1, am.F2, 0)


def test_cgpc_a4_has_no_trivial_quotient(amalgams):
    am = amalgams("a4_a4_v4")
    C = cgpc_module(am.F, am.F1, am.F2, base=am.centric_orbit(0))
    C.check_functorial()
    assert C.dims == [2]
    assert hom_module(C, constant_module(C.cat, 2)).shape[1] == 0
    assert limit(C.cat, C).shape[1] == 0


def test_cgpc_is_functorial_on_corpus(amalgams):
    for name in ("s4_s4_d8", "s4_s4_d8_twisted", "s3_s3_c3", "control_v4"):
        am = amalgams(name)
        C = cgpc_module(am.F, am.F1, am.F2, base=am.centric_orbit(0))
        C.check_functorial()
