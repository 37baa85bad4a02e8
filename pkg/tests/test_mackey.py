from __future__ import annotations

import numpy as np
import pytest

from fusionlim import gfp, mackey
from fusionlim.errors import DegreeTooLarge, GroupTooLarge
from fusionlim.fusion import orbit_category
from fusionlim.grouptheory import conj, cyclic, dihedral, klein_four, quaternion
from fusionlim.mackey import (CohomologyData, GroupCohomology, bar_cohomology_dims, check_mackey,
                              cohomology_mackey, corrupt_transfer, fixed_point_mackey, induced_map,
                              inner_automorphisms_trivial, restrict_to_orbit_subcategory, transfer_map)


def inclusions(M):
    cat = M.base
    for a in range(cat.n_objects):
        for b in range(cat.n_objects):
            P, Q = cat.subgroup(a), cat.subgroup(b)
            if P.members <= Q.members:
                yield P, Q, M.inclusion(P, Q)


@pytest.fixture(scope="module")
def a4_functors(a4_fusion):
    base = orbit_category(a4_fusion)
    data = CohomologyData(a4_fusion.subgroups, 2, 2)
    return [fixed_point_mackey(a4_fusion, base=base)] + \
        [cohomology_mackey(a4_fusion, j, base=base, data=data) for j in (0, 1, 2)]


def test_fixed_point_and_cohomology_pass_on_a4(a4_functors):
    for M in a4_functors:
        rep = check_mackey(M)
        assert rep.ok, rep.failures


def test_fixed_point_examples(small_p_groups):
    F = small_p_groups["D8"]
    M = fixed_point_mackey(F)
    one = F.subgroups[0]
    assert M.tr(M.inclusion(one, F.S)).tolist() == [[0]]
    assert all(M.res(f).tolist() == [[1]] for f in range(M.base.n_morphisms))
    assert check_mackey(M).ok
    V = small_p_groups["V4"]
    assert check_mackey(fixed_point_mackey(V)).ok


def test_h0_matches_fixed_point_contravariant(s4_fusion):
    M0 = cohomology_mackey(s4_fusion, 0)
    assert M0.dims == [1] * M0.base.n_objects
    assert all(M0.res(f).tolist() == [[1]] for f in range(M0.base.n_morphisms))


def test_h1_examples(small_p_groups):
    F = small_p_groups["V4"]
    M = cohomology_mackey(F, 1)
    O = M.base
    dims = {O.subgroup(a).order: M.dims[a] for a in range(O.n_objects)}
    assert dims[2] == 1 and dims[4] == 2
    for P, Q, f in inclusions(M):
        if P.order == 2 and Q.order == 4:
            assert gfp.rank(M.res(f), 2) == 1


def test_transfer_after_restriction_is_index(a4_functors, s4_fusion):
    functors = list(a4_functors) + [cohomology_mackey(s4_fusion, j) for j in (1, 2)]
    for M in functors:
        for P, Q, f in inclusions(M):
            q = Q.order // P.order
            lhs = gfp.matmul(M.tr(f), M.res(f), M.p)
            assert np.array_equal(lhs, (q * gfp.identity(lhs.shape[0])) % M.p)


def test_corrupted_transfer_is_caught(a4_functors):
    M = a4_functors[2]  # H^1
    f = next(f for f in range(M.base.n_morphisms) if M.tr(f).size)
    rep = check_mackey(corrupt_transfer(M, f))
    assert not rep.ok
    assert rep.witness is not None


def test_single_subgroup_double_coset_is_identity(small_p_groups):
    F = small_p_groups["C2"]
    M = cohomology_mackey(F, 1)
    assert check_mackey(M).ok


@pytest.mark.parametrize("group", [cyclic(2), cyclic(4), klein_four(), dihedral(8), quaternion()])
def test_cohomology_dims_match_bar_complex(group):
    P = group.whole
    H = GroupCohomology(P, 2, 3)
    assert [H.dim(n) for n in range(4)] == bar_cohomology_dims(P, 2, 3)


def test_known_cohomology_dimensions():
    assert [GroupCohomology(cyclic(3).whole, 3, 3).dim(n) for n in range(4)] == [1, 1, 1, 1]
    assert [GroupCohomology(klein_four().whole, 2, 3).dim(n) for n in range(4)] == [1, 2, 3, 4]
    assert [GroupCohomology(dihedral(8).whole, 2, 3).dim(n) for n in range(4)] == [1, 2, 3, 4]
    assert [GroupCohomology(quaternion().whole, 2, 3).dim(n) for n in range(4)] == [1, 2, 2, 1]


def test_inner_automorphisms_act_trivially():
    for G in (dihedral(8), quaternion()):
        H = GroupCohomology(G.whole, 2, 3)
        for n in range(4):
            assert inner_automorphisms_trivial(H, n)


def test_transfer_independent_of_transversal():
    D = dihedral(8)
    Q = D.whole
    P = D.subgroup([D.generators[1]])
    HP, HQ = GroupCohomology(P, 2, 2), GroupCohomology(Q, 2, 2)
    for n in range(3):
        base = transfer_map(HP, HQ, n)
        for seed in range(4):
            assert np.array_equal(transfer_map(HP, HQ, n, rng=np.random.default_rng(seed)), base)


def test_induced_map_of_automorphism_is_invertible():
    V = klein_four().whole
    H = GroupCohomology(V, 2, 2)
    a, b = V.generators
    swap = {y: y for y in V.elements}
    swap[a], swap[b] = b, a
    for n in range(3):
        A = induced_map(H, H, swap, n)
        assert gfp.rank(A, 2) == H.dim(n)
        assert np.array_equal(gfp.matmul(A, A, 2), gfp.identity(H.dim(n)))
    x = V.generators[0]
    assert induced_map(H, H, {y: conj(x, y) for y in V.elements}, 1).tolist() == gfp.identity(2).tolist()


def test_restrict_to_orbit_subcategory_examples(a4_fusion, a4_functors):
    M = a4_functors[2]
    R = restrict_to_orbit_subcategory(M, [a4_fusion.S])
    assert R.dims == [2] and R.cat.n_morphisms == 3
    R.check_functorial()
    K = restrict_to_orbit_subcategory(a4_functors[0], a4_fusion.centric_family())
    assert all(K.act(f).tolist() == [[1]] for f in range(K.cat.n_morphisms))


def test_restriction_then_skeleton_agrees(s4_fusion):
    from fusionlim.catalg import higher_limits, restrict_module, skeleton_of
    M = cohomology_mackey(s4_fusion, 1)
    R = restrict_to_orbit_subcategory(M, s4_fusion.centric_family())
    sk = skeleton_of(R.cat)
    Rs = restrict_module(R, sk.inclusion)
    assert Rs.dims == [R.dims[a] for a in sk.inclusion.obj_map]
    assert higher_limits(sk.cat, Rs, 3, use_skeleton=False) == higher_limits(R.cat, R, 3, use_skeleton=False)


def test_resource_caps(small_p_groups, monkeypatch):
    F = small_p_groups["D8"]
    with pytest.raises(DegreeTooLarge):
        cohomology_mackey(F, 5)
    monkeypatch.setattr(mackey, "MAX_COHOMOLOGY_ORDER", 4)
    with pytest.raises(GroupTooLarge):
        cohomology_mackey(F, 1)
