from __future__ import annotations

import json

import pytest

from fusionlim.catalg import CatModule, higher_limits, skeleton_of
from fusionlim.errors import HypothesisFailed, InputError, NotSylow
from fusionlim.mackey import CohomologyData, MackeyFunctor, cohomology_mackey, fixed_point_mackey
from fusionlim.theorem_a import (amalgam_from_json, build_amalgam_fusion, corpus_paths, load_corpus,
                                 restricted, sharpness_scan, stable_elements, stable_quotient,
                                 verify_exact_sequence, verify_hypotheses)

V4_GENS = [[1, 0, 3, 2], [2, 3, 0, 1]]


def functors(am, degrees=(1, 2)):
    base = am.full_orbit()
    data = CohomologyData(am.F.subgroups, am.spec.p, max(degrees))
    return [fixed_point_mackey(am.F, base=base)] + \
        [cohomology_mackey(am.F, j, base=base, data=data) for j in degrees]


def broken(M):
    C = M.contravariant
    mats = [C.act(f) if f in C.cat.identities else 0 * C.act(f) for f in range(C.cat.n_morphisms)]
    return MackeyFunctor(M.base, CatModule(C.cat, C.p, C.dims, mats, check=False), M.trans, name="broken")


def test_corpus_loads():
    specs = load_corpus()
    assert len(specs) == len(corpus_paths()) >= 10
    names = {s.name for s in specs}
    assert {"a4_a4_v4", "s4_s4_d8", "s4_psl27_d8", "s3_s3_c3"} <= names


def test_a4_amalgam_structure(amalgams):
    am = amalgams("a4_a4_v4")
    assert [am.F.subgroups[i].order for i in am.centric] == [4]
    assert am.centric_orbit(0).n_morphisms == 3
    assert am.centric_orbit(3).n_morphisms == 1


def test_s4_amalgam_structure(amalgams):
    am = amalgams("s4_s4_d8")
    assert sorted(am.F.subgroups[i].order for i in am.centric) == [4, 4, 4, 8]


def test_twisted_amalgam_saturates_both_klein_fours(amalgams):
    plain, twisted = amalgams("s4_s4_d8"), amalgams("s4_s4_d8_twisted")
    for am in (plain, twisted):
        assert len(am.centric) == 4
    # both Klein fours become essential yet stay non-conjugate, as in PSL(2,7)
    for am in (plain, twisted):
        assert len(skeleton_of(am.centric_orbit(0)).cat.objects) == 4

    def full_aut(am):
        return [i for i in am.centric if am.F.subgroups[i].order == 4 and len(am.F.aut(i)) == 6]

    assert len(full_aut(plain)) == 1 and len(full_aut(twisted)) == 2


def test_hypotheses_hold_on_corpus(amalgams):
    for spec in load_corpus():
        am = amalgams(spec.name)
        for M in functors(am, (1,)):
            rep = verify_hypotheses(am, M, 3)
            assert rep.ok, (spec.name, M.name, rep.limits)


def test_broken_functor_rejected(amalgams):
    am = amalgams("a4_a4_v4")
    M = broken(fixed_point_mackey(am.F, base=am.full_orbit()))
    rep = verify_hypotheses(am, M, 2)
    assert not rep.ok and rep.error.startswith("functor rejected")
    with pytest.raises(HypothesisFailed) as info:
        verify_exact_sequence(am, M, 2)
    assert info.value.report.hypotheses_ok is False
    assert not verify_exact_sequence(am, M, 2, strict=False).ok


def test_stable_quotient_examples(amalgams):
    am = amalgams("a4_a4_v4")
    M0, M1, _ = functors(am)
    assert stable_quotient(am, M0) == 0
    # H^1(V4) = F_2^2 carries a fixed-point-free C3 action in each factor
    assert stable_elements(M1, am, 1).shape[1] == 0
    assert stable_quotient(am, M1) == 2
    am7 = amalgams("s4_psl27_d8")
    assert stable_quotient(am7, functors(am7, (1,))[1]) == 1


def test_a4_anchor(amalgams):
    am = amalgams("a4_a4_v4")
    M0, M1, M2 = functors(am)
    r0 = verify_exact_sequence(am, M0, 4)
    assert r0.ok and r0.cgpc_dims == [2]
    assert r0.limits == [1, 0, 0, 0, 0]
    r1 = verify_exact_sequence(am, M1, 4)
    assert r1.ok and r1.hom_cgpc == 2 and r1.limits[0] == 0


@pytest.mark.parametrize("name", ["a4_a4_v4", "a4_v4_v4", "s4_s4_d8", "s4_s4_d8_twisted",
                                  "s3_s3_c3", "s3_s3_c2", "control_c2", "control_v4", "control_d8"])
def test_exact_sequence_on_corpus(amalgams, name):
    am = amalgams(name)
    for M in functors(am):
        rep = verify_exact_sequence(am, M, 4)
        assert rep.ok, rep.to_markdown()
        assert set(rep.checks) == {"a", "b", "c", "d"}
        assert sorted(rep.ext_cgpc) == [1, 2]


def test_controls_have_trivial_cgpc(amalgams):
    for name in ("control_c2", "control_v4", "control_d8"):
        am = amalgams(name)
        rep = verify_exact_sequence(am, functors(am, (1,))[1], 3)
        assert not any(rep.cgpc_dims)
        assert rep.stable_quotient == 0 and rep.hom_cgpc == 0


def test_sharpness_scan(a4_fusion, s4_fusion):
    for F in (a4_fusion, s4_fusion):
        for j in (0, 1, 2):
            out = sharpness_scan(F, cohomology_mackey(F, j), 4)
            assert out["sharp"] and out["flagged"] == []
            assert len(out["limits"]) == 5


def test_fusion_of_p_group_has_lim0_equal_to_top(small_p_groups):
    for F in small_p_groups.values():
        for j in (0, 1, 2):
            M = cohomology_mackey(F, j)
            top = M.dims[M.base.object_of_subgroup(F.S)]
            assert sharpness_scan(F, M, 3)["limits"] == [top, 0, 0, 0]


def test_maxdeg_prefix_monotone(amalgams):
    am = amalgams("s4_s4_d8")
    M = functors(am, (1,))[1]
    r2 = verify_exact_sequence(am, M, 2)
    r4 = verify_exact_sequence(am, M, 4)
    assert r4.limits[:3] == r2.limits
    assert r4.stable_quotient == r2.stable_quotient
    Mp = restricted(M, am, 0)
    assert higher_limits(Mp.cat, Mp, 4) == r4.limits


def test_bad_specs():
    good = {"p": 2, "G1": "A4", "G2": "A4", "S_in_G1": V4_GENS, "S_in_G2": V4_GENS}
    amalgam_from_json(good).check()
    with pytest.raises(NotSylow):
        amalgam_from_json({**good, "S_in_G1": [[1, 0, 3, 2]], "S_in_G2": [[1, 0, 3, 2]]}).check()
    with pytest.raises(InputError):
        amalgam_from_json({**good, "S_in_G2": [[1, 0, 3, 2], [1, 0, 3, 2]]})
    with pytest.raises(InputError):
        amalgam_from_json({k: v for k, v in good.items() if k != "G2"})


def test_report_json_is_deterministic(amalgams):
    am = amalgams("s4_s4_d8")
    M = functors(am, (1,))[1]
    a = json.dumps(verify_exact_sequence(am, M, 3).to_json(), sort_keys=True)
    b = json.dumps(verify_exact_sequence(build_amalgam_fusion(am.spec), M, 3).to_json(), sort_keys=True)
    assert a == b
    assert "timings" not in json.loads(a)
