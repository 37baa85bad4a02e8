from __future__ import annotations

import json

import pytest

from fusionlim.cli import main
from fusionlim.theorem_a import corpus_paths


def spec_path(name):
    return str(next(p for p in corpus_paths() if p.stem == name))


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(path)


def run_json(capsys, argv):
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


def test_fusion_build(capsys):
    code, out = run_json(capsys, ["fusion-build", spec_path("a4_a4_v4")])
    assert code == 0
    assert out["summary"]["centric_classes"] == 1
    assert out["summary"]["class_orders"] == [[1], [2, 2, 2], [4]]


def test_theorem_a_pass_and_negative_control(capsys):
    code, out = run_json(capsys, ["theorem-a", spec_path("a4_a4_v4"), "--functor", "fixed-point",
                                  "--functor", "cohomology", "--degree", "1", "--degree", "2"])
    assert code == 0
    assert [r["ok"] for r in out["reports"]] == [True, True, True]
    code, out = run_json(capsys, ["theorem-a", spec_path("a4_a4_v4"), "--functor", "broken"])
    assert code == 3
    assert out["reports"][0]["error"] == "HypothesisFailed"


def test_output_files_are_deterministic(tmp_path, capsys):
    outs = []
    for k in range(2):
        path = tmp_path / f"run{k}.json"
        assert main(["theorem-a", spec_path("s4_s4_d8"), "--functor", "cohomology",
                     "--maxdeg", "3", "--out", str(path)]) == 0
        assert path.with_suffix(".md").exists()
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_limits_random_d2_seeded(tmp_path, capsys):
    cat = write(tmp_path, "d2.json", {"kind": "dn", "n": 2})
    mod = write(tmp_path, "m.json", {"p": 3, "random": {"dims": [2, 3, 1]}})
    runs = []
    for _ in range(2):
        code, out = run_json(capsys, ["limits", cat, mod, "--seed", "5", "--integral"])
        assert code == 0 and out["closed_form_match"]
        runs.append(out)
    assert runs[0] == runs[1]
    assert len(runs[0]["integral_invariant_factors"]) == 5


def test_limits_constant_on_poset(tmp_path, capsys):
    cat = write(tmp_path, "v.json", {"kind": "poset", "objects": ["a", "b", "c"],
                                     "relations": [["a", "b"], ["a", "c"]]})
    code, out = run_json(capsys, ["limits", cat, "--maxdeg", "2"])
    assert code == 0 and out["lim"] == [1, 0, 0]


@pytest.mark.parametrize("payload", [
    "{not json",
    {"kind": "poset", "objects": ["a", "b"], "relations": [["a", "b"], ["b", "a"]]},
    {"kind": "torus"},
])
def test_bad_input_exits_2(tmp_path, payload):
    assert main(["limits", write(tmp_path, "bad.json", payload)]) == 2


def test_missing_file_and_prime_mismatch():
    assert main(["fusion-build", "/nonexistent/spec.json"]) == 2
    assert main(["theorem-a", spec_path("a4_a4_v4"), "--prime", "3"]) == 2


def test_cap_exits_4():
    assert main(["theorem-a", spec_path("a4_a4_v4"), "--cap-order", "5"]) == 4


def test_dwyer_oracle(capsys):
    code, out = run_json(capsys, ["dwyer-oracle", "--random", "3", "--seed", "2", "--maxdeg", "2"])
    assert code == 0 and out["all_ok"] and len(out["cases"]) == 3
    code, out = run_json(capsys, ["dwyer-oracle", "--group", "S3", "--H", "[[1,0,2]]", "--maxdeg", "2"])
    assert code == 0 and out["all_ok"]
