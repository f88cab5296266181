import io
import json
import os

import pytest

from koszul_bv.cli import run

EX = os.path.join(os.path.dirname(__file__), os.pardir, "examples")


def ex(name):
    return os.path.join(EX, name)


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), stdout=buf)
    return code, buf.getvalue()


def test_qdual_reports_relations():
    code, out = call("qdual", ex("poly2.json"))
    assert code == 0 and "3 dual relations" in out


def test_koszul_check():
    code, out = call("koszul-check", ex("qplane2.json"), "--degree", "6")
    assert code == 0 and "Koszul up to degree 6" in out


def test_frobenius_automorphism_matches_spec():
    code, out = call("frobenius", ex("qplane2.json"), "--format", "json")
    rep = json.loads(out)
    assert code == 0 and rep["passed"] and rep["automorphism_matches"]
    assert rep["dims"] == [1, 2, 1] and sorted(rep["eigenvalues"]) == ["1/2", "2"]


def test_frobenius_fails_when_dual_is_infinite():
    code, _ = call("frobenius", ex("exterior2.json"))
    assert code == 1


@pytest.mark.parametrize("argv", [
    ("verify-theorem", "missing.json"),
    ("verify-theorem", "poly2.json", "--weight-max", "1"),
    ("verify-theorem", "poly2.json", "--hdeg-max", "2"),
    ("verify-theorem", "poly2.json", "--workers", "0"),
    ("no-such-command", "poly2.json"),
])
def test_input_errors(argv):
    argv = [argv[0]] + [ex(a) if a.endswith(".json") else a for a in argv[1:]]
    assert call(*argv)[0] == 2


def test_malformed_spec(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"generators": [{"name": "x", "degree": 2}], "relations": []}))
    assert call("qdual", str(bad))[0] == 2
    bad.write_text("{not json")
    assert call("qdual", str(bad))[0] == 2


def _theorem(*extra):
    code, out = call("verify-theorem", ex("poly2.json"), "--weight-max", "3", "--hdeg-max", "4",
                     "--format", "json", *extra)
    return code, json.loads(out)


def test_verify_theorem_pass_and_fault():
    code, rep = _theorem()
    assert code == 0 and rep["verdict"] == "pass"
    code, rep = _theorem("--fault", "twisted-B-sign")
    assert code == 1 and rep["verdict"] == "fail"


def test_json_is_deterministic_and_workers_agree():
    _, a = _theorem()
    _, b = _theorem("--workers", "2")
    a.pop("timing"), b.pop("timing")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_output_file(tmp_path):
    target = tmp_path / "r.json"
    code, out = call("qdual", ex("poly2.json"), "--format", "json", "-o", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["command"] == "qdual"


def test_hh_tables_cover_negative_weights():
    from criteria import polyvector_dims
    code, out = call("hh", ex("poly2.json"), "--weight-max", "2", "--format", "json")
    table = json.loads(out)["HH^(A) cells (m,w)"]
    assert code == 0
    assert table["2,-2"] == 1 and table["1,-1"] == 2
    text = call("hh", ex("poly2.json"), "--weight-max", "2")[1]
    for m in range(3):
        for w in range(-m, 3):
            assert ("  (%d, %d): %d" % (m, w, polyvector_dims(m, w))) in text
