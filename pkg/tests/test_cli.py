import io
import json

import pytest

from shimura_lab.cli import run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    rc = run(list(argv), stdout=out, stderr=err)
    return rc, out.getvalue(), err.getvalue()


@pytest.fixture(scope="module")
def tree_path(tmp_path_factory):
    from shimura_lab.fixtures import Fixtures

    p = tmp_path_factory.mktemp("g") / "tree.json"
    p.write_text(json.dumps(Fixtures().load("tree.json")))
    return p


def test_signature_command():
    rc, out, _ = call("fuchsian", "signature")
    assert rc == 0
    assert "(16; 2^17, 3^9, 32^1)" in out


def test_signature_json_manifest_is_stable():
    first = call("fuchsian", "signature", "--json", "--bound", "200000")[1]
    second = call("fuchsian", "signature", "--json", "--bound", "200000")[1]
    assert first == second
    doc = json.loads(first)
    assert doc["manifest"]["command"][:2] == ["fuchsian", "signature"]
    assert len(doc["manifest"]["output_sha256"]) == 64
    assert doc["manifest"]["inputs"]


def test_genus_and_weierstrass():
    rc, out, _ = call("fuchsian", "genus", "--vol", "1455/32", "--elliptic", "2^17, 3^9, 32^1")
    assert rc == 0 and "16" in out
    rc, out, _ = call("--json", "fuchsian", "weierstrass", "--genus", "16")
    res = json.loads(out)["result"]
    assert (res["min_count"], res["max_count"]) == (34, 4080)


def test_betti_of_tree(tree_path):
    rc, out, _ = call("graph", "betti", "--in", str(tree_path))
    assert rc == 0 and out.split()[0] == "0"


def test_graph_build_round_trip(tmp_path):
    rc, out, _ = call("--json", "graph", "build", "--over-q", "11", "--label", "2")
    assert rc == 0
    g = json.loads(out)["result"]
    path = tmp_path / "g.json"
    path.write_text(json.dumps(g))
    rc, out, _ = call("--json", "graph", "betti", "--in", str(path))
    assert rc == 0
    rc, out, _ = call("--json", "graph", "quotient", "--in", str(path), "--by", "swap")
    assert rc == 0 and len(json.loads(out)["result"]["vertices"]) == 2


def test_scan_over_fixture_field():
    rc, out, _ = call("--json", "fuchsian", "scan")
    assert json.loads(out)["result"]["orders"] == [3, 4, 6, 8, 16, 32]


def test_exit_codes():
    rc, _, err = call("fuchsian", "signature", "--bogus")
    assert rc == 64 and "unrecognized" in err
    assert call("hecke", "congruence", "f", "g", "--ell", "5", "--eigen", "/nonexistent.json")[0] == 2
    assert call("hecke", "overq", "17")[0] == 3


def test_precision_env_is_validated(monkeypatch):
    monkeypatch.setenv("SHIMURA_LAB_PRECISION", "32")
    rc, _, err = call("quat", "validate")
    assert rc == 2 and "SHIMURA_LAB_PRECISION" in err


def test_paper_verify_subset():
    rc, out, _ = call("paper", "verify", "--only", "3,4,6")
    assert rc == 0
    lines = [ln for ln in out.splitlines() if ln.startswith("[")]
    assert len(lines) == 3 and all(ln.startswith("[PASS]") for ln in lines)
