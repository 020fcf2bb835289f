import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from korbit import cli

DATA = Path(__file__).parent / "data"


def run(*argv):
    args = cli.build_parser().parse_args([str(a) for a in argv])
    return cli.run(args)


def model(name):
    return DATA / name


def test_validate_ok():
    code, rep = run("validate", "--model", model("su2.json"))
    assert code == 0 and rep["ok"]
    assert rep["schema_version"] == cli.SCHEMA_VERSION
    for key in ("tool_version", "inputs", "tolerances", "conventions"):
        assert key in rep


def test_broken_jacobi_witness():
    code, rep = run("validate", "--model", model("broken_jacobi.json"))
    assert code == 2 and not rep["ok"]
    (v,) = rep["results"]["algebra"]["violations"]
    assert v == {"indices": [1, 2, 3, 3], "kind": "jacobi", "value": "-1"}


@pytest.mark.parametrize("name,locator", [("missing_dim.json", "dim"),
                                          ("bad_rational.json", "structure_constants[3].c")])
def test_structural_errors(name, locator):
    code, rep = run("validate", "--model", model(name))
    assert code == 1 and rep["error"]["locator"] == locator


def test_inline_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"dim": 2, "structure_constants": [{"i": 1, "j": 3, "k": 1, "c": "1"}]}')
    code, rep = run("validate", "--model", bad)
    assert code == 1 and rep["error"]["locator"] == "structure_constants[0].j"
    bad.write_text("{not json")
    assert run("validate", "--model", bad)[0] == 1
    conflict = tmp_path / "conflict.json"
    conflict.write_text(json.dumps({"dim": 2, "structure_constants": [
        {"i": 1, "j": 2, "k": 2, "c": "1"}, {"i": 2, "j": 1, "k": 2, "c": "1"}]}))
    assert run("validate", "--model", conflict)[0] == 1
    assert run("validate", "--model", tmp_path / "missing.json")[0] == 1


def test_basis_labels(tmp_path):
    doc = json.loads(model("h3.json").read_text())
    doc["basis_labels"] = ["X", "Y", "Z"]
    doc["transition"] = {"X": doc["transition"]["1"], "Y": doc["transition"]["2"], "Z": doc["transition"]["3"]}
    p = tmp_path / "labelled.json"
    p.write_text(json.dumps(doc))
    assert run("lrep", "--model", p, "--config", DATA / "h3_lrep.json")[0] == 0
    doc["basis_labels"] = ["X", "Y"]
    p.write_text(json.dumps(doc))
    assert run("validate", "--model", p)[0] == 1


def test_geometry_su2():
    code, rep = run("geometry", "--model", model("su2.json"))
    res = rep["results"]
    assert code == 0
    assert {(tuple(e["index"]), e["value"]) for e in res["christoffel"]} == {
        ((1, 2, 3), "-1/2"), ((1, 3, 2), "1/2"), ((2, 1, 3), "1/2"),
        ((2, 3, 1), "-1/2"), ((3, 1, 2), "-1/2"), ((3, 2, 1), "1/2")}
    assert res["scalar_curvature"] == "-3/2" and res["scalar_curvature_abs"] == "3/2"
    assert res["christoffel_trace"] == ["0", "0", "0"]


def test_geometry_needs_metric(tmp_path):
    doc = json.loads(model("su2.json").read_text())
    doc.pop("metric", None)
    p = tmp_path / "nometric.json"
    p.write_text(json.dumps(doc))
    code, rep = run("geometry", "--model", p)
    assert code == 1 and rep["error"]["locator"] == "metric"


def test_orbits_and_casimirs():
    code, rep = run("orbits", "--model", model("h3.json"))
    assert code == 0 and rep["results"]["index"] == 1
    assert [s["orbit_dim"] for s in rep["results"]["strata"]] == [2, 0]
    code, rep = run("casimirs", "--model", model("su2.json"))
    (k,) = rep["results"]["casimirs"]
    assert k["polynomial"] == "f1^2 + f2^2 + f3^2" and rep["results"]["reverified"]
    code, rep = run("casimirs", "--model", model("h3.json"), "--max-degree", "1")
    assert [k["polynomial"] for k in rep["results"]["casimirs"]] == ["f3"]


def test_defect():
    assert run("defect", "--model", model("h3.json"))[1]["results"]["defect"] == 1
    assert run("defect", "--model", model("abelian2.json"))[1]["results"]["defect"] == 0


def test_lrep_conventions():
    code, rep = run("lrep", "--model", model("h3.json"))
    assert code == 2
    (bad,) = [p for p in rep["results"]["transition"]["pairs"] if not p["symbolic_zero"]]
    assert bad["pair"] == [1, 2] and bad["residual"] == "-2*l3"
    code, rep = run("lrep", "--model", model("h3.json"), "--config", DATA / "h3_lrep.json")
    res = rep["results"]
    assert code == 0 and res["commutators"]["max_residual"] == 0
    assert len(res["commutators"]["by_probe"]) == 4
    assert [c["value"] for c in res["casimir_operators"]] == [[0.0, 2.0], [-4.0, 0.0]]


def test_clifford_command():
    code, rep = run("clifford", "--model", model("su2.json"))
    res = rep["results"]
    assert code == 0 and res["anticommutator_residual"] <= 1e-12 and res["size"] == 4


def test_fields_command():
    code, rep = run("fields", "--model", model("h3.json"), "--config", DATA / "h3_fields.json")
    res = rep["results"]
    assert code == 0 and res["laplace_residual"] <= 1e-9 and res["zeta"] == "1/6"
    assert res["norm"] == pytest.approx(math.sqrt(math.sqrt(math.pi / 2)), rel=1e-10)


def test_semt_command():
    code, rep = run("semt", "--model", model("abelian2.json"), "--config", DATA / "abelian2_semt.json")
    res = rep["results"]
    omega = math.sqrt(0.25 + 1)
    assert code == 0 and res["T00"][0] == pytest.approx(-omega / 2, rel=1e-12)
    assert res["T0a"] == [[-0.15, 0.0], [-0.2, 0.0]]
    code, rep = run("semt", "--model", model("abelian2.json"), "--config", DATA / "abelian2_spinor.json")
    assert code == 0 and rep["results"]["T00"][0] == pytest.approx(-1.5, rel=1e-12)


def test_settings_precedence(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"tol": 1e-3, "seed": 5}')
    _, rep = run("validate", "--model", model("su2.json"), "--config", cfg, "--tol", "1e-6")
    assert rep["tolerances"]["residual"] == 1e-6 and rep["conventions"]["seed"] == 5


def test_out_file_and_byte_identity(tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        code = cli.main(["semt", "--model", str(model("abelian2.json")), "--config",
                         str(DATA / "abelian2_semt.json"), "--out", str(out)])
        assert code == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    json.loads(outs[0])


def test_timings_opt_in():
    _, rep = run("validate", "--model", model("su2.json"))
    assert "timings" not in rep
    _, rep = run("validate", "--model", model("su2.json"), "--timings")
    assert "timings" in rep


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "korbit", "orbits", "--model", str(model("h3.json"))],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["results"]["index"] == 1
