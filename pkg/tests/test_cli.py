import json
import math
import subprocess
import sys

from gnum.cli import main
from gnum.dsl import parse_descriptor
from gnum.sets import complement, equivalent


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip().startswith("{") else out), err


def test_val(capsys):
    code, out, _ = run(capsys, "val", "alpha(3/2)")
    assert code == 0
    assert out == {"schema": "gnum/1", "valuation": "3/2", "mode": "exact"}


def test_dist(capsys):
    code, out, _ = run(capsys, "dist", "chi(G2)", "chi(G3)")
    assert code == 0 and out["dist"] == 1.0


def test_norm_and_eval(capsys):
    code, out, _ = run(capsys, "norm", "alpha(1)")
    assert code == 0 and math.isclose(out["norm"], math.exp(-1))
    code, out, _ = run(capsys, "eval", "alpha(2)", "--at", "3,1/2,1/4")
    assert code == 0 and out["exact"] and out["value"] == "1/64"


def test_eval_precision_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("GNUM_PRECISION", "1/1000000")
    code, out, _ = run(capsys, "eval", "alpha(1)*sin(alpha(-1))", "--at", "0,1,1/3")
    assert code == 0 and not out["exact"] and out["width"] <= 1e-6
    monkeypatch.setenv("GNUM_PRECISION", "nope")
    assert run(capsys, "val", "alpha(1)")[0] == 2


def test_usage_errors_exit_2(capsys):
    code, _, err = run(capsys, "bogus")
    assert code == 2 and json.loads(err)["error"] == "usage"
    code, _, err = run(capsys, "val", "alpha(")
    assert code == 2 and json.loads(err)["position"] == 6
    assert run(capsys, "val", "chi(NOPE)")[0] == 2
    assert run(capsys, "approx", "alpha(1)")[0] == 2          # a unit: precondition
    assert run(capsys, "suite", "unknown-name")[0] == 2


def test_unit_commands(capsys):
    code, out, _ = run(capsys, "is-unit", "chi(G2)")
    assert code == 0 and out["unit"] is False and out["obstruction"] == "~G2"
    code, out, _ = run(capsys, "is-unit", "alpha(1)*chi(G2) + alpha(2)*chi(~G2)")
    assert out["unit"] is True and "witness" in out
    code, out, _ = run(capsys, "approx", "chi(G2)")
    assert out == {"schema": "gnum/1", "case": "A", "S": "~G2", "a": 1}
    code, out, _ = run(capsys, "unitize", "chi(G2)")
    assert out["y"] == "1" and out["a"] == 1
    code, out, _ = run(capsys, "idempotent", "chi(G2 & D20) + chi(G2 & ~D20)")
    assert out["S"] == "G2"
    code, out, _ = run(capsys, "is-null", "chi(~tail(1/8))")
    assert out["null"] is True


def test_family_commands(capsys, tmp_path):
    alg = tmp_path / "alg.json"
    alg.write_text(json.dumps({"generators": ["G2", "D20"]}))
    code, out, _ = run(capsys, "enum-families", str(alg))
    assert code == 0 and len(out["families"]) == 4
    fam = tmp_path / "fam.json"
    fam.write_text(json.dumps({"generators": ["G2"], "pivot": 1}))
    code, out, _ = run(capsys, "ideal-member", "alpha(2)*chi(G2)", "--family", str(fam))
    assert out["member"] is True and out["witness"] == "G2"
    code, out, _ = run(capsys, "ideal-member", "1", "--family", str(fam))
    assert out["member"] is False
    code, out, _ = run(capsys, "qsign", "chi(G2) - chi(~G2)", "--family", str(fam))
    assert out["qsign"] == "NonPositive"
    fam.write_text(json.dumps({"generators": ["G2"], "pivot": 7}))
    assert run(capsys, "qsign", "1", "--family", str(fam))[0] == 2


def test_order_commands(capsys):
    code, out, _ = run(capsys, "sign", "alpha(1)*sin(alpha(-1))")
    assert code == 0
    assert out["qpositive"]["verdict"] == out["qnegative"]["verdict"] == "no"
    code, out, _ = run(capsys, "decompose", "chi(G2) - chi(~G2)")
    assert out["pos"]["text"] == "chi(G2)" and out["neg"]["text"] == "-chi(~G2)"
    assert out["support_set"] == "G2"


def test_oracle_command(capsys, tmp_path):
    code, out, _ = run(capsys, "oracle", "alpha(2)*chi(G2) + alpha(1)*chi(~G2)")
    assert code == 0 and out["status"] == "PASS"
    grid = tmp_path / "grid.json"
    grid.write_text(json.dumps({"levels": [0], "k_min": 4, "k_max": 20}))
    code, out, _ = run(capsys, "oracle", "alpha(1)", "--grid", str(grid))
    assert code == 0 and out["grid"]["levels"] == [0]
    grid.write_text(json.dumps({"colour": "red"}))
    assert run(capsys, "oracle", "alpha(1)", "--grid", str(grid))[0] == 2


def test_suite_command(capsys):
    code, out, _ = run(capsys, "suite", "--list")
    assert code == 0 and "thm-aproxim" in {s["name"] for s in out["suites"]}
    code, out, _ = run(capsys, "suite", "prop-valor", "--size", "20")
    assert code == 0 and out["status"] == "PASS"
    code, out, _ = run(capsys, "suite", "thm-impor-density")
    assert code == 0
    table = next(iter(out["tables"].values()))
    assert len(table) == 8


def test_registry_and_text_format(capsys, tmp_path):
    reg = tmp_path / "reg.json"
    reg.write_text(json.dumps({"B": {"kind": "expr", "expr": "G2 & ~D20"}}))
    code, out, _ = run(capsys, "--registry", str(reg), "is-unit", "chi(B)")
    assert code == 0
    got = parse_descriptor(out["obstruction"])
    assert equivalent(got, complement(parse_descriptor("G2 & ~D20")))
    code, out, _ = run(capsys, "--format", "text", "val", "alpha(2)")
    assert code == 0 and "valuation: 2" in out


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gnum", "val", "alpha(1)"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["valuation"] == "1"
