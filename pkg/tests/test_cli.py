import csv
import json

import pytest

from pwaffine.cli import main, parse_map_spec
from pwaffine.exactnum import champernowne_stream


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip().startswith("{") else out)


def test_attractor_d(capsys):
    code, rep = run(capsys, "attractor", "--d", "1,1,1", "--seeds", "0")
    assert code == 0
    assert rep["attractor_estimate"] == ["2/9", "5/9", "8/9"]
    assert rep["d"] == ["1/1", "1/1", "1/1"]


def test_attractor_champ(capsys):
    code, rep = run(capsys, "attractor", "--x", "c-1/4,c,c+1/2", "--seeds", "0.11,0.8")
    assert code == 0 and rep["verdict"] == "finite"
    states = {tuple(s) for s in rep["attractor_states"]}
    assert states == {("2/5", "3/5", "0/1"), ("0/1", "4/5", "1/5"), ("2/5", "0/1", "3/5"), ("0/1", "1/5", "4/5")}
    assert rep["x"][1]["generator"] == "champernowne(4)"


def test_attractor_map(capsys):
    code, rep = run(capsys, "attractor", "--map", "beta=2,sign=+,bp=0:1/2:1,alpha=1:2", "--seeds", "1/3")
    assert code == 0 and rep["attractor_estimate"] == ["0/1"]
    assert rep["quasipartition_verdict"] == "finite"


def test_attractor_no_cycle_is_inconclusive(capsys):
    code, rep = run(capsys, "attractor", "--d", "1,1,1", "--seeds", "1/3", "--max-steps", "2")
    assert code == 4 and rep["verdict"] == "inconclusive"


def test_quasipartition(capsys):
    code, rep = run(capsys, "quasipartition", "--map", "beta=2,sign=-,bp=0:1/6:1/2:5/6:1,alpha=1:2:1:2")
    assert code == 0 and rep["verified"] and rep["verdict"] == "finite"
    code, rep = run(capsys, "quasipartition", "--map", "beta=2,sign=+,bp=0:1/2:1,alpha=1:2")
    assert rep["intervals"] == [["0/1", "1/2"], ["1/2", "1/1"]] and rep["tau"] == [1, 2]


def test_quasipartition_construction_error(capsys):
    code = main(["quasipartition", "--map", "beta=2,sign=-,bp=0:1/2:1,alpha=2:1"])
    assert code == 2
    assert "alpha_1 != beta" in capsys.readouterr().err


def test_quasipartition_depth_inconclusive(capsys):
    code, rep = run(capsys, "quasipartition", "--map", "beta=2,sign=+,bp=0:1/3:1/2:1,alpha=1:2:1", "--depth", "1")
    assert code == 4 and rep["verdict"] == "inconclusive"


def test_simulate_csv(tmp_path, capsys):
    out = tmp_path / "orbit.csv"
    code, rep = run(capsys, "simulate", "--x", "c-1/4,c,c+1/2", "--v0", "0.11,0,0.89", "--events", "60", "--out", str(out))
    assert code == 0 and rep["converged"]
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["t", "v1", "v2", "v3", "served_tank"]
    assert len(rows) == 1 + 60 * 10 + 1
    cyc = {tuple(round(float(v), 9) for v in s) for s in rep["cycle_estimate"]}
    assert cyc == {(0.4, 0.6, 0.0), (0.0, 0.8, 0.2), (0.4, 0.0, 0.6), (0.0, 0.2, 0.8)}


def test_simulate_exact_cycle(tmp_path, capsys):
    out = tmp_path / "tri.csv"
    code, rep = run(capsys, "simulate", "--d", "1,1,1", "--v0", "0,1/3,2/3", "--events", "3", "--samples", "1", "--out", str(out))
    assert code == 0 and rep["converged"] and len(rep["cycle_estimate"]) == 3
    rows = list(csv.reader(out.open()))
    assert rows[1][1:4] == rows[-1][1:4]


def test_simulate_interior_needs_served(capsys):
    assert main(["simulate", "--d", "1,1,1", "--v0", "0.5,0.3,0.2"]) == 2
    code, rep = run(capsys, "simulate", "--d", "1,1,1", "--v0", "0.5,0.3,0.2", "--served", "2", "--events", "2")
    assert code == 0


def test_richness(capsys):
    code, rep = run(capsys, "richness", "--number", "champernowne(4)", "--k", "3", "--prefix", "10000")
    assert rep["census"]["count"] == 64 and rep["census"]["missing"] == []
    code, rep = run(capsys, "richness", "--number", "1/3", "--base", "4", "--k", "2")
    assert rep["census"]["count"] == 1 and rep["expansion"] == {"preperiod": [], "period": [1]}
    code, rep = run(capsys, "richness", "--number", "champernowne(4)+1/2", "--k", "3")
    assert rep["census"]["count"] == 64
    assert main(["richness", "--number", "c", "--k", "5", "--prefix", "3"]) == 2
    assert main(["richness", "--number", "1/3", "--k", "2"]) == 2


def test_verify(capsys):
    code, rep = run(capsys, "verify", "conjugacy")
    assert code == 0 and rep["passed"] and rep["seed"] == rep["results"][0]["seed"]


def test_usage_errors(capsys):
    assert main([]) == 2
    assert main(["attractor", "--map", "beta=2,bp=0:1"]) == 2
    assert main(["attractor", "--d", "1,1", "--seeds", "0"]) == 2
    assert main(["verify", "nonsense"]) == 2
    assert main(["simulate", "--d", "1,1,1", "--x", "c-1/4,c,c+1/2", "--v0", "0,0,1"]) == 2


def test_precision_exhausted_exit(capsys):
    # d3 * 0.7784 - 0.2216 is about 8e-5: undecidable from a few digits of c, easy from 36
    argv = ["simulate", "--x", "c-1/4,c,c+1/2", "--v0", "0.2216,0.7784,0", "--events", "2"]
    assert main(argv + ["--precision", "0"]) == 4
    assert "inconclusive" in capsys.readouterr().err
    assert main(argv) == 0


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"d": "1,1,1", "v0": "0,1/3,2/3", "events": 3, "samples": 1}))
    code, rep = run(capsys, "--config", str(cfg), "simulate")
    assert code == 0 and rep["events"] == 3


def test_report_written_atomically(tmp_path, capsys):
    path = tmp_path / "rep.json"
    assert main(["attractor", "--d", "1,1,1", "--seeds", "0", "--report", str(path)]) == 0
    assert json.loads(path.read_text())["attractor_estimate"] == ["2/9", "5/9", "8/9"]
    assert [p.name for p in tmp_path.iterdir()] == ["rep.json"]


def test_map_spec_grammar():
    f = parse_map_spec("beta=2,sign=-,bp=0:c-1/4:c:c+1/2:1,alpha=1:2:1:2")
    assert f.breakpoints[2] is champernowne_stream(4)
    g = parse_map_spec("beta=2,sign=+,bp=0:1/2:1,a=1/10:1/3")
    assert not g.theorem_form


def test_module_entry_point():
    import subprocess
    import sys

    out = subprocess.run([sys.executable, "-m", "pwaffine", "attractor", "--d", "1,1,1"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "2/9" in out.stdout
