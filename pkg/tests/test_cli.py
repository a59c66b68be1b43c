import json
import subprocess
import sys

import pytest

from qfgl import cli
from qfgl.harness import CLAIMS


def run(args, capsys):
    code = cli.run(args)
    out, err = capsys.readouterr()
    return code, out, err


def test_help_lists_claims(capsys):
    code, out, _ = run(["--help"], capsys)
    assert code == 0
    for cid in CLAIMS:
        assert cid in out
    code, out, _ = run(["verify", "--help"], capsys)
    assert code == 0 and all(cid in out for cid in CLAIMS)


def test_verify_writes_jsonl_and_csv(tmp_path, capsys):
    out = tmp_path / "r.jsonl"
    table = tmp_path / "s.csv"
    code, _, err = run(["verify", "thm1.3.ii", "--n", "2", "--out", str(out), "--csv", str(table), "--workers", "1"], capsys)
    assert code == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 5 and all(json.loads(line)["status"] == "pass" for line in lines)
    assert table.read_text().startswith("claim_id,pass")
    assert "thm1.3.ii: pass=5" in err


def test_graph_export(tmp_path, capsys):
    dot, edges = tmp_path / "g.dot", tmp_path / "g.csv"
    code, out, _ = run(["graph", "--p", "3", "--m", "1", "--n", "2", "--form", "1,0,1", "--subspace", "[[1,0]]",
                        "--dot", str(dot), "--edges", str(edges)], capsys)
    assert code == 0
    info = json.loads(out)
    assert info["vertices"] == 9 and info["undirected"] and info["class"] == "Plus"
    text = dot.read_text()
    assert sum(1 for line in text.splitlines() if line.strip().rstrip(";").isdigit()) == 9
    assert len(edges.read_text().splitlines()) == info["arcs"]


def test_clique_command(capsys):
    code, out, _ = run(["clique", "--form", "1,0,1", "--subspace", "[[1,0]]"], capsys)
    assert code == 0 and json.loads(out)["omega"] == 5


def test_charsum_commands(capsys):
    code, out, _ = run(["charsum", "weil", "--poly", "[0,0,1]"], capsys)
    assert code == 0 and json.loads(out)["abs"] == pytest.approx(3)
    code, out, _ = run(["charsum", "gs", "--b", "1", "--w", "2"], capsys)
    assert code == 0 and json.loads(out)["ok"]
    code, out, _ = run(["charsum", "indicator", "--subspace", "[[0,1]]", "--x", "1"], capsys)
    assert code == 0
    code, out, _ = run(["charsum", "affine", "--subspace", "[[1,0]]", "--y", "3"], capsys)
    assert code == 0 and set(json.loads(out)) >= {"sum_re", "sum_im", "abs", "bound", "ok", "context"}


def test_scan_commands(tmp_path, capsys):
    table = tmp_path / "scan.csv"
    code, out, _ = run(["scan", "ratio", "--dims", "0,1", "--csv", str(table)], capsys)
    assert code == 0 and json.loads(out)["summary"]["rows"] == 5 * 8
    assert len(table.read_text().splitlines()) == 41
    code, out, _ = run(["scan", "sn", "--n", "4", "--b-sample", "4", "--v-sample", "3"], capsys)
    assert code == 0 and json.loads(out)["summary"]["empirical_s"] == 3


def test_config_file_and_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# field\np = 5\nn=2\nseed=4\n")
    code, out, _ = run(["graph", "--config", str(cfg)], capsys)
    assert code == 0 and json.loads(out)["field"]["p"] == 5
    code, out, _ = run(["graph", "--config", str(cfg), "--p", "3"], capsys)
    assert json.loads(out)["field"]["p"] == 3
    cfg.write_text("bogus=1\n")
    code, _, err = run(["graph", "--config", str(cfg)], capsys)
    assert code == 2 and "bogus" in err


@pytest.mark.parametrize(
    "args",
    [
        ["verify", "thm9.9"],
        ["verify", "all", "--p", "4"],
        ["graph", "--form", "1,2"],
        ["graph", "--form", "1,0,99"],
        ["graph", "--subspace", "[[1,0"],
        ["clique", "--form", "1,1,0", "--subspace", "[[1,0]]"],
        ["charsum", "weil", "--poly", "[0,0,0,1]"],
        ["charsum", "gs"],
        [],
    ],
)
def test_usage_errors_exit_2(args, capsys):
    code, _, err = run(args, capsys)
    assert code == 2 and err


def test_cap_errors_exit_3(capsys, monkeypatch):
    code, _, err = run(["verify", "all", "--n", "30"], capsys)
    assert code == 3 and "cap" in err
    monkeypatch.delenv("QFGL_CAP_OVERRIDE", raising=False)
    code, _, _ = run(["clique", "--caps", "clique=4"], capsys)
    assert code == 3
    monkeypatch.setenv("QFGL_CAP_OVERRIDE", "graph=8")
    code, _, _ = run(["graph"], capsys)
    assert code == 3


def test_failure_exit_1(capsys, monkeypatch):
    from qfgl import graphalgo as ga

    real = ga.clique_number
    monkeypatch.setattr(ga, "clique_number", lambda G, **kw: ga.CliqueReport(real(G).omega + 9, frozenset(), 0))
    code, _, _ = run(["verify", "thm1.3.iv", "--workers", "1"], capsys)
    assert code == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qfgl", "verify", "lem2.1", "--n", "3"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.count("\n") == 28


def test_verify_diameter_example(capsys):
    code, out, _ = run(["verify", "thm1.4", "--p", "3", "--m", "1", "--n", "4", "--workers", "1"], capsys)
    rows = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and len(rows) == 40
    assert all(r["status"] == "pass" and len(r["instance"]["b_values"]) == 80 for r in rows)
