from __future__ import annotations

import io
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from ephier.cli import main
from ephier.matrixcore import dumps_matrix, loads_matrix
from ephier.signed import SignedDiagram, canonical_pair


def run(*argv: str) -> tuple[int, str]:
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    return code, buf.getvalue()


def test_hierarchy_text_and_dot(tmp_path: Path) -> None:
    dot = tmp_path / "h.dot"
    code, text = run("hierarchy", "3", "--dot", str(dot))
    assert code == 0
    assert text.splitlines()[0] == "3 types, 2 covering edges"
    assert "(3)" in text and "(2,1)" in text and "(1,1,1)" in text
    assert dot.read_text().count("->") == 2


def test_hierarchy_signed_json() -> None:
    code, text = run("hierarchy", "4", "--eta", "3,1", "--json")
    assert code == 0
    obj = json.loads(text)
    nodes = {str(SignedDiagram.from_json(n)) for n in obj["nodes"]}
    assert nodes == {"(3+,1+)", "(2+,1+,1+)", "(2-,1+,1+)", "(1+,1+,1+,1-)"}
    assert len(obj["edges"]) == 4


def test_hierarchy_usage_errors() -> None:
    assert run("hierarchy", "4", "--eta", "2,1")[0] == 2
    assert run("hierarchy", "4", "--eta", "x")[0] == 2
    assert run("hierarchy", "4", "--bogus")[0] == 2
    assert run("frobnicate")[0] == 2


def test_convert_verified_witness() -> None:
    code, text = run("convert", "--from", "2,1", "--to", "3", "--eps", "1e-4")
    assert code == 0
    obj = json.loads(text)
    assert obj["verified"] is True
    delta = np.array(loads_matrix(json.dumps(obj["delta"])))
    assert np.linalg.norm(delta, 2) <= 1e-4 * (1 + 1e-12)


def test_convert_signed() -> None:
    code, text = run("convert", "--from", "2+,2-", "--to", "3+,1-", "--eta", "2,2")
    assert code == 0
    obj = json.loads(text)
    assert obj["verified"] is True and "metric" in obj


def test_convert_is_deterministic(monkeypatch) -> None:
    monkeypatch.setenv("EPH_SEED", "7")
    first = run("convert", "--from", "1,1,1", "--to", "2,1")
    second = run("convert", "--from", "1,1,1", "--to", "2,1")
    assert first == second


def test_convert_order_violation_is_domain_error(capsys) -> None:
    code, _ = run("convert", "--from", "3", "--to", "2,1")
    assert code == 1
    assert "does not strictly dominate" in capsys.readouterr().err


def test_classify_and_charpoly(tmp_path: Path) -> None:
    j, eta = canonical_pair(SignedDiagram.parse("2+,1-"))
    mpath, epath = tmp_path / "m.json", tmp_path / "eta.json"
    mpath.write_text(dumps_matrix(j))
    epath.write_text(dumps_matrix(eta))
    code, text = run("classify", str(mpath), "--eta", str(epath), "--json")
    assert code == 0
    cluster = json.loads(text)["clusters"][0]
    assert cluster["partition"] == [2, 1]
    assert cluster["signed_type"] == "(2+,1-)"
    code, text = run("charpoly", str(mpath), "--json")
    assert code == 0 and json.loads(text)["p"] == [[0.0, 0.0]] * 3
    code, text = run("classify", str(mpath), "--tol", "1e-6")
    assert code == 0 and "(2,1)" in text


def test_malformed_matrix_reports_position(tmp_path: Path, capsys) -> None:
    bad = tmp_path / "bad.json"
    bad.write_text('{"dim": 2,\n "data": [1, }')
    assert run("classify", str(bad))[0] == 2
    err = capsys.readouterr().err
    assert "line 2" in err and "column" in err
    wrong = tmp_path / "wrong.json"
    wrong.write_text('{"dim": 2, "data": []}')
    assert run("charpoly", str(wrong))[0] == 2
    assert run("charpoly", str(tmp_path / "missing.json"))[0] == 2


def test_qutrit_pipeline(tmp_path: Path) -> None:
    mpath, ppath = tmp_path / "L.json", tmp_path / "P.json"
    code, text = run("liouville", "qutrit", "--out-matrix", str(mpath), "--out-parity", str(ppath), "--json")
    assert code == 0
    report = json.loads(text)
    assert report["at_ep"] is True and report["metric_signature"] == [6, 3]
    # matrices written by the CLI re-parse bit-identically
    text_l = mpath.read_text()
    assert dumps_matrix(loads_matrix(text_l)) + "\n" == text_l
    code, text = run("classify", str(mpath), "--eta", str(ppath), "--json")
    assert code == 0
    clusters = json.loads(text)["clusters"]
    assert len(clusters) == 1
    cands = [str(SignedDiagram.from_json(d)) for d in clusters[0]["signed_candidates"]]
    assert cands == ["(5+,3+,1+)"]
    assert clusters[0]["signed_type"] == "(5+,3+,1+)"


def test_qubit_text() -> None:
    code, text = run("liouville", "qubit")
    assert code == 0
    assert "signature (3, 1)" in text and "(3+,1+)" in text


def test_lieb_points_and_scan(tmp_path: Path) -> None:
    code, text = run("lieb", "points", "--eps1", "1", "--eps2", "1", "--json")
    assert code == 0 and len(json.loads(text)) == 4
    out = tmp_path / "scan.csv"
    code, _ = run("lieb", "scan", "--eps1", "0:1:2", "--eps2", "1:1:1", "--grid", "64", "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "eps1,eps2,kx,ky,type,residual"
    assert len(lines) == 1 + 2 + 4
    assert run("lieb", "scan", "--eps1", "0:1", "--eps2", "0:1:2")[0] == 2


def test_module_entry_point() -> None:
    proc = subprocess.run([sys.executable, "-m", "ephier", "hierarchy", "2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("2 types, 1 covering edges")


@pytest.mark.parametrize("cmd", ["hierarchy", "classify", "charpoly", "convert", "liouville", "lieb"])
def test_help_documents_each_subcommand(cmd, capsys) -> None:
    assert run(cmd, "--help")[0] == 0
    assert "usage:" in capsys.readouterr().out
