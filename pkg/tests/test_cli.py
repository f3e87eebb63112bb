import json
import os
import re
import subprocess
import sys

import pytest

from nilpadic import cli
from nilpadic.examples import dihedral, example
from nilpadic.report import nio_label, to_dot
from nilpadic.structure import structure_report


def spec(spec_dir, name):
    return os.path.join(spec_dir, f"{name}.json")


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_dihedral_json(spec_dir, capsys):
    code, out, _ = run([spec(spec_dir, "dihedral")], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["nio"] == "G" and rep["FNp_rank"] == 1 and rep["delta_plus_order"] == 1
    assert rep["nio_bounds"]["certificate"] == "abelian"
    assert rep["xi1"] == {"s": "-1/1"}
    assert rep["certification"]["precision"] == 40
    assert list(rep) == sorted(rep)


def test_wreath_with_oracle(spec_dir, capsys):
    code, out, _ = run([spec(spec_dir, "wreath"), "--oracle", "2"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["oracle"]["k"] == 2 and rep["oracle"]["group_order"] == 2 * 5 ** 4
    assert rep["oracle"]["checks"]["normal_cores"] == "agrees"
    assert rep["orbitally_sound"]["answer"] == "no"


def test_inexact_bounds_are_labelled(spec_dir, capsys):
    code, out, _ = run([spec(spec_dir, "heisenberg_c4")], capsys)
    rep = json.loads(out)
    assert rep["nio"] == "bounds" and rep["certification"]["nio"] == "bounds-only"
    assert rep["nio_bounds"]["exact"] is False


def test_malformed_matrix_exits_2(tmp_path, capsys):
    d = dihedral()
    d["N_generators"][0][0][1] = "one"
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(d))
    code, out, err = run([str(path)], capsys)
    assert code == 2 and out == ""
    rec = json.loads(err.strip().splitlines()[-1])
    assert rec["error"] == "invalid-input" and rec["exit_code"] == 2


def test_invalid_spec_prints_witness(tmp_path, capsys):
    d = dihedral()
    d["coset_reps"]["s"] = [["1/1", "0/1"], ["0/1", "3/1"]]
    path = tmp_path / "inv.json"
    path.write_text(json.dumps(d))
    code, _, err = run([str(path)], capsys)
    rec = json.loads(err.strip().splitlines()[-1])
    assert code == 2 and rec["error"] == "invalid-spec"
    assert rec["witness"] is not None and rec["validation"]["ok"] is False


def test_precision_exhausted_exits_3(spec_dir, capsys):
    code, _, err = run([spec(spec_dir, "heisenberg_c4"), "--precision", "60",
                        "--oracle", "50"], capsys)
    assert code == 3
    assert json.loads(err.strip().splitlines()[-1])["error"] == "precision-exhausted"


def test_oracle_cap_exits_4(spec_dir, capsys):
    code, _, err = run([spec(spec_dir, "wreath"), "--oracle", "2", "--oracle-cap", "50"], capsys)
    assert code == 4
    assert json.loads(err.strip().splitlines()[-1])["exit_code"] == 4


def test_missing_file_and_bad_flags(tmp_path, capsys):
    code, _, err = run([str(tmp_path / "nope.json")], capsys)
    assert code == 2 and json.loads(err)["error"] == "io-error"
    code, _, err = run([str(tmp_path / "nope.json"), "--oracle", "-1"], capsys)
    assert code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["x.json", "--format", "yaml"])
    assert exc.value.code == 2


def test_out_dir_and_dot(spec_dir, tmp_path, capsys):
    code, out, _ = run([spec(spec_dir, "heisenberg_c4"), spec(spec_dir, "wreath"),
                        "--out-dir", str(tmp_path), "--dot", "--jobs", "2"], capsys)
    assert code == 0 and out == ""
    names = sorted(os.listdir(tmp_path))
    assert names == ["heisenberg_c4.dot", "heisenberg_c4.json", "wreath.dot", "wreath.json"]
    dot = (tmp_path / "heisenberg_c4.dot").read_text()
    for node in ('"G"', '"nio"', '"H_1"', '"H_2"', '"H_3"', '"1"'):
        assert node in dot
    assert "d_1 = 2; zeta^1" in dot and "d_2 = 1; zeta^2" in dot
    assert "Delta+" in dot


def test_text_format(spec_dir, capsys):
    code, out, _ = run([spec(spec_dir, "wreath"), "--format", "text"], capsys)
    assert code == 0
    assert "orbitally sound: no" in out and "witness" in out


def _dot_is_well_formed(text):
    lines = text.strip().splitlines()
    assert lines[0] == "digraph structure {" and lines[-1] == "}"
    node = re.compile(r'^  "[^"]+" \[label="(?:[^"\\]|\\.)*"\];$')
    edge = re.compile(r'^  "[^"]+" -> "[^"]+" \[label="(?:[^"\\]|\\.)*"\];$')
    body = [l for l in lines[1:-1] if not l.strip().endswith("=TB;") and "node [" not in l]
    assert all(node.match(l) or edge.match(l) for l in body), body
    nodes = {l.split('"')[1] for l in body if node.match(l)}
    for l in body:
        if edge.match(l):
            a, b = l.split('"')[1], l.split('"')[3]
            assert a in nodes and b in nodes


def test_dot_is_well_formed_for_every_example(example_spec):
    _dot_is_well_formed(to_dot(structure_report(example_spec)))


def test_nio_label_values():
    assert nio_label(structure_report(example("dihedral"))) == "G"
    assert nio_label(structure_report(example("wreath"))) == "FNp"
    assert nio_label(structure_report(example("heisenberg_c4"))) == "bounds"


def test_console_script_is_deterministic(spec_dir, tmp_path):
    outs = []
    for _ in range(2):
        proc = subprocess.run([sys.executable, "-m", "nilpadic.cli", spec(spec_dir, "wreath"),
                               "--oracle", "1"], capture_output=True, check=True)
        outs.append(proc.stdout)
    assert outs[0] == outs[1] and outs[0]
