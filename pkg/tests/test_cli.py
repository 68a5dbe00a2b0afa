import json
import subprocess
import sys

import pytest

from optdt.cli import run_cli
from optdt.dataset import binarize, load_csv
from optdt.tree import classify, deserialize, is_consistent

from oracles import parse_dimacs


def _stats(capsys):
    return json.loads(capsys.readouterr().out)


def test_infer_depth_on_toy(toy_csv, toy, tmp_path, capsys):
    tree_path = tmp_path / "t.json"
    dot_path = tmp_path / "t.dot"
    code = run_cli(["infer", "--data", str(toy_csv), "--out-tree", str(tree_path),
                    "--out-dot", str(dot_path)])
    assert code == 0
    stats = _stats(capsys)
    assert stats["k"] == 2 and stats["examples_used"] <= 8
    assert stats["n"] == 8 and stats["m"] == 4 and stats["complete"] is True
    tree = deserialize(tree_path.read_text())
    assert is_consistent(tree, toy) is None
    assert dot_path.read_text().startswith("digraph")


def test_infer_size_on_toy(toy_csv, tmp_path, capsys):
    stats_path = tmp_path / "s.json"
    assert run_cli(["infer", "--data", str(toy_csv), "--mode", "size",
                    "--stats", str(stats_path)]) == 0
    assert capsys.readouterr().out == ""
    stats = json.loads(stats_path.read_text())
    assert stats["k"] == 2 and stats["nodes"] == 7


def test_schema_out(tmp_path, capsys):
    data = tmp_path / "d.csv"
    data.write_text("v,colour,class\n1,red,a\n5,blue,b\n3,red,a\n")
    schema = tmp_path / "schema.json"
    assert run_cli(["infer", "--data", str(data), "--schema-out", str(schema)]) == 0
    doc = json.loads(schema.read_text())
    assert doc["class_column"] == "class"


def test_deterministic_apart_from_time(toy_csv, capsys):
    outputs = []
    for _ in range(2):
        assert run_cli(["infer", "--data", str(toy_csv), "--policy", "random",
                        "--seed", "5"]) == 0
        stats = _stats(capsys)
        stats.pop("time")
        outputs.append(stats)
    assert outputs[0] == outputs[1]


def test_contradictory_csv_exit_4(tmp_path, capsys):
    data = tmp_path / "bad.csv"
    data.write_text("a,b,class\n1,0,x\n1,0,y\n0,0,x\n")
    assert run_cli(["infer", "--data", str(data)]) == 4
    err = capsys.readouterr().err
    assert "10 labelled" in err


def test_missing_file_and_bad_args(tmp_path, capsys):
    assert run_cli(["infer", "--data", str(tmp_path / "missing.csv")]) == 4
    assert run_cli(["infer"]) == 4
    assert run_cli(["nonsense"]) == 4


def test_ragged_csv_exit_4(tmp_path, capsys):
    data = tmp_path / "r.csv"
    data.write_text("a,class\n1,x\n0\n")
    assert run_cli(["infer", "--data", str(data)]) == 4
    assert "3" in capsys.readouterr().err


def test_depth_cap_exit_2(tmp_path, capsys):
    data = tmp_path / "xor.csv"
    data.write_text("a,b,class\n0,0,0\n0,1,1\n1,0,1\n1,1,0\n")
    assert run_cli(["infer", "--data", str(data), "--max-depth", "1"]) == 2


def test_timeout_exit_3(toy_csv, capsys):
    assert run_cli(["infer", "--data", str(toy_csv), "--timeout", "0"]) == 3


def test_gen_then_infer(tmp_path, capsys):
    csv_path = tmp_path / "g.csv"
    tree_path = tmp_path / "g.json"
    assert run_cli(["gen", "--k", "3", "--f", "6", "--c", "2", "--n", "40", "--seed", "2",
                    "--out", str(csv_path), "--out-tree", str(tree_path)]) == 0
    generator_tree = deserialize(tree_path.read_text())
    data, _ = binarize(load_csv(csv_path.read_bytes()))
    # reloading renumbers classes by first appearance, so compare names
    for x, a in zip(data.X, data.y):
        assert str(classify(generator_tree, x)) == data.class_names[a]
    assert run_cli(["infer", "--data", str(csv_path)]) == 0
    assert _stats(capsys)["k"] <= 3


def test_gen_piped_to_infer_via_stdin():
    gen = subprocess.run([sys.executable, "-m", "optdt", "gen", "--k", "2", "--f", "5", "--c", "2",
                          "--n", "20", "--seed", "1"], capture_output=True, check=True)
    out = subprocess.run([sys.executable, "-m", "optdt", "infer", "--data", "-"],
                         input=gen.stdout, capture_output=True, check=True)
    assert json.loads(out.stdout)["k"] <= 2


def test_gen_too_many_distinct_is_input_error(capsys):
    assert run_cli(["gen", "--k", "1", "--f", "2", "--c", "2", "--n", "5"]) == 4
    assert run_cli(["gen", "--k", "1", "--f", "2", "--c", "2", "--n", "5", "--replace"]) == 0


def test_encode_dimacs(toy_csv, capsys):
    assert run_cli(["encode", "--data", str(toy_csv), "--depth", "2"]) == 0
    text = capsys.readouterr().out
    nvars, nclauses, clauses = parse_dimacs(text)
    assert nclauses == len(clauses)
    # node block, feature clauses, class clauses
    assert len(clauses) == 3 * (1 + 6) + 8 * 4 * 3 + 8 * 2 * 4
    assert "c var" in text
    assert max(abs(v) for cl in clauses for v in cl) <= nvars


def test_encode_with_node_bound(toy_csv, capsys):
    from pysat.formula import CNF
    from pysat.solvers import Minisat22

    for nodes, sat in ((7, True), (5, False)):
        assert run_cli(["encode", "--data", str(toy_csv), "--depth", "2",
                        "--max-nodes", str(nodes)]) == 0
        formula = CNF(from_string=capsys.readouterr().out)
        with Minisat22(bootstrap_with=formula.clauses) as s:
            assert s.solve() is sat


def test_cv_command(tmp_path, capsys):
    data = tmp_path / "d.csv"
    data.write_text("a,b,c,class\n" + "".join(
        f"{a},{b},{c},{a}\n" for a in (0, 1) for b in (0, 1) for c in (0, 1)))
    assert run_cli(["cv", "--data", str(data), "--folds", "4"]) == 0
    stats = _stats(capsys)
    assert stats["accuracy"] == 1.0 and len(stats["per_fold"]) == 4
    assert run_cli(["cv", "--data", str(data)]) == 4  # folds is mandatory


def test_sweep_command(capsys):
    assert run_cli(["sweep", "--vary", "n", "--points", "10", "20", "--k", "2", "--f", "5",
                    "--runs", "2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("n,mean_time")
    assert [line.split(",")[0] for line in lines[1:]] == ["10", "20"]
