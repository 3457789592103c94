import csv
import io
import json

import pytest

from mplreach.cli import main, parse_pairs
from mplreach.dbm import parse_set
from mplreach.maxplus import parse_matrix
from mplreach.reach_symbolic import verify_witness

from helpers import HAVE_Z3


@pytest.fixture
def files(tmp_path):
    (tmp_path / "A.txt").write_text("2\n2 5\n3 3\n")
    (tmp_path / "X.set").write_text("x1 - x2 >= 3\n")
    (tmp_path / "Y.set").write_text("x1 - x2 >= 5\n")
    (tmp_path / "T.set").write_text("# reachable target\nx1 - x2 = 2\n")
    return tmp_path


def run(capsys, argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("engine", ["explicit", "smt"] + (["smt-extern"] if HAVE_Z3 else []))
@pytest.mark.parametrize("mode", ["forward", "backward"])
@pytest.mark.parametrize("strategy", ["seq", "oneshot"])
def test_reach(capsys, files, engine, mode, strategy):
    base = ["reach", "-A", files / "A.txt", "-X", files / "X.set", "--engine", engine, "--mode", mode, "--strategy", strategy]
    code, out, _ = run(capsys, base + ["-Y", files / "Y.set"])
    doc = json.loads(out)
    assert code == 0 and doc["reachable"] is False and doc["N"] == 3
    code, out, _ = run(capsys, base + ["-Y", files / "T.set", "--witness"])
    doc = json.loads(out)
    assert doc["reachable"] and doc["step"] == 2 and doc["strategy"] in ("sequential", "oneshot")
    if engine != "explicit":
        A = parse_matrix((files / "A.txt").read_text())
        X = parse_set((files / "X.set").read_text(), 2)
        T = parse_set((files / "T.set").read_text(), 2)
        assert verify_witness(A, X, T, doc["witness"])


def test_reach_dump_and_errors(capsys, files, tmp_path):
    dump = tmp_path / "last.smt2"
    code, _, _ = run(capsys, ["reach", "-A", files / "A.txt", "-X", files / "X.set", "-Y", files / "Y.set", "--dump-smt2", dump])
    assert code == 0 and "(check-sat)" in dump.read_text()
    (tmp_path / "bad.set").write_text("x1 + x2 >= 0\n")
    code, _, err = run(capsys, ["reach", "-A", files / "A.txt", "-X", tmp_path / "bad.set"])
    assert code == 2 and "cannot parse" in err
    (tmp_path / "R.txt").write_text("2\n1 -inf\n2 3\n")
    code, _, err = run(capsys, ["reach", "-A", tmp_path / "R.txt"])
    assert code == 2 and "-N" in err
    code, out, _ = run(capsys, ["reach", "-A", tmp_path / "R.txt", "-N", 2])
    assert code == 0 and json.loads(out)["reachable"]
    code, _, err = run(capsys, ["reach", "-A", files / "A.txt", "-X", files / "X.set", "-Y", files / "Y.set", "--timeout", 0])
    assert code == 3


def test_pwa(capsys, files):
    code, out, _ = run(capsys, ["pwa", "-A", files / "A.txt", "--json"])
    doc = json.loads(out)
    assert code == 0 and [r["g"] for r in doc["regions"]] == [[1, 1], [2, 1], [2, 2]]
    code, out, _ = run(capsys, ["pwa", "-A", files / "A.txt"])
    assert "# region g=(2,1): x1' = x2 + 5, x2' = x1 + 3" in out
    assert "x1 - x2 >= 0\nx1 - x2 <= 3\n" in out


def test_spectrum(capsys, files, tmp_path):
    code, out, _ = run(capsys, ["spectrum", "-A", files / "A.txt"])
    assert code == 0 and json.loads(out) == {"irreducible": True, "lambda": "4", "k0": 2, "c": 2, "N*": 3}
    (tmp_path / "R.txt").write_text("2\n1 -inf\n2 3\n")
    code, out, _ = run(capsys, ["spectrum", "-A", tmp_path / "R.txt"])
    assert code == 1 and json.loads(out) == {"irreducible": False}
    code, _, _ = run(capsys, ["spectrum", "-A", files / "A.txt", "--cap", 2])
    assert code == 3


def test_gen_then_reach(capsys, tmp_path):
    code, out, _ = run(capsys, ["gen", "--n", 6, "--m", 3, "--seed", 9, "--profile", "fixed5", "--out-dir", tmp_path])
    assert code == 0 and json.loads(out)["files"] == ["A.txt", "X.set", "Y.set"]
    args = ["reach", "-A", tmp_path / "A.txt", "-X", tmp_path / "X.set", "-Y", tmp_path / "Y.set"]
    _, a, _ = run(capsys, args + ["--engine", "explicit"])
    _, b, _ = run(capsys, args + ["--strategy", "oneshot"])
    ja, jb = json.loads(a), json.loads(b)
    assert (ja["reachable"], ja["step"]) == (jb["reachable"], jb["step"])


def test_bench(capsys, tmp_path):
    out = tmp_path / "t.csv"
    code, _, _ = run(capsys, ["bench", "--pairs", "(5,2),(6,6)", "--count", 2, "--algorithms", "1,6", "--out", out])
    rows = list(csv.reader(io.StringIO(out.read_text())))
    assert code == 0 and [r[0] for r in rows] == ["(n,m)", "(5,2)", "(6,6)"]
    code, text, _ = run(capsys, ["bench", "--pairs", "(5,2)", "--count", 1, "--algorithms", "2,8", "--json", "--instances"])
    doc = json.loads(text)
    assert code == 0 and doc["metadata"]["seed"] == 1 and len(doc["instances"]) == 1
    code, _, err = run(capsys, ["bench", "--pairs", "nothing"])
    assert code == 2 and "pairs" in err


def test_parse_pairs():
    assert parse_pairs("(8,3), (20, 10)") == [(8, 3), (20, 10)]
