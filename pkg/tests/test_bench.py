import csv
import io
import json

import numpy as np
import pytest

from mplreach.bench import (
    BenchConfig,
    chain_length,
    gen_irreducible,
    instance_rng,
    make_instance,
    rows_to_csv,
    rows_to_json,
    run_benchmark,
    standard_sets,
)
from mplreach.dbm import DbmError, canonicalize
from mplreach.maxplus import EPS, is_irreducible


@pytest.mark.parametrize("n,m", [(1, 1), (3, 1), (5, 2), (8, 8), (20, 10)])
def test_generator_shape(n, m):
    A = gen_irreducible(n, m, (1, 20), instance_rng(1, n, m, 0))
    assert is_irreducible(A)
    for row in A.rows:
        finite = [v for v in row if v is not EPS]
        assert len(finite) == m
        assert all(isinstance(v, int) and 1 <= v <= 20 for v in finite)


def test_generator_determinism():
    a = gen_irreducible(6, 3, (1, 20), instance_rng(5, 6, 3, 2))
    b = gen_irreducible(6, 3, (1, 20), instance_rng(5, 6, 3, 2))
    c = gen_irreducible(6, 3, (1, 20), instance_rng(5, 6, 3, 3))
    assert a == b and a != c
    # instance identity does not depend on the rest of the configuration
    one = make_instance(BenchConfig(pairs=[(6, 3)], count=3, seed=5), (6, 3), 2)
    two = make_instance(BenchConfig(pairs=[(8, 2), (6, 3)], count=9, seed=5), (6, 3), 2)
    assert one == two and one[0] == a


def test_generator_errors():
    with pytest.raises(ValueError):
        gen_irreducible(3, 4)
    with pytest.raises(ValueError):
        gen_irreducible(3, 2, (5, 1))


def test_standard_sets():
    X, Y = standard_sets(6, "fixed5")
    assert [str(c) for c in canonicalize(X).constraints()][:1] == ["x1 - x2 >= 0"]
    assert X.contains([5, 4, 3, 2, 1, 99]) and not X.contains([1, 2, 3, 4, 5, 0])
    assert Y.contains([1, 2, 3, 4, 5, -7]) and not Y.contains([5, 4, 3, 2, 1, 0])
    X, Y = standard_sets(7, "half")
    # odd n: the chain covers floor(7/2) = 3 variables
    assert X.contains([3, 2, 1, 5, 0, 0, 9]) and not X.contains([3, 2, 4, 0, 0, 0, 0])
    assert chain_length(7, "half") == 3 and chain_length(20, "half") == 10
    with pytest.raises(DbmError):
        standard_sets(4, "fixed5")
    with pytest.raises(ValueError):
        chain_length(6, "other")


def test_config_validation():
    with pytest.raises(ValueError):
        BenchConfig(pairs=[(3, 4)], profile="half")
    with pytest.raises(ValueError):
        BenchConfig(pairs=[(6, 2)], algorithms=(9,))
    with pytest.raises(DbmError):
        BenchConfig(pairs=[(4, 2)])
    with pytest.raises(ValueError):
        BenchConfig(pairs=[(6, 2)], count=0)


def verdicts(results):
    return [(r.pair, r.index, r.N, sorted(r.verdicts.items())) for r in results]


def test_benchmark_is_reproducible_and_consistent():
    cfg = BenchConfig(pairs=[(5, 2), (6, 3)], count=4, seed=3)
    rows, results = run_benchmark(cfg)
    _, again = run_benchmark(cfg)
    assert verdicts(results) == verdicts(again)
    assert all(r.agrees() for r in results)
    assert [r.disagreements for r in rows] == [0, 0]
    assert all(r.instances == 4 for r in rows)
    par = BenchConfig(pairs=[(5, 2), (6, 3)], count=4, seed=3, jobs=2)
    assert verdicts(run_benchmark(par)[1]) == verdicts(results)


def test_csv_and_json_output():
    cfg = BenchConfig(pairs=[(5, 3)], count=2, seed=2, profile="half", algorithms=(1, 6))
    rows, results = run_benchmark(cfg)
    table = list(csv.reader(io.StringIO(rows_to_csv(cfg, rows))))
    assert table[0] == ["(n,m)", "Alg. 1", "Alg. 6", "#true", "N*", "timeouts", "disagreements"]
    assert table[1][0] == "(5,3)" and table[1][4].startswith("{")
    doc = json.loads(rows_to_json(cfg, rows, results))
    assert doc["metadata"]["note"].startswith("odd n")
    assert doc["rows"][0]["instances"] == 2 and len(doc["instances"]) == 2


def test_timeouts_are_recorded():
    cfg = BenchConfig(pairs=[(6, 3)], count=2, seed=4, algorithms=(1, 5), timeout=0.0)
    rows, results = run_benchmark(cfg)
    assert all(sorted(r.timeouts) == [1, 5] and not r.verdicts for r in results)
    assert rows[0].timeouts == {1: 2, 5: 2} and rows[0].mean_times == {1: None, 5: None}
    assert list(csv.reader(io.StringIO(rows_to_csv(cfg, rows))))[1][1:3] == ["", ""]
