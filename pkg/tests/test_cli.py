import json

import numpy as np
import pytest

from expander_listdec.cli import main
from expander_listdec.harness import (
    EXIT_CAP,
    EXIT_OK,
    EXIT_UNSOUND,
    EXIT_USAGE,
    RunResult,
    SpecError,
    corrupt,
    load_local_code,
    parse_spec,
    tanner_instance,
)
from expander_listdec.graphs import random_regular_bipartite
from expander_listdec.listdec import DecodeParams
from expander_listdec.tanner import write_edge_word

TANNER = ["--family", "tanner", "--graph", "random:n=6,d=5,seed=1", "--local", "rows:q=2,g=11000/00111",
          "--gamma", "0.05", "--ell", "2"]
AEL = ["--family", "ael", "--graph", "random:n=5,d=3,seed=2", "--local", "rep:q=5,d=3", "--rs", "5,5,1"]


def test_parse_spec():
    assert parse_spec("random:n=4,d=2") == ("random", {"n": "4", "d": "2"})
    with pytest.raises(SpecError):
        parse_spec("random:n4")


def test_corrupt_changes_exactly_count_positions():
    rng = np.random.default_rng(0)
    z = np.zeros(20, dtype=np.int64)
    y, pos = corrupt(z, 6, 4, rng)
    assert np.count_nonzero(y != z) == 6 and len(pos) == 6


def test_gen_writes_files(tmp_path, capsys):
    g, c = tmp_path / "g.txt", tmp_path / "c.txt"
    code = main(["gen", "--graph", "random:n=8,d=4,seed=1", "--code", "rep:q=2,d=4",
                 "--out-graph", str(g), "--out-code", str(c)])
    out = capsys.readouterr().out
    assert code == EXIT_OK and g.exists() and c.exists()
    assert "lambda=" in out and "tanner_design_distance=" in out


def test_usage_errors(capsys):
    assert main(["gen"]) == EXIT_USAGE
    assert main(["decode", "--family", "tanner"]) == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == EXIT_USAGE


def test_decode_without_corruption(tmp_path):
    out = tmp_path / "r.json"
    dump = tmp_path / "d.txt"
    code = main(["decode", *TANNER, "--corrupt", "0", "--oracle-check", "--json-out", str(out),
                 "--dump-decomposition", str(dump)])
    rep = json.loads(out.read_text())
    assert code == EXIT_OK
    assert rep["contains_transmitted"] and rep["oracle"]["missing"] == []
    assert rep["decode"]["list_size"] >= 1
    assert dump.read_text().startswith("alpha 0 0\n")


def test_decode_received_word(tmp_path, capsys):
    w = tmp_path / "y.txt"
    write_edge_word(np.zeros(30, dtype=np.int64), w)
    assert main(["decode", *TANNER, "--received", str(w)]) == EXIT_OK
    rep = json.loads(capsys.readouterr().out)
    assert [0] * 30 in rep["decode"]["list"]


def test_decode_cap_exit_code(tmp_path):
    assert main(["decode", *AEL, "--enum-cap", "2", "--json-out", str(tmp_path / "x.json")]) == EXIT_CAP


def test_soundness_violation_exit_code():
    inst = tanner_instance(random_regular_bipartite(6, 5, 1), load_local_code("rows:q=2,g=11000/00111"))
    report = inst.decode(np.zeros(30, dtype=np.int64), DecodeParams(eps=0.2, ell=2, gamma=0.05))
    empty = np.zeros(0, dtype=np.int64)
    res = RunResult(empty, empty, empty, report, None, [[1] * 30])
    assert res.exit_code() == EXIT_UNSOUND


def test_sweep_with_empty_range(capsys):
    assert main(["sweep", *AEL, "--counts", ""]) == EXIT_OK
    assert capsys.readouterr().out.strip().split("\n") == [
        "n,corruption,seed,list_size,contains_transmitted,completeness,sound,atoms_left,atoms_right,"
        "enumeration_size,t_csp,t_decompose,t_enumerate"]


def test_sweep_rows(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sweep", *AEL, "--counts", "0,1", "--trials", "1", "--csv-out", str(out)]) == EXIT_OK
    lines = out.read_text().strip().split("\n")
    assert len(lines) == 3
    assert all(line.split(",")[6] == "1" for line in lines[1:])


def test_bench_small(capsys):
    assert main(["bench", "--ns", "64,128", "--runs", "1"]) == EXIT_OK
    lines = capsys.readouterr().out.strip().split("\n")
    assert lines[0] == "n,runs,median_seconds,ratio_to_previous" and len(lines) == 3
