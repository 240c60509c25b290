import json

import pytest

from kj_sle import cli
from kj_sle.classes.query_ledger import QueryLedger
from kj_sle.cli import EXIT_CAPACITY, EXIT_INPUT, EXIT_OK, EXIT_VERIFICATION, dispatch
from kj_sle.reductions.tsp import TourResult

REPORT_KEYS = {"task", "inputs_digest", "result", "eta", "delta", "backend", "ledger", "seed", "wall_time"}


def run_json(tmp_path, *argv):
    out = tmp_path / "report.json"
    code = dispatch([*argv, "--json", "--out", str(out)])
    return code, json.loads(out.read_text())


@pytest.fixture
def matrix_file(tmp_path):
    path = tmp_path / "d.txt"
    path.write_text("3\n0 1 5\n5 0 1\n1 5 0\n")
    return str(path)


class TestReports:

    def test_sat_decide(self, tmp_path):
        code, report = run_json(tmp_path, "sat", "decide", "--bits", "0110", "--backend", "classical")
        assert code == EXIT_OK
        assert set(report) == REPORT_KEYS
        assert report["task"] == "sat decide"
        assert report["result"] == {"answer": "YES"}
        assert report["ledger"]["bit_queries"] == 4

    def test_spectral_eigen_reproducible(self, tmp_path):
        argv = ("eigen", "--q", "const:0", "--eta", "0.2", "--delta", "0.25", "--backend", "spectral",
                "--seed", "1")
        _, first = run_json(tmp_path, *argv)
        _, second = run_json(tmp_path, *argv)
        assert first["result"] == second["result"]
        assert first["inputs_digest"] == second["inputs_digest"]
        assert first["ledger"]["power_queries"] == 117
        assert first["result"]["plan"]["k"] == 15

    def test_summary_line(self, capsys):
        assert dispatch(["sat", "search", "--marked", "2", "--n", "2", "--backend", "classical"]) == EXIT_OK
        assert "smallest witness 2" in capsys.readouterr().out

    def test_out_file(self, capsys, tmp_path):
        out = tmp_path / "report.json"
        code = dispatch(["mean", "--bits", "1011", "--backend", "classical", "--out", str(out)])
        assert code == EXIT_OK
        assert json.loads(out.read_text())["result"]["count"] == 3

    def test_min_index(self, tmp_path):
        code, report = run_json(tmp_path, "min", "index", "--values", "3", "-1", "2", "7", "--bound", "8",
                                "--backend", "classical")
        assert code == EXIT_OK
        assert report["result"]["index"] == 1

    def test_tsp_tour(self, tmp_path, matrix_file):
        code, report = run_json(tmp_path, "tsp", "tour", "--matrix", matrix_file, "--backend", "classical")
        assert code == EXIT_OK
        assert report["result"]["tour"] == [1, 2, 3]
        assert report["result"]["length"] == 3

    def test_rerun_is_identical(self, tmp_path, matrix_file):
        argv = ("tsp", "tour", "--matrix", matrix_file, "--delta", "0.1", "--seed", "7")
        _, first = run_json(tmp_path, *argv)
        _, second = run_json(tmp_path, *argv)
        first.pop("wall_time")
        second.pop("wall_time")
        assert first == second


class TestVerify:

    def test_tsp(self, tmp_path, matrix_file):
        code, report = run_json(tmp_path, "verify", "tsp", "--matrix", matrix_file, "--backend", "classical")
        assert code == EXIT_OK
        assert report["result"]["match"]
        assert report["result"]["observed"]["rescored"] == 3

    def test_tsp_tour_is_rescored(self, tmp_path, matrix_file, monkeypatch):
        wrong_tour = TourResult(length=3, tour=(1, 3, 2), index=1, bound_M=16, delta=0.05, ledger=QueryLedger())
        monkeypatch.setattr(cli, "tsp_optimal_tour", lambda *a, **k: wrong_tour)
        code, report = run_json(tmp_path, "verify", "tsp", "--matrix", matrix_file, "--backend", "classical")
        assert code == EXIT_VERIFICATION
        assert report["result"]["observed"]["rescored"] == 15

    def test_sat(self, tmp_path):
        code, report = run_json(tmp_path, "verify", "sat", "--bits", "00100100", "--backend", "classical")
        assert code == EXIT_OK
        assert report["result"]["observed"] == {"answer": "YES", "index": 2}

    def test_eigen(self, tmp_path):
        code, _ = run_json(tmp_path, "verify", "eigen", "--q", "sine:0.3,1", "--k", "255")
        assert code == EXIT_OK


class TestExitCodes:

    @pytest.mark.parametrize("argv", [
        ["eigen", "--q", "const:0"],
        ["no-such-task"],
        ["sat", "decide", "--bits", "012"],
        ["mean"],
        ["eigen", "--q", "cosine:1", "--eta", "0.1"],
    ])
    def test_invalid_input(self, argv, capsys):
        assert dispatch(argv) == EXIT_INPUT

    def test_capacity(self, capsys):
        assert dispatch(["eigen", "--q", "const:0", "--eta", "1e-20", "--backend", "spectral"]) == EXIT_CAPACITY

    def test_unconfirmed_grover(self, capsys):
        assert dispatch(["grover", "--bits", "0000", "--backend", "classical"]) == EXIT_VERIFICATION

    def test_help(self, capsys):
        assert dispatch(["--help"]) == EXIT_OK

    def test_dimacs_strictness(self, capsys, tmp_path):
        path = tmp_path / "short.cnf"
        path.write_text("p cnf 2 3\n1 0\n2 0\n")
        assert dispatch(["sat", "decide", "--cnf", str(path), "--backend", "classical"]) == EXIT_INPUT
        assert dispatch(["sat", "decide", "--cnf", str(path), "--backend", "classical",
                         "--no-strict-dimacs"]) == EXIT_OK
