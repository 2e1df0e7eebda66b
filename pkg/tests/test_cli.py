import json

import pytest

from fpiter import NodeSet, SolveResult, write_pgsolver
from fpiter import cli
from fpiter.cli import EXIT_FAIL, EXIT_LIMIT, EXIT_OK, EXIT_PARSE, EXIT_VERIFY, main

E1_TEXT = "parity 4;\n0 0 0 1,2;\n1 1 1 4;\n2 2 1 3;\n3 3 1 0;\n4 4 1 0;\n"


@pytest.fixture
def e1_file(tmp_path):
    p = tmp_path / "e1.gm"
    p.write_text(E1_TEXT)
    return p


class TestSolve:
    @pytest.mark.parametrize("solver", cli.SOLVERS)
    def test_solvers_agree(self, e1_file, tmp_path, solver):
        out = tmp_path / "out.sol"
        assert main(["solve", str(e1_file), "--solver", solver, "-o", str(out), "--check"]) == EXIT_OK
        lines = out.read_text().splitlines()
        assert lines[0] == "paritysol 4;"
        assert all(line.split()[1].rstrip(";") == "0" for line in lines[1:])

    def test_strategies_and_stats(self, e1_file, tmp_path):
        out, stats = tmp_path / "out.sol", tmp_path / "stats.json"
        rc = main(["solve", str(e1_file), "--strategies", "--check", "-o", str(out), "--stats", str(stats)])
        assert rc == EXIT_OK
        assert "0 0 1;" in out.read_text().splitlines()
        data = json.loads(stats.read_text())
        assert data["outer_iterations"] == 15 and data["nodes"] == 5 and data["index"] == 5

    def test_opt_strategies(self, e1_file, capsys):
        assert main(["solve", str(e1_file), "--solver", "fpiter-opt", "--strategies", "--check"]) == EXIT_OK
        assert "0 0 1;" in capsys.readouterr().out

    def test_stdout_and_numpy_backend(self, e1_file, capsys):
        assert main(["solve", str(e1_file), "--backend", "numpy"]) == EXIT_OK
        assert capsys.readouterr().out.startswith("paritysol 4;")

    def test_bad_input(self, tmp_path, capsys):
        bad = tmp_path / "bad.gm"
        bad.write_text("parity 1;\n0 0 0 ;\n")
        assert main(["solve", str(bad)]) == EXIT_PARSE
        assert "line 2" in capsys.readouterr().err
        assert main(["solve", str(tmp_path / "missing.gm")]) == EXIT_PARSE

    def test_check_catches_wrong_regions(self, e1_file, monkeypatch, capsys):
        def wrong(g, solver, strategies, backend=None):
            w = NodeSet.of(g.n, [1, 2, 3, 4])
            return SolveResult(w, w.complement(), {}, {})

        monkeypatch.setattr(cli, "run_solver", wrong)
        assert main(["solve", str(e1_file), "--check"]) == EXIT_VERIFY
        assert "node 0" in capsys.readouterr().err

    def test_check_catches_losing_strategy(self, e1_file, monkeypatch, capsys):
        def losing(g, solver, strategies, backend=None):
            return SolveResult(NodeSet.full(5), NodeSet.empty(5), {0: 2}, {})

        monkeypatch.setattr(cli, "run_solver", losing)
        assert main(["solve", str(e1_file), "--check"]) == EXIT_VERIFY
        assert "0->2->3->0" in capsys.readouterr().err


class TestVerify:
    def test_good_and_bad(self, e1_file, tmp_path, capsys):
        good = tmp_path / "good.sol"
        good.write_text("paritysol 4;\n0 0 1;\n1 0;\n2 0;\n3 0;\n4 0;\n")
        assert main(["verify", str(e1_file), str(good)]) == EXIT_OK
        bad = tmp_path / "bad.sol"
        bad.write_text("paritysol 4;\n0 0 2;\n1 0;\n2 0;\n3 0;\n4 0;\n")
        assert main(["verify", str(e1_file), str(bad)]) == EXIT_VERIFY
        assert "cycle 0->2->3->0" in capsys.readouterr().out
        wrong = tmp_path / "wrong.sol"
        wrong.write_text("paritysol 4;\n0 1;\n1 0;\n2 0;\n3 0;\n4 0;\n")
        assert main(["verify", str(e1_file), str(wrong)]) == EXIT_VERIFY
        assert "node 0" in capsys.readouterr().out

    def test_unparsable_solution(self, e1_file, tmp_path):
        bad = tmp_path / "bad.sol"
        bad.write_text("0 7;\n")
        assert main(["verify", str(e1_file), str(bad)]) == EXIT_PARSE


class TestGenerate:
    def test_ladder(self, tmp_path):
        out = tmp_path / "l.gm"
        assert main(["generate", "ladder", "8", "-o", str(out)]) == EXIT_OK
        text = out.read_text()
        assert text.startswith("parity 39;") and len(text.splitlines()) == 41

    def test_deterministic(self, capsys):
        main(["generate", "random", "6", "3", "1", "2", "5"])
        a = capsys.readouterr().out
        main(["generate", "random", "6", "3", "1", "2", "5"])
        assert capsys.readouterr().out == a

    def test_invalid(self):
        assert main(["generate", "ladder", "0"]) == EXIT_PARSE
        assert main(["generate", "jurdzinski", "3"]) == EXIT_PARSE


class TestBench:
    def test_records(self, tmp_path):
        specs = tmp_path / "specs.txt"
        specs.write_text("# comment\nladder 2\n\njurdzinski 2 3\nrandom 6 3 1 2 0\nladder -1\n")
        out = tmp_path / "bench.json"
        assert main(["bench", str(specs), "--repeat", "3", "--out", str(out)]) == EXIT_OK
        recs = json.loads(out.read_text())
        assert len(recs) == 4
        assert recs[0]["family"] == "ladder" and recs[0]["params"] == [2] and recs[0]["nodes"] == 10
        assert recs[0]["solver_variant"] == "fpiter" and recs[0]["outer_iterations"] >= 1
        assert recs[0]["wall_time_ms"] >= 0
        assert "error" in recs[3] and recs[3]["spec"] == "ladder -1"

    def test_repeat_does_not_change_counts(self, tmp_path, capsys):
        specs = tmp_path / "specs.txt"
        specs.write_text("ladder 3\n")
        main(["bench", str(specs), "--repeat", "1"])
        one = json.loads(capsys.readouterr().out)
        main(["bench", str(specs), "--repeat", "5"])
        five = json.loads(capsys.readouterr().out)
        assert one[0]["outer_iterations"] == five[0]["outer_iterations"]

    def test_other_solvers(self, tmp_path, capsys):
        specs = tmp_path / "specs.txt"
        specs.write_text("random 5 2 1 2 1\n")
        assert main(["bench", str(specs), "--solver", "reference"]) == EXIT_OK
        assert json.loads(capsys.readouterr().out)[0]["outer_iterations"] is None

    def test_empty_and_all_failing(self, tmp_path, capsys):
        specs = tmp_path / "specs.txt"
        specs.write_text("")
        assert main(["bench", str(specs)]) == EXIT_OK
        assert json.loads(capsys.readouterr().out) == []
        specs.write_text("tree 3\n")
        assert main(["bench", str(specs)]) == EXIT_FAIL
        assert main(["bench", str(specs), "--repeat", "0"]) == EXIT_PARSE


class TestTrace:
    def test_e1(self, e1_file, tmp_path):
        out = tmp_path / "trace.jsonl"
        assert main(["trace", str(e1_file), "--out", str(out)]) == EXIT_OK
        recs = [json.loads(line) for line in out.read_text().splitlines()]
        assert recs[0] == {"node": 0, "stamp": [0, 0, 0, 0, 1], "target": 2, "operator": "diamond"}
        assert recs[-1]["outer_iterations"] == 15

    def test_budget(self, e1_file, capsys):
        assert main(["trace", str(e1_file), "--budget", "3"]) == EXIT_LIMIT
        assert "budget" in capsys.readouterr().err


def test_round_trip_through_files(tmp_path, e1):
    p = tmp_path / "g.gm"
    p.write_text(write_pgsolver(e1))
    assert main(["solve", str(p), "--check"]) == EXIT_OK
