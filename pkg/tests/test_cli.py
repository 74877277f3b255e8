"""Command-line interface: one test per subcommand plus the exit-code map."""

import json

import pytest

from conftest import golden_spec
from lotpath import save_instance
from lotpath.cli import main


@pytest.fixture()
def golden_file(tmp_path):
    path = tmp_path / "golden.json"
    save_instance(golden_spec(), path)
    return str(path)


class TestSolve:
    def test_stdout_payload(self, golden_file, capsys):
        assert main(["solve", golden_file]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["path"] == ["1", "2", "3'", "5", "6"]
        assert payload["relaxed_path"] == ["1", "2", "3", "4", "6"]
        assert payload["expected_cost"] == pytest.approx(447.4670, abs=1e-3)
        assert payload["relaxed_violations"] == 1
        assert payload["policy"]["reviews"] == [1, 2, 3, 5]

    def test_output_file(self, golden_file, tmp_path, capsys):
        out = tmp_path / "solution.json"
        assert main(["solve", golden_file, "-o", str(out)]) == 0
        assert capsys.readouterr().out == ""
        assert json.loads(out.read_text())["introduced_nodes"] == 1

    def test_no_filter_same_answer(self, golden_file, capsys):
        assert main(["solve", golden_file, "--no-filter"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["path"] == ["1", "2", "3'", "5", "6"]
        assert payload["filtered"] is False

    def test_missing_file_is_io_error(self, tmp_path, capsys):
        assert main(["solve", str(tmp_path / "absent.json")]) == 4
        assert "error:" in capsys.readouterr().err

    def test_malformed_json_is_input_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["solve", str(bad)]) == 2
        assert "invalid JSON" in capsys.readouterr().err

    def test_validation_failure_is_input_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        data = golden_spec().to_dict()
        data["means"] = []
        bad.write_text(json.dumps(data))
        assert main(["solve", str(bad)]) == 2

    def test_exhausted_split_budget_is_exit_3(self, golden_file, capsys):
        assert main(["solve", golden_file, "--max-iterations", "0"]) == 3
        err = capsys.readouterr().err
        assert "did not terminate" in err
        assert '"cap": 0' in err  # diagnostics dumped for debugging


class TestSimulate:
    def test_solved_policy_report(self, golden_file, capsys):
        rc = main([
            "simulate", golden_file, "--solve", "--reps", "5000", "--seed", "1",
            "--allow-negative-orders",
        ])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["policy"]["reviews"] == [1, 2, 3, 5]
        assert payload["report"]["n_reps"] == 5000
        # a 5k-rep estimate lands well within a few units of the plan cost
        assert payload["report"]["mean_cost"] == pytest.approx(447.47, abs=15.0)

    def test_infeasible_policy_warns_when_clipping(self, golden_file, tmp_path, capsys):
        policy = tmp_path / "policy.json"
        policy.write_text(json.dumps(
            {"horizon": 5, "reviews": [1, 2], "levels": [400.0, 20.0]}
        ))
        assert main([
            "simulate", golden_file, "--policy", str(policy), "--reps", "100",
        ]) == 0
        err = capsys.readouterr().err
        assert "negative orders" in err and "period(s) [2]" in err

    def test_no_warning_in_set_point_mode(self, golden_file, tmp_path, capsys):
        policy = tmp_path / "policy.json"
        policy.write_text(json.dumps(
            {"horizon": 5, "reviews": [1, 2], "levels": [400.0, 20.0]}
        ))
        assert main([
            "simulate", golden_file, "--policy", str(policy), "--reps", "100",
            "--allow-negative-orders",
        ]) == 0
        assert capsys.readouterr().err == ""

    def test_trace_file(self, golden_file, tmp_path, capsys):
        trace = tmp_path / "trace.csv"
        assert main([
            "simulate", golden_file, "--solve", "--reps", "100",
            "--trace", str(trace),
        ]) == 0
        lines = trace.read_text().strip().splitlines()
        assert lines[0].startswith("period,review,")
        assert len(lines) == 6

    def test_broken_policy_file(self, golden_file, tmp_path, capsys):
        policy = tmp_path / "policy.json"
        policy.write_text(json.dumps({"horizon": 5, "reviews": [1]}))
        assert main(["simulate", golden_file, "--policy", str(policy)]) == 2
        assert "missing policy field 'levels'" in capsys.readouterr().err


class TestBench:
    def test_tiny_grid_summary(self, capsys):
        rc = main([
            "bench", "--patterns", "lumpy", "--horizons", "5", "--rhos", "0.3",
            "--fixed-costs", "225", "--penalties", "10", "--replicates", "2",
            "--seed", "7",
        ])
        assert rc == 0
        out = capsys.readouterr().out
        assert "lumpy rho=0.3 b=10 K=225: n=2" in out

    def test_csv_output(self, tmp_path, capsys):
        out = tmp_path / "bench.csv"
        rc = main([
            "bench", "--patterns", "erratic", "--horizons", "5", "--rhos", "0.2",
            "--fixed-costs", "900", "--penalties", "5", "--replicates", "1",
            "--seed", "3", "-o", str(out),
        ])
        assert rc == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0].startswith("instance_id,pattern,T,")
        assert len(lines) == 2

    def test_empty_grid_is_input_error(self, capsys):
        assert main(["bench", "--replicates", "0", "--horizons", "5"]) == 2
        assert "empty" in capsys.readouterr().err


class TestExportGraph:
    def test_pruned_arcs(self, golden_file, capsys):
        assert main(["export-graph", golden_file]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "from,to,kind,cost,order_up_to,closing_inventory"
        arcs = {tuple(line.split(",")[:2]) for line in lines[1:]}
        assert arcs == {
            ("1", "2"), ("2", "3"), ("3", "4"), ("3", "5"),
            ("4", "5"), ("4", "6"), ("5", "6"),
        }

    def test_full_graph(self, golden_file, capsys):
        assert main(["export-graph", golden_file, "--no-filter"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 1 + 15  # complete DAG over 6 nodes

    def test_augmented_graph_has_virtual_node(self, golden_file, capsys):
        assert main(["export-graph", golden_file, "--augmented"]) == 0
        out = capsys.readouterr().out
        kinds = [line.split(",")[2] for line in out.strip().splitlines()[1:]]
        assert "recomputed" in kinds and "duplicated" in kinds
        assert "3'" in out


class TestGen:
    def test_writes_instance_files(self, tmp_path, capsys):
        rc = main([
            "gen", "--pattern", "lumpy", "--horizon", "6", "--rho", "0.3",
            "--fixed-cost", "225", "--penalty", "10", "--count", "3",
            "--seed", "4", "-o", str(tmp_path / "out"),
        ])
        assert rc == 0
        written = sorted(p.name for p in (tmp_path / "out").glob("*.json"))
        assert written == [
            "lumpy-T6-rho0.3-b10-K225-r0.json",
            "lumpy-T6-rho0.3-b10-K225-r1.json",
            "lumpy-T6-rho0.3-b10-K225-r2.json",
        ]

    def test_single_instance_to_stdout(self, capsys):
        rc = main([
            "gen", "--pattern", "erratic", "--horizon", "4", "--rho", "0.2",
            "--fixed-cost", "100", "--penalty", "5",
        ])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["horizon"] == 4
        assert len(payload["means"]) == 4

    def test_bad_pattern_choice(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main([
                "gen", "--pattern", "seasonal", "--horizon", "4", "--rho", "0.2",
                "--fixed-cost", "100", "--penalty", "5",
            ])
        assert exc.value.code == 2


class TestTopLevel:
    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        assert "0.1.0" in capsys.readouterr().out

    def test_unknown_command(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2
