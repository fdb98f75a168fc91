import contextlib
import io
import json

import pytest

from gridpilot.cli import main

from conftest import PICK_INSTRUCTION


def run_cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        rc = main(list(argv))
    return rc, out.getvalue(), err.getvalue()


class TestValidate:
    def test_bundled_scenario(self):
        rc, out, _ = run_cli("validate", "warehouse.scn")
        assert rc == 0
        assert "150x40" in out

    def test_missing_file(self):
        rc, _, err = run_cli("validate", "missing.scn")
        assert rc == 1
        assert "not found" in err

    def test_malformed_scenario(self, tmp_path):
        bad = tmp_path / "bad.scn"
        bad.write_text("map:\n  ..\n  ...\nstart: 0,0\n")
        rc, _, err = run_cli("validate", str(bad))
        assert rc == 1
        assert "malformed_map" in err


class TestPlan:
    def test_plan_prints_metrics(self):
        rc, out, _ = run_cli(
            "plan", "warehouse.scn",
            "--instruction", PICK_INSTRUCTION,
            "--strategy", "Maximize Safety",
        )
        assert rc == 0
        for key in ("nodes_expanded", "path_cost", "path_length", "turns"):
            assert key in out

    def test_plan_json(self):
        rc, out, _ = run_cli(
            "plan", "warehouse.scn",
            "--instruction", PICK_INSTRUCTION,
            "--strategy", "Balance", "--json",
        )
        assert rc == 0
        doc = json.loads(out)
        assert doc["path_length"] == len(doc["path"]) - 1

    def test_plan_without_instruction_needs_goal(self):
        rc, _, err = run_cli("plan", "warehouse.scn")
        assert rc == 1
        assert "no_goal_set" in err

    def test_unknown_strategy(self):
        rc, _, err = run_cli("plan", "warehouse.scn", "--instruction", "go to Shelf 3",
                             "--strategy", "Teleport")
        assert rc == 1
        assert "unknown_strategy" in err

    def test_usage_error_exit_2(self):
        with pytest.raises(SystemExit) as exc:
            run_cli("plan")  # missing scenario
        assert exc.value.code == 2


class TestSimulate:
    def test_episode_with_log(self, tmp_path):
        log_file = tmp_path / "episode.jsonl"
        rc, out, _ = run_cli(
            "simulate", "pick_phase.scn",
            "--instruction", "Navigate to Shelf 3 and avoid the repair area.",
            "--strategy", "Maximize Safety",
            "--log", str(log_file),
        )
        assert rc == 0
        assert "GoalReached" in out
        records = [json.loads(line) for line in log_file.read_text().splitlines()]
        assert records[-1]["type"] == "summary"
        assert records[-1]["replans"] == 1

    def test_literal_loop_flag(self):
        rc, out, _ = run_cli(
            "simulate", "pick_phase.scn",
            "--instruction", "Navigate to Shelf 3 and avoid the repair area.",
            "--strategy", "Maximize Safety", "--literal-loop",
        )
        assert rc == 0
        assert "GoalReached" in out


class TestBench:
    def test_compare_markdown(self):
        rc, out, _ = run_cli(
            "bench", "compare", "warehouse.scn",
            "--instruction", PICK_INSTRUCTION,
            "--strategies", "Balance",
        )
        assert rc == 0
        assert "| baseline |" in out
        assert "Balance" in out

    def test_compare_csv(self, tmp_path):
        csv_file = tmp_path / "rows.csv"
        rc, out, _ = run_cli(
            "bench", "compare", "warehouse.scn",
            "--instruction", PICK_INSTRUCTION,
            "--strategies", "Balance,Maximize Safety",
            "--backends", "llama3",
            "--csv", str(csv_file),
        )
        assert rc == 0
        lines = csv_file.read_text().strip().split("\n")
        assert len(lines) == 4
        assert lines[1].startswith("-,-,baseline,")
        assert lines[2].startswith("llama3,")

    def test_scale_summary(self):
        rc, out, _ = run_cli(
            "bench", "scale", "pick_phase.scn",
            "--max-scale", "2", "--trials", "2", "--seed", "1", "--summary",
        )
        assert rc == 0
        assert out.startswith("scale,algorithm,mean_nodes")
