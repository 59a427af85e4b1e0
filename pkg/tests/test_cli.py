"""CLI subcommands, golden tables, exit codes."""

import json
import subprocess
import sys
from pathlib import Path

import pytest

from convclose.cli import main
from convclose.measure import delta, linear_combine, to_text
from convclose.report import emit, format_value, paper_table, run_report
from convclose.scenarios import ScenarioSpec

GOLDEN = Path(__file__).parent / "golden"


class TestFormatting:
    def test_fixed_point_round_up(self):
        assert format_value(0.1973564) == "0.197357"
        assert format_value(0.000030) == "0.000030"

    def test_scientific_round_up(self):
        assert format_value(3.84e-7) == "3.9e-07"
        assert format_value(9.96e-7) == "1.0e-06"

    def test_trivial_flag(self):
        assert format_value(2.5) == ">=2"

    def test_zero(self):
        assert format_value(0.0) == "0.000000"

    def test_boundary_not_spuriously_bumped(self):
        assert format_value(1.5e-6) == "1.5e-06"
        assert format_value(0.000037) == "0.000037"


class TestGoldenTables:
    @pytest.mark.parametrize("tid", [1, 2, 3, 4])
    def test_bound_tables_markdown(self, tid):
        assert paper_table(tid, "markdown") == (GOLDEN / f"table{tid}.md").read_text()

    @pytest.mark.parametrize("tid", [1, 2, 3, 4])
    def test_bound_tables_csv(self, tid):
        assert paper_table(tid, "csv") == (GOLDEN / f"table{tid}.csv").read_text()

    @pytest.mark.parametrize("tid", [5, 6])
    def test_exact_tables(self, tid):
        assert paper_table(tid, "markdown") == (GOLDEN / f"table{tid}.md").read_text()

    def test_deterministic_rerun(self):
        assert paper_table(3, "csv") == paper_table(3, "csv")

    def test_csv_and_markdown_carry_same_numbers(self):
        md = paper_table(1, "markdown").splitlines()
        csv = paper_table(1, "csv").splitlines()
        md_cells = [
            [c.strip() for c in line.strip("|").split("|")]
            for line in md
            if "---" not in line
        ]
        csv_cells = [line.split(",") for line in csv]
        assert md_cells == csv_cells

    def test_empty_rows_header_only(self):
        text = emit([], "csv")
        assert text.count("\n") == 1 and text.startswith("scenario,")


class TestRunCommand:
    def test_table_to_file(self, tmp_path):
        out = tmp_path / "t1.md"
        assert main(["run", "--table", "1", "--out", str(out)]) == 0
        assert out.read_text() == (GOLDEN / "table1.md").read_text()

    def test_single_scenario(self, capsys):
        assert main(["run", "--example", "example2", "--n", "100", "--b", "1"]) == 0
        seen = capsys.readouterr().out
        assert "0.325253" in seen and "0.000030" in seen

    def test_strict_exit_code(self):
        # the a=1 family leaves two comparators inapplicable
        code = main(["run", "--example", "example1", "--n", "100", "--a", "1", "--strict"])
        assert code == 2
        code = main(["run", "--example", "example2", "--n", "100", "--b", "1", "--strict"])
        assert code == 0

    def test_config_file(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(
            json.dumps(
                {
                    "format": "csv",
                    "scenarios": [
                        {"kind": "example2", "n": 100, "b": 1},
                        {"kind": "example2", "n": 100, "b": 2},
                    ],
                }
            )
        )
        assert main(["run", "--config", str(cfg)]) == 0
        seen = capsys.readouterr().out
        assert seen.startswith("scenario,")
        assert "example2[n=100,b=1]" in seen and "example2[n=100,b=2]" in seen

    def test_flag_overrides_config_format(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(
            json.dumps({"format": "csv", "scenarios": [{"kind": "example2", "n": 100, "b": 1}]})
        )
        assert main(["run", "--config", str(cfg), "--format", "markdown"]) == 0
        assert capsys.readouterr().out.startswith("| scenario")

    def test_nothing_to_run(self, capsys):
        assert main(["run"]) == 1


class TestExactCommand:
    def test_example_scenario(self, capsys):
        assert main(["exact", "--example", "example3_binomial", "--n", "100", "--a", "1"]) == 0
        assert "7.152110" in capsys.readouterr().out

    def test_custom_measures_round_trip(self, tmp_path, capsys):
        b1 = linear_combine([(0.5, delta(0)), (0.5, delta(1))])
        b2 = linear_combine([(0.25, delta(0)), (0.75, delta(1))])
        f1, f2 = tmp_path / "f1.txt", tmp_path / "f2.txt"
        f1.write_text(to_text(b1))
        f2.write_text(to_text(b2))
        assert main(["exact", "--measures", str(f1), str(f2)]) == 0
        out = capsys.readouterr().out
        assert "exact_distance" in out
        # hand value: ||F1 F2 - Fbar^2|| with Fbar = (3/8, 5/8) is
        # |1/8 - 9/64| + |1/2 - 30/64| + |3/8 - 25/64| = 1/16
        value = float(out.split(" = ")[1].split()[0])
        assert value == pytest.approx(0.0625, abs=1e-12)

    def test_missing_arguments(self, capsys):
        assert main(["exact"]) == 1


class TestVerifyCommand:
    def test_zero_sum_suite_passes(self, capsys):
        assert main(["verify", "--suite", "zero-sum", "--seed", "5", "--instances", "5"]) == 0
        assert "[PASS]" in capsys.readouterr().out

    def test_smoothing_suite_small(self, capsys):
        assert main(["verify", "--suite", "smoothing", "--instances", "5"]) == 0

    def test_failure_exit_code(self, capsys, monkeypatch):
        from convclose import cli, suites

        def broken(seed=0, families=0):
            return suites.SuiteResult("zero-sum", checks=1, failures=["forced"], seed=seed)

        monkeypatch.setattr(cli.suites, "zero_sum_suite", broken)
        assert main(["verify", "--suite", "zero-sum"]) == 3
        assert "[FAIL]" in capsys.readouterr().out


class TestConstantsCommand:
    def test_prints_constants(self, capsys):
        assert main(["constants"]) == 0
        out = capsys.readouterr().out
        assert "c1 = 0.694025804338" in out
        assert "x0 = 0.936219558830" in out


class TestEntryPoint:
    def test_module_invocation(self):
        proc = subprocess.run(
            [sys.executable, "-m", "convclose.cli", "constants"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert "c1 = " in proc.stdout


class TestReportRowShape:
    def test_symmetric_scenario(self):
        row = run_report(ScenarioSpec("symmetric", 8, a=1.0))
        assert row.exact is not None
        assert "smoothing_mean" in row.bounds
        for b in row.bounds.values():
            if b.applicable:
                assert b.value >= row.exact - 1e-12

    def test_custom_requires_measures(self):
        with pytest.raises(ValueError):
            run_report(ScenarioSpec("custom", 2))
