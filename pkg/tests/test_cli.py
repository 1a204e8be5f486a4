import json
from pathlib import Path

from click.testing import CliRunner

from outrank.cli import main
from outrank.io import bundled_problem_text


def _write_problem(tmp_path: Path) -> Path:
    path = tmp_path / "problem.json"
    path.write_text(bundled_problem_text(), "utf-8")
    return path


def test_validate_ok(tmp_path):
    result = CliRunner().invoke(main, ["validate", str(_write_problem(tmp_path))])
    assert result.exit_code == 0
    assert "6 alternatives" in result.output
    assert "8 elementary criteria" in result.output


def test_validate_reports_all_errors(tmp_path):
    doc = json.loads(bundled_problem_text())
    doc["performance"]["A"]["gT1"] = 9          # outside declared 1-5 range
    doc["thresholds"]["gR1"] = [{"q": 2, "p": 1, "v": 10}]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc), "utf-8")
    result = CliRunner().invoke(main, ["validate", str(path)])
    assert result.exit_code == 2
    assert "p <= q" in result.output
    assert "outside declared range" in result.output


def test_missing_file_is_io_error():
    result = CliRunner().invoke(main, ["validate", "/no/such/file.json"])
    assert result.exit_code == 4


def test_weights_lists_spaces(tmp_path):
    result = CliRunner().invoke(main, ["weights", str(_write_problem(tmp_path)), "--node", "GR"])
    assert result.exit_code == 0
    assert "gR1=0.4000" in result.output
    assert "gR1=0.3333" in result.output


def test_weights_global_ranges(tmp_path):
    result = CliRunner().invoke(main, ["weights", str(_write_problem(tmp_path))])
    assert result.exit_code == 0
    assert "global elementary weight ranges" in result.output
    assert "gS1" in result.output


def test_run_json_stdout(tmp_path):
    result = CliRunner().invoke(
        main, ["run", str(_write_problem(tmp_path)), "--samples", "40", "--seed", "5"]
    )
    assert result.exit_code == 0
    doc = json.loads(result.output)
    assert doc["sampleCount"] == 40
    assert doc["masterSeed"] == 5
    assert set(doc["nodes"]) == {"g0", "GT", "GE", "GR", "GS"}


def test_run_csv_with_figures(tmp_path):
    out = tmp_path / "report.csv"
    result = CliRunner().invoke(
        main,
        ["run", str(_write_problem(tmp_path)), "--samples", "25", "--seed", "1",
         "--format", "csv", "--out", str(out)],
    )
    assert result.exit_code == 0
    assert out.exists()
    assert "# node=GR matrix=preference" in out.read_text()
    for node in ("g0", "GT", "GE", "GR", "GS"):
        assert (tmp_path / f"report.csv.{node}.png").exists()


def test_run_no_figures(tmp_path):
    out = tmp_path / "r.json"
    result = CliRunner().invoke(
        main,
        ["run", str(_write_problem(tmp_path)), "--samples", "10", "--out", str(out),
         "--no-figures"],
    )
    assert result.exit_code == 0
    assert not list(tmp_path.glob("r.json.*.png"))


def test_run_unknown_node(tmp_path):
    result = CliRunner().invoke(
        main, ["run", str(_write_problem(tmp_path)), "--samples", "5", "--node", "nope"]
    )
    assert result.exit_code == 2
