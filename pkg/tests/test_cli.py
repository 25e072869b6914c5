import json
import subprocess
import sys
from pathlib import Path

import pytest

from odplan.cli import run

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
DESK = str(CONFIGS / "desk_empty.ini")
RACKS = str(CONFIGS / "desk_racks.ini")


def test_plan_ghod_writes_outputs(tmp_path, capsys):
    assert run(["plan", "--config", DESK, "--algorithm", "ghod", "--seed", "1",
                "--out", str(tmp_path)]) == 0
    for name in ("solution.csv", "report.json", "heatmap.ppm", "coverage.csv", "obstacles.csv"):
        assert (tmp_path / name).stat().st_size > 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["feasible"] and rep["pct_covered_at_least_twice"] == 100
    lines = (tmp_path / "solution.csv").read_text().splitlines()
    assert lines[0] == "index,x,y" and lines[1].startswith("1,")
    assert len(lines) - 1 == rep["ap_count"]
    assert (tmp_path / "heatmap.ppm").read_bytes().startswith(b"P6\n30 12\n255\n")


@pytest.mark.parametrize("alg", ["ghod", "gaod", "random"])
def test_plan_is_byte_identical(tmp_path, alg):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(["plan", "--config", RACKS, "--algorithm", alg, "--seed", "3", "--out", str(a)]) == 0
    assert run(["plan", "--config", RACKS, "--algorithm", alg, "--seed", "3", "--out", str(b),
                "--workers", "4"]) == 0
    assert (a / "solution.csv").read_bytes() == (b / "solution.csv").read_bytes()


def test_plan_trace(tmp_path):
    assert run(["plan", "--config", DESK, "--algorithm", "gaod", "--seed", "0",
                "--out", str(tmp_path), "--trace"]) == 0
    rows = [json.loads(line) for line in (tmp_path / "trace.jsonl").read_text().splitlines()]
    assert rows[0]["generation"] == 0
    assert set(rows[0]) == {"generation", "best", "mean"}
    assert all(a["best"] >= b["best"] for a, b in zip(rows, rows[1:]))


def test_validate_round_trip(tmp_path):
    run(["plan", "--config", DESK, "--algorithm", "ghod", "--out", str(tmp_path)])
    assert run(["validate", "--config", DESK, "--solution", str(tmp_path / "solution.csv")]) == 0


def test_validate_empty_solution(tmp_path):
    f = tmp_path / "empty.csv"
    f.write_text("index,x,y\n")
    assert run(["validate", "--config", DESK, "--solution", str(f)]) == 2
    f.write_text("")
    assert run(["validate", "--config", DESK, "--solution", str(f)]) == 2


def test_validate_too_close(tmp_path, capsys):
    f = tmp_path / "s.csv"
    f.write_text("index,x,y\n1,3,3\n2,5,3\n")
    assert run(["validate", "--config", DESK, "--solution", str(f)]) == 2
    out = json.loads(capsys.readouterr().out)
    assert out["checks"]["separation"] is False and out["violating_pair"] == [[3, 3], [5, 3]]


def test_validate_outside_and_off_grid(tmp_path):
    f = tmp_path / "s.csv"
    f.write_text("index,x,y\n1,40,3\n")
    assert run(["validate", "--config", DESK, "--solution", str(f)]) == 2
    f.write_text("index,x,y\n1,3.5,3\n")
    assert run(["validate", "--config", DESK, "--solution", str(f)]) == 1
    f.write_text("index,x,y\n1,abc,3\n")
    assert run(["validate", "--config", DESK, "--solution", str(f)]) == 1


def test_bad_config_exits_one(tmp_path, capsys):
    f = tmp_path / "bad.ini"
    f.write_text("[radio]\nd_ap_min = 90.00\n")
    assert run(["plan", "--config", str(f), "--out", str(tmp_path / "o")]) == 1
    err = capsys.readouterr().err
    assert "bad.ini:2" in err and "90" in err and "80.48" in err
    assert run(["plan", "--config", str(tmp_path / "missing.ini"), "--out", str(tmp_path)]) == 1
    assert run(["plan", "--config", DESK]) == 1  # missing --out


def test_infeasible_instance_exits_two(tmp_path):
    f = tmp_path / "walled.ini"
    f.write_text("[environment]\nx_max = 12.00\ny_max = 3.00\n"
                 "[obstacles]\nboxes =\n    9.5 -1 10.5 4 9 100\n"
                 "[radio]\nthreshold = -50.00\n")
    assert run(["plan", "--config", str(f), "--out", str(tmp_path / "o")]) == 2


def test_bench(tmp_path, capsys):
    assert run(["bench", "--config", DESK, "--seeds", "3", "--out", str(tmp_path),
                "--bench-workers", "2"]) == 0
    summary = (tmp_path / "summary.csv").read_text().splitlines()
    assert summary[0].startswith("algorithm,runs,failures")
    assert [row.split(",")[0] for row in summary[1:]] == ["ghod", "gaod", "random"]
    assert len((tmp_path / "runs.csv").read_text().splitlines()) == 1 + 9
    assert "algorithm" in (tmp_path / "summary.txt").read_text()
    assert run(["bench", "--config", DESK, "--seeds", "0", "--out", str(tmp_path)]) == 1
    assert run(["bench", "--config", DESK, "--seeds", "1", "--out", str(tmp_path),
                "--algorithms", "annealing"]) == 1


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "odplan", "plan", "--config", DESK,
                           "--algorithm", "random", "--seed", "2", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["feasible"]
