import csv
import io
import json
import subprocess
import sys

import pytest

from knightcount.cli import CSV_COLUMNS, DEFAULT_ALPHAS, main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_exact_open_5x5(capsys):
    assert run(capsys, "exact", "--side", 5) == (0, "1728\n", "")


def test_exact_closed_6x6_json(capsys):
    code, out, _ = run(capsys, "exact", "--side", 6, "--target", "closed-diagrams",
                       "--format", "json")
    assert code == 0
    assert json.loads(out)["value"] == 9862


def test_exact_from_start(capsys):
    code, out, _ = run(capsys, "exact", "--side", 5, "--start", "0,0")
    assert (code, out) == (0, "304\n")


def test_exact_histogram(capsys):
    code, out, _ = run(capsys, "exact", "--side", 5, "--violations")
    assert code == 0
    hist = {int(r["k"]): int(r["count"]) for r in rows(out)}
    assert sum(hist.values()) == 1728


def test_exact_guard_exit_code(capsys):
    code, out, err = run(capsys, "exact", "--side", 7)
    assert (code, out) == (3, "")
    assert err.startswith("error:")


@pytest.mark.parametrize("argv", [
    ["estimate", "--side", "5", "--alpha", "1.5", "--samples", "0"],
    ["estimate", "--side", "5", "--alpha", "abc", "--samples", "10"],
    ["estimate", "--side", "2", "--alpha", "1", "--samples", "10"],
    ["estimate", "--side", "5", "--alpha", "1", "--samples", "10", "--start", "9,9"],
    ["estimate", "--side", "5", "--alpha", "1", "--samples", "10", "--target", "open-geometric"],
    ["histogram", "--side", "5", "--alpha", "1", "--samples", "10", "--start", "0,0"],
    ["frobnicate"],
])
def test_usage_errors_exit_2(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as e:
        code = e.code
    assert code == 2
    assert capsys.readouterr().out == ""


def test_estimate_json(capsys):
    code, out, _ = run(capsys, "estimate", "--side", 5, "--alpha", 1.5, "--samples", "2e3",
                       "--reps", 3, "--seed", 7)
    assert code == 0
    blob = json.loads(out)
    assert blob["samples_per_replication"] == 2000
    assert blob["samples_total"] == 2000 * 6 * 3
    assert len(blob["replicate_points"]) == 3
    assert blob["ci_low"] <= blob["point"] <= blob["ci_high"]
    assert 1000 < blob["point"] < 2500


def test_estimate_infinite_alpha(capsys):
    code, out, _ = run(capsys, "estimate", "--side", 5, "--alpha", "inf", "--samples", 200,
                       "--format", "csv")
    assert code == 0
    assert rows(out)[0]["alpha"] == "inf"


def test_zero_success_warns_but_succeeds(capsys):
    code, out, err = run(capsys, "estimate", "--side", 4, "--alpha", 1, "--samples", 50)
    assert code == 0
    assert json.loads(out)["point"] == 0.0
    assert "warning" in err


def test_sweep_defaults_to_twelve_alphas(capsys):
    code, out, _ = run(capsys, "sweep", "--side", 5, "--samples", 50)
    assert code == 0
    table = rows(out)
    assert list(table[0]) == list(CSV_COLUMNS)
    assert [float(r["alpha"]) for r in table] == list(DEFAULT_ALPHAS)
    assert all(r["cpu_seconds"] == "" for r in table)
    assert "E+" in table[0]["point"] or table[0]["point"] == "0.000000E+00"


def test_single_alpha_sweep_equals_estimate(capsys):
    common = ["--side", 6, "--samples", 300, "--reps", 2, "--seed", 3, "--format", "csv"]
    _, sweep, _ = run(capsys, "sweep", "--alphas", "2", *common)
    _, est, _ = run(capsys, "estimate", "--alpha", "2", *common)
    assert sweep == est


def test_timing_fills_cpu_column(capsys):
    _, out, _ = run(capsys, "estimate", "--side", 5, "--alpha", 1, "--samples", 100,
                    "--format", "csv", "--timing")
    assert float(rows(out)[0]["cpu_seconds"]) >= 0


def test_histogram_partition(capsys):
    code, out, _ = run(capsys, "histogram", "--side", 5, "--alpha", 1.5, "--samples", 3000,
                       "--format", "json")
    assert code == 0
    blob = json.loads(out)
    assert blob["units"] == "open-numberings"
    parts = sum(r["point"] for r in blob["rows"])
    assert parts == pytest.approx(blob["total"], rel=1e-9)


def test_output_independent_of_threads(capsys, tmp_path):
    outs = []
    for t in (1, 3):
        f = tmp_path / f"t{t}.csv"
        assert run(capsys, "sweep", "--side", 6, "--alphas", "0,1.5", "--samples", 400,
                   "--reps", 3, "--seed", 11, "--threads", t, "--out", f)[0] == 0
        outs.append(f.read_bytes())
    assert outs[0] == outs[1]


def test_manifest_and_replay(capsys, tmp_path):
    out = tmp_path / "run.csv"
    run(capsys, "estimate", "--side", 5, "--alpha", 2, "--samples", 500, "--reps", 2,
        "--format", "csv", "--out", out)
    man_path = tmp_path / "run.csv.manifest.json"
    man = json.loads(man_path.read_text())
    assert man["config"]["samples_per_replication"] == 500
    assert man["config"]["base_seed"] == 0
    assert man["prng"].startswith("xoshiro256**")
    code, stdout, _ = run(capsys, "replay", man_path)
    assert code == 0 and json.loads(stdout)["match"]

    man["output_sha256"] = "0" * 64
    man_path.write_text(json.dumps(man))
    assert run(capsys, "replay", man_path)[0] == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "knightcount", "exact", "--side", "5"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout == "1728\n"
