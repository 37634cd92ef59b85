"""End-to-end command-line checks: exit codes, output formats, manifest
replay, config-file precedence, and worker invariance of CSV bytes."""

import json
import math

import pytest

from lexiboot.cli import EXTRAP_HEADER, FIT_HEADER, SWEEP_HEADER, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def stdout_value(out: str, key: str) -> str:
    for line in out.splitlines():
        if line.startswith(key + " = "):
            return line.split(" = ", 1)[1]
    raise AssertionError(f"{key!r} not found in output:\n{out}")


# ------------------------------------------------------------- exit codes

def test_no_arguments_is_usage_error(capsys):
    code, _, err = run_cli(capsys)
    assert code == 1
    assert "usage" in err


def test_unknown_subcommand_is_usage_error(capsys):
    code, _, _ = run_cli(capsys, "bogus")
    assert code == 1


def test_game_requires_objects(capsys):
    code, _, _ = run_cli(capsys, "game", "--words", "2")
    assert code == 1


def test_game_needs_words_or_alpha(capsys):
    code, _, err = run_cli(capsys, "game", "--objects", "4")
    assert code == 1
    assert "lexiboot: error:" in err


def test_game_rejects_words_and_alpha_together(capsys):
    code, _, err = run_cli(capsys, "game", "--objects", "4",
                           "--words", "2", "--alpha", "0.5")
    assert code == 1
    assert "not both" in err


def test_version_flag(capsys):
    code, out, _ = run_cli(capsys, "--version")
    assert code == 0
    assert out.strip()


# ------------------------------------------------------------------- game

def test_game_trivial_run(capsys):
    code, out, _ = run_cli(capsys, "game", "--objects", "1", "--words", "2",
                           "--context", "1", "--resolution", "100",
                           "--seed", "7")
    assert code == 0
    assert stdout_value(out, "frozen") == "yes"
    assert float(stdout_value(out, "eps[I]")) == 0.0
    assert float(stdout_value(out, "eps[J]")) == 0.0
    assert stdout_value(out, "used_words[I]") == "1"
    assert stdout_value(out, "consensus") == "yes"
    assert int(stdout_value(out, "episodes")) > 0


def test_game_alpha_spelling(capsys):
    code, out, _ = run_cli(capsys, "game", "--objects", "16",
                           "--alpha", "0.5", "--resolution", "50",
                           "--seed", "1")
    assert code == 0
    eps = float(stdout_value(out, "eps[I]"))
    assert 0.0 <= eps <= 1.0


def test_game_episode_cap_exits_2(capsys):
    code, out, _ = run_cli(capsys, "game", "--objects", "8", "--words", "4",
                           "--resolution", "200", "--max-episodes", "10",
                           "--seed", "0")
    assert code == 2
    assert stdout_value(out, "frozen") == "no"
    assert stdout_value(out, "episodes") == "10"
    assert "eps[I]" not in out


def test_game_deterministic_output(capsys):
    args = ("game", "--objects", "6", "--words", "3", "--resolution", "50",
            "--seed", "11")
    _, first, _ = run_cli(capsys, *args)
    _, second, _ = run_cli(capsys, *args)
    assert first == second


# ------------------------------------------------------------------ sweep

def test_sweep_csv_shape_and_reference_columns(capsys, tmp_path):
    out_path = tmp_path / "sweep.csv"
    code, out, _ = run_cli(capsys, "sweep", "--alphas", "0.5,2.0",
                           "--objects", "8", "--samples", "6",
                           "--resolution", "25", "--seed", "3",
                           "--workers", "1", "--out", str(out_path))
    assert code == 0
    assert "wrote" in out
    lines = out_path.read_text().splitlines()
    assert lines[0] == SWEEP_HEADER
    assert len(lines) == 3
    half, double = lines[1].split(","), lines[2].split(",")
    assert half[0] == "0.5" and double[0] == "2.0"
    assert half[1] == "8" and half[2] == "4"  # N, H = round(alpha N)
    assert double[2] == "16"
    assert half[5] == "unsupervised"
    assert half[6] == "6"
    assert half[11] == "0.5676676416183064"  # 1/2 + e^-2/2
    assert half[12] == "0.5"
    assert double[12] == "0.0"


def test_sweep_rerun_is_byte_identical(capsys, tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for path in paths:
        run_cli(capsys, "sweep", "--alphas", "0.5", "--objects", "6",
                "--samples", "5", "--resolution", "25", "--seed", "9",
                "--workers", "1", "--out", str(path))
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_sweep_worker_count_does_not_change_bytes(capsys, tmp_path):
    # the episode cap keeps this fast: at this coarse resolution one seed
    # lands in a mutually blocked state that can never freeze, and the
    # capped sample must reduce identically under any worker count
    paths = {w: tmp_path / f"w{w}.csv" for w in (1, 3)}
    for workers, path in paths.items():
        run_cli(capsys, "sweep", "--alphas", "0.5,1.0", "--objects", "6",
                "--samples", "9", "--resolution", "25", "--seed", "4",
                "--max-episodes", "50000",
                "--workers", str(workers), "--out", str(path))
    assert paths[1].read_bytes() == paths[3].read_bytes()
    freeze_rates = [line.split(",")[9] for line in
                    paths[1].read_text().splitlines()[1:]]
    assert any(rate != "1.0" for rate in freeze_rates)


def test_sweep_manifest_replay(capsys, tmp_path):
    out_path = tmp_path / "sweep.csv"
    run_cli(capsys, "sweep", "--alphas", "0.5", "--objects", "4,6",
            "--mode", "both", "--samples", "4", "--resolution", "25",
            "--seed", "5", "--workers", "1", "--out", str(out_path))
    first = out_path.read_bytes()
    manifest = json.loads((tmp_path / "sweep.csv.manifest.json").read_text())
    assert manifest["n_samples"] == 4
    assert manifest["master_seed"] == 5
    assert manifest["workers"] == 1
    assert manifest["objects"] == [4, 6]
    assert manifest["modes"] == ["unsupervised", "supervised"]
    assert manifest["tool_version"]
    assert manifest["backend"] in ("compiled", "pure")

    code = main(manifest["argv"])  # replay reproduces the data bytes
    capsys.readouterr()
    assert code == 0
    assert out_path.read_bytes() == first


def test_sweep_mode_both_emits_row_pairs(capsys, tmp_path):
    out_path = tmp_path / "both.csv"
    run_cli(capsys, "sweep", "--alphas", "0.5", "--objects", "4",
            "--mode", "both", "--samples", "4", "--resolution", "25",
            "--seed", "5", "--workers", "1", "--out", str(out_path))
    rows = [line.split(",") for line in
            out_path.read_text().splitlines()[1:]]
    assert [row[5] for row in rows] == ["unsupervised", "supervised"]


def test_sweep_workers_env_default(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("LEXIBOOT_WORKERS", "2")
    out_path = tmp_path / "env.csv"
    code, _, _ = run_cli(capsys, "sweep", "--alphas", "0.5",
                         "--objects", "4", "--samples", "4",
                         "--resolution", "25", "--seed", "5",
                         "--out", str(out_path))
    assert code == 0
    manifest = json.loads((tmp_path / "env.csv.manifest.json").read_text())
    assert manifest["workers"] == 2


def test_sweep_workers_env_rejects_garbage(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("LEXIBOOT_WORKERS", "many")
    code, _, err = run_cli(capsys, "sweep", "--alphas", "0.5",
                           "--objects", "4", "--samples", "2",
                           "--resolution", "25",
                           "--out", str(tmp_path / "x.csv"))
    assert code == 1
    assert "LEXIBOOT_WORKERS" in err


def test_sweep_gnuplot_script(capsys, tmp_path):
    out_path = tmp_path / "plot.csv"
    run_cli(capsys, "sweep", "--alphas", "0.5", "--objects", "4",
            "--samples", "3", "--resolution", "25", "--seed", "2",
            "--workers", "1", "--gnuplot", "--out", str(out_path))
    script = (tmp_path / "plot.csv.gp").read_text()
    assert "yerrorbars" in script
    assert "exp(-1/a)" in script
    assert str(out_path) in script


def test_config_file_defaults_and_override(capsys, tmp_path):
    config = tmp_path / "game.cfg"
    config.write_text(
        "# shared defaults\n"
        "objects = 6\n"
        "words = 3\n"
        "resolution = 40\n"
        "seed = 11\n")
    code, from_file, _ = run_cli(capsys, "game", "--config", str(config))
    assert code == 0

    # same settings spelled out by hand give identical output
    code, spelled, _ = run_cli(capsys, "game", "--objects", "6", "--words",
                               "3", "--resolution", "40", "--seed", "11")
    assert spelled == from_file

    # an explicit flag wins over the file
    code, overridden, _ = run_cli(capsys, "game", "--config", str(config),
                                  "--seed", "12")
    code, direct, _ = run_cli(capsys, "game", "--objects", "6", "--words",
                              "3", "--resolution", "40", "--seed", "12")
    assert overridden == direct


def test_config_file_missing_is_reported(capsys, tmp_path):
    code, _, err = run_cli(capsys, "game", "--config",
                           str(tmp_path / "nope.cfg"))
    assert code == 1
    assert "lexiboot: error:" in err


# ------------------------------------------------------------ extrapolate

def test_extrapolate_from_csv_fixture(capsys, tmp_path):
    fixture = tmp_path / "points.csv"
    fixture.write_text("N,mean_eps,se_eps\n10,0.6,0.01\n20,0.5,0.01\n")
    code, out, _ = run_cli(capsys, "extrapolate", "--fit-csv", str(fixture))
    assert code == 0
    assert abs(float(stdout_value(out, "intercept")) - 0.4) < 1e-12
    assert abs(float(stdout_value(out, "slope")) - 2.0) < 1e-12


def test_extrapolate_fit_csv_writes_summary(capsys, tmp_path):
    fixture = tmp_path / "points.csv"
    fixture.write_text("N,mean_eps,se_eps\n10,0.6,0.01\n20,0.5,0.01\n")
    out_path = tmp_path / "fit.csv"
    code, _, _ = run_cli(capsys, "extrapolate", "--fit-csv", str(fixture),
                         "--out", str(out_path))
    assert code == 0
    lines = out_path.read_text().splitlines()
    assert lines[0] == FIT_HEADER
    intercept = float(lines[1].split(",")[0])
    assert abs(intercept - 0.4) < 1e-12
    assert (tmp_path / "fit.csv.manifest.json").exists()


def test_extrapolate_rejects_header_without_columns(capsys, tmp_path):
    fixture = tmp_path / "bad.csv"
    fixture.write_text("a,b\n1,2\n")
    code, _, err = run_cli(capsys, "extrapolate", "--fit-csv", str(fixture))
    assert code == 1
    assert "mean_eps" in err


def test_extrapolate_simulation_and_round_trip(capsys, tmp_path):
    out_path = tmp_path / "extrap.csv"
    code, out, _ = run_cli(capsys, "extrapolate", "--alpha", "0.5",
                           "--objects", "8,16", "--samples", "5",
                           "--resolution", "100", "--seed", "6",
                           "--workers", "1", "--gnuplot",
                           "--out", str(out_path))
    assert code == 0
    lines = out_path.read_text().splitlines()
    assert lines[0] == EXTRAP_HEADER
    assert lines[1].split(",")[1:3] == ["8", "4"]
    assert lines[2].split(",")[1:3] == ["16", "8"]
    assert lines[3] == ""
    assert lines[4] == FIT_HEADER
    assert float(stdout_value(out, "eps_random(infinite N)")) == (
        pytest.approx(0.5676676416183064))
    assert "eps_exact_random(N=8, H=4)" in out
    assert "yerrorbars" in (tmp_path / "extrap.csv.gp").read_text()

    # feeding the rows back through --fit-csv reproduces the fit line
    code, refit, _ = run_cli(capsys, "extrapolate", "--fit-csv",
                             str(out_path))
    assert code == 0
    assert stdout_value(refit, "intercept") == stdout_value(out, "intercept")
    assert stdout_value(refit, "slope") == stdout_value(out, "slope")


def test_extrapolate_requires_inputs_without_fit_csv(capsys):
    code, _, err = run_cli(capsys, "extrapolate", "--alpha", "0.5")
    assert code == 1
    assert "--objects" in err


def test_extrapolate_reports_nonfreezing_cell(capsys, tmp_path):
    code, _, err = run_cli(capsys, "extrapolate", "--alpha", "0.5",
                           "--objects", "8", "--samples", "3",
                           "--resolution", "200", "--max-episodes", "10",
                           "--workers", "1",
                           "--out", str(tmp_path / "x.csv"))
    assert code == 1
    assert "max-episodes" in err


# -------------------------------------------------------------- occupancy

def test_occupancy_small_table(capsys):
    code, out, _ = run_cli(capsys, "occupancy", "--objects", "2",
                           "--words", "2")
    assert code == 0
    rows = [line.split() for line in out.splitlines()
            if line.strip().startswith(("0 ", "1 "))]
    table = {int(cells[0]): float(cells[1]) for cells in rows}
    assert table[0] == 0.5 and table[1] == 0.5
    assert float(stdout_value(out, "E[unused] exact")) == 0.5
    assert float(stdout_value(out, "expected_error exact")) == 0.25


def test_occupancy_reference_point(capsys):
    code, out, _ = run_cli(capsys, "occupancy", "--objects", "96",
                           "--words", "48")
    assert code == 0
    exact = float(stdout_value(out, "expected_error exact"))
    assert abs(exact - 0.5662530045429904) < 1e-13
    asym = float(stdout_value(out, "expected_error asymptotic"))
    assert abs(asym - 0.5676676416183064) < 1e-13
    assert float(stdout_value(out, "sup|exact - poisson|")) < 0.05


def test_occupancy_past_exact_limit_needs_poisson(capsys):
    code, _, err = run_cli(capsys, "occupancy", "--objects", "300",
                           "--words", "300")
    assert code == 1
    assert "--poisson" in err

    code, out, _ = run_cli(capsys, "occupancy", "--objects", "300",
                           "--words", "300", "--poisson")
    assert code == 0
    lam = float(stdout_value(out, "E[unused] poisson"))
    assert abs(lam - 300 * math.exp(-1.0)) < 1e-9


def test_occupancy_monte_carlo(capsys):
    code, out, _ = run_cli(capsys, "occupancy", "--objects", "6",
                           "--words", "3", "--mc-samples", "400",
                           "--seed", "1")
    assert code == 0
    exact = float(stdout_value(out, "expected_error exact"))
    mc = float(stdout_value(out, "mc_error (400 samples)"))
    se = float(stdout_value(out, "mc_error_se"))
    assert abs(mc - exact) < 4 * se


def test_occupancy_rejects_nonpositive_sizes(capsys):
    code, _, _ = run_cli(capsys, "occupancy", "--objects", "0",
                         "--words", "3")
    assert code == 1
