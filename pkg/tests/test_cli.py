"""Scenario-runner tests: config plumbing, exit codes, artifacts, determinism."""

import math
import os
import subprocess
import sys

import numpy as np
import pytest

from lcflow.barriers import default_params
from lcflow.cli import (
    ConfigError,
    load_config,
    main,
    mms_errors,
    mms_solution,
)


def write_config(tmp_path, text, name="run.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def read_summary(out_dir):
    lines = (out_dir / "summary").read_text().strip().split("\n")
    return {parts[0]: parts[1:] for parts in (line.split(",") for line in lines)}


# ---------------------------------------------------------------------------
# configuration


def test_defaults():
    cfg = load_config("blowup", None, "outdir")
    assert cfg.scenario == "blowup"
    assert cfg.out_dir == "outdir"
    assert cfg.grid_n == 800 and cfg.grid_grading == 2.0
    assert cfg.barrier == default_params()
    assert cfg.threshold == 1e6


def test_config_overrides(tmp_path):
    path = write_config(tmp_path, """
[grid]
n = 200
grading = 1.5

[solver]
dt_max = 0.005
max_snapshots = 50

[scenario]
t_end = 0.5
""")
    cfg = load_config("global_existence", path, "o")
    assert cfg.grid_n == 200 and cfg.grid_grading == 1.5
    assert cfg.solver.dt_max == 0.005 and cfg.solver.max_snapshots == 50
    assert cfg.t_end == 0.5


def test_config_rejects_unknown_section(tmp_path):
    path = write_config(tmp_path, "[mystery]\nx = 1\n")
    with pytest.raises(ConfigError, match="mystery"):
        load_config("blowup", path, "o")


def test_config_rejects_unknown_key(tmp_path):
    path = write_config(tmp_path, "[grid]\nnn = 100\n")
    with pytest.raises(ConfigError, match="nn"):
        load_config("blowup", path, "o")


def test_config_rejects_bad_value(tmp_path):
    path = write_config(tmp_path, "[grid]\nn = many\n")
    with pytest.raises(ConfigError, match="many"):
        load_config("blowup", path, "o")


def test_config_rejects_scenario_key_mismatch(tmp_path):
    # t_end belongs to the solve scenario, not blowup
    path = write_config(tmp_path, "[scenario]\nt_end = 1.0\n")
    with pytest.raises(ConfigError, match="t_end"):
        load_config("blowup", path, "o")


def test_config_missing_file():
    with pytest.raises(ConfigError, match="not found"):
        load_config("blowup", "/nonexistent/run.ini", "o")


def test_main_exit_2_names_violated_constraint(tmp_path, capsys):
    # beta0 too large breaks the shrinking-rate hypothesis
    path = write_config(tmp_path, "[barrier]\nbeta0 = 0.01\n")
    code = main(["blowup", "--config", path, "--out", str(tmp_path / "out")])
    assert code == 2
    assert "shrinking-rate hypothesis" in capsys.readouterr().err


def test_main_exit_2_on_bad_config(tmp_path, capsys):
    path = write_config(tmp_path, "[grid]\nn = many\n")
    assert main(["solve", "--config", path, "--out", str(tmp_path / "out")]) == 2
    assert "many" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# scenarios end to end


def test_solve_scenario(tmp_path):
    path = write_config(tmp_path, """
[grid]
n = 80

[scenario]
t_end = 0.05
""")
    out = tmp_path / "out"
    assert main(["solve", "--config", path, "--out", str(out)]) == 0
    summary = read_summary(out)
    assert summary["sup_abs_phi"][0] == "pass"
    assert summary["axis_slope_max"][0] == "pass"
    assert summary["termination"][:2] == ["pass", "reached_t_end"]
    assert summary["max_principle_violation"][:2] == ["pass", "0.0"]
    for artifact in ("monitors.csv", "times.csv", "profile_0000.csv",
                     "verify_max_principle.csv"):
        assert (out / artifact).is_file()
    header = (out / "monitors.csv").read_text().split("\n", 1)[0]
    assert header == "t,phi_r_at_0,sup_abs_phi,energy"


def test_solve_scenario_failure_exit_1(tmp_path):
    # a monitor threshold below the initial slope stops the run immediately,
    # so the termination assertion fails
    path = write_config(tmp_path, """
[grid]
n = 80

[solver]
monitor_threshold = 1.0

[scenario]
t_end = 0.05
""")
    out = tmp_path / "out"
    assert main(["solve", "--config", path, "--out", str(out)]) == 1
    assert read_summary(out)["termination"][0] == "fail"


def test_barrier_audit_scenario_and_determinism(tmp_path):
    path = write_config(tmp_path, "[scenario]\nnr = 256\nnt = 32\n")
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["barrier-audit", "--config", path, "--out", str(out_a)]) == 0
    assert main(["barrier-audit", "--config", path, "--out", str(out_b)]) == 0
    summary = read_summary(out_a)
    assert summary["supersolution_residual_identity"][0] == "pass"
    assert summary["subsolution_residual_max"][0] == "pass"
    assert summary["beta_rk4_relative_error"][0] == "pass"
    assert (out_a / "barrier.csv").read_text().split("\n", 1)[0] == "r,t,f,f_r,residual"
    for name in ("barrier.csv", "summary"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_blowup_scenario_default_params(tmp_path):
    # the frozen default set underflows immediately (unresolvable core);
    # the run still counts as detection and the summary passes
    path = write_config(tmp_path, "[grid]\nn = 400\n")
    out = tmp_path / "out"
    assert main(["blowup", "--config", path, "--out", str(out)]) == 0
    summary = read_summary(out)
    assert summary["detected"][:2] == ["pass", "true"]
    assert summary["t_detect"][0] == "pass"
    assert summary["comparison_max_violation"][:2] == ["pass", "0.0"]
    blowup_csv = (out / "blowup.csv").read_text().strip().split("\n")
    assert blowup_csv[0] == "detected,t_detect,g_final,t_star_estimate,t0_analytic,dt_at_end"
    assert blowup_csv[1].startswith("true,")


def test_blowup_scenario_demo_config(tmp_path):
    # resolvable-core validated set: the monitor grows 2048 -> 1e4 and the
    # trajectory stays above the subsolution throughout
    repo_cfg = os.path.join(os.path.dirname(__file__), "..", "configs", "blowup-demo.ini")
    path = write_config(tmp_path, open(repo_cfg).read().replace("n = 1600", "n = 800"))
    out = tmp_path / "out"
    assert main(["blowup", "--config", path, "--out", str(out)]) == 0
    summary = read_summary(out)
    assert summary["detected"][0] == "pass"
    assert summary["comparison_max_violation"][0] == "pass"

    rows = np.loadtxt(out / "monitors.csv", delimiter=",", skiprows=1)
    assert rows.shape[0] >= 100
    g = rows[:, 1]
    assert g[0] == pytest.approx(2048.0, rel=1e-3)
    assert g[-1] > 1e4
    env = np.loadtxt(out / "envelope.csv", delimiter=",", skiprows=1)
    assert env.shape == (512, 2)
    assert np.all(np.diff(env[:, 1]) > 0.0)
    assert (out / "barrier.csv").is_file() and (out / "times.csv").is_file()


def test_energy_scenario(tmp_path):
    path = write_config(tmp_path, """
[grid]
n = 400

[scenario]
resolution = 32
""")
    out = tmp_path / "out"
    assert main(["energy", "--config", path, "--out", str(out)]) == 0
    summary = read_summary(out)
    for name in ("grad_u_sq_relative_error", "convective_relative_error",
                 "boundary_flux_gauge_shift", "axis_stress_block_max"):
        assert summary[name][0] == "pass"
    header = (out / "energy.csv").read_text().split("\n", 1)[0]
    assert header == "t,grad_u_sq,convective,grad_d_sq,tension_sq,boundary_flux"


def test_hopf_scenario_with_jobs(tmp_path):
    path = write_config(tmp_path, """
[scenario]
lambdas = 1, 4, 64
resolution = 64
""")
    out_serial, out_parallel = tmp_path / "s", tmp_path / "p"
    assert main(["hopf", "--config", path, "--out", str(out_serial)]) == 0
    assert main(["hopf", "--config", path, "--out", str(out_parallel), "--jobs", "2"]) == 0
    summary = read_summary(out_serial)
    for name in ("s3_energy_reference_error", "s3_energy_strictly_decreasing",
                 "ball_energy_decay_ratio", "total_energy_budget",
                 "cap_hopf_lambda1", "cap_perturbation"):
        assert summary[name][0] == "pass"
    hopf_csv = (out_serial / "hopf.csv").read_text().strip().split("\n")
    assert hopf_csv[0] == "lambda,energy_s3,energy_ball"
    assert len(hopf_csv) == 4
    assert (out_serial / "hopf.csv").read_bytes() == (out_parallel / "hopf.csv").read_bytes()


def test_mms_scenario(tmp_path):
    path = write_config(tmp_path, """
[scenario]
ns = 50, 100
t_end = 0.1
""")
    out = tmp_path / "out"
    assert main(["mms", "--config", path, "--out", str(out)]) == 0
    summary = read_summary(out)
    assert summary["observed_order_50_100"][0] == "pass"
    assert float(summary["observed_order_50_100"][1]) > 1.9
    assert (out / "mms.csv").read_text().split("\n", 1)[0] == "n,dt,error"


def test_mms_rejects_bad_sizes(tmp_path):
    path = write_config(tmp_path, "[scenario]\nns = 100\n")
    with pytest.raises(ConfigError, match="two grid sizes"):
        load_config("mms_convergence", path, "o")
    path = write_config(tmp_path, "[scenario]\nns = 200, 100\n", name="rev.ini")
    with pytest.raises(ConfigError, match="increasing"):
        load_config("mms_convergence", path, "o")


def test_mms_machinery_is_second_order():
    table = mms_errors((40, 80), 0.05)
    (n_a, _, e_a), (n_b, _, e_b) = table
    order = math.log(e_a / e_b) / math.log(n_b / n_a)
    assert order > 1.9
    assert mms_solution(0.0, 1.0) == 0.0 and mms_solution(1.0, 1.0) == 0.0


def test_console_entry_point(tmp_path):
    out = tmp_path / "out"
    proc = subprocess.run(
        [sys.executable, "-m", "lcflow.cli", "mms", "--out", str(out),
         "--config", write_config(tmp_path, "[scenario]\nns = 40, 80\nt_end = 0.05\n")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (out / "summary").is_file()
