"""Singularity-detection tests with synthetic monitor series.

The extrapolation model is exercised on series where the singular time is
known exactly (rational blow-up) or in closed form (the shrinking-core
envelope), keeping these tests independent of the flow solver.
"""

import math

import numpy as np
import pytest

from lcflow.barriers import blowup_time, default_params, subsolution_origin_slope
from lcflow.blowup import (
    BlowupReport,
    detect,
    extrapolate_singular_time,
    write_blowup_csv,
)
from lcflow.errors import DomainError, EstimationFailure
from lcflow.grid import make_grid
from lcflow.solver import FlowState, Termination, Trajectory, run


def _traj_from_monitors(ts, gs, termination=Termination.REACHED_T_END):
    monitors = np.zeros((len(ts), 4))
    monitors[:, 0] = ts
    monitors[:, 1] = gs
    snaps = [FlowState(t=float(ts[0]), phi=np.zeros(3)),
             FlowState(t=float(ts[-1]), phi=np.zeros(3))]
    return Trajectory(snapshots=snaps, monitors=monitors,
                      termination=termination, dt_final=1e-3)


def test_extrapolation_exact_for_rational_blowup():
    ts = np.linspace(0.0, 0.9, 50)
    gs = 1.0 / (1.0 - ts)
    est = extrapolate_singular_time(ts, gs, window=10, eps_fit=0.0)
    assert est == pytest.approx(1.0, abs=1e-6)


def test_extrapolation_recovers_envelope_vanishing_time():
    params = default_params()
    t0 = blowup_time(params)
    ts = np.linspace(0.0, 0.99 * t0, 400)
    gs = subsolution_origin_slope(ts, params)
    est = extrapolate_singular_time(ts, gs, window=12, eps_fit=params.eps)
    assert abs(est - t0) <= 0.02 * t0


def test_extrapolation_failures():
    ts = np.linspace(0.0, 1.0, 20)
    with pytest.raises(EstimationFailure):
        extrapolate_singular_time(ts, np.full(20, 5.0), window=8)
    with pytest.raises(EstimationFailure):
        extrapolate_singular_time(ts, 10.0 - ts, window=8)
    with pytest.raises(ValueError):
        extrapolate_singular_time(ts, 1.0 / (2.0 - ts), window=2)
    with pytest.raises(ValueError):
        extrapolate_singular_time(ts, 1.0 / (2.0 - ts), window=8, eps_fit=1.0)
    with pytest.raises(DomainError):
        extrapolate_singular_time(ts[:5], 1.0 / (2.0 - ts[:5]), window=8)


def test_detect_on_quiet_flow_run():
    grid = make_grid(50, grading=2.0)
    phi0 = 0.5 * np.sin(math.pi * grid.nodes)
    phi0[0] = 0.0
    traj = run(grid, phi0, 0.2)
    rep = detect(traj, threshold=1e3)
    assert not rep.detected
    assert math.isnan(rep.t_detect)
    assert math.isnan(rep.t0_analytic)
    assert rep.g_final < 1e3


def test_detect_threshold_crossing_and_analytic_time():
    params = default_params()
    t0 = blowup_time(params)
    ts = np.linspace(0.0, 0.99 * t0, 200)
    gs = subsolution_origin_slope(ts, params)
    traj = _traj_from_monitors(ts, gs)
    rep = detect(traj, threshold=1e6, params=params)
    assert rep.detected
    assert rep.t_detect == ts[np.argmax(gs > 1e6)]
    assert rep.t_detect <= t0
    assert rep.t0_analytic == pytest.approx(t0, rel=1e-15)
    assert rep.g_final == gs[-1]
    # the heuristic extrapolation lands near the true vanishing time
    assert abs(rep.t_star_estimate - t0) <= 0.02 * t0


def test_detect_threshold_monotonicity():
    params = default_params()
    t0 = blowup_time(params)
    ts = np.linspace(0.0, 0.99 * t0, 200)
    gs = subsolution_origin_slope(ts, params)
    traj = _traj_from_monitors(ts, gs)
    detections = [detect(traj, threshold=th).t_detect
                  for th in (1e5, 1e6, 1e7)]
    assert all(a <= b for a, b in zip(detections, detections[1:]))


def test_detect_on_underflow_without_crossing():
    ts = np.linspace(0.0, 0.5, 20)
    gs = np.linspace(1.0, 2.0, 20)
    traj = _traj_from_monitors(ts, gs, termination=Termination.DT_UNDERFLOW)
    rep = detect(traj, threshold=1e3)
    assert rep.detected
    assert rep.t_detect == pytest.approx(0.5)


def test_detect_requires_enough_samples():
    ts = np.linspace(0.0, 0.5, 5)
    traj = _traj_from_monitors(ts, np.ones(5))
    with pytest.raises(DomainError):
        detect(traj, threshold=1e3)


def test_detect_nan_estimate_on_flat_series():
    ts = np.linspace(0.0, 0.5, 20)
    traj = _traj_from_monitors(ts, np.full(20, 2.0))
    rep = detect(traj, threshold=1.0)
    assert rep.detected  # constant 2 > threshold 1
    assert math.isnan(rep.t_star_estimate)


def test_write_blowup_csv(tmp_path):
    rep = BlowupReport(detected=True, t_detect=0.25, g_final=1234.5,
                       t_star_estimate=math.nan, t0_analytic=0.3, dt_at_end=1e-5)
    path = tmp_path / "blowup.csv"
    write_blowup_csv(rep, str(path))
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "detected,t_detect,g_final,t_star_estimate,t0_analytic,dt_at_end"
    fields = lines[1].split(",")
    assert fields[0] == "true"
    assert float(fields[1]) == 0.25
    assert fields[3] == "nan"
