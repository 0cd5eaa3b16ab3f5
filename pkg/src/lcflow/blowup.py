"""Finite-time singularity detection on origin-gradient monitor series.

A trajectory blows up (for our purposes) when its origin slope phi_r(0, t)
crosses a threshold or the adaptive stepper underflows. The singular-time
extrapolator fits g**-(1-eps_fit) linearly in t — the rate suggested by the
closed-form core width, whose (1-eps) power vanishes linearly — and reports
the fitted zero crossing. The true solution's divergence rate is not known,
so the estimate is heuristic; the analytic vanishing time T0 is reported
alongside whenever barrier parameters are supplied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .barriers import BarrierParams, blowup_time
from .csvio import write_csv
from .errors import DomainError, EstimationFailure
from .solver import Termination, Trajectory


@dataclass(frozen=True)
class BlowupReport:
    """Outcome of threshold detection over a trajectory's monitor series."""

    detected: bool
    t_detect: float
    g_final: float
    t_star_estimate: float
    t0_analytic: float
    dt_at_end: float


def extrapolate_singular_time(ts, gs, window: int = 8, eps_fit: float = 0.5) -> float:
    """Zero-crossing time of a linear fit to g**-(1-eps_fit) over the last window.

    Requires g strictly increasing over the window; a non-increasing window
    or a fit whose transformed series is not decaying raises
    EstimationFailure. With eps_fit = 0 the model is exact for g = 1/(t*-t).
    """
    if window < 3:
        raise ValueError(f"window must be at least 3, got {window!r}")
    if not 0.0 <= eps_fit < 1.0:
        raise ValueError(f"eps_fit must lie in [0, 1), got {eps_fit!r}")
    ts = np.asarray(ts, dtype=float)[-window:]
    gs = np.asarray(gs, dtype=float)[-window:]
    if ts.size < window:
        raise DomainError(f"need at least {window} samples, got {ts.size}")
    if np.any(np.diff(gs) <= 0.0):
        raise EstimationFailure("monitor series is not strictly increasing over the window")
    if np.any(gs <= 0.0):
        raise EstimationFailure("monitor series must be positive to transform")
    y = gs ** -(1.0 - eps_fit)
    slope, intercept = np.polyfit(ts, y, 1)
    if slope >= 0.0:
        raise EstimationFailure("transformed series is not decaying; no finite crossing")
    return float(-intercept / slope)


def detect(traj: Trajectory, threshold: float = 1e3,
           params: Optional[BarrierParams] = None,
           window: int = 8, eps_fit: float = 0.5) -> BlowupReport:
    """Scan the monitor series for an origin-slope threshold crossing.

    Detection also triggers on stepper underflow (the run died before t_end).
    ``t_star_estimate`` is NaN whenever the extrapolation preconditions fail;
    ``t0_analytic`` is NaN unless ``params`` is given.
    """
    monitors = np.asarray(traj.monitors, dtype=float)
    if monitors.ndim != 2 or monitors.shape[0] < 10:
        raise DomainError("need at least 10 monitor samples to scan")
    ts = monitors[:, 0]
    gs = monitors[:, 1]
    crossed = np.nonzero(gs > threshold)[0]
    underflow = traj.termination == Termination.DT_UNDERFLOW
    detected = crossed.size > 0 or underflow
    if crossed.size > 0:
        t_detect = float(ts[crossed[0]])
    elif underflow:
        t_detect = float(ts[-1])
    else:
        t_detect = math.nan
    try:
        t_star = extrapolate_singular_time(ts, gs, window=window, eps_fit=eps_fit)
    except (EstimationFailure, DomainError):
        t_star = math.nan
    return BlowupReport(
        detected=detected,
        t_detect=t_detect,
        g_final=float(gs[-1]),
        t_star_estimate=t_star,
        t0_analytic=blowup_time(params) if params is not None else math.nan,
        dt_at_end=traj.dt_final,
    )


def write_blowup_csv(report: BlowupReport, path: str) -> None:
    """Single-row export: detected,t_detect,g_final,t_star_estimate,t0_analytic,dt_at_end."""
    write_csv(
        path,
        ["detected", "t_detect", "g_final", "t_star_estimate", "t0_analytic", "dt_at_end"],
        [(report.detected, report.t_detect, report.g_final,
          report.t_star_estimate, report.t0_analytic, report.dt_at_end)],
    )
