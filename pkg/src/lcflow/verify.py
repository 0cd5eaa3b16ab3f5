"""Order-theoretic checks on numerical trajectories.

Comparison against closed-form barrier profiles, the interior maximum
principle, and a discrete Hölder seminorm of director samples. Barriers are
evaluated analytically at the solver's snapshot times on the solver's own
r-grid, so no interpolation error enters the checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.spatial.distance import pdist

from .csvio import write_csv
from .errors import DomainError
from .solver import Trajectory

BarrierFn = Callable[[np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class OrderingReport:
    """Worst-case ordering violation over the sampled grid.

    ``max_violation`` is already reduced by the tolerance and clamped at
    zero, so any positive value is a genuine violation; (r, t) locate the
    worst raw excess.
    """

    check: str
    max_violation: float
    r: float
    t: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_violation == 0.0


def _worst(excess: np.ndarray, r: np.ndarray, t: float, best):
    j = int(np.argmax(excess))
    if excess[j] > best[0]:
        return (float(excess[j]), float(r[j]), t)
    return best


def comparison_check(grid, traj: Trajectory, lower: Optional[BarrierFn] = None,
                     upper: Optional[BarrierFn] = None, tol: float = 1e-4,
                     t_max: Optional[float] = None) -> OrderingReport:
    """Check lower(r,t) <= phi <= upper(r,t) over all snapshots, up to ``tol``.

    Either bound may be omitted. ``t_max`` restricts the check to snapshots
    with t <= t_max (used to stop a lower-barrier check at detection time).
    """
    if lower is None and upper is None:
        raise ValueError("comparison_check needs at least one of lower/upper")
    r = grid.nodes
    best = (-math.inf, math.nan, math.nan)
    for state in traj.snapshots:
        if t_max is not None and state.t > t_max:
            continue
        if lower is not None:
            best = _worst(lower(r, state.t) - state.phi, r, state.t, best)
        if upper is not None:
            best = _worst(state.phi - upper(r, state.t), r, state.t, best)
    raw, r_worst, t_worst = best
    return OrderingReport(
        check="comparison",
        max_violation=max(0.0, raw - tol),
        r=r_worst,
        t=t_worst,
        tol=tol,
    )


def max_principle_check(grid, traj: Trajectory, bound: float = math.pi) -> OrderingReport:
    """Max over interior nodes and t > 0 of |phi| - bound, clamped at zero.

    Boundary nodes are excluded: r = 0 is pinned and r = 1 carries the
    prescribed boundary value, which may legitimately exceed the bound.
    """
    best = (-math.inf, math.nan, math.nan)
    interior = slice(1, -1)
    for state in traj.snapshots:
        if state.t <= 0.0:
            continue
        best = _worst(np.abs(state.phi[interior]) - bound,
                      grid.nodes[interior], state.t, best)
    raw, r_worst, t_worst = best
    if raw == -math.inf:
        raw, r_worst, t_worst = 0.0, math.nan, math.nan
    return OrderingReport(
        check="max_principle",
        max_violation=max(0.0, raw),
        r=r_worst,
        t=t_worst,
        tol=0.0,
    )


def holder_seminorm(points: np.ndarray, values: np.ndarray, exponent: float = 0.5) -> float:
    """Discrete seminorm sup over pairs of |d(x)-d(y)| / |x-y|**exponent.

    ``points`` is (m, 3), ``values`` is (m, 3) with unit-vector rows (chordal
    distances in the ambient space). Pairs with coincident points are skipped.
    """
    points = np.asarray(points, dtype=float)
    values = np.asarray(values, dtype=float)
    if points.ndim != 2 or points.shape[1] != 3 or values.shape != points.shape:
        raise DomainError("need matching (m, 3) arrays of points and values")
    if points.shape[0] < 2:
        raise DomainError("need at least 2 points")
    if not 0.0 < exponent <= 1.0:
        raise DomainError(f"exponent must lie in (0, 1], got {exponent!r}")
    norms = np.linalg.norm(values, axis=1)
    if np.abs(norms - 1.0).max() > 1e-8:
        raise DomainError("director values must be unit vectors")
    dx = pdist(points)
    dv = pdist(values)
    mask = dx > 0.0
    if not mask.any():
        return 0.0
    return float(np.max(dv[mask] / dx[mask] ** exponent))


def write_verify_csv(reports, path: str) -> None:
    """One line per report: check,max_violation,r,t,tol."""
    rows = [(rep.check, rep.max_violation, rep.r, rep.t, rep.tol) for rep in reports]
    write_csv(path, ["check", "max_violation", "r", "t", "tol"], rows)
