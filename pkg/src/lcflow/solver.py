"""Adaptive semi-implicit solver for the drifted radial heat flow on (0, 1).

The evolution solved here is

    phi_t + r*phi_r = phi_rr + phi_r/r - sin(2*phi)/(2*r**2),

with Dirichlet conditions phi(0, t) = 0 and phi(1, t) = phi0(1). Each step
solves one tridiagonal system: the linear operator phi_rr + phi_r/r - r*phi_r
is taken at the new time level (weighted by ``theta_scheme``), and the sine
term is linearized about the old state with its Jacobian -cos(2*phi)/r**2
folded into the matrix diagonal. A fully explicit sine term is unstable on
graded meshes, where the mesh law makes the implicit diagonal vanish at the
first interior node while the sine Lipschitz constant grows like n**4.

Step size is controlled by step doubling: the error estimate is the max-norm
difference between one full step and two half steps, relative to the solution
scale. Rejected steps halve dt; accepted steps may grow it by at most 1.5x.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import solve_banded
from scipy.linalg import LinAlgError

from .csvio import write_csv
from .errors import NumericFailure
from .grid import RadialGrid, d1


class Termination(enum.Enum):
    """Why a run stopped."""

    REACHED_T_END = "reached_t_end"
    BLOWUP_DETECTED = "blowup_detected"
    DT_UNDERFLOW = "dt_underflow"


@dataclass(frozen=True)
class FlowState:
    """Nodal profile at one instant; phi[0] and phi[-1] are pinned boundary values."""

    t: float
    phi: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class SolverConfig:
    """Time-stepping controls.

    Parameters
    ----------
    dt_init, dt_min, dt_max : float
        Initial, smallest-allowed and largest-allowed step sizes. A rejection
        at ``dt_min`` terminates the run with ``Termination.DT_UNDERFLOW``.
    theta_scheme : float
        Implicit weight in [0, 1] for the linear operator (1 = backward Euler).
    step_tolerance : float
        Relative step-doubling error target per accepted step.
    monitor_threshold : float
        A run stops with ``Termination.BLOWUP_DETECTED`` once the origin
        gradient monitor phi_r(0, t) exceeds this value.
    max_snapshots : int
        Cap on stored profile snapshots; when exceeded, every other stored
        snapshot is dropped and the storage stride doubles. Monitors are
        recorded at every accepted step regardless.
    """

    dt_init: float = 1e-4
    dt_min: float = 1e-10
    dt_max: float = 1e-2
    theta_scheme: float = 1.0
    step_tolerance: float = 1e-6
    monitor_threshold: float = 1e3
    max_snapshots: int = 400

    def __post_init__(self):
        if not (0.0 < self.dt_min <= self.dt_init <= self.dt_max):
            raise ValueError(
                "need 0 < dt_min <= dt_init <= dt_max, got "
                f"{self.dt_min!r}, {self.dt_init!r}, {self.dt_max!r}"
            )
        if not (0.0 <= self.theta_scheme <= 1.0):
            raise ValueError(f"theta_scheme must lie in [0, 1], got {self.theta_scheme!r}")
        if self.step_tolerance <= 0.0:
            raise ValueError("step_tolerance must be positive")
        if self.monitor_threshold <= 0.0:
            raise ValueError("monitor_threshold must be positive")
        if self.max_snapshots < 2:
            raise ValueError("max_snapshots must be at least 2")


@dataclass
class Trajectory:
    """Output of :func:`run`.

    ``monitors`` has one row per accepted step (including the initial state)
    with columns (t, phi_r_at_0, sup_abs_phi, energy), where energy is the
    discrete integral of (phi_r**2 + sin(phi)**2/r**2) * r dr over [0, 1].
    """

    snapshots: list[FlowState]
    monitors: np.ndarray
    termination: Termination
    dt_final: float


def _linear_rows(grid: RadialGrid):
    """Interior rows (sub, diag, super) of phi_rr + phi_r/r - r*phi_r."""
    r = grid.nodes[1:-1]
    wm, w0, wp = grid._d1_w
    vm, v0, vp = grid._d2_w
    cf = 1.0 / r - r
    return vm + cf * wm, v0 + cf * w0, vp + cf * wp


def rhs(grid: RadialGrid, phi: np.ndarray, t: float = 0.0, forcing=None) -> np.ndarray:
    """Discrete right-hand side phi_rr + phi_r/r - r*phi_r - sin(2 phi)/(2 r^2).

    Endpoint entries are zero: both boundary values are held fixed. An
    optional ``forcing(r, t)`` term is added at the interior nodes.
    """
    phi = np.asarray(phi, dtype=float)
    r = grid.nodes
    A, B, C = _linear_rows(grid)
    out = np.zeros_like(phi)
    interior = A * phi[:-2] + B * phi[1:-1] + C * phi[2:]
    interior -= np.sin(2.0 * phi[1:-1]) / (2.0 * r[1:-1] ** 2)
    if forcing is not None:
        interior += forcing(r[1:-1], t)
    out[1:-1] = interior
    return out


def _advance(phi, t, dt, grid, rows, config, forcing):
    """One linearized semi-implicit step; returns the new interior+boundary array."""
    A, B, C = rows
    r = grid.nodes
    ri = r[1:-1]
    theta = config.theta_scheme
    n = grid.n

    sine = -np.sin(2.0 * phi[1:-1]) / (2.0 * ri**2)
    if forcing is not None:
        sine = sine + forcing(ri, t)
    jac = -np.cos(2.0 * phi[1:-1]) / ri**2

    ab = np.zeros((3, n + 1))
    ab[0, 2:] = -theta * dt * C
    ab[1, 0] = 1.0
    ab[1, -1] = 1.0
    ab[1, 1:-1] = 1.0 - theta * dt * (B + jac)
    ab[2, :-2] = -theta * dt * A
    # Dirichlet rows: keep the off-diagonal entries of rows 0 and n zero
    ab[0, 1] = 0.0
    ab[2, -2] = 0.0

    b = phi.copy()
    b[1:-1] += dt * (
        (1.0 - theta) * (A * phi[:-2] + B * phi[1:-1] + C * phi[2:])
        + sine
        - theta * jac * phi[1:-1]
    )
    b[0] = 0.0
    b[-1] = phi[-1]

    try:
        out = solve_banded((1, 1), ab, b)
    except LinAlgError as exc:
        raise NumericFailure(
            f"tridiagonal solve failed at t={t:.6g}, dt={dt:.3g}: {exc}"
        ) from None
    out[0] = 0.0
    out[-1] = phi[-1]
    return out


def step(grid: RadialGrid, state: FlowState, dt: float, config: SolverConfig,
         forcing=None) -> FlowState:
    """Advance one step of size dt (no error control)."""
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    phi = _check_state(grid, state.phi)
    rows = _linear_rows(grid)
    new = _advance(phi, state.t, dt, grid, rows, config, forcing)
    return FlowState(t=state.t + dt, phi=new)


def _check_state(grid: RadialGrid, phi) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    if phi.shape != grid.nodes.shape:
        raise ValueError(f"state has shape {phi.shape}, expected {grid.nodes.shape}")
    if phi[0] != 0.0:
        raise ValueError(f"state must vanish at r=0, got phi[0]={phi[0]!r}")
    return phi


def monitor_row(grid: RadialGrid, state: FlowState) -> tuple[float, float, float, float]:
    """(t, phi_r(0,t), sup|phi|, discrete energy) for one state."""
    phi = state.phi
    r = grid.nodes
    phir = d1(grid, phi)
    integrand = np.empty_like(phi)
    integrand[0] = 0.0
    integrand[1:] = (phir[1:] ** 2 + (np.sin(phi[1:]) / r[1:]) ** 2) * r[1:]
    energy = float(np.trapezoid(integrand, r))
    return state.t, float(phir[0]), float(np.max(np.abs(phi))), energy


def run(grid: RadialGrid, phi0: np.ndarray, t_end: float,
        config: SolverConfig | None = None, forcing=None) -> Trajectory:
    """Integrate from profile ``phi0`` to ``t_end`` with adaptive step doubling.

    The run stops early when the origin-gradient monitor crosses
    ``config.monitor_threshold`` (blow-up detection) or when a step is
    rejected at ``dt_min`` (step-size underflow, the practical signature of a
    singularity the mesh can no longer resolve).
    """
    if config is None:
        config = SolverConfig()
    if t_end <= 0.0:
        raise ValueError(f"t_end must be positive, got {t_end!r}")
    phi = _check_state(grid, phi0).copy()
    rows = _linear_rows(grid)
    tol = config.step_tolerance

    t = 0.0
    state = FlowState(t=0.0, phi=phi.copy())
    snapshots = [state]
    stride = 1
    accepted = 0
    monitors = [monitor_row(grid, state)]
    termination = None
    dt = min(config.dt_init, t_end)
    dt_last = dt

    if monitors[0][1] > config.monitor_threshold:
        termination = Termination.BLOWUP_DETECTED

    while termination is None:
        dt_try = min(dt, t_end - t)
        dt_last = dt_try
        full = _advance(phi, t, dt_try, grid, rows, config, forcing)
        half = _advance(phi, t, 0.5 * dt_try, grid, rows, config, forcing)
        fine = _advance(half, t + 0.5 * dt_try, 0.5 * dt_try, grid, rows, config, forcing)
        scale = max(1.0, float(np.max(np.abs(fine))) if np.all(np.isfinite(fine)) else 1.0)
        err = float(np.max(np.abs(fine - full))) / scale

        if not err <= tol:  # also catches NaN
            if dt_try <= config.dt_min * (1.0 + 1e-12):
                termination = Termination.DT_UNDERFLOW
                break
            dt = max(config.dt_min, 0.5 * dt_try)
            continue

        phi = fine
        t += dt_try
        accepted += 1
        state = FlowState(t=t, phi=phi.copy())
        row = monitor_row(grid, state)
        monitors.append(row)

        if accepted % stride == 0:
            snapshots.append(state)
            if len(snapshots) > config.max_snapshots:
                snapshots = snapshots[::2]
                stride *= 2

        if row[1] > config.monitor_threshold:
            termination = Termination.BLOWUP_DETECTED
        elif t >= t_end - 1e-14 * t_end:
            termination = Termination.REACHED_T_END
        else:
            growth = min(1.5, 0.9 * float(np.sqrt(tol / max(err, 1e-300))))
            dt = min(config.dt_max, max(config.dt_min, dt_try * max(1.0, growth)))

    if snapshots[-1].t != state.t:
        snapshots.append(state)
    return Trajectory(
        snapshots=snapshots,
        monitors=np.asarray(monitors, dtype=float),
        termination=termination,
        dt_final=float(dt_last),
    )


def integrate_fixed(grid: RadialGrid, phi0: np.ndarray, t_end: float, dt: float,
                    config: SolverConfig | None = None, forcing=None) -> FlowState:
    """Integrate with a fixed step (no error control); dt must divide t_end."""
    if config is None:
        config = SolverConfig()
    nsteps = int(round(t_end / dt))
    if nsteps < 1 or abs(nsteps * dt - t_end) > 1e-9 * t_end:
        raise ValueError(f"dt={dt!r} does not evenly divide t_end={t_end!r}")
    phi = _check_state(grid, phi0).copy()
    rows = _linear_rows(grid)
    t = 0.0
    for k in range(nsteps):
        phi = _advance(phi, t, dt, grid, rows, config, forcing)
        t = (k + 1) * dt
    return FlowState(t=t, phi=phi)


def write_monitor_csv(traj: Trajectory, path: str) -> None:
    """Monitor series, one row per accepted step: t,phi_r_at_0,sup_abs_phi,energy."""
    write_csv(
        path,
        ["t", "phi_r_at_0", "sup_abs_phi", "energy"],
        ([float(v) for v in row] for row in traj.monitors),
    )


def write_profile_csvs(traj: Trajectory, grid: RadialGrid, directory: str) -> list[str]:
    """One r,phi file per stored snapshot; returns the written paths."""
    paths = []
    for k, snap in enumerate(traj.snapshots):
        path = f"{directory}/profile_{k:04d}.csv"
        write_csv(path, ["r", "phi"], zip(grid.nodes, snap.phi))
        paths.append(path)
    return paths
