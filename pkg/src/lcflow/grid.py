"""Graded radial meshes on [0, 1] and derivative stencils that are exact on quadratics.

The mesh law is r_i = (i/n)**p for i = 0..n with grading exponent p >= 1, which
clusters nodes near the origin where radial profiles develop structure. First and
second derivatives are evaluated with three-point stencils on the (generally
nonuniform) mesh; endpoints use four-point one-sided formulas so that both
operators converge at second order in the max norm.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class RadialGrid:
    """A graded mesh on [0, 1] with precomputed derivative stencil weights.

    Attributes
    ----------
    n : int
        Number of intervals; the mesh has ``n + 1`` nodes.
    grading : float
        Grading exponent ``p`` in the node law ``r_i = (i/n)**p``.
    nodes : numpy.ndarray
        Node positions, shape ``(n + 1,)``, with ``nodes[0] == 0.0`` and
        ``nodes[n] == 1.0`` exactly.
    """

    n: int
    grading: float
    nodes: np.ndarray = field(repr=False)
    # Interior stencil weights (index i corresponds to node i+1), each shape (n-1,).
    _d1_w: tuple[np.ndarray, np.ndarray, np.ndarray] = field(repr=False)
    _d2_w: tuple[np.ndarray, np.ndarray, np.ndarray] = field(repr=False)
    # One-sided endpoint weights acting on the first/last few node values.
    _d1_left: np.ndarray = field(repr=False)
    _d1_right: np.ndarray = field(repr=False)
    _d2_left: np.ndarray = field(repr=False)
    _d2_right: np.ndarray = field(repr=False)

    @property
    def spacing_min(self) -> float:
        return float(self.nodes[1] - self.nodes[0])


def _endpoint_d1_weights(shifts: np.ndarray) -> np.ndarray:
    """One-sided first-derivative weights at x=0 for nodes at {0} | shifts.

    Four nodes give a formula exact on cubics; the three-node fallback (used
    only when the mesh has just three nodes) is exact on quadratics.
    """
    if len(shifts) == 2:
        s1, s2 = shifts
        return np.array(
            [
                -(s1 + s2) / (s1 * s2),
                s2 / (s1 * (s2 - s1)),
                -s1 / (s2 * (s2 - s1)),
            ]
        )
    s1, s2, s3 = shifts
    return np.array(
        [
            -(1.0 / s1 + 1.0 / s2 + 1.0 / s3),
            s2 * s3 / (s1 * (s1 - s2) * (s1 - s3)),
            s1 * s3 / (s2 * (s2 - s1) * (s2 - s3)),
            s1 * s2 / (s3 * (s3 - s1) * (s3 - s2)),
        ]
    )


def _endpoint_d2_weights(shifts: np.ndarray) -> np.ndarray:
    """One-sided second-derivative weights at x=0 for nodes at {0} | shifts.

    With three nodes this is the (first-order) quadratic-interpolant formula;
    with four nodes it is exact on cubics and second-order accurate.
    """
    if len(shifts) == 2:
        s1, s2 = shifts
        return np.array(
            [
                2.0 / (s1 * s2),
                -2.0 / (s1 * (s2 - s1)),
                2.0 / (s2 * (s2 - s1)),
            ]
        )
    s1, s2, s3 = shifts
    return np.array(
        [
            2.0 * (s1 + s2 + s3) / (s1 * s2 * s3),
            -2.0 * (s2 + s3) / (s1 * (s1 - s2) * (s1 - s3)),
            -2.0 * (s1 + s3) / (s2 * (s2 - s1) * (s2 - s3)),
            -2.0 * (s1 + s2) / (s3 * (s3 - s1) * (s3 - s2)),
        ]
    )


def make_grid(n: int, grading: float = 1.0) -> RadialGrid:
    """Build the graded radial mesh r_i = (i/n)**grading on [0, 1].

    Parameters
    ----------
    n : int
        Number of mesh intervals, at least 2.
    grading : float, optional
        Grading exponent p >= 1. ``grading=1`` gives a uniform mesh; larger
        values concentrate nodes near r = 0.

    Returns
    -------
    RadialGrid

    Raises
    ------
    ValueError
        If ``n < 2``, ``grading < 1``, or the requested grading collapses
        adjacent nodes in floating point.
    """
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise ValueError(f"mesh needs an integer n >= 2 intervals, got {n!r}")
    if not np.isfinite(grading) or grading < 1.0:
        raise ValueError(f"grading exponent must satisfy p >= 1, got {grading!r}")

    nodes = (np.arange(n + 1, dtype=float) / n) ** float(grading)
    if np.any(np.diff(nodes) <= 0.0):
        raise ValueError(
            f"grading p={grading} collapses nodes at n={n}; reduce p or refine"
        )

    r = nodes
    hm = r[1:-1] - r[:-2]
    hp = r[2:] - r[1:-1]
    d1_w = (
        -hp / (hm * (hm + hp)),
        (hp - hm) / (hm * hp),
        hm / (hp * (hm + hp)),
    )
    d2_w = (
        2.0 / (hm * (hm + hp)),
        -2.0 / (hm * hp),
        2.0 / (hp * (hm + hp)),
    )

    m = min(3, n)  # four-point endpoint stencils need n >= 3
    d1_left = _endpoint_d1_weights(r[1 : m + 1] - r[0])
    d1_right = _endpoint_d1_weights(r[-2 : -m - 2 : -1] - r[-1])
    d2_left = _endpoint_d2_weights(r[1 : m + 1] - r[0])
    d2_right = _endpoint_d2_weights(r[-2 : -m - 2 : -1] - r[-1])

    return RadialGrid(
        n=int(n),
        grading=float(grading),
        nodes=nodes,
        _d1_w=d1_w,
        _d2_w=d2_w,
        _d1_left=d1_left,
        _d1_right=d1_right,
        _d2_left=d2_left,
        _d2_right=d2_right,
    )


def _check_values(grid: RadialGrid, values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.shape != grid.nodes.shape:
        raise ValueError(
            f"values have shape {values.shape}, expected {grid.nodes.shape}"
        )
    return values


def d1(grid: RadialGrid, values: np.ndarray) -> np.ndarray:
    """First derivative of nodal values on the mesh.

    Interior nodes use the three-point nonuniform stencil (exact on
    quadratics); endpoints use one-sided four-point formulas (exact on cubics)
    when the mesh has at least four nodes. Second-order accurate in max norm.
    """
    f = _check_values(grid, values)
    out = np.empty_like(f)
    wm, w0, wp = grid._d1_w
    out[1:-1] = wm * f[:-2] + w0 * f[1:-1] + wp * f[2:]
    k = len(grid._d1_left)
    out[0] = grid._d1_left @ f[:k]
    out[-1] = grid._d1_right @ f[: -k - 1 : -1]
    return out


def d2(grid: RadialGrid, values: np.ndarray) -> np.ndarray:
    """Second derivative of nodal values on the mesh.

    Interior nodes use the three-point nonuniform stencil (exact on
    quadratics); endpoints use one-sided four-point formulas (exact on cubics)
    when the mesh has at least four nodes.
    """
    f = _check_values(grid, values)
    out = np.empty_like(f)
    vm, v0, vp = grid._d2_w
    out[1:-1] = vm * f[:-2] + v0 * f[1:-1] + vp * f[2:]
    k = len(grid._d2_left)
    out[0] = grid._d2_left @ f[:k]
    out[-1] = grid._d2_right @ f[: -k - 1 : -1]
    return out
