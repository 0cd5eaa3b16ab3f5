"""Small-energy topologically nontrivial director data from the Hopf map.

The chain is H ∘ Ψ_λ ∘ Φ: the ball maps onto S³ by Φ = Π⁻¹ ∘ σ with
σ(x) = x/(1-|x|²), the conformal dilation Ψ_λ = Π⁻¹ ∘ (λ·) ∘ Π spreads the
sphere toward the projection pole, and the Hopf map H(z, w) =
(|z|² - |w|², 2zw) lands on S². Π is stereographic projection from the pole
N = (1, 0, 0, 0); S² outputs are cyclically rotated (a, b, c) -> (b, c, a)
so the boundary value H(N) = (1, 0, 0) becomes the reference direction
e = (0, 0, 1).

Energy densities are evaluated from the analytic differential, not finite
differences: Ψ_λ is conformal with factor κ_λ(p) = λ(1+|y|²)/(1+λ²|y|²)
(y = Π(p)), and |∇H|² ≡ 8 on S³ with horizontal projection along the fiber
direction (iz, -iw), giving

    |∇(H∘Ψ_λ)|²(p) = 8 κ_λ(p)²           on S³,
    |∇(H∘Ψ_λ∘Φ)|²(x) = 4 Σ_j (|v_j|² - (v_j·f)²)   on the ball,

with v_j the pushforwards of the Cartesian frame through λ·Dσ and dΠ⁻¹.
A finite-difference helper cross-checks both densities in the tests. As
λ grows the S³ energy drains like 64π²/λ while the map stays homotopically
nontrivial — the point of the construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .csvio import write_csv
from .errors import DomainError

# reference boundary direction on S2 and the projection pole on S3
TARGET = np.array([0.0, 0.0, 1.0])
POLE = np.array([1.0, 0.0, 0.0, 0.0])


def hopf_map(z, w, tol: float = 1e-10) -> np.ndarray:
    """H(z, w) = (|z|²-|w|², Re 2zw, Im 2zw) for |z|²+|w|² = 1."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    radius = np.abs(z) ** 2 + np.abs(w) ** 2
    if np.max(np.abs(radius - 1.0)) > tol:
        raise DomainError("hopf_map needs |z|^2 + |w|^2 = 1")
    zw2 = 2.0 * z * w
    return np.stack([np.abs(z) ** 2 - np.abs(w) ** 2, zw2.real, zw2.imag], axis=-1)


def stereo_project(p) -> np.ndarray:
    """Π: S³ \\ {N} -> R³, (p₀, p₁, p₂, p₃) -> (p₁, p₂, p₃)/(1-p₀)."""
    p = np.asarray(p, dtype=float)
    return p[..., 1:] / (1.0 - p[..., :1])


def stereo_lift(y) -> np.ndarray:
    """Π⁻¹: R³ -> S³ \\ {N}."""
    y = np.asarray(y, dtype=float)
    s = np.sum(y * y, axis=-1, keepdims=True)
    out = np.empty(y.shape[:-1] + (4,))
    out[..., :1] = (s - 1.0) / (s + 1.0)
    out[..., 1:] = 2.0 * y / (s + 1.0)
    return out


def psi_lambda(p, lam: float) -> np.ndarray:
    """Conformal dilation Ψ_λ = Π⁻¹ ∘ (λ·) ∘ Π; the pole N is a fixed point."""
    if lam <= 0.0:
        raise DomainError(f"dilation parameter must be positive, got {lam!r}")
    p = np.asarray(p, dtype=float)
    at_pole = p[..., 0] >= 1.0
    safe = np.where(at_pole[..., None], -POLE, p)
    out = stereo_lift(lam * stereo_project(safe))
    return np.where(at_pole[..., None], POLE, out)


def conformal_factor(p, lam: float) -> np.ndarray:
    """κ_λ(p) = λ(1+|y|²)/(1+λ²|y|²) with y = Π(p); κ_λ(N) = 1/λ."""
    p = np.asarray(p, dtype=float)
    at_pole = p[..., 0] >= 1.0
    safe = np.where(at_pole[..., None], -POLE, p)
    s = np.sum(stereo_project(safe) ** 2, axis=-1)
    kappa = lam * (1.0 + s) / (1.0 + lam * lam * s)
    return np.where(at_pole, 1.0 / lam, kappa)


def s3_density(p, lam: float) -> np.ndarray:
    """Dirichlet energy density of H∘Ψ_λ on S³: 8·κ_λ²."""
    return 8.0 * conformal_factor(p, lam) ** 2


def hopf_director(p, lam: float = 1.0) -> np.ndarray:
    """Unit director (H∘Ψ_λ)(p), rotated so the pole maps to e = (0, 0, 1)."""
    q = psi_lambda(p, lam)
    h = hopf_map(q[..., 0] + 1j * q[..., 1], q[..., 2] + 1j * q[..., 3], tol=1e-8)
    return h[..., [1, 2, 0]]


def s3_density_fd(p, lam: float, h: float = 1e-5) -> float:
    """Tangent-plane central-difference estimate of the S³ density at one point."""
    p = np.asarray(p, dtype=float)
    basis = np.linalg.qr(np.eye(4) - np.outer(p, p))[0]
    # drop the (near-zero) column along p itself
    tangent = [v for v in basis.T if abs(float(np.dot(v, p))) < 0.5][:3]
    total = 0.0
    for v in tangent:
        plus = (p + h * v) / np.linalg.norm(p + h * v)
        minus = (p - h * v) / np.linalg.norm(p - h * v)
        diff = hopf_director(plus, lam) - hopf_director(minus, lam)
        total += float(np.sum(diff**2)) / (4.0 * h * h)
    return total


def _midpoints(n: int, length: float):
    return (np.arange(n) + 0.5) * (length / n), length / n


def dirichlet_energy_s3(lam: float, resolution: int = 64) -> float:
    """∫_{S³} |∇(H∘Ψ_λ)|² dσ by midpoint quadrature in hyperspherical angles."""
    if resolution < 16:
        raise DomainError(f"quadrature resolution must be >= 16, got {resolution!r}")
    chi, dchi = _midpoints(resolution, math.pi)
    theta, dtheta = _midpoints(resolution, math.pi)
    azim, dazim = _midpoints(2 * resolution, 2.0 * math.pi)
    # S³ point (cos chi, sin chi cos theta, sin chi sin theta cos a, ...)
    p = np.empty((resolution, resolution, 2 * resolution, 4))
    sc = np.sin(chi)[:, None, None]
    st = np.sin(theta)[None, :, None]
    p[..., 0] = np.cos(chi)[:, None, None]
    p[..., 1] = sc * np.cos(theta)[None, :, None]
    p[..., 2] = sc * st * np.cos(azim)[None, None, :]
    p[..., 3] = sc * st * np.sin(azim)[None, None, :]
    weight = np.sin(chi)[:, None, None] ** 2 * st
    return float(np.sum(s3_density(p, lam) * weight)) * dchi * dtheta * dazim


def ball_map(x) -> np.ndarray:
    """Φ = Π⁻¹ ∘ σ with σ(x) = x/(1-|x|²), a diffeomorphism B₁³ -> S³ \\ {N}."""
    x = np.asarray(x, dtype=float)
    rho2 = np.sum(x * x, axis=-1, keepdims=True)
    if np.any(rho2 >= 1.0):
        raise DomainError("ball_map needs |x| < 1")
    return stereo_lift(x / (1.0 - rho2))


def ball_density(x, lam: float) -> np.ndarray:
    """|∇(H∘Ψ_λ∘Φ)|²(x) from the analytic differential chain."""
    x = np.asarray(x, dtype=float)
    rho2 = np.sum(x * x, axis=-1, keepdims=True)
    if np.any(rho2 >= 1.0):
        raise DomainError("ball_density needs |x| < 1")
    one_m = 1.0 - rho2
    # columns of lam * D sigma: lam (e_j/(1-rho^2) + 2 x_j x/(1-rho^2)^2)
    eye = np.eye(3)
    u = lam * (eye / one_m[..., None] + 2.0 * x[..., None, :] * x[..., :, None]
               / (one_m[..., None] ** 2))  # (..., 3 cols j, 3 comps) as [..., comp, j]
    y = lam * x / one_m
    s = np.sum(y * y, axis=-1, keepdims=True)
    ydotu = np.sum(y[..., :, None] * u, axis=-2, keepdims=True)  # (..., 1, 3)
    v = np.empty(x.shape[:-1] + (4, 3))
    v[..., 0, :] = (4.0 * ydotu / (s[..., None] + 1.0) ** 2)[..., 0, :]
    v[..., 1:, :] = 2.0 * u / (s[..., None] + 1.0) \
        - 4.0 * ydotu * y[..., :, None] / (s[..., None] + 1.0) ** 2
    p = stereo_lift(y)
    fiber = np.stack([-p[..., 1], p[..., 0], p[..., 3], -p[..., 2]], axis=-1)
    vsq = np.sum(v * v, axis=-2)
    vdotf = np.sum(v * fiber[..., :, None], axis=-2)
    return 4.0 * np.sum(vsq - vdotf**2, axis=-1)


def ball_dirichlet_energy(lam: float, resolution: int = 96) -> float:
    """Ball Dirichlet energy ½∫_{B₁³} |∇(H∘Ψ_λ∘Φ)|² dx, spherical midpoint rule."""
    if resolution < 16:
        raise DomainError(f"quadrature resolution must be >= 16, got {resolution!r}")
    rho, drho = _midpoints(resolution, 1.0)
    theta, dtheta = _midpoints(resolution, math.pi)
    azim, dazim = _midpoints(2 * resolution, 2.0 * math.pi)
    st = np.sin(theta)[:, None]
    direction = np.empty((resolution, 2 * resolution, 3))
    direction[..., 0] = st * np.cos(azim)[None, :]
    direction[..., 1] = st * np.sin(azim)[None, :]
    direction[..., 2] = np.cos(theta)[:, None] * np.ones_like(azim)[None, :]
    angular_weight = st  # the rho^2 factor joins per shell below
    total = 0.0
    for r in rho:  # slice over shells to bound memory
        density = ball_density(r * direction, lam)
        total += r * r * float(np.sum(density * angular_weight))
    return 0.5 * total * drho * dtheta * dazim


@dataclass(frozen=True)
class HopfData:
    """Sampled ball director H∘Ψ_λ∘Φ with its Dirichlet energy."""

    lam: float
    points: np.ndarray
    values: np.ndarray
    boundary: np.ndarray
    energy_ball: float


def ball_data(lam: float, resolution: int = 24,
              energy_resolution: int = 96) -> HopfData:
    """Sample the ball director on a spherical product grid.

    Interior samples sit at midpoint radii; one extra shell at |x| = 1
    carries the boundary limit e exactly (flagged). Requires lam >= 1.
    """
    if lam < 1.0:
        raise DomainError(f"dilation parameter must be >= 1, got {lam!r}")
    rho, _ = _midpoints(resolution, 1.0)
    theta, _ = _midpoints(resolution, math.pi)
    azim, _ = _midpoints(2 * resolution, 2.0 * math.pi)
    st = np.sin(theta)[:, None]
    direction = np.empty((resolution, 2 * resolution, 3))
    direction[..., 0] = st * np.cos(azim)[None, :]
    direction[..., 1] = st * np.sin(azim)[None, :]
    direction[..., 2] = np.cos(theta)[:, None] * np.ones_like(azim)[None, :]
    direction = direction.reshape(-1, 3)
    interior = (rho[:, None, None] * direction[None, :, :]).reshape(-1, 3)
    values = hopf_director(ball_map(interior), lam)
    shell = direction.copy()
    shell_values = np.tile(TARGET, (shell.shape[0], 1))
    points = np.concatenate([interior, shell])
    values = np.concatenate([values, shell_values])
    boundary = np.zeros(points.shape[0], dtype=bool)
    boundary[interior.shape[0]:] = True
    return HopfData(
        lam=lam,
        points=points,
        values=values,
        boundary=boundary,
        energy_ball=ball_dirichlet_energy(lam, energy_resolution),
    )


def sample_velocity(x) -> np.ndarray:
    """A fixed smooth solenoidal field vanishing on the boundary:
    u = (-4y(1-|x|²), 4x(1-|x|²), 0)."""
    x = np.asarray(x, dtype=float)
    bump = 1.0 - np.sum(x * x, axis=-1)
    return np.stack([-4.0 * x[..., 1] * bump, 4.0 * x[..., 0] * bump,
                     np.zeros_like(bump)], axis=-1)


def sample_velocity_l2sq(resolution: int = 64) -> float:
    """∫_{B₁³} |u|² for the sample field, by the same spherical midpoint rule."""
    rho, drho = _midpoints(resolution, 1.0)
    theta, dtheta = _midpoints(resolution, math.pi)
    azim, dazim = _midpoints(2 * resolution, 2.0 * math.pi)
    st = np.sin(theta)[:, None]
    direction = np.empty((resolution, 2 * resolution, 3))
    direction[..., 0] = st * np.cos(azim)[None, :]
    direction[..., 1] = st * np.sin(azim)[None, :]
    direction[..., 2] = np.cos(theta)[:, None] * np.ones_like(azim)[None, :]
    total = 0.0
    for r in rho:
        speed2 = np.sum(sample_velocity(r * direction) ** 2, axis=-1)
        total += r * r * float(np.sum(speed2 * st))
    return total * drho * dtheta * dazim


def total_energy(lam: float, resolution: int = 96) -> float:
    """E(λ⁻¹u, d₀) = ½λ⁻²∫|u|² + ½∫|∇d₀|² for the sample velocity."""
    return 0.5 * sample_velocity_l2sq(min(resolution, 64)) / lam**2 \
        + ball_dirichlet_energy(lam, resolution)


@dataclass(frozen=True)
class CapTestResult:
    """Hemisphere containment certificate for a sampled director."""

    max_distance: float
    nullhomotopic: bool


def cap_test(data, center=TARGET) -> CapTestResult:
    """Max geodesic distance of the samples to ``center``.

    A maximum below π/2 places the image in an open hemisphere, which is
    geodesically contractible — the certificate used to rule out nontrivial
    topology. Accepts a HopfData or a plain (m, 3) array of unit vectors.
    """
    values = data.values if isinstance(data, HopfData) else np.asarray(data, float)
    center = np.asarray(center, dtype=float)
    dots = np.clip(values @ center, -1.0, 1.0)
    max_dist = float(np.max(np.arccos(dots)))
    return CapTestResult(max_distance=max_dist, nullhomotopic=max_dist < math.pi / 2.0)


def write_hopf_csv(entries, path: str) -> None:
    """Energy sweep export: lambda,energy_s3,energy_ball."""
    write_csv(path, ["lambda", "energy_s3", "energy_ball"],
              [(lam, es3, eball) for lam, es3, eball in entries])
