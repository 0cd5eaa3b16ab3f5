"""Closed-form barrier profiles for the drifted radial heat flow.

Two families bracket solutions of

    N[phi] := phi_t + r*phi_r - phi_rr - phi_r/r + sin(2*phi)/(2*r**2) = 0:

* ``supersolution``: the static profiles ``+/- 2*arctan(r/c)`` annihilate the
  undrifted operator exactly, so their full residual reduces to the drift term
  ``2*r*c/(c**2 + r**2)``, which has a sign. Solutions starting below such a
  profile stay below it.

* ``subsolution_eval``: the shrinking-core profile

      f(r, t) = 2*arctan(r / (e^t * beta(t))) + theta(r, t),
      theta(r, t) = 2*arctan(r**a / (e^{a t} * mu)),   a = 1 + eps,

  where beta solves beta' = -delta * e^{-2t} * beta**eps. Under the parameter
  constraints enforced by :meth:`BarrierParams.validate`, N[f] <= 0, so
  solutions starting above f stay above it while f's origin slope
  2/(e^t beta(t)) diverges at the finite time :func:`blowup_time` — forcing
  gradient blow-up of the solution itself.

The beta equation has the closed form

    beta**(1-eps) = delta*(1-eps)/2 * (e^{-2t} - 1) + beta0**(1-eps),

vanishing at T0 = 0.5*log(delta*(1-eps) / (delta*(1-eps) - 2*beta0**(1-eps))).

All evaluations here are closed-form (no differencing); the residual uses the
exact algebraic identities for f_t + r*f_r and for the undrifted operator
applied to a sum of arctan profiles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .csvio import write_csv
from .errors import ConstraintViolation, DomainError


def m_eps(eps: float) -> float:
    """sup over s > 0 of s**(2-eps) / (1 + s**2), attained at s = sqrt((2-eps)/eps).

    Defined for 0 < eps < 2; m_eps(1) = 1/2.
    """
    if not 0.0 < eps < 2.0:
        raise DomainError(f"m_eps needs 0 < eps < 2, got {eps!r}")
    s2 = (2.0 - eps) / eps  # square of the maximizer
    return s2 ** ((2.0 - eps) / 2.0) / (1.0 + s2)


@dataclass(frozen=True)
class BarrierParams:
    """Subsolution parameters (eps, mu, delta, beta0, phi1).

    ``eps`` sets the slow-profile exponent a = 1 + eps, ``mu`` its amplitude
    scale, ``delta`` the core shrinking rate, ``beta0`` the initial core
    width, and ``phi1`` the boundary value of compatible initial data.
    """

    eps: float
    mu: float
    delta: float
    beta0: float
    phi1: float

    def validate(self) -> None:
        """Raise ConstraintViolation naming the first broken admissibility condition."""
        if not 0.0 < self.eps < 1.0:
            raise ConstraintViolation(f"exponent range: need 0 < eps < 1, got {self.eps!r}")
        if self.mu <= 0.0 or self.delta <= 0.0 or self.beta0 <= 0.0:
            raise ConstraintViolation(
                "positivity: mu, delta, beta0 must all be positive, got "
                f"mu={self.mu!r}, delta={self.delta!r}, beta0={self.beta0!r}"
            )
        lhs = 2.0 * self.beta0 ** (1.0 - self.eps)
        rhs = self.delta * (1.0 - self.eps)
        if not lhs < rhs:
            raise ConstraintViolation(
                "shrinking-rate hypothesis: need 2*beta0**(1-eps) < delta*(1-eps), "
                f"got {lhs:.6g} >= {rhs:.6g}"
            )
        bound = self.mu * self.eps / (m_eps(self.eps) * (self.mu**2 + 1.0))
        if self.delta > bound:
            raise ConstraintViolation(
                "drift-domination bound: need delta <= mu*eps/(M(eps)*(mu^2+1)) "
                f"= {bound:.6g}, got delta={self.delta:.6g}"
            )
        wedge = 2.0 * math.atan(1.0 / self.mu)
        cap = min(self.phi1 - math.pi, math.acos(1.0 / (1.0 + self.eps)))
        if wedge > cap:
            raise ConstraintViolation(
                "wedge compatibility: need 2*arctan(1/mu) <= "
                "min(phi1 - pi, arccos(1/(1+eps))), "
                f"got {wedge:.6g} > {cap:.6g}"
            )


def default_params() -> BarrierParams:
    """The validated default parameter set.

    eps = 1/2 and mu = 20 are fixed; delta sits exactly on its admissible
    bound (capped at 1); beta0 is the largest dyadic 2**-k satisfying the
    shrinking-rate hypothesis with a factor-2 margin; phi1 = pi + 1/2.
    """
    eps, mu = 0.5, 20.0
    delta = min(1.0, mu * eps / (m_eps(eps) * (mu**2 + 1.0)))
    target = 0.5 * delta * (1.0 - eps)
    k = 1
    while 2.0 * (2.0**-k) ** (1.0 - eps) >= target:
        k += 1
    params = BarrierParams(eps=eps, mu=mu, delta=delta, beta0=2.0**-k, phi1=math.pi + 0.5)
    params.validate()
    return params


def blowup_time(params: BarrierParams) -> float:
    """The time T0 at which the closed-form beta(t) reaches zero."""
    num = params.delta * (1.0 - params.eps)
    den = num - 2.0 * params.beta0 ** (1.0 - params.eps)
    if den <= 0.0:
        raise ConstraintViolation(
            "shrinking-rate hypothesis: need 2*beta0**(1-eps) < delta*(1-eps); "
            "the core width never vanishes"
        )
    return 0.5 * math.log(num / den)


def beta_closed_form(t, params: BarrierParams):
    """Core width beta(t) on [0, T0]; errors beyond the vanishing time."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0.0):
        raise DomainError("beta(t) is defined for t >= 0")
    power = (
        0.5 * params.delta * (1.0 - params.eps) * (np.expm1(-2.0 * t_arr))
        + params.beta0 ** (1.0 - params.eps)
    )
    if np.any(power < 0.0):
        raise DomainError(
            f"beta(t) vanishes at T0={blowup_time(params):.6g}; requested t beyond it"
        )
    out = power ** (1.0 / (1.0 - params.eps))
    return float(out) if np.isscalar(t) else out


def beta_ode_rhs(t: float, beta: float, params: BarrierParams) -> float:
    """Right-hand side of beta' = -delta * e^{-2t} * beta**eps (clipped at 0)."""
    return -params.delta * math.exp(-2.0 * t) * max(beta, 0.0) ** params.eps


def integrate_beta_rk4(params: BarrierParams, t_end: float, dt: float):
    """Classic fixed-step RK4 for the beta equation; returns (t, beta) arrays.

    Integration stops early (truncating the arrays) if beta would become
    negative, which happens just past the vanishing time T0.
    """
    if dt <= 0.0 or t_end <= 0.0:
        raise ValueError("need positive dt and t_end")
    nsteps = int(math.ceil(t_end / dt - 1e-12))
    ts = [0.0]
    bs = [params.beta0]
    b = params.beta0
    for k in range(nsteps):
        t = k * dt
        h = min(dt, t_end - t)
        k1 = beta_ode_rhs(t, b, params)
        k2 = beta_ode_rhs(t + 0.5 * h, b + 0.5 * h * k1, params)
        k3 = beta_ode_rhs(t + 0.5 * h, b + 0.5 * h * k2, params)
        k4 = beta_ode_rhs(t + h, b + h * k3, params)
        b_new = b + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.isfinite(b_new) or b_new <= 0.0:
            break
        b = b_new
        ts.append(t + h)
        bs.append(b)
    return np.asarray(ts), np.asarray(bs)


def supersolution(r, c: float, sign: int = 1):
    """Static comparison profile sign * 2 * arctan(r / c), c > 0, sign in {-1, +1}."""
    if c <= 0.0:
        raise ValueError(f"supersolution scale c must be positive, got {c!r}")
    if sign not in (-1, 1):
        raise ValueError(f"sign must be -1 or +1, got {sign!r}")
    return sign * 2.0 * np.arctan(np.asarray(r, dtype=float) / c)


def supersolution_residual(r, c: float):
    """Evolution residual N[2*arctan(r/c)] = 2*r*c/(c**2 + r**2) (exact).

    The static part of the operator annihilates the profile, leaving only the
    drift term r * phi_r; the positive sign is what makes the +profile an
    upper barrier (and the -profile a lower one).
    """
    r = np.asarray(r, dtype=float)
    return 2.0 * r * c / (c**2 + r**2)


def theta_profile(r, t: float, params: BarrierParams):
    """Slow outer profile 2*arctan(r**a / (e^{a t} * mu)) with a = 1 + eps."""
    a = 1.0 + params.eps
    r = np.asarray(r, dtype=float)
    return 2.0 * np.arctan(r**a / (math.exp(a * t) * params.mu))


@dataclass(frozen=True)
class SubsolutionEval:
    """Pointwise subsolution data: value f, radial slope f_r, residual N[f]."""

    r: np.ndarray = field(repr=False)
    t: float
    value: np.ndarray = field(repr=False)
    f_r: np.ndarray = field(repr=False)
    residual: np.ndarray = field(repr=False)


def subsolution_origin_slope(t, params: BarrierParams):
    """Origin gradient f_r(0, t) = 2 / (e^t * beta(t)) — the blow-up envelope."""
    return 2.0 / (np.exp(np.asarray(t, dtype=float)) * beta_closed_form(t, params))


def subsolution_eval(r, t: float, params: BarrierParams,
                     validate: bool = True) -> SubsolutionEval:
    """Evaluate the subsolution and its residual at radii ``r`` and time ``t``.

    The residual is assembled from exact identities: the drift side
    f_t + r*f_r = 2*delta*r*e^{-t}*beta**eps / (e^{2t} beta**2 + r**2), and the
    static side (1/r**2) * sin(theta) * (a**2 cos(theta) - cos(2*phi + theta)),
    where phi is the fast arctan core. Entries at r = 0 are pinned to
    value 0, slope 2/(e^t beta), residual 0 (the profile is odd in r; the
    residual is meaningful only for r > 0).

    With ``validate=True`` the parameter constraints are checked first; pass
    ``validate=False`` to probe inadmissible parameter sets, for which the
    sign guarantee residual <= 0 no longer holds.
    """
    if validate:
        params.validate()
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r < 0.0) or np.any(r > 1.0):
        raise DomainError("subsolution radii must lie in [0, 1]")
    beta = beta_closed_form(float(t), params)
    if beta == 0.0:
        raise DomainError("subsolution undefined at the core-vanishing time T0")
    a = 1.0 + params.eps
    et = math.exp(float(t))
    eat = math.exp(a * float(t))
    core = 2.0 * np.arctan(r / (et * beta))
    theta = 2.0 * np.arctan(r**a / (eat * params.mu))
    value = core + theta

    denom_core = (et * beta) ** 2 + r**2
    f_r = 2.0 * beta * et / denom_core
    with np.errstate(divide="ignore", invalid="ignore"):
        f_r = f_r + 2.0 * a * params.mu * r ** (a - 1.0) * eat / (
            (params.mu * eat) ** 2 + r ** (2.0 * a)
        )
        drift = 2.0 * params.delta * r * math.exp(-float(t)) * beta**params.eps / denom_core
        static = np.sin(theta) * (a**2 * np.cos(theta) - np.cos(2.0 * core + theta)) / r**2
        residual = drift - static
    origin = r == 0.0
    f_r[origin] = 2.0 / (et * beta)
    value[origin] = 0.0
    residual[origin] = 0.0
    return SubsolutionEval(r=r, t=float(t), value=value, f_r=f_r, residual=residual)


def make_blowup_initial_data(params: BarrierParams, grid) -> np.ndarray:
    """Initial profile 2*arctan(r/beta0) + c*r dominating the subsolution at t=0.

    The linear coefficient c = phi1 - 2*arctan(1/beta0) tilts the arctan core
    up to the boundary value phi1 > pi. Raises ConstraintViolation if the
    profile fails to dominate the subsolution anywhere on the mesh.
    """
    params.validate()
    r = grid.nodes
    c = params.phi1 - 2.0 * math.atan(1.0 / params.beta0)
    phi0 = 2.0 * np.arctan(r / params.beta0) + c * r
    phi0[0] = 0.0
    f0 = subsolution_eval(r, 0.0, params).value
    margin = phi0 - f0
    if margin.min() < 0.0:
        worst = int(np.argmin(margin))
        raise ConstraintViolation(
            "blow-up initial data fails to dominate the subsolution at "
            f"r={r[worst]:.6g} (margin {margin[worst]:.3g})"
        )
    return phi0


def write_barrier_csv(params: BarrierParams, rs, ts, path: str) -> None:
    """Tabulate f, f_r and the residual over the product of ``rs`` and ``ts``."""
    rows = []
    for t in np.asarray(ts, dtype=float):
        ev = subsolution_eval(rs, float(t), params)
        for j in range(len(ev.r)):
            rows.append(
                (float(ev.r[j]), float(t), float(ev.value[j]),
                 float(ev.f_r[j]), float(ev.residual[j]))
            )
    write_csv(path, ["r", "t", "f", "f_r", "residual"], rows)
