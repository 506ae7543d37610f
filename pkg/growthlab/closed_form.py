# growthlab/closed_form.py
"""
Family-consistent initial conditions and the closed-form solutions.

Three families are evaluated:
  - BGP: z0 = z*, every stock grows at g* = (delta - rho)/sigma.
  - TwoIntegral: built from both first integrals, u from I2 = 0.
  - OneIntegral: built from I1 alone, u from the linear equation for 1/u.

For z0 != z* the capital stock is written with the scaled tail
S_F(t) = e^(eta t)(F_inf - F(t)) instead of F_inf - F(t), so nothing
cancels or underflows at large t.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Protocol, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from growthlab.dynamics import Trajectory
from growthlab.errors import (
    DegenerateLimits,
    DenominatorUnderflow,
    NegativeU0,
    SingularBracket,
)
from growthlab.params import (
    DEFAULT_SLACK,
    EconomyParams,
    Family,
    SteadyState,
    require_admissible,
    steady_state,
)
from growthlab.zpath import (
    DEFAULT_QUAD_TOL,
    ZPath,
    f_infinity,
    f_integral,
    f_tail,
    g_infinity,
    g_integral,
    g_tail,
    integration_constant_c2,
    z_at,
)

logger = logging.getLogger(__name__)

OVERRIDE_WARN = 1e-8
BRACKET_EPS = 1e-12


class PinnedInitials(BaseModel):
    model_config = ConfigDict(frozen=True)

    family: Family
    k0: float
    z0: float
    c0: float
    u0: float
    h0: float
    c1: float
    a3: float                      # k-integration constant; transversality forces a3 = F_inf
    f_inf: Optional[float] = None
    g_inf: Optional[float] = None
    c0_override_distance: float = 0.0
    quad_tol: float = DEFAULT_QUAD_TOL


@dataclass(frozen=True)
class SolutionPoint:
    t: float
    c: float
    k: float
    h: float
    u: float
    z: float
    lam: float
    mu: float

    def as_dict(self) -> dict:
        return {
            "t": self.t, "c": self.c, "k": self.k, "h": self.h, "u": self.u,
            "z": self.z, "lambda": self.lam, "mu": self.mu,
        }


class Evaluable(Protocol):
    params: EconomyParams
    steady: SteadyState

    def evaluate(self, t: float) -> SolutionPoint:
        ...


def _trajectory(source: Evaluable, times: Sequence[float], provenance: str) -> Trajectory:
    times = np.atleast_1d(np.asarray(times, dtype=float))
    points = [source.evaluate(float(t)) for t in times]

    def col(name: str) -> np.ndarray:
        return np.array([getattr(pt, name) for pt in points])

    return Trajectory(
        params=source.params,
        t=times,
        c=col("c"),
        k=col("k"),
        h=col("h"),
        u=col("u"),
        lam=col("lam"),
        mu=col("mu"),
        provenance=provenance,
        interpolant=lambda at: _trajectory(source, at, provenance),
    )


@dataclass(frozen=True)
class SolutionFamily:
    tag: Family
    params: EconomyParams
    pinned: PinnedInitials
    steady: SteadyState
    path: ZPath

    def __post_init__(self):
        if self.pinned.family != self.tag:
            raise ValueError(f"pinned initials belong to {self.pinned.family.value}, not {self.tag.value}")

    def evaluate(self, t: float) -> SolutionPoint:
        if self.tag == Family.BGP:
            return eval_bgp(self, t)
        if self.tag == Family.TWO_INTEGRAL:
            return eval_two_integral(self, t)
        return eval_one_integral(self, t)

    def trajectory(self, times: Sequence[float]) -> Trajectory:
        return _trajectory(self, times, self.tag.value)


@dataclass(frozen=True)
class SingleIntegralBGP:
    """The z = z* solution built from I1 alone, with a free constant a2."""

    family: SolutionFamily
    a2: float

    @property
    def params(self) -> EconomyParams:
        return self.family.params

    @property
    def steady(self) -> SteadyState:
        return self.family.steady

    def evaluate(self, t: float) -> SolutionPoint:
        return eval_scenarioI_via_I1(self.family, t, self.a2)

    def trajectory(self, times: Sequence[float]) -> Trajectory:
        return _trajectory(self, times, f"bgp-via-I1(a2={self.a2:g})")


# --------------------------
# Shared pieces
# --------------------------

def _c1(p: EconomyParams, c0: float, z0: float) -> float:
    return (1.0 - p.beta) * p.gamma / p.delta * c0 ** (-p.sigma) * z0 ** (-p.beta)


def _coefficients(p: EconomyParams):
    """(A', B, D) of the I2 bracket: rho+pi-pi*sigma, beta*gamma*(1-sigma), (1-beta)gamma(rho-delta+delta*sigma)/delta."""
    a_prime = p.rho + p.pi - p.pi * p.sigma
    b = p.beta * p.gamma * (1.0 - p.sigma)
    d = (1.0 - p.beta) * p.gamma / p.delta * (p.rho - p.delta + p.delta * p.sigma)
    return a_prime, b, d


def _bracket0(p: EconomyParams, k0: float, z0: float, c0: float):
    a_prime, b, _ = _coefficients(p)
    terms = (
        p.sigma * c0 * z0 ** (p.beta - 1.0),
        -a_prime * k0 * z0 ** (p.beta - 1.0),
        b * k0,
    )
    return math.fsum(terms), sum(abs(x) for x in terms)


def _pinned_c0(p: EconomyParams, k0: float, z0: float, f_inf: float) -> float:
    # transversality of k: a3 = F_inf
    return k0 * z0 ** ((p.sigma - p.beta) / p.sigma) / f_inf


def _check_positive_inputs(k0: float, z0: Optional[float] = None) -> None:
    if not (k0 > 0.0 and math.isfinite(k0)):
        raise ValueError(f"k0={k0!r} must be positive and finite")
    if z0 is not None and not (z0 > 0.0 and math.isfinite(z0)):
        raise ValueError(f"z0={z0!r} must be positive and finite")


# --------------------------
# Pinning
# --------------------------

def pin_bgp(p: EconomyParams, k0: float, slack: float = DEFAULT_SLACK) -> SolutionFamily:
    _check_positive_inputs(k0)
    require_admissible(p, Family.BGP, slack)
    ss = steady_state(p)
    c0 = ss.bgp_ratio * k0
    h0 = ss.z_star * k0 / ss.u_star
    pinned = PinnedInitials(
        family=Family.BGP,
        k0=k0,
        z0=ss.z_star,
        c0=c0,
        u0=ss.u_star,
        h0=h0,
        c1=_c1(p, c0, ss.z_star),
        a3=ss.z_star ** ((p.sigma - p.beta) / p.sigma) / ss.eta,
    )
    logger.info("pinned bgp: c0=%.12g u0=%.12g h0=%.12g", c0, ss.u_star, h0)
    return SolutionFamily(Family.BGP, p, pinned, ss, ZPath.from_params(p))


def pin_two_integral(
    p: EconomyParams,
    k0: float,
    z0: float,
    c0: Optional[float] = None,
    enforce_transversality: bool = True,
    tol: float = DEFAULT_QUAD_TOL,
    slack: float = DEFAULT_SLACK,
) -> SolutionFamily:
    """
    c0 comes from the transversality limit of k; a supplied c0 is checked
    against it and overridden unless enforce_transversality is False.
    u0 then solves the consistency equation
        D = (u0/k0) [sigma c0 z0^(b-1) - A' k0 z0^(b-1) + B k0].
    """
    _check_positive_inputs(k0, z0)
    require_admissible(p, Family.TWO_INTEGRAL, slack)
    ss = steady_state(p)
    path = ZPath.from_params(p, z0)
    f_inf = f_infinity(path, tol).value
    pinned_c0 = _pinned_c0(p, k0, z0, f_inf)

    override = 0.0
    if c0 is None:
        c0 = pinned_c0
    else:
        override = abs(c0 - pinned_c0) / pinned_c0
        if enforce_transversality:
            if override > OVERRIDE_WARN:
                logger.warning(
                    "c0=%.12g overridden by the transversality value %.12g (relative distance %.3e)",
                    c0, pinned_c0, override,
                )
            c0 = pinned_c0
        elif override > OVERRIDE_WARN:
            logger.warning("c0=%.12g kept; it misses the transversality value by %.3e", c0, override)

    bracket, scale = _bracket0(p, k0, z0, c0)
    if abs(bracket) <= BRACKET_EPS * scale:
        raise SingularBracket(
            f"consistency bracket sigma c0 z0^(beta-1) - (rho+pi-pi sigma) k0 z0^(beta-1) "
            f"+ beta gamma (1-sigma) k0 = {bracket:.3e} vanishes (c0={c0:.12g}, z0={z0:.12g})"
        )
    _, _, d = _coefficients(p)
    u0 = d * k0 / bracket
    if not u0 > 0.0:
        raise NegativeU0(u0)

    pinned = PinnedInitials(
        family=Family.TWO_INTEGRAL,
        k0=k0,
        z0=z0,
        c0=c0,
        u0=u0,
        h0=z0 * k0 / u0,
        c1=_c1(p, c0, z0),
        a3=f_inf if c0 == pinned_c0 else k0 * z0 ** ((p.sigma - p.beta) / p.sigma) / c0,
        f_inf=f_inf,
        c0_override_distance=override,
        quad_tol=tol,
    )
    logger.info("pinned two-integral: c0=%.12g u0=%.12g h0=%.12g F_inf=%.12g", c0, u0, pinned.h0, f_inf)
    return SolutionFamily(Family.TWO_INTEGRAL, p, pinned, ss, path)


def pin_one_integral(
    p: EconomyParams,
    k0: float,
    z0: float,
    tol: float = DEFAULT_QUAD_TOL,
    slack: float = DEFAULT_SLACK,
) -> SolutionFamily:
    _check_positive_inputs(k0, z0)
    require_admissible(p, Family.ONE_INTEGRAL, slack)
    ss = steady_state(p)
    path = ZPath.from_params(p, z0)
    f_inf = f_infinity(path, tol).value
    g_inf = g_infinity(path, tol).value
    if not g_inf > f_inf:
        raise DegenerateLimits(f"G_inf={g_inf:.12g} does not exceed F_inf={f_inf:.12g}")

    c0 = _pinned_c0(p, k0, z0, f_inf)
    u0 = ss.z_rate * f_inf / (p.delta * (g_inf - f_inf))
    if not u0 > 0.0:
        raise NegativeU0(u0)
    pinned = PinnedInitials(
        family=Family.ONE_INTEGRAL,
        k0=k0,
        z0=z0,
        c0=c0,
        u0=u0,
        h0=z0 * k0 / u0,
        c1=_c1(p, c0, z0),
        a3=f_inf,
        f_inf=f_inf,
        g_inf=g_inf,
        quad_tol=tol,
    )
    logger.info("pinned one-integral: c0=%.12g u0=%.12g h0=%.12g G_inf/F_inf=%.12g", c0, u0, pinned.h0, g_inf / f_inf)
    return SolutionFamily(Family.ONE_INTEGRAL, p, pinned, ss, path)


def pin_family(
    p: EconomyParams,
    family: Family,
    k0: float,
    z0: Optional[float] = None,
    tol: float = DEFAULT_QUAD_TOL,
    slack: float = DEFAULT_SLACK,
) -> SolutionFamily:
    if family == Family.BGP:
        return pin_bgp(p, k0, slack)
    if z0 is None:
        z0 = steady_state(p).z_star
    if family == Family.TWO_INTEGRAL:
        return pin_two_integral(p, k0, z0, tol=tol, slack=slack)
    return pin_one_integral(p, k0, z0, tol=tol, slack=slack)


# --------------------------
# Evaluation
# --------------------------

def _common(fam: SolutionFamily, t: float):
    """z, c, lambda, mu and the growth factor q e^(g* t) shared by the z != z* families."""
    p, pin = fam.params, fam.pinned
    if t < 0.0:
        raise ValueError(f"t={t!r} must be nonnegative")
    z = z_at(fam.path, t)
    q = pin.c0 * pin.z0 ** (p.beta / p.sigma)
    scale = q * math.exp(fam.steady.g_star * t)
    c = scale * z ** (-p.beta / p.sigma)
    lam = c ** (-p.sigma)
    mu = pin.c1 * math.exp((p.rho - p.delta) * t)
    return z, c, lam, mu, scale


def _k_factor(fam: SolutionFamily, t: float, tol: Optional[float]) -> float:
    """S_F(t) + e^(eta t)(a3 - F_inf); the second term vanishes on the saddle path."""
    pin = fam.pinned
    tol = pin.quad_tol if tol is None else tol
    factor = f_tail(fam.path, t, tol).value
    if pin.f_inf is not None and pin.a3 != pin.f_inf:
        factor += math.exp(fam.steady.eta * t) * (pin.a3 - pin.f_inf)
    return factor


def eval_bgp(fam: SolutionFamily, t: float) -> SolutionPoint:
    p, pin, ss = fam.params, fam.pinned, fam.steady
    growth = math.exp(ss.g_star * t)
    decay = math.exp((p.rho - p.delta) * t)
    return SolutionPoint(
        t=t,
        c=pin.c0 * growth,
        k=pin.k0 * growth,
        h=pin.h0 * growth,
        u=ss.u_star,
        z=ss.z_star,
        lam=pin.c0 ** (-p.sigma) * decay,
        mu=pin.c1 * decay,
    )


def eval_two_integral(fam: SolutionFamily, t: float, tol: Optional[float] = None) -> SolutionPoint:
    p, pin = fam.params, fam.pinned
    z, c, lam, mu, scale = _common(fam, t)
    s_f = _k_factor(fam, t, tol)
    k = s_f * scale / z

    a_prime, b, _ = _coefficients(p)
    bracket0, _ = _bracket0(p, pin.k0, pin.z0, pin.c0)
    head = p.sigma * z ** (p.beta - p.beta / p.sigma)
    body = (b - a_prime * z ** (p.beta - 1.0)) * s_f
    denominator = head + body
    if abs(denominator) <= BRACKET_EPS * (abs(head) + abs(body)) or not math.isfinite(denominator):
        raise DenominatorUnderflow(f"two-integral u denominator {denominator:.3e} at t={t:.6g}")
    u = (pin.u0 / pin.k0) * bracket0 * s_f / denominator
    h = pin.h0 * scale / (pin.z0 * bracket0) * denominator
    return SolutionPoint(t=t, c=c, k=k, h=h, u=u, z=z, lam=lam, mu=mu)


def eval_one_integral(fam: SolutionFamily, t: float, tol: Optional[float] = None) -> SolutionPoint:
    p, pin, ss = fam.params, fam.pinned, fam.steady
    tol = pin.quad_tol if tol is None else tol
    z, c, lam, mu, scale = _common(fam, t)
    s_f = _k_factor(fam, t, tol)
    s_g = g_tail(fam.path, t, tol).value
    k = s_f * scale / z

    spread = p.delta * pin.u0 * s_g - p.delta * pin.u0 * s_f
    if not spread > 0.0:
        raise DenominatorUnderflow(f"one-integral u denominator {spread:.3e} at t={t:.6g}")
    u = ss.z_rate * pin.u0 * s_f / spread
    h = spread * scale / (ss.z_rate * pin.u0)
    return SolutionPoint(t=t, c=c, k=k, h=h, u=u, z=z, lam=lam, mu=mu)


def eval_scenarioI_via_I1(fam: SolutionFamily, t: float, a2: float) -> SolutionPoint:
    """
    z = z* solution built from I1 alone:
        u = r / (a2 r e^(-r t) - delta),  r = (delta - rho - delta sigma)/sigma,
        h = (a2 r e^(-r t) - delta)/r * z* k0 e^(g* t).
    a2 = 0 gives the balanced growth path.
    """
    if fam.tag != Family.BGP:
        raise ValueError("the single-integral z = z* solution needs a bgp-pinned family")
    base = eval_bgp(fam, t)
    if a2 == 0.0:
        return base
    p, ss = fam.params, fam.steady
    r = (p.delta - p.rho - p.delta * p.sigma) / p.sigma
    denominator = a2 * r * math.exp(-r * t) - p.delta
    # u and h are positive only while the denominator has the sign of r
    if not math.isfinite(denominator) or denominator * r <= 0.0:
        raise DenominatorUnderflow(
            f"u denominator a2 r e^(-rt) - delta = {denominator!r} at t={t:.6g} leaves u nonpositive (r={r:.6g})"
        )
    u = r / denominator
    h = denominator / r * ss.z_star * base.k
    return SolutionPoint(t=t, c=base.c, k=base.k, h=h, u=u, z=base.z, lam=base.lam, mu=base.mu)


def eval_lambda_bernoulli(fam: SolutionFamily, t: float) -> float:
    """
    lambda from the Bernoulli equation it satisfies once u is eliminated:
        lambda = [X e^(-(rho-delta)(1-b)t/b) + c2 e^(-(1-b)(rho+pi)t/b)]^(b/(b-1)),
        X = b gamma^(1/b)/(delta+pi) ((1-b)/(c1 delta))^((1-b)/b).
    """
    p, pin = fam.params, fam.pinned
    b = p.beta
    x = b * p.gamma ** (1.0 / b) / (p.delta + p.pi) * ((1.0 - b) / (pin.c1 * p.delta)) ** ((1.0 - b) / b)
    c2 = integration_constant_c2(fam.path, pin.c1) if fam.tag != Family.BGP else 0.0
    inner = (
        x * math.exp(-(p.rho - p.delta) * (1.0 - b) * t / b)
        + c2 * math.exp(-(1.0 - b) * (p.rho + p.pi) * t / b)
    )
    if not inner > 0.0:
        raise DenominatorUnderflow(f"Bernoulli bracket {inner:.3e} is not positive at t={t:.6g}")
    return inner ** (b / (b - 1.0))


def eval_u_general(fam: SolutionFamily, t: float, u0: float, tol: Optional[float] = None) -> float:
    """
    Labor share for an arbitrary starting value u0:
        u = A u0 (K - F) / ([(A + delta u0) K - delta u0 G] e^(-A t) - delta u0 (K - F)),
    K = F_inf. Only the pinned u0 keeps the denominator away from zero for all t.
    """
    if fam.tag == Family.BGP:
        raise ValueError("the general labor-share solution needs a z != z* family")
    p, pin, ss = fam.params, fam.pinned, fam.steady
    tol = pin.quad_tol if tol is None else tol
    a = ss.z_rate
    big_k = pin.a3
    f_t = f_integral(fam.path, t, tol).value
    g_t = g_integral(fam.path, t, tol).value
    remaining = big_k - f_t
    denominator = ((a + p.delta * u0) * big_k - p.delta * u0 * g_t) * math.exp(-a * t) - p.delta * u0 * remaining
    scale = abs((a + p.delta * u0) * big_k) * math.exp(-a * t) + abs(p.delta * u0 * remaining)
    if abs(denominator) <= BRACKET_EPS * scale:
        raise DenominatorUnderflow(f"general u denominator {denominator:.3e} at t={t:.6g} (u0={u0:.6g})")
    return a * u0 * remaining / denominator
