# growthlab/zpath.py
"""
The transition ratio z = hu/k, the integrals F(t), G(t) over its power
z^((sigma-beta)/sigma), their limits at infinity, and the scaled tails
the closed forms are evaluated with.
"""
import logging
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Optional

import numpy as np

from growthlab.errors import DegenerateBracket
from growthlab.params import EconomyParams, g_decay, steady_state
from utils.quadrature import QuadratureResult, adaptive_gauss_kronrod

logger = logging.getLogger(__name__)

DEFAULT_QUAD_TOL = 1e-10
DEFAULT_MAX_DEPTH = 40
Z_CLOSENESS = 1e-12  # relative distance to z* at the truncation time


@dataclass(frozen=True)
class ZPath:
    params: EconomyParams
    z0: float
    z_star: float
    z_rate: float   # (1-beta)(delta+pi)/beta
    eta: float
    g_decay: float

    @classmethod
    def from_params(cls, p: EconomyParams, z0: Optional[float] = None) -> "ZPath":
        ss = steady_state(p)
        z0 = ss.z_star if z0 is None else float(z0)
        if not (z0 > 0.0 and math.isfinite(z0)):
            raise DegenerateBracket(f"z0={z0!r} must be positive and finite")
        return cls(
            params=p,
            z0=z0,
            z_star=ss.z_star,
            z_rate=ss.z_rate,
            eta=ss.eta,
            g_decay=g_decay(p),
        )

    @property
    def exponent(self) -> float:
        """Power (sigma-beta)/sigma that z carries inside F and G."""
        return (self.params.sigma - self.params.beta) / self.params.sigma

    def shifted(self, t: float) -> "ZPath":
        """The same path restarted at time t, i.e. s -> z(t + s)."""
        return replace(self, z0=float(z_at(self, t)))

    def __call__(self, t):
        return z_at(self, t)


# --------------------------
# z(t)
# --------------------------

def z_at(path: ZPath, t):
    """
    z(t) = z* z0 / [(z*^(1-b) - z0^(1-b)) e^(-A t) + z0^(1-b)]^(1/(1-b)).
    Accepts a scalar or an array of times.
    """
    one_minus_beta = 1.0 - path.params.beta
    zs_pow = path.z_star ** one_minus_beta
    z0_pow = path.z0 ** one_minus_beta
    t_arr = np.asarray(t, dtype=float)
    bracket = (zs_pow - z0_pow) * np.exp(-path.z_rate * t_arr) + z0_pow
    if np.any(~(bracket > 0.0)):
        bad = float(np.min(bracket))
        raise DegenerateBracket(
            f"z-path bracket (z*^(1-beta)-z0^(1-beta))e^(-At)+z0^(1-beta) reached {bad:.6g} "
            f"(z0={path.z0:.6g}, z*={path.z_star:.6g})"
        )
    z = path.z_star * path.z0 / bracket ** (1.0 / one_minus_beta)
    if np.ndim(z) == 0:
        return float(z)
    return z


def _integrand(path: ZPath, rate: float):
    power = path.exponent

    def f(s: np.ndarray) -> np.ndarray:
        return z_at(path, s) ** power * np.exp(-rate * s)

    return f


# --------------------------
# F, G on [0, t]
# --------------------------

def _finite_integral(path: ZPath, rate: float, t: float, tol: float, max_depth: int) -> QuadratureResult:
    if t < 0.0:
        raise ValueError(f"t={t!r} must be nonnegative")
    return adaptive_gauss_kronrod(_integrand(path, rate), 0.0, float(t), tol=tol, max_depth=max_depth)


def f_integral(
    path: ZPath, t: float, tol: float = DEFAULT_QUAD_TOL, max_depth: int = DEFAULT_MAX_DEPTH
) -> QuadratureResult:
    """F(t) = int_0^t z(s)^((sigma-beta)/sigma) e^(-eta s) ds."""
    return _finite_integral(path, path.eta, t, tol, max_depth)


def g_integral(
    path: ZPath, t: float, tol: float = DEFAULT_QUAD_TOL, max_depth: int = DEFAULT_MAX_DEPTH
) -> QuadratureResult:
    """G(t): as F(t) with decay rate (delta*sigma - delta + rho)/sigma."""
    return _finite_integral(path, path.g_decay, t, tol, max_depth)


# --------------------------
# Limits at infinity
# --------------------------

def truncation_time(path: ZPath, rate: float, tol: float) -> float:
    """
    T* = max(t_z, t_e): z is within Z_CLOSENESS of z* after t_z and
    e^(-rate t_e) = tol.
    """
    one_minus_beta = 1.0 - path.params.beta
    z0_pow = path.z0 ** one_minus_beta
    deviation = abs(path.z_star ** one_minus_beta - z0_pow) / z0_pow
    t_z = 0.0
    if deviation > 0.0:
        t_z = max(0.0, math.log(deviation / (one_minus_beta * Z_CLOSENESS)) / path.z_rate)
    t_e = math.log(1.0 / tol) / rate
    return max(t_z, t_e)


@lru_cache(maxsize=4096)
def _improper_integral(
    path: ZPath, rate: float, tol: float, max_depth: int, horizon_scale: float
) -> QuadratureResult:
    if not rate > 0.0:
        raise ValueError(f"decay rate {rate!r} must be positive for the improper integral")
    horizon = horizon_scale * truncation_time(path, rate, tol)
    body = adaptive_gauss_kronrod(_integrand(path, rate), 0.0, horizon, tol=tol, max_depth=max_depth)
    z_end = z_at(path, horizon)
    tail = z_end ** path.exponent * math.exp(-rate * horizon) / rate
    # tail assumes z frozen at z(T*); its error is bounded by the z drift after T*
    tail_err = tail * abs(1.0 - (path.z_star / z_end) ** path.exponent)
    logger.debug("improper integral rate=%.6g truncated at T*=%.6g, tail=%.3e", rate, horizon, tail)
    return QuadratureResult(
        body.value + tail,
        body.abs_error_estimate + tail_err,
        body.evaluations + 1,
    )


def f_infinity(
    path: ZPath,
    tol: float = DEFAULT_QUAD_TOL,
    max_depth: int = DEFAULT_MAX_DEPTH,
    horizon_scale: float = 1.0,
) -> QuadratureResult:
    return _improper_integral(path, path.eta, tol, max_depth, horizon_scale)


def g_infinity(
    path: ZPath,
    tol: float = DEFAULT_QUAD_TOL,
    max_depth: int = DEFAULT_MAX_DEPTH,
    horizon_scale: float = 1.0,
) -> QuadratureResult:
    return _improper_integral(path, path.g_decay, tol, max_depth, horizon_scale)


# --------------------------
# Scaled tails
# --------------------------

def f_tail(
    path: ZPath, t: float, tol: float = DEFAULT_QUAD_TOL, max_depth: int = DEFAULT_MAX_DEPTH
) -> QuadratureResult:
    """
    e^(eta t) (F_inf - F(t)) = int_0^inf z(t+r)^p e^(-eta r) dr.
    Computed on the restarted path, so it neither cancels nor underflows at large t.
    """
    if t == 0.0:
        return f_infinity(path, tol, max_depth)
    return f_infinity(path.shifted(t), tol, max_depth)


def g_tail(
    path: ZPath, t: float, tol: float = DEFAULT_QUAD_TOL, max_depth: int = DEFAULT_MAX_DEPTH
) -> QuadratureResult:
    if t == 0.0:
        return g_infinity(path, tol, max_depth)
    return g_infinity(path.shifted(t), tol, max_depth)


# --------------------------
# Integration constant of the Bernoulli equation for lambda
# --------------------------

def integration_constant_c2(path: ZPath, c1: float) -> float:
    """
    c2 = (z0^(beta-1) - z*^(beta-1)) ((1-beta) gamma / (c1 delta))^((1-beta)/beta).
    Zero exactly when z0 == z*.
    """
    p = path.params
    scale = ((1.0 - p.beta) * p.gamma / (c1 * p.delta)) ** ((1.0 - p.beta) / p.beta)
    return (path.z0 ** (p.beta - 1.0) - path.z_star ** (p.beta - 1.0)) * scale
