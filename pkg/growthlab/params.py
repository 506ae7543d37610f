# growthlab/params.py
"""
Structural parameters of the two-sector (goods / education) growth model,
their admissibility per solution family, and the steady-state quantities
every other module builds on.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from growthlab.errors import (
    AdmissibilityError,
    NonFiniteParameterError,
    SigmaEqualsBetaError,
    SigmaOneError,
)

logger = logging.getLogger(__name__)

DEFAULT_SLACK = 1e-12
PARAM_NAMES = ("sigma", "rho", "beta", "gamma", "delta", "pi")
# default parameter set when neither a config file nor flags give one
CANONICAL_PARAMS = {"sigma": 2.0, "rho": 0.05, "beta": 0.33, "gamma": 1.0, "delta": 0.11, "pi": 0.04}


class Family(str, Enum):
    BGP = "bgp"
    TWO_INTEGRAL = "two-integral"
    ONE_INTEGRAL = "one-integral"


class EconomyParams(BaseModel):
    model_config = ConfigDict(frozen=True, allow_inf_nan=False, extra="forbid")

    sigma: float = Field(description="inverse elasticity of intertemporal substitution")
    rho: float = Field(description="discount rate")
    beta: float = Field(description="output elasticity of physical capital")
    gamma: float = Field(description="goods-sector technology level")
    delta: float = Field(description="education-sector technology level")
    pi: float = Field(description="depreciation rate of physical capital")

    def replace(self, **changes) -> "EconomyParams":
        return EconomyParams(**{**self.model_dump(), **changes})


@dataclass(frozen=True)
class SteadyState:
    z_star: float
    u_star: float
    g_star: float
    eta: float
    z_rate: float    # (1-beta)(delta+pi)/beta, speed of z -> z*
    g_decay: float   # (delta*sigma - delta + rho)/sigma, decay of the G integrand
    bgp_ratio: float  # c/k on the balanced growth path


@dataclass(frozen=True)
class Constraint:
    name: str
    lhs: float
    relation: str
    rhs: float
    satisfied: bool

    def as_dict(self) -> Dict[str, object]:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "relation": self.relation,
            "rhs": self.rhs,
            "satisfied": self.satisfied,
        }


class FamilyAdmissibility(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    family: Family
    satisfied: bool
    violated_constraints: List[Constraint] = Field(default_factory=list)
    checked_constraints: List[Constraint] = Field(default_factory=list)

    def summary(self) -> Dict[str, object]:
        return {
            "family": self.family.value,
            "satisfied": self.satisfied,
            "violated": [c.as_dict() for c in self.violated_constraints],
        }


# --------------------------
# Derived rates
# --------------------------

def eta(p: EconomyParams) -> float:
    """Decay rate of the F integrand; also the BGP consumption/capital ratio."""
    return (p.delta + p.pi - p.pi * p.beta) / p.beta - (p.delta - p.rho) / p.sigma


def z_rate(p: EconomyParams) -> float:
    return (1.0 - p.beta) * (p.delta + p.pi) / p.beta


def g_decay(p: EconomyParams) -> float:
    return (p.delta * p.sigma - p.delta + p.rho) / p.sigma


def exponent_identity_gap(p: EconomyParams) -> float:
    """|eta - g_decay - z_rate|; zero up to rounding for every parameter set."""
    return abs(eta(p) - g_decay(p) - z_rate(p))


# --------------------------
# Validation
# --------------------------

def _strict(name: str, lhs: float, rhs: float, slack: float) -> Constraint:
    # lhs < rhs, with boundary points (within relative slack) counted as violated
    margin = slack * max(abs(lhs), abs(rhs))
    return Constraint(name, lhs, "<", rhs, rhs - lhs > margin)


def _weak(name: str, lhs: float, rhs: float, slack: float) -> Constraint:
    margin = slack * max(abs(lhs), abs(rhs))
    return Constraint(name, lhs, "<=", rhs, lhs <= rhs + margin)


def _reject_hard(p: EconomyParams) -> None:
    for name in PARAM_NAMES:
        value = getattr(p, name)
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            raise NonFiniteParameterError(name, value)
    if math.isclose(p.sigma, 1.0, rel_tol=DEFAULT_SLACK, abs_tol=0.0):
        raise SigmaOneError(p.sigma)
    if math.isclose(p.sigma, p.beta, rel_tol=DEFAULT_SLACK, abs_tol=0.0):
        raise SigmaEqualsBetaError(p.sigma, p.beta)


def base_constraints(p: EconomyParams, slack: float = DEFAULT_SLACK) -> List[Constraint]:
    return [
        _strict("sigma_positive", 0.0, p.sigma, slack),
        _strict("rho_positive", 0.0, p.rho, slack),
        _strict("beta_positive", 0.0, p.beta, slack),
        _strict("beta_below_one", p.beta, 1.0, slack),
        _strict("gamma_positive", 0.0, p.gamma, slack),
        _strict("delta_positive", 0.0, p.delta, slack),
        _weak("pi_nonnegative", 0.0, p.pi, slack),
    ]


def validate_params(
    p: EconomyParams, slack: float = DEFAULT_SLACK
) -> Dict[Family, FamilyAdmissibility]:
    """
    Evaluate every admissibility proviso per family.
    sigma == 1, sigma == beta and non-finite inputs raise instead of being reported.
    """
    _reject_hard(p)

    base = base_constraints(p, slack)
    transversality = _strict("delta_below_rho_plus_delta_sigma", p.delta, p.rho + p.delta * p.sigma, slack)
    # eta divides by beta and sigma; a zero there is already a violated base constraint
    eta_value = eta(p) if p.beta != 0.0 and p.sigma != 0.0 else math.nan
    eta_positive = _strict("eta_positive", 0.0, eta_value, slack)

    per_family = {
        Family.BGP: base + [
            transversality,
            # c0/k0 on the balanced growth path is eta itself
            _strict("bgp_consumption_ratio_positive", 0.0, eta_value, slack),
        ],
        Family.TWO_INTEGRAL: base + [
            _strict("rho_below_delta", p.rho, p.delta, slack),
            transversality,
            eta_positive,
        ],
    }
    per_family[Family.ONE_INTEGRAL] = list(per_family[Family.TWO_INTEGRAL])

    out = {}
    for family, checked in per_family.items():
        violated = [c for c in checked if not c.satisfied]
        out[family] = FamilyAdmissibility(
            family=family,
            satisfied=not violated,
            violated_constraints=violated,
            checked_constraints=checked,
        )
    return out


def require_admissible(
    p: EconomyParams, family: Family, slack: float = DEFAULT_SLACK
) -> FamilyAdmissibility:
    result = validate_params(p, slack)[family]
    if not result.satisfied:
        raise AdmissibilityError(family.value, result.violated_constraints)
    return result


# --------------------------
# Steady state
# --------------------------

def steady_state(p: EconomyParams, slack: float = DEFAULT_SLACK) -> SteadyState:
    """
    Raises AdmissibilityError when a base constraint fails; the formulas
    below need sigma, beta, gamma, delta > 0 and beta < 1.
    """
    _reject_hard(p)
    violated = [c for c in base_constraints(p, slack) if not c.satisfied]
    if violated:
        raise AdmissibilityError(None, violated)
    z_star = (p.beta * p.gamma / (p.delta + p.pi)) ** (1.0 / (p.beta - 1.0))
    u_star = (p.rho - p.delta + p.delta * p.sigma) / (p.delta * p.sigma)
    if u_star > 1.0:
        logger.warning("u*=%.6g exceeds 1; u is a labor fraction in the model", u_star)
    e = eta(p)
    return SteadyState(
        z_star=z_star,
        u_star=u_star,
        g_star=(p.delta - p.rho) / p.sigma,
        eta=e,
        z_rate=z_rate(p),
        g_decay=g_decay(p),
        bgp_ratio=e,
    )


# --------------------------
# Restricted-sigma manifold
# --------------------------

def restricted_sigma(p: EconomyParams) -> Optional[float]:
    """
    The sigma for which a third first integral exists,
    beta(rho+pi)/(2 pi beta - delta + delta beta - pi); p.sigma is ignored.
    None when the denominator is not positive.
    """
    denominator = 2.0 * p.pi * p.beta - p.delta + p.delta * p.beta - p.pi
    if denominator <= 0.0:
        return None
    return p.beta * (p.rho + p.pi) / denominator


def is_on_restricted_manifold(p: EconomyParams, tol: float = 1e-9) -> bool:
    value = restricted_sigma(p)
    if value is None:
        return False
    return abs(p.sigma - value) <= tol * abs(value)


def restricted_sigma_distance(p: EconomyParams) -> Optional[float]:
    value = restricted_sigma(p)
    if value is None:
        return None
    return abs(p.sigma - value) / abs(value)
