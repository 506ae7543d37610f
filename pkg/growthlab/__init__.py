# growthlab/__init__.py
"""Closed-form solution families of the two-sector endogenous growth model."""
from growthlab.closed_form import PinnedInitials, SolutionFamily, pin_family
from growthlab.dynamics import PrimalState, Trajectory, integrate
from growthlab.errors import GrowthLabError
from growthlab.params import EconomyParams, Family, steady_state, validate_params

__all__ = [
    "EconomyParams",
    "Family",
    "GrowthLabError",
    "PinnedInitials",
    "PrimalState",
    "SolutionFamily",
    "Trajectory",
    "integrate",
    "pin_family",
    "steady_state",
    "validate_params",
]
