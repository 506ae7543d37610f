# growthlab/sweep.py
"""
Parameter sweeps: a cartesian grid over any of the six structural
parameters, evaluated point by point in a thread pool, returned in grid order.
"""
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from growthlab.errors import GrowthLabError, ParameterError
from growthlab.params import (
    PARAM_NAMES,
    EconomyParams,
    Family,
    restricted_sigma,
    restricted_sigma_distance,
    steady_state,
    validate_params,
)
from growthlab.verify import compare_families

logger = logging.getLogger(__name__)

OUTPUTS = ("admissibility", "z_star", "u_star", "restricted_sigma", "terminal_u_gap")


class AxisSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    min: Optional[float] = None
    max: Optional[float] = None
    count: Optional[int] = Field(default=None, ge=1)
    values: Optional[List[float]] = None

    @model_validator(mode="after")
    def _one_form(self) -> "AxisSpec":
        ranged = self.min is not None and self.max is not None and self.count is not None
        if ranged == (self.values is not None):
            raise ValueError("an axis takes either {min, max, count} or {values}")
        return self

    def points(self) -> List[float]:
        if self.values is not None:
            return [float(v) for v in self.values]
        return [float(v) for v in np.linspace(self.min, self.max, self.count)]


class SweepSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    base: EconomyParams
    axes: Dict[str, AxisSpec]
    outputs: List[str] = Field(default_factory=lambda: list(OUTPUTS[:4]))
    k0: float = Field(default=1.0, gt=0.0)
    z0_ratio: float = Field(default=0.5, gt=0.0)
    quad_tol: float = Field(default=1e-10, gt=0.0)

    @field_validator("axes")
    @classmethod
    def _known_axes(cls, v: Dict[str, AxisSpec]) -> Dict[str, AxisSpec]:
        unknown = [name for name in v if name not in PARAM_NAMES]
        if unknown:
            raise ValueError(f"unknown sweep axes {unknown}; expected a subset of {list(PARAM_NAMES)}")
        return v

    @field_validator("outputs")
    @classmethod
    def _known_outputs(cls, v: List[str]) -> List[str]:
        unknown = [name for name in v if name not in OUTPUTS]
        if unknown:
            raise ValueError(f"unknown sweep outputs {unknown}; expected a subset of {list(OUTPUTS)}")
        return v

    def size(self) -> int:
        return math.prod(len(axis.points()) for axis in self.axes.values())

    def grid(self) -> List[EconomyParams]:
        names = list(self.axes)
        values = [self.axes[name].points() for name in names]
        return [self.base.replace(**dict(zip(names, combo))) for combo in itertools.product(*values)]


def _terminal_u_gap(p: EconomyParams, spec: SweepSpec) -> float:
    z0 = spec.z0_ratio * steady_state(p).z_star
    comparison = compare_families(p, spec.k0, z0, [0.0, 1.0], tol=spec.quad_tol)
    return comparison.terminal_u_gap


def evaluate_point(p: EconomyParams, spec: SweepSpec) -> Dict[str, Any]:
    row: Dict[str, Any] = {name: getattr(p, name) for name in PARAM_NAMES}
    try:
        admissibility = validate_params(p)
        if "admissibility" in spec.outputs:
            for family, result in admissibility.items():
                row[f"admissible_{family.value}"] = result.satisfied
        ss = steady_state(p) if ("z_star" in spec.outputs or "u_star" in spec.outputs) else None
        if "z_star" in spec.outputs:
            row["z_star"] = ss.z_star
        if "u_star" in spec.outputs:
            row["u_star"] = ss.u_star
        if "restricted_sigma" in spec.outputs:
            value = restricted_sigma(p)
            row["restricted_sigma"] = math.nan if value is None else value
            distance = restricted_sigma_distance(p)
            row["restricted_sigma_distance"] = math.nan if distance is None else distance
        if "terminal_u_gap" in spec.outputs:
            both = admissibility[Family.TWO_INTEGRAL].satisfied and admissibility[Family.ONE_INTEGRAL].satisfied
            row["terminal_u_gap"] = _terminal_u_gap(p, spec) if both else math.nan
        row["error"] = ""
    except GrowthLabError as e:
        row["error"] = str(e)
    return row


def run_sweep(spec: SweepSpec, threads: int = 1, cap: int = 1_000_000) -> List[Dict[str, Any]]:
    size = spec.size()
    if size > cap:
        raise ParameterError(f"sweep grid has {size} points, above the cap of {cap}")
    points = spec.grid()
    logger.info("sweeping %d points on %d threads", size, threads)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        # map yields in submission order whatever the completion order
        return list(pool.map(lambda p: evaluate_point(p, spec), points))


def sweep_header(rows: List[Dict[str, Any]]) -> List[str]:
    header: List[str] = []
    for row in rows:
        for key in row:
            if key not in header:
                header.append(key)
    return header
