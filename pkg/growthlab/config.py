# growthlab/config.py
"""
Process-wide settings (environment / .env) and the per-run configuration
that CLI flags and JSON config files are merged into.
"""
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Optional

import orjson
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from growthlab.errors import ParameterError
from growthlab.params import CANONICAL_PARAMS, PARAM_NAMES, EconomyParams, Family
from utils.family_names import normalize_family

logger = logging.getLogger(__name__)

# Load env
load_dotenv()


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="GROWTHLAB_", env_file=".env", extra="ignore")

    threads: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1)
    quad_tol: float = Field(default=1e-10, gt=0.0, lt=1e-2)
    quad_max_depth: int = Field(default=40, ge=1, le=200)
    ode_tol: float = Field(default=1e-10, ge=1e-13, le=1e-3)
    # `verify` runs tighter: oracle error grows along the saddle path
    verify_quad_tol: float = Field(default=1e-12, gt=0.0, lt=1e-2)
    verify_ode_tol: float = Field(default=1e-11, ge=1e-13, le=1e-3)
    constraint_slack: float = Field(default=1e-12, ge=0.0)
    sweep_cap: int = Field(default=1_000_000, ge=1)
    log_level: str = "WARNING"


def get_settings() -> Settings:
    return Settings()


# --------------------------
# Key normalization
# --------------------------

_KEY_ALIASES = {
    "σ": "sigma", "ies_inverse": "sigma", "crra": "sigma",
    "ρ": "rho", "discount": "rho", "discount_rate": "rho",
    "β": "beta", "capital_share": "beta", "alpha": "beta",
    "γ": "gamma", "goods_technology": "gamma", "tfp": "gamma",
    "δ": "delta", "education_technology": "delta",
    "π": "pi", "depreciation": "pi",
    "k_0": "k0", "capital0": "k0",
    "z_0": "z0",
    "tmax": "t_max", "t-max": "t_max", "horizon": "t_max",
    "n": "steps", "points": "steps",
    "format": "output_format", "fmt": "output_format",
    "out": "output", "path": "output",
    "quadrature_tol": "quad_tol", "quad-tol": "quad_tol",
    "tol": "ode_tol", "ode-tol": "ode_tol", "integrator_tol": "ode_tol",
}


def normalize_keys(parsed: Dict[str, Any]) -> Dict[str, Any]:
    """
    Lower-case and strip keys, map aliases to canonical names and lift
    the six structural parameters into a nested "params" object.
    """
    if not isinstance(parsed, dict):
        return {}
    out: Dict[str, Any] = {}
    params: Dict[str, Any] = {}
    for raw_key, value in parsed.items():
        key = str(raw_key).strip()
        key = _KEY_ALIASES.get(key, _KEY_ALIASES.get(key.lower(), key.lower()))
        if key == "params" and isinstance(value, dict):
            params.update(normalize_keys(value).get("params", {}))
            continue
        if key in PARAM_NAMES:
            params[key] = value
        else:
            out[key] = value
    if params:
        out["params"] = params
    if "family" in out and isinstance(out["family"], str):
        out["family"] = normalize_family(out["family"]) or out["family"]
    return out


# --------------------------
# Run configuration
# --------------------------

class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    params: EconomyParams
    family: Family = Family.BGP
    k0: float = Field(default=1.0, gt=0.0)
    z0: Optional[float] = Field(default=None, gt=0.0)
    z0_ratio: Optional[float] = Field(default=None, gt=0.0)   # z0 as a multiple of z*
    t_max: float = Field(default=10.0, gt=0.0)
    steps: int = Field(default=11, ge=2)
    grid: Optional[List[float]] = None
    quad_tol: float = Field(default=1e-10, gt=0.0, lt=1e-2)
    ode_tol: float = Field(default=1e-10, ge=1e-13, le=1e-3)
    output_format: str = "csv"
    output: Optional[str] = None

    @field_validator("output_format")
    @classmethod
    def _known_format(cls, v: str) -> str:
        v = v.strip().lower()
        if v not in ("csv", "json", "text"):
            raise ValueError(f"output format {v!r} is not one of csv, json, text")
        return v

    @model_validator(mode="after")
    def _grid_sorted(self) -> "RunConfig":
        if self.grid is not None:
            if len(self.grid) < 2 or any(b <= a for a, b in zip(self.grid, self.grid[1:])):
                raise ValueError("grid must hold at least two strictly increasing times")
            if self.grid[0] < 0.0:
                raise ValueError("grid times must be nonnegative")
        if self.z0 is not None and self.z0_ratio is not None:
            raise ValueError("give z0 or z0_ratio, not both")
        return self

    def times(self) -> List[float]:
        if self.grid is not None:
            return list(self.grid)
        step = self.t_max / (self.steps - 1)
        return [i * step for i in range(self.steps - 1)] + [self.t_max]

    def resolved_z0(self, z_star: float) -> Optional[float]:
        if self.z0 is not None:
            return self.z0
        if self.z0_ratio is not None:
            return self.z0_ratio * z_star
        return None


def read_config_file(path: str) -> Dict[str, Any]:
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise ParameterError(f"cannot read config {path!r}: {e}") from e
    try:
        parsed = orjson.loads(raw)
    except orjson.JSONDecodeError as e:
        raise ParameterError(f"config {path!r} is not valid JSON: {e}") from e
    if not isinstance(parsed, dict):
        raise ParameterError(f"config {path!r} must hold a JSON object")
    return normalize_keys(parsed)


def merge_config(
    file_values: Dict[str, Any],
    flags: Dict[str, Any],
    defaults: Optional[Dict[str, Any]] = None,
) -> RunConfig:
    """Defaults, then file values, then explicit (non-None) flags; flags win."""
    merged = dict(defaults or {})
    params = dict(CANONICAL_PARAMS)
    params.update(merged.pop("params", {}))
    params.update(file_values.get("params", {}))
    merged.update({k: v for k, v in file_values.items() if k != "params"})
    flag_values = normalize_keys({k: v for k, v in flags.items() if v is not None})
    params.update(flag_values.pop("params", {}))
    merged.update(flag_values)
    merged["params"] = params
    try:
        return RunConfig.model_validate(merged)
    except ValueError as e:
        raise ParameterError(f"invalid run configuration: {e}") from e


def load_run_config(
    path: Optional[str],
    flags: Dict[str, Any],
    settings: Optional[Settings] = None,
    for_verify: bool = False,
) -> RunConfig:
    """Settings tolerances sit under the file, which sits under the flags."""
    settings = settings or get_settings()
    file_values = read_config_file(path) if path else {}
    if for_verify:
        defaults = {"quad_tol": settings.verify_quad_tol, "ode_tol": settings.verify_ode_tol}
    else:
        defaults = {"quad_tol": settings.quad_tol, "ode_tol": settings.ode_tol}
    return merge_config(file_values, flags, defaults)
