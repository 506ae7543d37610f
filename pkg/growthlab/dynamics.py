# growthlab/dynamics.py
"""
First-order conditions of the current-value Hamiltonian as an ODE system,
in costate form (k, h, lambda, mu) and primal form (c, k, h, u), plus the
adaptive integrator used as the numeric oracle for the closed forms.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, Optional, Sequence, Union

import numpy as np

from growthlab.errors import NonpositiveState, ParameterError
from growthlab.params import EconomyParams, z_rate
from utils import rk

logger = logging.getLogger(__name__)

DEFAULT_ODE_TOL = 1e-10
TOL_RANGE = (1e-13, 1e-3)
COLUMNS = ("t", "c", "k", "h", "u", "z", "lambda", "mu")


# --------------------------
# State representations
# --------------------------

@dataclass(frozen=True)
class PrimalState:
    c: float
    k: float
    h: float
    u: float

    def as_array(self) -> np.ndarray:
        return np.array([self.c, self.k, self.h, self.u], dtype=float)

    def to_costate(self, p: EconomyParams) -> "CostateState":
        _require_positive(0.0, c=self.c, k=self.k, h=self.h, u=self.u)
        lam = self.c ** (-p.sigma)
        z = self.h * self.u / self.k
        # u^beta = gamma(1-beta) k^beta h^-beta lambda / (delta mu)
        mu = p.gamma * (1.0 - p.beta) * lam / (p.delta * z ** p.beta)
        return CostateState(self.k, self.h, lam, mu)


@dataclass(frozen=True)
class CostateState:
    k: float
    h: float
    lam: float
    mu: float

    def as_array(self) -> np.ndarray:
        return np.array([self.k, self.h, self.lam, self.mu], dtype=float)

    def to_primal(self, p: EconomyParams) -> PrimalState:
        _require_positive(0.0, k=self.k, h=self.h, lam=self.lam, mu=self.mu)
        c = self.lam ** (-1.0 / p.sigma)
        z = (p.gamma * (1.0 - p.beta) * self.lam / (p.delta * self.mu)) ** (1.0 / p.beta)
        return PrimalState(c, self.k, self.h, z * self.k / self.h)


StateVector = Union[PrimalState, CostateState]


def _require_positive(t: float, **components: float) -> None:
    bad = {name: v for name, v in components.items() if not (np.isfinite(v) and v > 0.0)}
    if bad:
        detail = ", ".join(f"{name}={v!r}" for name, v in bad.items())
        raise NonpositiveState(t, detail)


# --------------------------
# Right-hand sides
# --------------------------

def output(p: EconomyParams, k, h, u):
    """Goods-sector production gamma k^beta (u h)^(1-beta)."""
    return p.gamma * k ** p.beta * (u * h) ** (1.0 - p.beta)


def growth_rates(p: EconomyParams, c, k, h, u) -> np.ndarray:
    """(c'/c, k'/k, h'/h, u'/u); works elementwise on arrays."""
    w = (h * u / k) ** (1.0 - p.beta)
    return np.array([
        (p.beta * p.gamma * w - p.rho - p.pi) / p.sigma,
        p.gamma * w - p.pi - c / k,
        p.delta * (1.0 - u),
        z_rate(p) - c / k + p.delta * u,
    ])


def rhs_costate(p: EconomyParams, t: float, state: Sequence[float]) -> np.ndarray:
    """(k', h', lambda', mu') with c and u eliminated through the first-order conditions."""
    k, h, lam, mu = (float(v) for v in state)
    _require_positive(t, k=k, h=h, lam=lam, mu=mu)
    c = lam ** (-1.0 / p.sigma)
    u = (p.gamma * (1.0 - p.beta) * lam / (p.delta * mu)) ** (1.0 / p.beta) * k / h
    marginal = p.beta * p.gamma * u ** (1.0 - p.beta) * k ** (p.beta - 1.0) * h ** (1.0 - p.beta)
    return np.array([
        output(p, k, h, u) - p.pi * k - c,
        p.delta * (1.0 - u) * h,
        lam * (p.rho + p.pi - marginal),
        mu * (p.rho - p.delta),
    ])


def rhs_primal(p: EconomyParams, t: float, state: Sequence[float]) -> np.ndarray:
    c, k, h, u = (float(v) for v in state)
    _require_positive(t, c=c, k=k, h=h, u=u)
    return np.array([c, k, h, u]) * growth_rates(p, c, k, h, u)


# --------------------------
# Trajectory
# --------------------------

@dataclass
class IntegratorStats:
    steps: int = 0
    rejections: int = 0
    max_error: float = 0.0
    evaluations: int = 0
    u_excursions: int = 0

    def as_dict(self) -> Dict[str, float]:
        return {
            "steps": self.steps,
            "rejections": self.rejections,
            "max_error": self.max_error,
            "evaluations": self.evaluations,
            "u_excursions": self.u_excursions,
        }


@dataclass
class Trajectory:
    params: EconomyParams
    t: np.ndarray
    c: np.ndarray
    k: np.ndarray
    h: np.ndarray
    u: np.ndarray
    provenance: str
    lam: Optional[np.ndarray] = None
    mu: Optional[np.ndarray] = None
    stats: Optional[IntegratorStats] = None
    interpolant: Optional[Callable[[np.ndarray], "Trajectory"]] = field(default=None, repr=False)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        if self.t.size > 1 and np.any(np.diff(self.t) <= 0.0):
            raise ValueError("trajectory time grid must be strictly increasing")
        if self.lam is None:
            self.lam = self.c ** (-self.params.sigma)
        if self.mu is None:
            p = self.params
            self.mu = p.gamma * (1.0 - p.beta) * self.lam / (p.delta * self.z ** p.beta)

    @property
    def z(self) -> np.ndarray:
        return self.h * self.u / self.k

    def __len__(self) -> int:
        return int(self.t.size)

    def column(self, name: str) -> np.ndarray:
        if name == "lambda":
            return self.lam
        return getattr(self, name)

    def columns(self) -> Dict[str, np.ndarray]:
        return {name: self.column(name) for name in COLUMNS}

    def rows(self) -> Iterator[tuple]:
        cols = [self.column(name) for name in COLUMNS]
        for i in range(len(self)):
            yield tuple(float(col[i]) for col in cols)

    def state_at(self, i: int) -> PrimalState:
        return PrimalState(float(self.c[i]), float(self.k[i]), float(self.h[i]), float(self.u[i]))

    def evaluate(self, times: Sequence[float]) -> "Trajectory":
        """Values at arbitrary times inside the grid (dense output)."""
        if self.interpolant is None:
            raise ValueError(f"trajectory {self.provenance!r} carries no dense output")
        return self.interpolant(np.atleast_1d(np.asarray(times, dtype=float)))


# --------------------------
# Integration
# --------------------------

def _log_rhs(p: EconomyParams):
    def f(t: float, y: np.ndarray) -> np.ndarray:
        if not np.all(np.isfinite(y)):
            raise NonpositiveState(t, "log-state is not finite")
        c, k, h, u = np.exp(y)
        if not (np.all(np.isfinite([c, k, h, u])) and min(c, k, h, u) > 0.0):
            raise NonpositiveState(t, f"c={c!r}, k={k!r}, h={h!r}, u={u!r}")
        return growth_rates(p, c, k, h, u)

    return f


def _as_primal(p: EconomyParams, initial: StateVector) -> PrimalState:
    if isinstance(initial, CostateState):
        return initial.to_primal(p)
    _require_positive(0.0, c=initial.c, k=initial.k, h=initial.h, u=initial.u)
    return initial


def integrate(
    p: EconomyParams,
    initial: StateVector,
    t_max: float,
    tol: float = DEFAULT_ODE_TOL,
    times: Optional[Sequence[float]] = None,
    steps: int = 101,
    fixed_step: Optional[float] = None,
) -> Trajectory:
    """
    Integrate the primal system in logarithms of (c, k, h, u) from t=0.
    The error per step is absolute in the logs, i.e. relative in the state.
    """
    if not (TOL_RANGE[0] <= tol <= TOL_RANGE[1]):
        raise ParameterError(f"integrator tol={tol!r} outside [{TOL_RANGE[0]:.0e}, {TOL_RANGE[1]:.0e}]")
    if not t_max > 0.0:
        raise ParameterError(f"t_max={t_max!r} must be positive")
    grid = np.linspace(0.0, t_max, steps) if times is None else np.asarray(times, dtype=float)
    if grid.size < 1 or grid[0] < 0.0 or np.any(np.diff(grid) <= 0.0) or grid[-1] > t_max:
        raise ParameterError("output times must be increasing and inside [0, t_max]")

    start = _as_primal(p, initial)
    sol = rk.solve(
        _log_rhs(p),
        0.0,
        np.log(start.as_array()),
        t_max,
        tol=tol,
        t_eval=grid,
        max_step=t_max / 10.0,
        fixed_step=fixed_step,
        # a trial stage that overflows is a rejected step; persistent failure ends in StepUnderflow
        reject_on=(NonpositiveState,),
    )

    stats = IntegratorStats(
        steps=sol.stats.steps,
        rejections=sol.stats.rejections,
        max_error=sol.stats.max_error,
        evaluations=sol.stats.evaluations,
    )

    def build(at: np.ndarray, provenance: str = "numeric") -> Trajectory:
        values = np.exp(sol.dense(at))
        return Trajectory(
            params=p,
            t=at,
            c=values[:, 0],
            k=values[:, 1],
            h=values[:, 2],
            u=values[:, 3],
            provenance=provenance,
            stats=stats,
            interpolant=build,
        )

    # output times are step endpoints, so this picks accepted values exactly
    idx = np.searchsorted(sol.t, grid)
    values = np.exp(sol.y[idx])
    excursions = int(np.count_nonzero(np.exp(sol.y[:, 3]) >= 1.0))
    stats.u_excursions = excursions
    if excursions:
        logger.warning("u left (0, 1) at %d accepted steps; u is not clamped", excursions)
    logger.info(
        "integrated to t=%.6g: %d steps, %d rejections, max local error %.3e",
        t_max, stats.steps, stats.rejections, stats.max_error,
    )
    return Trajectory(
        params=p,
        t=grid,
        c=values[:, 0],
        k=values[:, 1],
        h=values[:, 2],
        u=values[:, 3],
        provenance="numeric",
        stats=stats,
        interpolant=build,
    )
