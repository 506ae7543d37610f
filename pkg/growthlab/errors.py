# growthlab/errors.py
from typing import Any, Optional


class GrowthLabError(Exception):
    """Base class; `exit_code` is what the CLI returns when this escapes a command."""

    exit_code = 1


# --------------------------
# Parameter / admissibility
# --------------------------

class ParameterError(GrowthLabError):
    exit_code = 1


class NonFiniteParameterError(ParameterError):
    def __init__(self, name: str, value: Any):
        super().__init__(f"parameter {name!r} must be finite, got {value!r}")
        self.name = name
        self.value = value


class SigmaOneError(ParameterError):
    def __init__(self, sigma: float):
        super().__init__(
            f"sigma={sigma!r}: the utility (c^(1-sigma)-1)/(1-sigma) requires sigma != 1"
        )
        self.sigma = sigma


class SigmaEqualsBetaError(ParameterError):
    def __init__(self, sigma: float, beta: float):
        super().__init__(
            f"sigma={sigma!r} equals beta={beta!r}: closed forms cannot be obtained "
            "for sigma == beta"
        )
        self.sigma = sigma
        self.beta = beta


class AdmissibilityError(ParameterError):
    def __init__(self, family: Optional[str], violated: list):
        names = ", ".join(
            f"{v.name} ({v.lhs:.6g} {v.relation} {v.rhs:.6g} fails)" for v in violated
        )
        if family is None:
            super().__init__(f"parameters violate the base constraints of the model: {names}")
        else:
            super().__init__(f"parameters are not admissible for family {family!r}: {names}")
        self.family = family
        self.violated = violated


# --------------------------
# Numerical failures
# --------------------------

class NumericalError(GrowthLabError):
    exit_code = 3


class QuadratureNonConvergence(NumericalError):
    def __init__(self, a: float, b: float, error: float, tol: float, max_depth: int):
        super().__init__(
            f"quadrature on [{a:.6g}, {b:.6g}] did not reach rel tol {tol:.1e} "
            f"(error estimate {error:.3e}) within depth {max_depth}"
        )
        self.error = error


class DegenerateBracket(NumericalError):
    """The bracket in the closed-form z(t) became non-positive."""


class SingularBracket(NumericalError):
    """Consistency-equation bracket of the two-integral pinning vanished."""


class NegativeU0(NumericalError):
    def __init__(self, u0: float):
        super().__init__(f"pinned initial labor share u0={u0:.6g} is not positive")
        self.u0 = u0


class DegenerateLimits(NumericalError):
    """G_inf <= F_inf; cannot happen for admissible parameters."""


class DenominatorUnderflow(NumericalError):
    """A closed-form denominator reached zero or lost all significance."""


class StepUnderflow(NumericalError):
    def __init__(self, t: float, h: float):
        super().__init__(f"step size {h:.3e} underflowed at t={t:.6g}")
        self.t = t
        self.h = h


class NonpositiveState(NumericalError):
    def __init__(self, t: float, detail: str = ""):
        msg = f"state left the positive orthant at t={t:.6g}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.t = t


class GridTooCoarse(NumericalError):
    """Differencing error dominates the residual (Richardson check)."""


# --------------------------
# Verification
# --------------------------

class VerificationFailed(GrowthLabError):
    exit_code = 2

    def __init__(self, failed: list, report: Optional[Any] = None):
        super().__init__("verification failed: " + ", ".join(failed))
        self.failed = failed
        self.report = report
