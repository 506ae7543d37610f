# utils/quadrature.py
"""
Adaptive quadrature on finite intervals.

`adaptive_gauss_kronrod` is the workhorse: a 7-point Gauss rule embedded in
the 15-point Kronrod extension, with global bisection of the interval that
carries the largest error. `adaptive_simpson` is an independent scheme used
to cross-check it.

Integrands must be vectorized: f(np.ndarray) -> np.ndarray.
"""
import heapq
import math
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from growthlab.errors import QuadratureNonConvergence

Integrand = Callable[[np.ndarray], np.ndarray]

# Kronrod abscissae (positive half, descending) and weights
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
# Gauss weights sit on the odd Kronrod nodes (including the centre)
_WG_HALF = np.zeros(8)
_WG_HALF[[1, 3, 5, 7]] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
]

_NODES = np.concatenate([-_XGK[:7], _XGK[::-1]])
_W_KRONROD = np.concatenate([_WGK[:7], _WGK[::-1]])
_W_GAUSS = np.concatenate([_WG_HALF[:7], _WG_HALF[::-1]])


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int

    def __add__(self, other: "QuadratureResult") -> "QuadratureResult":
        return QuadratureResult(
            self.value + other.value,
            self.abs_error_estimate + other.abs_error_estimate,
            self.evaluations + other.evaluations,
        )


def gauss_kronrod_15(f: Integrand, a: float, b: float) -> Tuple[float, float]:
    """K15 value on [a, b] and |K15 - G7| as its error estimate."""
    centre = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fx = np.asarray(f(centre + half * _NODES), dtype=float)
    kronrod = half * float(np.dot(_W_KRONROD, fx))
    gauss = half * float(np.dot(_W_GAUSS, fx))
    return kronrod, abs(kronrod - gauss)


def adaptive_gauss_kronrod(
    f: Integrand,
    a: float,
    b: float,
    tol: float = 1e-10,
    max_depth: int = 40,
    abs_floor: float = 0.0,
    max_intervals: int = 20_000,
) -> QuadratureResult:
    if b == a:
        return QuadratureResult(0.0, 0.0, 0)
    if b < a:
        flipped = adaptive_gauss_kronrod(f, b, a, tol, max_depth, abs_floor, max_intervals)
        return QuadratureResult(-flipped.value, flipped.abs_error_estimate, flipped.evaluations)

    value, err = gauss_kronrod_15(f, a, b)
    evaluations = 15
    # max-heap on error: (-err, lo, hi, value, err, depth)
    heap = [(-err, a, b, value, err, 0)]
    total, total_err = value, err

    while total_err > max(tol * abs(total), abs_floor):
        _, lo, hi, v, e, depth = heapq.heappop(heap)
        if depth >= max_depth or len(heap) >= max_intervals:
            raise QuadratureNonConvergence(a, b, total_err, tol, max_depth)
        mid = 0.5 * (lo + hi)
        v1, e1 = gauss_kronrod_15(f, lo, mid)
        v2, e2 = gauss_kronrod_15(f, mid, hi)
        evaluations += 30
        heapq.heappush(heap, (-e1, lo, mid, v1, e1, depth + 1))
        heapq.heappush(heap, (-e2, mid, hi, v2, e2, depth + 1))
        total = math.fsum(item[3] for item in heap)
        total_err = math.fsum(item[4] for item in heap)

    return QuadratureResult(total, total_err, evaluations)


def _simpson(a: float, fa: float, b: float, fb: float, fm: float) -> float:
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def adaptive_simpson(
    f: Integrand,
    a: float,
    b: float,
    tol: float = 1e-10,
    max_depth: int = 40,
) -> QuadratureResult:
    """Interval-halving Simpson with Richardson correction; tol is relative."""
    if b == a:
        return QuadratureResult(0.0, 0.0, 0)
    if b < a:
        flipped = adaptive_simpson(f, b, a, tol, max_depth)
        return QuadratureResult(-flipped.value, flipped.abs_error_estimate, flipped.evaluations)

    # coarse composite rule for the magnitude the relative tolerance refers to
    coarse_x = np.linspace(a, b, 33)
    coarse_f = np.asarray(f(coarse_x), dtype=float)
    h = (b - a) / 32.0
    scale = abs(h / 3.0 * (coarse_f[0] + coarse_f[-1]
                           + 4.0 * coarse_f[1:-1:2].sum() + 2.0 * coarse_f[2:-1:2].sum()))
    eps = tol * scale if scale > 0.0 else tol
    evaluations = 33

    fa, fm, fb = (float(v) for v in f(np.array([a, 0.5 * (a + b), b])))
    evaluations += 3
    stack = [(a, b, fa, fm, fb, _simpson(a, fa, b, fb, fm), eps, 0)]
    parts = []
    err_total = 0.0

    while stack:
        lo, hi, flo, fmid, fhi, whole, budget, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        flm, frm = (float(v) for v in f(np.array([0.5 * (lo + mid), 0.5 * (mid + hi)])))
        evaluations += 2
        left = _simpson(lo, flo, mid, fmid, flm)
        right = _simpson(mid, fmid, hi, fhi, frm)
        delta = left + right - whole
        if abs(delta) <= 15.0 * budget:
            parts.append(left + right + delta / 15.0)
            err_total += abs(delta) / 15.0
            continue
        if depth + 1 >= max_depth:
            raise QuadratureNonConvergence(a, b, abs(delta) / 15.0, tol, max_depth)
        stack.append((lo, mid, flo, flm, fmid, left, 0.5 * budget, depth + 1))
        stack.append((mid, hi, fmid, frm, fhi, right, 0.5 * budget, depth + 1))

    return QuadratureResult(math.fsum(parts), err_total, evaluations)
