# utils/rk.py
"""
Dormand-Prince 5(4) driver with step rejection, exact landing on output
times and cubic Hermite dense output between accepted steps.
"""
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple, Type

import numpy as np

from growthlab.errors import StepUnderflow

RHS = Callable[[float, np.ndarray], np.ndarray]


class DormandPrince54:
    """Seven stages, FSAL; 5th order propagation with a 4th order embedded estimate."""

    order = 5
    stages = 7

    eval_stages = np.array([0.0, 1/5, 3/10, 4/5, 8/9, 1.0, 1.0])

    # butcher table rows, stage i+1 built from stages 0..i
    BT = {
        0: [1/5],
        1: [3/40, 9/40],
        2: [44/45, -56/15, 32/9],
        3: [19372/6561, -25360/2187, 64448/6561, -212/729],
        4: [9017/3168, -355/33, 46732/5247, 49/176, -5103/18656],
        5: [35/384, 0.0, 500/1113, 125/192, -2187/6784, 11/84],
    }

    # 5th order weights (equal to the last BT row, hence FSAL)
    B5 = np.array([35/384, 0.0, 500/1113, 125/192, -2187/6784, 11/84, 0.0])
    B4 = np.array([5179/57600, 0.0, 7571/16695, 393/640, -92097/339200, 187/2100, 1/40])
    TR = B5 - B4

    def step(self, fun: RHS, t: float, y: np.ndarray, f0: np.ndarray, h: float):
        """One trial step; returns (y_new, f_new, local error vector)."""
        k = np.empty((self.stages, y.size))
        k[0] = f0
        for i, row in self.BT.items():
            yi = y + h * np.dot(row, k[: i + 1])
            k[i + 1] = fun(t + self.eval_stages[i + 1] * h, yi)
        y_new = y + h * np.dot(self.B5, k)
        # k[6] was evaluated at y_new, reused as f0 of the next step
        return y_new, k[6], h * np.dot(self.TR, k)


@dataclass
class StepStats:
    steps: int = 0
    rejections: int = 0
    max_error: float = 0.0
    evaluations: int = 0


@dataclass(frozen=True)
class RKSolution:
    t: np.ndarray        # accepted step endpoints, t[0] = t0
    y: np.ndarray        # shape (len(t), dim)
    dydt: np.ndarray     # derivative at each accepted point (for dense output)
    stats: StepStats

    def dense(self, times: Sequence[float]) -> np.ndarray:
        """Cubic Hermite interpolation between accepted steps."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        if times.size and (times.min() < self.t[0] or times.max() > self.t[-1]):
            raise ValueError(
                f"requested times outside [{self.t[0]:.6g}, {self.t[-1]:.6g}]"
            )
        idx = np.clip(np.searchsorted(self.t, times, side="right") - 1, 0, len(self.t) - 2)
        t0, t1 = self.t[idx], self.t[idx + 1]
        h = (t1 - t0)[:, None]
        s = ((times - t0) / (t1 - t0))[:, None]
        y0, y1 = self.y[idx], self.y[idx + 1]
        d0, d1 = self.dydt[idx], self.dydt[idx + 1]
        h00 = 2 * s**3 - 3 * s**2 + 1
        h10 = s**3 - 2 * s**2 + s
        h01 = -2 * s**3 + 3 * s**2
        h11 = s**3 - s**2
        return h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1


def solve(
    fun: RHS,
    t0: float,
    y0: Sequence[float],
    t_end: float,
    tol: float = 1e-10,
    t_eval: Optional[Sequence[float]] = None,
    first_step: float = 1e-3,
    max_step: Optional[float] = None,
    fixed_step: Optional[float] = None,
    reject_on: Tuple[Type[BaseException], ...] = (),
) -> RKSolution:
    """
    Integrate y' = fun(t, y) from t0 to t_end.

    Error control is absolute, per component, against `tol` (callers that
    want relative control integrate logarithms). Steps are shortened so
    that every time in t_eval is hit exactly. With `fixed_step` there is
    no error control and every trial step is accepted.

    An exception of a `reject_on` type raised inside a trial step rejects
    that step and shrinks h; it still propagates from the initial
    evaluation and in fixed-step mode.
    """
    scheme = DormandPrince54()
    y = np.asarray(y0, dtype=float).copy()
    t = float(t0)
    span = float(t_end) - t
    if span <= 0.0:
        raise ValueError(f"t_end={t_end!r} must exceed t0={t0!r}")
    max_step = span / 10.0 if max_step is None else float(max_step)

    stops = sorted({float(s) for s in (t_eval if t_eval is not None else ()) if t0 < s <= t_end} | {float(t_end)})
    stats = StepStats()
    f = np.asarray(fun(t, y), dtype=float)
    stats.evaluations += 1

    ts, ys, ds = [t], [y.copy()], [f.copy()]
    h = float(fixed_step) if fixed_step is not None else min(first_step, max_step)

    for stop in stops:
        while t < stop:
            # land exactly on the next output time
            h_try = min(h, stop - t)
            if stop - (t + h_try) < 1e-12 * max(1.0, abs(stop)):
                h_try = stop - t
            if h_try < 1e-14 * max(1.0, abs(t)):
                raise StepUnderflow(t, h_try)

            try:
                y_new, f_new, err_vec = scheme.step(fun, t, y, f, h_try)
            except reject_on:
                if fixed_step is not None:
                    raise
                y_new = f_new = err_vec = None
            stats.evaluations += 6

            if y_new is None:
                err = np.inf
            elif fixed_step is not None:
                err = 0.0
            elif np.all(np.isfinite(y_new)) and np.all(np.isfinite(err_vec)):
                err = float(np.max(np.abs(err_vec))) / tol
            else:
                err = np.inf

            if err <= 1.0:
                t = stop if h_try == stop - t else t + h_try
                y, f = y_new, np.asarray(f_new, dtype=float)
                ts.append(t)
                ys.append(y.copy())
                ds.append(f.copy())
                stats.steps += 1
                stats.max_error = max(stats.max_error, err * tol)
                if fixed_step is None:
                    factor = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** (-0.2)))
                    proposed = h_try * factor
                    if h_try < h:
                        # step was cut short to land on an output time
                        proposed = max(proposed, h)
                    h = min(max_step, proposed)
            else:
                stats.rejections += 1
                factor = 0.2 if not np.isfinite(err) else max(0.2, 0.9 * err ** (-0.2))
                h = h_try * factor

    return RKSolution(np.array(ts), np.vstack(ys), np.vstack(ds), stats)
