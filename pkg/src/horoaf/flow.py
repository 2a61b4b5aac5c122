"""The homothety flow Sigma_t = e^{-t} Sigma_0 and its monotone quantity P.

In the ball model the support function flow dX/dt = -p xi coincides, up to
tangential reparametrisation, with the Euclidean homothety of ratio e^{-t}.
All tracked quantities are parametrisation invariant, so the flow is
realised by exact rescaling of a frame evaluated once at t = 0.
"""

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import Degenerate, NonUniformGrid
from .functionals import normalized_P, summarize
from .hyperbolic import lift_frame
from .surface import evaluate, scale_frame, spec_to_dict

CSV_HEADER = ("t", "s", "area", "calI", "P", "rho_sq_integral", "min_lambda")


def worker_count():
    try:
        return max(1, int(os.environ.get("HOROAF_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True, eq=False)
class FlowTrace:
    t: np.ndarray
    s: np.ndarray
    area: np.ndarray
    calI: np.ndarray
    P: np.ndarray
    rho_sq_integral: np.ndarray
    min_lambda: np.ndarray
    Q: float
    n: int
    spec: object = None

    def rows(self):
        cols = [getattr(self, c) for c in CSV_HEADER]
        return [tuple(float(c[i]) for c in cols) for i in range(len(self.t))]

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in self.rows():
            writer.writerow([repr(v) for v in row])
        return buf.getvalue()

    def to_dict(self):
        out = {c: [float(v) for v in getattr(self, c)] for c in CSV_HEADER}
        out.update(Q=self.Q, n=self.n)
        if self.spec is not None:
            out["surface"] = spec_to_dict(self.spec)
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _sample(frame, t):
    s = float(np.exp(-t))
    summary = summarize(scale_frame(frame, s)) if s < 1 else summarize(frame)
    return s, summary


def trace_frame(frame, t_values, spec=None):
    """FlowTrace of an already evaluated frame along ``t_values``."""
    t = np.asarray(t_values, dtype=float)
    if t.ndim != 1 or len(t) == 0 or np.any(t < 0) or np.any(np.diff(t) <= 0):
        raise ValueError("t_values must be a non-empty increasing sequence of t >= 0")
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        samples = list(pool.map(lambda ti: _sample(frame, ti), t))
    summaries = [sm for _, sm in samples]
    return FlowTrace(
        t=t,
        s=np.array([s for s, _ in samples]),
        area=np.array([sm.area for sm in summaries]),
        calI=np.array([sm.calI for sm in summaries]),
        P=np.array([sm.P for sm in summaries]),
        rho_sq_integral=np.array([sm.rho_sq_integral for sm in summaries]),
        min_lambda=np.array([sm.min_lambda for sm in summaries]),
        Q=summarize(frame).Q,
        n=frame.n,
        spec=spec,
    )


def trace_flow(spec, grid, t_values):
    """Evaluate ``spec`` on ``grid`` and follow it along the homothety flow."""
    return trace_frame(evaluate(spec, grid), t_values, spec)


def default_times(t_max=8.0, dt=0.05):
    steps = int(round(t_max / dt))
    return dt * np.arange(steps + 1)


def evolution_residuals(trace):
    """Relative residuals of d|S|/dt = -(n-1) I and dI/dt = |S| - n int rho^2.

    Central differences at every interior time; returns an array of shape
    (len(t) - 2, 3) with columns (t, area residual, I residual).
    """
    t = trace.t
    if len(t) < 3:
        raise NonUniformGrid("need at least three time samples")
    dt = np.diff(t)
    if np.max(np.abs(dt - dt[0])) > 1e-9 * max(1.0, abs(dt[0])):
        raise NonUniformGrid("time samples must be uniformly spaced")
    h = dt[0]
    n = trace.n
    dA = (trace.area[2:] - trace.area[:-2]) / (2 * h)
    dI = (trace.calI[2:] - trace.calI[:-2]) / (2 * h)
    rhs_A = -(n - 1) * trace.calI[1:-1]
    rhs_I = trace.area[1:-1] - n * trace.rho_sq_integral[1:-1]
    return np.column_stack([t[1:-1], np.abs(dA - rhs_A) / np.abs(rhs_A), np.abs(dI - rhs_I) / np.abs(rhs_I)])


def P_at_scale(frame, s):
    """P of the frame scaled by s.

    I^2 - |S|^2 is formed as (I - |S|)(I + |S|) with I - |S| = int (rho - 1),
    and rho - 1 = 2|x|^2 / (1 - |x|^2), so no cancellation occurs as s -> 0.
    """
    if not s > 0:
        raise ValueError(f"scale must be positive, got {s!r}")
    scaled = scale_frame(frame, s)
    with np.errstate(over="ignore"):
        # curvature products may overflow for tiny s; only areas are used here
        h = lift_frame(scaled)
    area = float(np.sum(h.area_element))
    rm1 = float(np.sum(h.rho_minus_one * h.area_element))
    if not (area > 0 and rm1 > 0):
        raise Degenerate(f"scale {s:g} underflows the area integrals")
    return normalized_P(area, rm1, frame.n)


def limit_P_to_Q(spec, grid, T, frame=None):
    """(P(Sigma_T), Q(Sigma_0), |gap|) along the homothety flow."""
    if T < 0:
        raise ValueError("T must be >= 0")
    frame = evaluate(spec, grid) if frame is None else frame
    P = P_at_scale(frame, float(np.exp(-T)))
    Q = summarize(frame).Q
    return P, Q, abs(P - Q)
