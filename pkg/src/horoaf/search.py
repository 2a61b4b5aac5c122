"""Constructive counterexample: an h-convex surface in H^3 with P < 1.

Pipeline: minimise the scale-invariant Euclidean functional Q over a
family of strictly convex bodies, fit the best body inside the unit ball,
then follow the homothety flow until the surface is horospherically convex
and P has dropped below 1 (it decreases to Q).  Every field of the
resulting certificate is re-evaluated at twice the resolution.
"""

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import __version__, analytic
from .errors import BudgetExhausted, CertificateUnstable, HoroafError, NoFeasiblePoint
from .flow import P_at_scale
from .functionals import normalized_Q
from .hyperbolic import lift_frame
from .sphere_grid import build_grid
from .surface import (
    CenteredEllipsoid,
    GeodesicSphere,
    SmoothedSimplex,
    evaluate,
    rescale_spec,
    scale_frame,
    spec_from_dict,
    spec_to_dict,
)

MARGIN = 1e-3
T_STEP = 0.05
T_MAX = 20.0
BALL_FIT = 0.9


@dataclass(frozen=True)
class SearchFamily:
    """A parametric shape family with a box of admissible parameters."""

    name: str
    build: object  # callable: params -> SurfaceSpec
    initial: tuple
    lower: tuple
    upper: tuple
    steps: tuple


def smoothed_simplex_family(n=3, p_max=8.0, eps_min=0.02, weights=True):
    """Smoothed regular simplex with free (p, eps) and optional per-vertex weights.

    The box keeps the rounding well resolved by grids of resolution ~96.
    """
    V = analytic.regular_simplex(n)

    def build(x):
        p, eps, *w = x
        W = V * np.asarray(w)[:, None] if w else V
        return SmoothedSimplex(n, tuple(map(tuple, W)), p=float(p), eps=float(eps), scale=1.0)

    k = n + 1 if weights else 0
    return SearchFamily(
        "smoothed_simplex",
        build,
        initial=(4.0, 0.1) + (1.0,) * k,
        lower=(3.0, eps_min) + (0.6,) * k,
        upper=(p_max, 0.5) + (1.4,) * k,
        steps=(1.0, 0.05) + (0.1,) * k,
    )


def smoothed_triangle_family(p_max=300.0, eps_min=1e-4):
    """Equilateral smoothed triangle in R^2 with free (p, eps)."""
    V = analytic.regular_simplex(2)
    return SearchFamily(
        "smoothed_triangle",
        lambda x: SmoothedSimplex(2, tuple(map(tuple, V)), p=float(x[0]), eps=float(x[1]), scale=1.0),
        initial=(8.0, 0.05),
        lower=(3.0, eps_min),
        upper=(p_max, 0.5),
        steps=(20.0, 0.02),
    )


def ellipsoid_family(n=3):
    """Centered ellipsoid with every semi-axis free, starting from the unit sphere."""
    return SearchFamily(
        "ellipsoid",
        lambda x: CenteredEllipsoid(n, tuple(float(a) for a in x)),
        initial=(1.0,) * n,
        lower=(0.2,) * n,
        upper=(2.0,) * n,
        steps=(0.2,) * n,
    )


def geodesic_sphere_family(n=3):
    return SearchFamily(
        "geodesic_sphere",
        lambda x: GeodesicSphere(n, float(x[0])),
        initial=(1.0,),
        lower=(0.1,),
        upper=(3.0,),
        steps=(0.3,),
    )


def euclidean_Q(spec, grid):
    """Q of a spec, ignoring the unit-ball constraint (Q is scale invariant)."""
    F = evaluate(spec, grid, check_ball=False)
    x2 = np.sum(F.x * F.x, axis=1)
    return normalized_Q(float(np.sum(F.area_element)), float(np.sum(x2 * F.area_element)), F.n)


def minimize_Q(family, grid, budget=400, initial=None):
    """Nelder-Mead search for small Q over ``family``'s parameter box.

    Infeasible parameters score +inf.  Returns (best parameters, best Q,
    number of objective evaluations).
    """
    if budget < 50:
        raise ValueError("budget must be at least 50 evaluations")
    lo, hi = np.array(family.lower), np.array(family.upper)
    x0 = np.clip(np.array(family.initial if initial is None else initial, dtype=float), lo, hi)
    cache = {}
    best = [None, np.inf]

    def objective(x):
        x = np.clip(x, lo, hi)
        key = tuple(x.tolist())
        if key not in cache:
            try:
                q = euclidean_Q(family.build(x), grid)
            except (HoroafError, ValueError):
                q = np.inf
            cache[key] = q
            if q < best[1]:
                best[:] = [x.copy(), q]
        return cache[key]

    simplex = [x0]
    for i, step in enumerate(family.steps):
        v = x0.copy()
        v[i] = v[i] + step if v[i] + step <= hi[i] else v[i] - step
        simplex.append(v)
    simplex = np.array(simplex)
    if not np.any(np.isfinite([objective(v) for v in simplex])):
        raise NoFeasiblePoint("every vertex of the initial simplex is infeasible")
    minimize(
        objective,
        x0,
        method="Nelder-Mead",
        bounds=list(zip(lo, hi)),
        options={"initial_simplex": simplex, "maxfev": max(budget - len(cache), 1), "xatol": 1e-6, "fatol": 1e-10},
    )
    return best[0], float(best[1]), len(cache)


def fit_in_ball(spec, grid, fill=BALL_FIT):
    """Rescale ``spec`` so that max |x| = ``fill``."""
    F = evaluate(spec, grid, check_ball=False)
    m = float(np.max(np.linalg.norm(F.x, axis=1)))
    return rescale_spec(spec, fill / m)


class _Points:
    """Grid stand-in holding arbitrary unit vectors with unit weights."""

    def __init__(self, nodes):
        self.nodes = np.atleast_2d(nodes)
        self.weights = np.ones(len(self.nodes))
        self.n = self.nodes.shape[1]


def _lambda_at(spec, u, s):
    u = np.asarray(u, dtype=float)
    frame = evaluate(spec, _Points(u / np.linalg.norm(u)), check_ball=False)
    return float(np.min(lift_frame(scale_frame(frame, s) if s < 1 else frame).lam))


def surface_min_lambda(spec, frame, s, starts=6):
    """Minimum hyperbolic principal curvature of the body scaled by s.

    The node minimum of a grid only bounds the surface minimum from above;
    the ``starts`` lowest nodes are polished by a local Nelder-Mead search
    over the unit sphere (tangent-plane coordinates), using the analytic
    shape functions directly.
    """
    scaled = scale_frame(frame, s) if s < 1 else frame
    lam = np.min(lift_frame(scaled).lam, axis=1)
    best = float(np.min(lam))
    if frame.spec is None:
        return best
    nodes = _parameter_nodes(frame)
    for k in np.argsort(lam, kind="stable")[:starts]:
        u0 = nodes[k]
        E = np.linalg.svd(np.eye(len(u0)) - np.outer(u0, u0))[0][:, : len(u0) - 1]
        res = minimize(
            lambda c: _lambda_at(frame.spec, u0 + E @ c, s),
            np.zeros(len(u0) - 1),
            method="Nelder-Mead",
            options={"xatol": 1e-9, "fatol": 1e-12, "initial_simplex": _small_simplex(len(u0) - 1, 1e-3)},
        )
        best = min(best, float(res.fun))
    return best


def _parameter_nodes(frame):
    # support bodies are parametrised by their normal, radial graphs by direction
    if frame.spec.family == "perturbed_sphere":
        return frame.x / np.linalg.norm(frame.x, axis=1)[:, None]
    return frame.nu


def _small_simplex(d, h):
    return np.vstack([np.zeros(d), h * np.eye(d)])


def _state(frame, t, refine=False):
    """(P, min lambda) of the frame flowed to time t."""
    s = float(np.exp(-t))
    if refine:
        lam = surface_min_lambda(frame.spec, frame, s)
    else:
        scaled = scale_frame(frame, s) if s < 1 else frame
        lam = float(np.min(lift_frame(scaled).lam))
    return P_at_scale(frame, s), lam


def _first_time(pred, frame, t_step=T_STEP, t_max=T_MAX, tol=1e-6, refine=False):
    """Smallest scanned t satisfying ``pred(P, min lambda)``, refined by bisection."""
    prev = None
    for t in np.arange(0.0, t_max + 1e-12, t_step):
        if pred(*_state(frame, t)) and (not refine or pred(*_state(frame, t, True))):
            if prev is None:
                return 0.0
            a, b = prev, float(t)
            while b - a > tol:
                mid = 0.5 * (a + b)
                a, b = (a, mid) if pred(*_state(frame, mid, refine)) else (mid, b)
            return b
        prev = float(t)
    return None


def certificate_values(spec, t0, resolution):
    """(Q, P at t0, min lambda at t0) of a body re-evaluated from scratch."""
    grid = build_grid(spec.n, resolution)
    frame = evaluate(spec, grid)
    x2 = np.sum(frame.x * frame.x, axis=1)
    Q = normalized_Q(float(np.sum(frame.area_element)), float(np.sum(x2 * frame.area_element)), spec.n)
    P, lam = _state(frame, t0, refine=True)
    return {"resolution": resolution, "Q": Q, "P": P, "min_lambda": lam}


def _meets(values, margin=MARGIN):
    return values["Q"] < 1 - margin and values["P"] < 1 - margin and values["min_lambda"] >= 1 + margin


@dataclass(frozen=True)
class CounterexampleCertificate:
    surface: dict
    Q: float
    t0: float
    scaled_P: float
    min_lambda_scaled: float
    resolution: int
    refinement_check: dict
    grid: dict = field(default_factory=dict)
    search: dict = field(default_factory=dict)
    version: str = __version__

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        return cls(**data)

    @property
    def spec(self):
        return spec_from_dict(self.surface)


def verify_certificate(cert, resolutions=None):
    """Recompute a certificate from its shape and t0 only.

    Returns the per-resolution values and whether every margin holds.
    """
    spec = spec_from_dict(cert["surface"] if isinstance(cert, dict) else cert.surface)
    t0 = cert["t0"] if isinstance(cert, dict) else cert.t0
    res = cert["resolution"] if isinstance(cert, dict) else cert.resolution
    resolutions = resolutions or (res, 2 * res)
    values = [certificate_values(spec, t0, r) for r in resolutions]
    return values, all(_meets(v) for v in values)


def find_counterexample(n=3, resolution=96, budget=400, family=None, t_max=T_MAX):
    """Run the full search and return a :class:`CounterexampleCertificate`.

    Raises BudgetExhausted when no time up to ``t_max`` gives an h-convex
    surface with P < 1 - margin, and CertificateUnstable when the check at
    doubled resolution disagrees.
    """
    family = smoothed_simplex_family(n) if family is None else family
    grid = build_grid(n, resolution)
    params, best_Q, evaluations = minimize_Q(family, grid, budget)
    if params is None:
        raise NoFeasiblePoint("search found no feasible body")
    spec = fit_in_ball(family.build(params), grid)
    frame = evaluate(spec, grid)

    t_h = _first_time(lambda P, lam: lam >= 1 + MARGIN, frame, t_max=t_max, refine=True)
    t_P = _first_time(lambda P, lam: P < 1 - MARGIN, frame, t_max=t_max)
    if t_h is None or t_P is None:
        raise BudgetExhausted(f"no certifiable time up to t = {t_max} (best Q = {best_Q:.6f})")
    t0 = max(t_h, t_P)
    base = certificate_values(spec, t0, resolution)
    refined = certificate_values(spec, t0, 2 * resolution)
    if not _meets(base):
        raise BudgetExhausted(f"certificate margins not met at resolution {resolution}: {base}")
    if not _meets(refined):
        raise CertificateUnstable(f"doubled-resolution check fails: {refined}")
    return CounterexampleCertificate(
        surface=spec_to_dict(spec),
        Q=base["Q"],
        t0=t0,
        scaled_P=base["P"],
        min_lambda_scaled=base["min_lambda"],
        resolution=resolution,
        refinement_check=refined,
        grid=grid.describe(),
        search={
            "family": family.name,
            "parameters": [float(v) for v in params],
            "objective_evaluations": evaluations,
            "budget": budget,
            "t_hconvex": t_h,
            "t_P_below": t_P,
        },
    )
