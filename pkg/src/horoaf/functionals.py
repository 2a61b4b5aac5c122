"""Global quantities of a hypersurface and the inequality checkers.

:func:`summarize` reduces a Euclidean frame and its hyperbolic lift to a
:class:`FunctionalSummary`; :func:`check_inequality` turns a summary into an
:class:`InequalityReport` for one named inequality.
"""

from dataclasses import asdict, dataclass, field
from math import comb, pi

import numpy as np

from .errors import BadParity, MismatchedFrames, UnknownInequality, WrongDimension
from .hyperbolic import elementary_symmetric, lift_frame
from .sphere_grid import unit_sphere_area

TOL_REPORT = 1e-9
REMARK_N2_CONSTANT = (2 * pi) ** 2 / 54

# inequalities that are theorems (under their hypotheses); the rest are conjectural
PROVEN = {"AF_euclidean", "dLG", "thm2", "thm3", "wang_xia", "crucial", "remark_n2", "remark_n2_hyperbolic"}
NAMES = PROVEN | {"GWW", "conjecture", "remark_n2_literal"}


def _sum(values):
    return float(np.sum(np.ascontiguousarray(values)))


@dataclass(frozen=True)
class FunctionalSummary:
    n: int
    area: float
    calI: float
    rho_minus_one_integral: float
    area_euclidean: float
    x_sq_euclidean: float
    x_sq_hyperbolic: float
    Q: float
    P: float
    rho_sq_integral: float
    p_sigma1_integral: float
    weighted_Hk: tuple
    plain_Hk: tuple
    weighted_Hk_over_rho: tuple
    euclidean_Hk: tuple
    min_lambda: float
    min_H1: float
    min_euclidean_sigma: tuple
    nodes: int

    def to_dict(self):
        return asdict(self)


def normalized_P(area, rho_minus_one_integral, n):
    """P = (I^2 - |S|^2) / [w (|S|/w)^(n/(n-1))]^2 with I - |S| passed directly.

    Written as (e)(2 + e)(|S|/w)^(-2/(n-1)) with e = (I - |S|)/|S| so that
    tiny surfaces neither cancel nor underflow.
    """
    w = unit_sphere_area(n)
    e = rho_minus_one_integral / area
    return e * (2.0 + e) * (area / w) ** (-2.0 / (n - 1))


def normalized_Q(area_euclidean, x_sq_euclidean, n):
    w = unit_sphere_area(n)
    return x_sq_euclidean / (w * (area_euclidean / w) ** ((n + 1) / (n - 1)))


def summarize(frame, hframe=None):
    """Reduce a frame (and its hyperbolic lift) to a :class:`FunctionalSummary`."""
    hframe = lift_frame(frame) if hframe is None else hframe
    if len(frame) != len(hframe):
        raise MismatchedFrames(f"{len(frame)} Euclidean vs {len(hframe)} hyperbolic nodes")
    n = frame.n
    m = n - 1
    dA = hframe.area_element
    dAe = frame.area_element
    rho = hframe.rho
    x2 = np.sum(frame.x * frame.x, axis=1)

    area = _sum(dA)
    rm1 = _sum(hframe.rho_minus_one * dA)
    Hk = hframe.sigma / np.array([comb(m, k) for k in range(m + 1)])
    sig_e = elementary_symmetric(frame.kappa)
    Hk_e = sig_e / np.array([comb(m, k) for k in range(m + 1)])
    weighted = tuple(_sum(rho * Hk[:, k] * dA) for k in range(m + 1))
    area_e = _sum(dAe)
    x_sq_e = _sum(x2 * dAe)
    return FunctionalSummary(
        n=n,
        area=area,
        calI=weighted[0],
        rho_minus_one_integral=rm1,
        area_euclidean=area_e,
        x_sq_euclidean=x_sq_e,
        x_sq_hyperbolic=_sum(x2 * dA),
        Q=normalized_Q(area_e, x_sq_e, n),
        P=normalized_P(area, rm1, n),
        rho_sq_integral=_sum(rho * rho * dA),
        p_sigma1_integral=_sum(hframe.p * hframe.sigma[:, 1] * dA),
        weighted_Hk=weighted,
        plain_Hk=tuple(_sum(Hk[:, k] * dA) for k in range(m + 1)),
        weighted_Hk_over_rho=tuple(_sum(Hk[:, k] / rho * dA) for k in range(m + 1)),
        euclidean_Hk=tuple(_sum(Hk_e[:, k] * dAe) for k in range(m + 1)),
        min_lambda=float(np.min(hframe.lam)),
        min_H1=float(np.min(Hk[:, 1])),
        min_euclidean_sigma=tuple(float(np.min(sig_e[:, k])) for k in range(m + 1)),
        nodes=len(frame),
    )


def minkowski_residual(summary):
    """(n-1) I - int p sigma_1; zero up to quadrature error on closed surfaces."""
    return (summary.n - 1) * summary.calI - summary.p_sigma1_integral


@dataclass(frozen=True)
class InequalityReport:
    name: str
    lhs: float
    rhs: float
    margin: float
    relative_margin: float
    holds: bool
    surface: dict = None
    resolution: int = None
    k: int = None
    proven: bool = True
    error_estimate: float = 0.0
    raw_lhs: float = None
    raw_rhs: float = None
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        d = asdict(self)
        d["status"] = "holds" if self.holds else "VIOLATED"
        return {key: value for key, value in d.items() if value is not None and value != {}}


def make_report(name, lhs, rhs, error_estimate=0.0, **kw):
    margin = lhs - rhs
    scale = max(abs(lhs), abs(rhs))
    rel = margin / scale if scale > 0 else 0.0
    holds = margin > -(TOL_REPORT * scale + error_estimate)
    return InequalityReport(
        name=name, lhs=float(lhs), rhs=float(rhs), margin=float(margin), relative_margin=float(rel),
        holds=bool(holds), error_estimate=float(error_estimate), **kw,
    )


def _index_range(name, k, lo, hi, even=None):
    if k is None or int(k) != k or not lo <= k <= hi:
        raise BadParity(f"{name}: index must be an integer in [{lo}, {hi}], got {k!r}")
    if even is not None and (k % 2 == 0) != even:
        raise BadParity(f"{name}: index must be {'even' if even else 'odd'}, got {k}")
    return int(k)


def inequality_sides(name, s, k=None):
    """(lhs, rhs, raw_lhs, raw_rhs) for the named inequality on summary ``s``.

    ``k`` is the curvature index for AF_euclidean, GWW and thm3, and the
    induction index j for wang_xia and crucial.  raw sides are None unless
    the primary sides are in normalised form.
    """
    n = s.n
    w = unit_sphere_area(n)
    A = s.area / w
    c2 = ((n - 1) / n) ** 2
    if name == "AF_euclidean":
        k = _index_range(name, k, 1, n - 1)
        return (s.euclidean_Hk[k] / w) ** (n - k), (s.euclidean_Hk[k - 1] / w) ** (n - k - 1), None, None
    if name == "dLG":
        if n < 3:
            raise WrongDimension("dLG needs n >= 3")
        return s.weighted_Hk[1], w * (A ** ((n - 2) / (n - 1)) + A ** (n / (n - 1))), None, None
    if name == "GWW":
        k = _index_range(name, k, 0, n - 1)
        e1 = 2 * n / ((k + 1) * (n - 1))
        e2 = 2 * (n - k - 1) / ((k + 1) * (n - 1))
        return s.weighted_Hk[k], w * (A**e1 + A**e2) ** ((k + 1) / 2), None, None
    if name == "thm3":
        k = _index_range(name, k, 0, n - 1, even=True)
        e1 = 2 * n / ((k + 1) * (n - 1))
        e2 = 2 * (n - k - 1) / ((k + 1) * (n - 1))
        return s.weighted_Hk[k], w * (c2 * A**e1 + A**e2) ** ((k + 1) / 2), None, None
    if name in ("conjecture", "thm2"):
        c = 1.0 if name == "conjecture" else c2
        raw_rhs = w * (c * A ** (2 * n / (n - 1)) + A**2) ** 0.5
        return s.P, c, s.calI, raw_rhs
    if name == "wang_xia":
        j = _index_range(name, k, 0, (n - 3) // 2)
        return s.plain_Hk[2 * j + 2], s.area * (1 + A ** (-2 / (n - 1))) ** (j + 1), None, None
    if name == "crucial":
        j = _index_range(name, k, 0, (n - 3) // 2)
        lhs = s.weighted_Hk[2 * j + 2] - s.weighted_Hk_over_rho[2 * j + 2]
        return lhs, s.weighted_Hk[2 * j], None, None
    if name in ("remark_n2", "remark_n2_hyperbolic", "remark_n2_literal"):
        if n != 2:
            raise WrongDimension(f"{name} is a statement about curves (n = 2)")
        if name == "remark_n2":
            return s.Q, REMARK_N2_CONSTANT, None, None
        bound = s.area * (s.area**2 / 54 + 1) ** 0.5
        lhs = s.calI if name == "remark_n2_hyperbolic" else s.x_sq_hyperbolic
        return lhs, bound, None, None
    raise UnknownInequality(f"unknown inequality {name!r}; choose from {sorted(NAMES)}")


def is_proven(name, k=None):
    if name == "GWW":
        return k is not None and k % 2 == 1
    return name in PROVEN


def check_inequality(name, summary, k=None, error_estimate=0.0, surface=None, resolution=None):
    """Evaluate one named inequality; see :func:`inequality_sides` for names."""
    lhs, rhs, raw_lhs, raw_rhs = inequality_sides(name, summary, k)
    extra = {}
    if raw_lhs is not None:
        raw_margin = raw_lhs - raw_rhs
        norm_margin = lhs - rhs
        tol = TOL_REPORT * max(abs(raw_lhs), abs(raw_rhs))
        extra["raw_sign_agrees"] = bool(abs(raw_margin) <= tol or np.sign(raw_margin) == np.sign(norm_margin))
    return make_report(
        name, lhs, rhs, error_estimate,
        surface=surface, resolution=resolution,
        k=None if k is None else int(k), proven=is_proven(name, k),
        raw_lhs=raw_lhs, raw_rhs=raw_rhs, extra=extra,
    )


def check_remark_n2(summary, error_estimate=None, surface=None, resolution=None):
    """The three n = 2 statements: Q > (2 pi)^2/54, and two hyperbolic forms.

    ``remark_n2_hyperbolic`` bounds I = int rho ds (what the P-route proves);
    ``remark_n2_literal`` bounds int |x|^2 ds in the hyperbolic measure as
    printed.  The literal form cannot hold inside the unit ball, where
    int |x|^2 ds < |Sigma|, and is reported as conjectural.
    """
    if summary.n != 2:
        raise WrongDimension(f"remark_n2 needs n = 2, got n = {summary.n}")
    err = error_estimate or {}
    return [
        check_inequality(name, summary, None, err.get(name, 0.0), surface, resolution)
        for name in ("remark_n2", "remark_n2_hyperbolic", "remark_n2_literal")
    ]


def polygon_boundary_moment(vertices):
    """Exact int |x|^2 ds over the boundary of a closed polygon.

    On a segment [a, b] the integrand is quadratic, giving
    |b - a| (|a|^2 + a.b + |b|^2) / 3.
    """
    V = np.asarray(vertices, dtype=float)
    W = np.roll(V, -1, axis=0)
    lengths = np.linalg.norm(W - V, axis=1)
    inner = np.sum(V * V, 1) + np.sum(V * W, 1) + np.sum(W * W, 1)
    return float(np.sum(lengths * inner) / 3.0), float(np.sum(lengths))


# -- the verification suite ---------------------------------------------------


def applicable_checks(summary, hconvex_tol=1e-9):
    """(name, index, gating) triples whose hypotheses the summary satisfies.

    Gating checks are theorems; a failure there means a numerical defect.
    Conjectural checks are reported but never gate.
    """
    s = summary
    n = s.n
    checks = [("conjecture", None, False)]
    hconvex = s.min_lambda >= 1.0 - hconvex_tol
    if n == 2:
        checks.append(("remark_n2", None, s.min_euclidean_sigma[1] > 0))
        checks.append(("remark_n2_hyperbolic", None, hconvex))
        checks.append(("remark_n2_literal", None, False))
        return checks
    for k in range(1, n):
        if all(v >= 0 for v in s.min_euclidean_sigma[: k + 1]):
            checks.append(("AF_euclidean", k, True))
    if s.min_H1 > 0:
        checks.append(("dLG", None, True))
    if s.min_H1 >= 1.0 - hconvex_tol:
        checks.append(("thm2", None, True))
    if hconvex:
        for k in range(1, n):
            checks.append(("GWW", k, k % 2 == 1))
        for k in range(0, n, 2):
            checks.append(("thm3", k, True))
        for j in range(0, (n - 3) // 2 + 1):
            checks.append(("wang_xia", j, True))
            checks.append(("crucial", j, True))
    return checks


def summarize_spec(spec, resolution):
    from .sphere_grid import build_grid
    from .surface import evaluate

    return summarize(evaluate(spec, build_grid(spec.n, resolution)))


def run_suite(spec, resolution):
    """Run every applicable check on ``spec``.

    Each report's error estimate is the change in its margin between
    ``resolution`` and ``resolution // 2``.  Returns (reports, gating flags).
    """
    from .surface import spec_to_dict

    fine = summarize_spec(spec, resolution)
    coarse = summarize_spec(spec, max(resolution // 2, 4))
    surface = spec_to_dict(spec)
    reports, gating = [], []
    for name, k, gate in applicable_checks(fine):
        lhs, rhs, _, _ = inequality_sides(name, coarse, k)
        est = abs((lhs - rhs) - (lambda a: a[0] - a[1])(inequality_sides(name, fine, k)))
        reports.append(check_inequality(name, fine, k, est, surface, resolution))
        gating.append(gate)
    return reports, gating
