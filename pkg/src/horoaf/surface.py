"""Hypersurfaces in the unit ball and their Euclidean geometry on a grid.

Shapes are described by immutable :data:`SurfaceSpec` values (one dataclass
per family).  Evaluating a spec on a :class:`~horoaf.sphere_grid.SphereGrid`
produces an :class:`EuclideanFrame`: per-node position, normal, principal
curvatures, support value and quadrature-weighted area element.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Union

import numpy as np

from . import analytic
from .errors import Degenerate, NonConvex, OutOfBall

# -- shape specifications ---------------------------------------------------


@dataclass(frozen=True)
class GeodesicSphere:
    """Centered geodesic sphere of hyperbolic radius ``r``."""

    n: int
    r: float
    family = "geodesic_sphere"

    def __post_init__(self):
        _check_n(self.n)
        if not self.r > 0:
            raise ValueError("hyperbolic radius must be positive")

    def params(self):
        return {"r": self.r}


@dataclass(frozen=True)
class CenteredEllipsoid:
    n: int
    axes: tuple
    family = "ellipsoid"

    def __post_init__(self):
        _check_n(self.n)
        object.__setattr__(self, "axes", tuple(float(a) for a in self.axes))
        if len(self.axes) != self.n or min(self.axes) <= 0:
            raise ValueError(f"ellipsoid needs {self.n} positive semi-axes, got {self.axes}")

    def params(self):
        return {"axes": list(self.axes)}


@dataclass(frozen=True)
class HarmonicPerturbedSphere:
    """Star-shaped body with Euclidean radial function R (1 + sum c_b B_b(u)).

    ``coefficients`` is a sorted tuple of ``(name, value)`` pairs naming
    harmonics from :func:`horoaf.analytic.harmonic_basis`.
    """

    n: int
    R: float
    coefficients: tuple = ()
    family = "perturbed_sphere"

    def __post_init__(self):
        _check_n(self.n)
        coefs = dict(self.coefficients)
        object.__setattr__(self, "coefficients", tuple(sorted((str(k), float(v)) for k, v in coefs.items())))
        if not self.R > 0:
            raise ValueError("base radius must be positive")
        basis = analytic.harmonic_basis(self.n)
        for name, _ in self.coefficients:
            if name not in basis:
                raise ValueError(f"unknown harmonic {name!r}; choose from {sorted(basis)}")

    def params(self):
        return {"R": self.R, "coefficients": dict(self.coefficients)}


@dataclass(frozen=True)
class SmoothedSimplex:
    """Convex body with support s((sum max(<u,v_i>,0)^p)^(1/p) + eps)."""

    n: int
    vertices: tuple = None
    p: float = 4.0
    eps: float = 0.05
    scale: float = 0.3
    family = "smoothed_simplex"

    def __post_init__(self):
        _check_n(self.n)
        V = analytic.regular_simplex(self.n) if self.vertices is None else np.asarray(self.vertices, float)
        object.__setattr__(self, "vertices", tuple(tuple(float(c) for c in v) for v in V))
        if V.shape != (self.n + 1, self.n):
            raise ValueError(f"need {self.n + 1} vertices in R^{self.n}")
        if self.p < 3 or self.eps <= 0 or self.scale <= 0:
            raise ValueError("smoothed simplex needs p >= 3, eps > 0, scale > 0")
        if not _positively_spans(V):
            raise ValueError("simplex vertices must positively span R^n")

    def params(self):
        return {"vertices": [list(v) for v in self.vertices], "p": self.p, "eps": self.eps, "scale": self.scale}


SurfaceSpec = Union[GeodesicSphere, CenteredEllipsoid, HarmonicPerturbedSphere, SmoothedSimplex]
FAMILIES = {cls.family: cls for cls in (GeodesicSphere, CenteredEllipsoid, HarmonicPerturbedSphere, SmoothedSimplex)}


def _check_n(n):
    if n not in (2, 3, 4):
        raise ValueError(f"unsupported dimension n={n}")


def _positively_spans(V):
    # origin strictly inside the convex hull <=> barycentric weights all positive
    n = V.shape[1]
    M = np.vstack([V.T, np.ones(n + 1)])
    try:
        lam = np.linalg.solve(M, np.r_[np.zeros(n), 1.0])
    except np.linalg.LinAlgError:
        return False
    return bool(np.all(lam > 0))


def spec_to_dict(spec):
    return {"family": spec.family, "n": spec.n, **spec.params()}


def spec_from_dict(data):
    data = dict(data)
    family = data.pop("family")
    if family not in FAMILIES:
        raise ValueError(f"unknown surface family {family!r}")
    if family == "perturbed_sphere":
        data["coefficients"] = tuple(dict(data.get("coefficients", {})).items())
    if family == "smoothed_simplex" and data.get("vertices") is not None:
        data["vertices"] = tuple(tuple(v) for v in data["vertices"])
    return FAMILIES[family](**data)


def spec_to_json(spec):
    return json.dumps(spec_to_dict(spec), sort_keys=True)


def spec_from_json(text):
    return spec_from_dict(json.loads(text))


_ALIASES = {
    "geodesic-sphere": "geodesic_sphere",
    "sphere": "sphere",
    "circle": "sphere",
    "ellipsoid": "ellipsoid",
    "ellipse": "ellipsoid",
    "perturbed-sphere": "perturbed_sphere",
    "smoothed-simplex": "smoothed_simplex",
    "smoothed-triangle": "smoothed_simplex",
}


def parse_shape(text, n):
    """Parse the command-line mini-language ``family:key=value,...``.

    List values use ``/`` as separator (``ellipsoid:axes=0.3/0.2/0.25``).
    ``sphere:R=..`` and ``circle:R=..`` take a Euclidean radius;
    ``smoothed-simplex:default`` uses the default parameters.
    """
    name, _, rest = text.partition(":")
    if name not in _ALIASES:
        raise ValueError(f"unknown surface family {name!r}; choose from {sorted(_ALIASES)}")
    family = _ALIASES[name]
    kv = {}
    if rest and rest != "default":
        for item in rest.split(","):
            key, eq, value = item.partition("=")
            if not eq:
                raise ValueError(f"malformed shape parameter {item!r}")
            kv[key.strip()] = value.strip()

    def floats(v):
        return [float(x) for x in v.split("/")]

    if family == "sphere":
        return GeodesicSphere(n, euclidean_to_hyperbolic_radius(float(kv.pop("R"))))
    if family == "geodesic_sphere":
        return GeodesicSphere(n, float(kv.pop("r")))
    if family == "ellipsoid":
        return CenteredEllipsoid(n, tuple(floats(kv.pop("axes"))))
    if family == "perturbed_sphere":
        R = float(kv.pop("R"))
        return HarmonicPerturbedSphere(n, R, tuple((k, float(v)) for k, v in kv.items()))
    args = {}
    for key in ("p", "eps", "scale"):
        if key in kv:
            args[key] = float(kv.pop(key))
    weights = floats(kv.pop("weights")) if "weights" in kv else None
    if kv:
        raise ValueError(f"unknown smoothed-simplex parameters {sorted(kv)}")
    V = analytic.regular_simplex(n)
    if weights is not None:
        V = V * np.asarray(weights)[:, None]
    return SmoothedSimplex(n, tuple(map(tuple, V)), **args)


# -- radius conversions -------------------------------------------------------


def hyperbolic_to_euclidean_radius(r):
    """Ball-model Euclidean radius tanh(r/2) of a geodesic sphere of radius r."""
    if not np.all(np.asarray(r) > 0):
        raise ValueError("hyperbolic radius must be positive")
    return np.tanh(np.asarray(r) / 2.0) if np.ndim(r) else float(np.tanh(r / 2.0))


def euclidean_to_hyperbolic_radius(R):
    if not np.all((np.asarray(R) > 0) & (np.asarray(R) < 1)):
        raise ValueError("Euclidean radius must lie in (0, 1)")
    return 2.0 * np.arctanh(R) if np.ndim(R) else float(2.0 * np.arctanh(R))


# -- frames -----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EuclideanFrame:
    """Per-node Euclidean geometry of a hypersurface, stacked over grid nodes.

    ``area_element`` already contains the quadrature weight, so that
    ``sum(f * area_element)`` approximates the surface integral of f.
    ``jacobian[k]`` holds the derivatives of the position along an
    orthonormal tangent basis of the parameter sphere at node k; it is kept
    for checks that differentiate functions along the surface.
    """

    x: np.ndarray  # (N, n)
    nu: np.ndarray  # (N, n)
    kappa: np.ndarray  # (N, n-1)
    support: np.ndarray  # (N,)
    area_element: np.ndarray  # (N,)
    jacobian: np.ndarray  # (N, n, n-1)
    spec: object = field(default=None)

    @property
    def n(self):
        return self.x.shape[1]

    def __len__(self):
        return self.x.shape[0]


def tangent_basis(U):
    """Orthonormal bases of u^perp, shape (N, n, n-1).

    Coordinate axes are taken in order of increasing |u_i| (the most
    aligned axis is dropped) and Gram-Schmidt orthogonalised against u.
    """
    N, n = U.shape
    order = np.argsort(np.abs(U), axis=1, kind="stable")[:, : n - 1]
    E = np.zeros((N, n, n - 1))
    for j in range(n - 1):
        v = np.zeros((N, n))
        v[np.arange(N), order[:, j]] = 1.0
        v -= np.sum(v * U, axis=1)[:, None] * U
        for i in range(j):
            v -= np.sum(v * E[:, :, i], axis=1)[:, None] * E[:, :, i]
        E[:, :, j] = v / np.linalg.norm(v, axis=1)[:, None]
    return E


def _restricted(H, E):
    M = np.swapaxes(E, 1, 2) @ H @ E
    return 0.5 * (M + np.swapaxes(M, 1, 2))


def _check_ball(x):
    m = float(np.max(np.linalg.norm(x, axis=1)))
    if m >= 1.0:
        raise OutOfBall(f"surface leaves the unit ball (max |x| = {m:.6g})")


def eval_support_body(h, grid, check_ball=True, spec=None):
    """Frame of the convex body with support function ``h``.

    The boundary point with normal u is the ambient gradient of h at u; the
    principal radii are the eigenvalues of the Hessian of h on u^perp.
    """
    U = grid.nodes
    E = tangent_basis(U)
    D2 = h.hess(U)
    radii = np.linalg.eigvalsh(_restricted(D2, E))
    if np.min(radii) <= 0:
        raise NonConvex(f"principal radius {np.min(radii):.3g} <= 0")
    x = h.grad(U)
    if check_ball:
        _check_ball(x)
    return EuclideanFrame(
        x=x,
        nu=np.array(U),
        kappa=1.0 / radii,
        support=h.value(U),
        area_element=np.prod(radii, axis=1) * grid.weights,
        jacobian=D2 @ E,
        spec=spec,
    )


def eval_radial_graph(g, grid, check_ball=True, spec=None):
    """Frame of the star-shaped surface x = r(u) u with r the restriction of ``g``.

    The surface is the zero set of F(y) = |y| - r(y/|y|); curvatures are the
    eigenvalues of the Hessian of F on the tangent space divided by |grad F|.
    """
    U = grid.nodes
    N, n = U.shape
    r, dr, d2r = analytic.radial_derivatives(g, U)
    if np.min(r) <= 0:
        raise Degenerate("radial function must be positive")
    if check_ball and np.max(r) >= 1:
        raise OutOfBall(f"surface leaves the unit ball (max r = {np.max(r):.6g})")
    gradF = U - dr / r[:, None]
    norm = np.linalg.norm(gradF, axis=1)
    nu = gradF / norm[:, None]
    cos = np.sum(nu * U, axis=1)
    if np.min(cos) <= 1e-12:
        raise Degenerate("radial graph metric degenerates")
    P = np.eye(n) - U[:, :, None] * U[:, None, :]
    hessF = P / r[:, None, None] - d2r / (r * r)[:, None, None]
    B = tangent_basis(nu)
    kappa = np.linalg.eigvalsh(_restricted(hessF, B)) / norm[:, None]
    E = tangent_basis(U)
    J = U[:, :, None] * np.einsum("ki,kij->kj", dr, E)[:, None, :] + r[:, None, None] * E
    x = r[:, None] * U
    return EuclideanFrame(
        x=x,
        nu=nu,
        kappa=kappa,
        support=np.sum(x * nu, axis=1),
        area_element=r ** (n - 1) / cos * grid.weights,
        jacobian=J,
        spec=spec,
    )


def support_function(spec):
    if isinstance(spec, GeodesicSphere):
        return analytic.BallSupport(hyperbolic_to_euclidean_radius(spec.r))
    if isinstance(spec, CenteredEllipsoid):
        return analytic.EllipsoidSupport(spec.axes)
    if isinstance(spec, SmoothedSimplex):
        return analytic.SmoothedSimplexSupport(spec.vertices, spec.p, spec.eps, spec.scale)
    raise TypeError(f"{type(spec).__name__} has no support-function representation")


def radial_function(spec):
    if isinstance(spec, GeodesicSphere):
        R = hyperbolic_to_euclidean_radius(spec.r)
        return analytic.Polynomial(spec.n, [(R, (0,) * spec.n)])
    if isinstance(spec, CenteredEllipsoid):
        return analytic.EllipsoidRadial(spec.axes)
    if isinstance(spec, HarmonicPerturbedSphere):
        return analytic.perturbed_sphere_radial(spec.n, spec.R, spec.coefficients)
    raise TypeError(f"{type(spec).__name__} has no radial-graph representation")


def evaluate(spec, grid, check_ball=True):
    """Evaluate a :data:`SurfaceSpec` with its natural representation."""
    if spec.n != grid.n:
        raise ValueError(f"surface is in R^{spec.n} but grid is on S^{grid.n - 1}")
    if isinstance(spec, HarmonicPerturbedSphere):
        return eval_radial_graph(radial_function(spec), grid, check_ball, spec)
    return eval_support_body(support_function(spec), grid, check_ball, spec)


def scale_frame(frame, s):
    """Exact image of ``frame`` under the homothety x -> s x, 0 < s <= 1."""
    if not 0 < s <= 1:
        raise ValueError(f"scale must lie in (0, 1], got {s}")
    n = frame.n
    return replace(
        frame,
        x=frame.x * s,
        kappa=frame.kappa / s,
        support=frame.support * s,
        area_element=frame.area_element * s ** (n - 1),
        jacobian=frame.jacobian * s,
    )


def rescale_spec(spec, s):
    """The spec of the body scaled by s about the origin (where expressible)."""
    if isinstance(spec, GeodesicSphere):
        return replace(spec, r=euclidean_to_hyperbolic_radius(s * hyperbolic_to_euclidean_radius(spec.r)))
    if isinstance(spec, CenteredEllipsoid):
        return replace(spec, axes=tuple(s * a for a in spec.axes))
    if isinstance(spec, HarmonicPerturbedSphere):
        return replace(spec, R=s * spec.R)
    return replace(spec, scale=s * spec.scale)
