"""Hyperbolic geometry of ball-model hypersurfaces from their Euclidean frames.

With conformal factor phi = 2 / (1 - |x|^2), outward hyperbolic unit normal
nu / phi and Euclidean support u = <x, nu>, the hyperbolic principal
curvatures, support function and area element are

    lambda_i = kappa_i / phi + u,   p = phi u,   dA = phi^(n-1) dA_euclid.
"""

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import OutOfBall

HCONVEX_TOL = 1e-9


def _sq_norm(x):
    x = np.asarray(x, dtype=float)
    r2 = np.sum(x * x, axis=-1)
    if np.any(r2 >= 1.0):
        raise OutOfBall("point outside the open unit ball")
    return r2


def conformal_factor(x):
    """phi(x) = 2 / (1 - |x|^2) for x (or stacked points) in the open ball."""
    return 2.0 / (1.0 - _sq_norm(x))


def rho(x):
    """The weight cosh(dist(0, x)) = (1 + |x|^2) / (1 - |x|^2)."""
    r2 = _sq_norm(x)
    return (1.0 + r2) / (1.0 - r2)


def rho_minus_one(x):
    """rho - 1 = 2|x|^2 / (1 - |x|^2), free of cancellation near the origin."""
    r2 = _sq_norm(x)
    return 2.0 * r2 / (1.0 - r2)


def elementary_symmetric(lam):
    """sigma_0..sigma_m of each row of ``lam`` (shape (N, m)) -> (N, m+1).

    Coefficients of prod_i (1 + lam_i t), multiplied out with the factors
    taken in order of decreasing magnitude.
    """
    lam = np.asarray(lam, dtype=float)
    N, m = lam.shape
    order = np.argsort(-np.abs(lam), axis=1, kind="stable")
    lam = np.take_along_axis(lam, order, axis=1)
    sigma = np.zeros((N, m + 1))
    sigma[:, 0] = 1.0
    for i in range(m):
        sigma[:, 1 : i + 2] = sigma[:, 1 : i + 2] + lam[:, i : i + 1] * sigma[:, : i + 1]
    return sigma


@dataclass(frozen=True, eq=False)
class HyperbolicFrame:
    """Per-node hyperbolic geometry (stacked over the grid nodes)."""

    rho: np.ndarray
    rho_minus_one: np.ndarray
    phi: np.ndarray
    p: np.ndarray
    lam: np.ndarray  # (N, n-1)
    area_element: np.ndarray
    sigma: np.ndarray  # (N, n)

    @property
    def n(self):
        return self.lam.shape[1] + 1

    def __len__(self):
        return self.rho.shape[0]


def lift_frame(frame):
    """Lift a :class:`~horoaf.surface.EuclideanFrame` to hyperbolic space."""
    phi = conformal_factor(frame.x)
    lam = frame.kappa / phi[:, None] + frame.support[:, None]
    n = frame.n
    return HyperbolicFrame(
        rho=rho(frame.x),
        rho_minus_one=rho_minus_one(frame.x),
        phi=phi,
        p=phi * frame.support,
        lam=lam,
        area_element=phi ** (n - 1) * frame.area_element,
        sigma=elementary_symmetric(lam),
    )


def normalized_mean_curvature(hframe, k):
    """Per-node H_k = sigma_k / C(n-1, k)."""
    m = hframe.n - 1
    if int(k) != k or not 0 <= k <= m:
        raise ValueError(f"k must be an integer in [0, {m}], got {k!r}")
    return hframe.sigma[:, k] / comb(m, k)


def min_principal_curvature(hframe):
    """(min lambda_i, min H_1) over all nodes."""
    return float(np.min(hframe.lam)), float(np.min(normalized_mean_curvature(hframe, 1)))


def is_horospherically_convex(hframe, tol=HCONVEX_TOL):
    return min_principal_curvature(hframe)[0] >= 1.0 - tol


def gradient_rho_sq(frame):
    """|grad_Sigma rho|^2 in the hyperbolic metric, by the chain rule.

    rho is differentiated along the parametrisation: d_j = <D rho(x), J e_j>
    with the Euclidean gradient D rho = 4x / (1 - |x|^2)^2, and the squared
    norm uses the induced hyperbolic metric phi^2 J^T J.
    """
    x = frame.x
    phi = conformal_factor(x)
    grad = phi[:, None] ** 2 * x  # 4x / (1 - |x|^2)^2
    J = frame.jacobian
    d = np.einsum("ki,kij->kj", grad, J)
    G = (phi**2)[:, None, None] * (np.swapaxes(J, 1, 2) @ J)
    return np.sum(d * np.linalg.solve(G, d[:, :, None])[:, :, 0], axis=1)


def rho_identity_residual(frame, hframe=None):
    """max over nodes of |rho^2 - 1 - p^2 - |grad rho|^2|."""
    hframe = lift_frame(frame) if hframe is None else hframe
    res = hframe.rho**2 - 1.0 - hframe.p**2 - gradient_rho_sq(frame)
    return float(np.max(np.abs(res)))
