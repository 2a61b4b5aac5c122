"""Product quadrature rules on the unit sphere S^{n-1} for n = 2, 3, 4.

Every surface integral in the package is a weighted sum over the nodes of
one of these grids.  Sums use ``numpy.sum`` on contiguous 1-D arrays, which
is a pairwise reduction and therefore reproducible run to run.
"""

from dataclasses import dataclass
from math import gamma, pi

import numpy as np
from scipy.special import roots_chebyu, roots_legendre

SUPPORTED_DIMENSIONS = (2, 3, 4)
MIN_RESOLUTION = 4


def unit_sphere_area(n):
    """Area of the unit sphere S^{n-1} in R^n, i.e. 2 pi^{n/2} / Gamma(n/2)."""
    if int(n) != n or n < 2:
        raise ValueError(f"n must be an integer >= 2, got {n!r}")
    return 2.0 * pi ** (n / 2.0) / gamma(n / 2.0)


@dataclass(frozen=True, eq=False)
class SphereGrid:
    """Quadrature nodes (unit vectors) and positive weights on S^{n-1}.

    Attributes
    ----------
    n : int
        Ambient dimension.
    resolution : int
        Number of Gauss points per polar direction (the periodic direction
        carries ``2 * resolution`` points when n > 2).
    nodes : ndarray, shape (N, n)
    weights : ndarray, shape (N,)
    """

    n: int
    resolution: int
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    def __len__(self):
        return self.weights.shape[0]

    def integrate(self, values):
        """Weighted sum of per-node ``values`` (shape (N,))."""
        return float(np.sum(np.ascontiguousarray(values * self.weights)))

    def describe(self):
        shape = {
            2: f"uniform({self.resolution})",
            3: f"gauss-legendre({self.resolution}) x uniform({2 * self.resolution})",
            4: (
                f"gauss-chebyshev-u({self.resolution}) x gauss-legendre({self.resolution})"
                f" x uniform({2 * self.resolution})"
            ),
        }[self.n]
        return {"n": self.n, "resolution": self.resolution, "nodes": len(self), "rule": shape}


def _periodic(m):
    angles = 2.0 * pi * np.arange(m) / m
    return angles, np.full(m, 2.0 * pi / m)


def build_grid(n, resolution):
    """Build a product quadrature grid on S^{n-1}.

    n = 2 uses ``resolution`` equispaced angles.  n = 3 pairs Gauss-Legendre
    nodes in the polar cosine with ``2 * resolution`` equispaced azimuths.
    n = 4 uses hyperspherical angles (a, b, c) with measure
    sin^2 a sin b da db dc: Gauss-Chebyshev of the second kind in cos a
    (its weight sqrt(1 - t^2) is the folded sin^2 Jacobian), Gauss-Legendre
    in cos b and a uniform periodic rule in c.  Each rule integrates
    spherical polynomials of degree < resolution exactly.
    """
    if n not in SUPPORTED_DIMENSIONS:
        raise ValueError(f"unsupported dimension n={n}; expected one of {SUPPORTED_DIMENSIONS}")
    if int(resolution) != resolution or resolution < MIN_RESOLUTION:
        raise ValueError(f"resolution must be an integer >= {MIN_RESOLUTION}, got {resolution!r}")
    resolution = int(resolution)

    if n == 2:
        theta, w = _periodic(resolution)
        nodes = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        return SphereGrid(2, resolution, nodes, w)

    phi, wphi = _periodic(2 * resolution)
    if n == 3:
        t, wt = roots_legendre(resolution)
        st = np.sqrt(1.0 - t * t)
        T, P = np.meshgrid(t, phi, indexing="ij")
        S = np.meshgrid(st, phi, indexing="ij")[0]
        nodes = np.stack([S * np.cos(P), S * np.sin(P), T], axis=-1).reshape(-1, 3)
        weights = np.outer(wt, wphi).ravel()
        return SphereGrid(3, resolution, np.ascontiguousarray(nodes), weights)

    a, wa = roots_chebyu(resolution)
    b, wb = roots_legendre(resolution)
    sa = np.sqrt(1.0 - a * a)
    sb = np.sqrt(1.0 - b * b)
    A, B, C = np.meshgrid(np.arange(resolution), np.arange(resolution), np.arange(2 * resolution), indexing="ij")
    ca, sa_, cb, sb_, pc = a[A], sa[A], b[B], sb[B], phi[C]
    nodes = np.stack(
        [sa_ * sb_ * np.cos(pc), sa_ * sb_ * np.sin(pc), sa_ * cb, ca], axis=-1
    ).reshape(-1, 4)
    weights = (wa[A] * wb[B] * wphi[C]).ravel()
    return SphereGrid(4, resolution, np.ascontiguousarray(nodes), np.ascontiguousarray(weights))
