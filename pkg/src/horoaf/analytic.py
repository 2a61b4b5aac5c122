"""Shape functions with closed-form first and second derivatives.

Support functions are positively 1-homogeneous functions on R^n; their
ambient gradient at a unit vector u is the boundary point with outer normal
u, and their ambient Hessian restricted to u^perp is the matrix of principal
radii.  Radial functions are arbitrary smooth functions ``g`` on R^n whose
restriction to the unit sphere gives the Euclidean radius; the 0-homogeneous
extension ``g(y/|y|)`` is formed in :func:`radial_derivatives`.

All methods act on stacked points, ``Y`` of shape (N, n).
"""

import numpy as np


def _outer(a, b):
    return a[:, :, None] * b[:, None, :]


def _eye(N, n):
    return np.broadcast_to(np.eye(n), (N, n, n))


def _norm_terms(Y):
    """Value, gradient and Hessian of |y|."""
    r = np.linalg.norm(Y, axis=1)
    Yh = Y / r[:, None]
    H = (_eye(*Y.shape) - _outer(Yh, Yh)) / r[:, None, None]
    return r, Yh, H


class BallSupport:
    """Support function R|y| of the centered ball of radius R."""

    def __init__(self, R):
        self.R = float(R)

    def value(self, Y):
        return self.R * np.linalg.norm(Y, axis=1)

    def grad(self, Y):
        return self.R * Y / np.linalg.norm(Y, axis=1)[:, None]

    def hess(self, Y):
        return self.R * _norm_terms(Y)[2]


class EllipsoidSupport:
    """Support function sqrt(sum a_i^2 y_i^2) of a centered ellipsoid."""

    def __init__(self, axes):
        self.a2 = np.asarray(axes, dtype=float) ** 2

    def value(self, Y):
        return np.sqrt(Y * Y @ self.a2)

    def grad(self, Y):
        return Y * self.a2 / self.value(Y)[:, None]

    def hess(self, Y):
        h = self.value(Y)
        g = Y * self.a2 / h[:, None]
        return (np.einsum("ij,k->kij", np.diag(self.a2), np.ones(len(Y))) - _outer(g, g)) / h[:, None, None]


class SmoothedSimplexSupport:
    """Support function s * ((sum_i max(<y, v_i>, 0)^p)^(1/p) + eps |y|).

    The first term is the l_p norm of the positive parts of the vertex
    pairings, a convex 1-homogeneous function that tends to the simplex
    support function as p grows.  The eps term is the Minkowski sum with a
    ball and makes every principal radius at least s * eps.
    """

    def __init__(self, vertices, p, eps, scale):
        self.V = np.asarray(vertices, dtype=float)
        self.p = float(p)
        self.eps = float(eps)
        self.scale = float(scale)

    def _lp(self, Y):
        A = np.maximum(Y @ self.V.T, 0.0)
        S = np.sum(A**self.p, axis=1)
        return A, S, S ** (1.0 / self.p)

    def value(self, Y):
        return self.scale * (self._lp(Y)[2] + self.eps * np.linalg.norm(Y, axis=1))

    def grad(self, Y):
        A, S, g = self._lp(Y)
        w = (A ** (self.p - 1.0)) @ self.V
        grad_lp = w * (g / S)[:, None]
        return self.scale * (grad_lp + self.eps * Y / np.linalg.norm(Y, axis=1)[:, None])

    def hess(self, Y):
        p = self.p
        A, S, g = self._lp(Y)
        w = (A ** (p - 1.0)) @ self.V
        M = np.einsum("ki,ia,ib->kab", A ** (p - 2.0), self.V, self.V)
        H_lp = (p - 1.0) * ((g / S)[:, None, None] * M - (g / S**2)[:, None, None] * _outer(w, w))
        return self.scale * (H_lp + self.eps * _norm_terms(Y)[2])


def regular_simplex(n):
    """Unit vertex directions of a regular simplex in R^n centered at 0."""
    if n == 2:
        ang = np.pi / 2 + 2 * np.pi * np.arange(3) / 3
        return np.stack([np.cos(ang), np.sin(ang)], axis=1)
    if n == 3:
        return np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float) / np.sqrt(3.0)
    # project the standard basis of R^{n+1} onto the hyperplane sum = 0
    E = np.eye(n + 1) - 1.0 / (n + 1)
    Q, _ = np.linalg.qr(E[:, :n])
    V = E @ Q
    return V / np.linalg.norm(V, axis=1)[:, None]


# -- polynomial radial functions ------------------------------------------

class Polynomial:
    """Sum of monomials ``coef * prod(y_i ** e_i)`` with exact derivatives."""

    def __init__(self, n, terms):
        self.n = n
        self.coefs = np.array([c for c, _ in terms], dtype=float)
        self.exps = np.array([e for _, e in terms], dtype=int).reshape(len(terms), n)

    @staticmethod
    def _pow(Y, e):
        # y ** e with y ** (negative) treated as 0 (the factor is multiplied by e anyway)
        return np.where(e >= 0, Y ** np.maximum(e, 0), 0.0)

    def _monomials(self, Y, shift):
        out = np.ones((Y.shape[0], len(self.coefs)))
        for i in range(self.n):
            out = out * self._pow(Y[:, i : i + 1], self.exps[:, i] - shift[i])
        return out

    def value(self, Y):
        return self._monomials(Y, np.zeros(self.n, int)) @ self.coefs

    def grad(self, Y):
        G = np.empty_like(Y)
        for i in range(self.n):
            s = np.zeros(self.n, int)
            s[i] = 1
            G[:, i] = self._monomials(Y, s) @ (self.coefs * self.exps[:, i])
        return G

    def hess(self, Y):
        H = np.empty((Y.shape[0], self.n, self.n))
        for i in range(self.n):
            for j in range(i, self.n):
                s = np.zeros(self.n, int)
                s[i] += 1
                s[j] += 1
                mult = self.exps[:, i] * (self.exps[:, j] - (1 if i == j else 0))
                H[:, i, j] = H[:, j, i] = self._monomials(Y, s) @ (self.coefs * mult)
        return H


def harmonic_basis(n):
    """Named low-order harmonic polynomials (restricted to the unit sphere)."""

    def mono(**powers):
        e = [0] * n
        for k, v in powers.items():
            e[int(k[1:])] = v
        return tuple(e)

    last = f"y{n - 1}"
    return {
        "dipole": [(1.0, mono(**{last: 1}))],
        "zonal2": [(float(n), mono(**{last: 2})), (-1.0, mono())],
        "zonal3": [(float(n + 2), mono(**{last: 3})), (-3.0, mono(**{last: 1}))],
        "sectoral2": [(1.0, mono(y0=2)), (-1.0, mono(y1=2))],
        "tesseral2": [(1.0, mono(y0=1, y1=1))],
    }


def perturbed_sphere_radial(n, R, coefficients):
    """Radial function R * (1 + sum_b c_b B_b(u)) as a :class:`Polynomial`."""
    basis = harmonic_basis(n)
    terms = [(R, (0,) * n)]
    for name, c in coefficients:
        if name not in basis:
            raise ValueError(f"unknown harmonic {name!r}; choose from {sorted(basis)}")
        terms += [(R * c * a, e) for a, e in basis[name]]
    return Polynomial(n, terms)


class EllipsoidRadial:
    """Radial function (sum y_i^2 / a_i^2)^(-1/2) of a centered ellipsoid."""

    def __init__(self, axes):
        self.b = 1.0 / np.asarray(axes, dtype=float) ** 2

    def value(self, Y):
        return (Y * Y @ self.b) ** -0.5

    def grad(self, Y):
        q = Y * Y @ self.b
        return -(q**-1.5)[:, None] * Y * self.b

    def hess(self, Y):
        q = Y * Y @ self.b
        By = Y * self.b
        D = np.einsum("ij,k->kij", np.diag(self.b), np.ones(len(Y)))
        return -(q**-1.5)[:, None, None] * D + 3.0 * (q**-2.5)[:, None, None] * _outer(By, By)


def radial_derivatives(g, U):
    """Value, ambient gradient and ambient Hessian at unit vectors ``U`` of
    the 0-homogeneous extension r(y) = g(y / |y|)."""
    val = g.value(U)
    c = g.grad(U)
    D2 = g.hess(U)
    N, n = U.shape
    P = _eye(N, n) - _outer(U, U)
    grad = np.einsum("kij,kj->ki", P, c)
    cu = np.sum(c * U, axis=1)
    curv = -(_outer(c, U) + _outer(U, c) + cu[:, None, None] * _eye(N, n)) + 3.0 * cu[:, None, None] * _outer(U, U)
    hess = P @ D2 @ P + curv
    return val, grad, hess
