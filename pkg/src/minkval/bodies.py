"""Standard bodies and seeded random generators used by tests and the harness."""

from __future__ import annotations

import itertools

import numpy as np

from .polytope import Hyperplane, Polytope, convex_hull, linear_image
from .quadrature import geodesic_triangles


def cube(n: int = 3, half_width: float = 1.0, center=None) -> Polytope:
    """``center + [-half_width, half_width]^n``."""
    V = np.array(list(itertools.product((-half_width, half_width), repeat=n)), dtype=float)
    if center is not None:
        V = V + np.asarray(center, dtype=float)
    return convex_hull(V)


def standard_simplex(n: int = 3) -> Polytope:
    """The flat simplex ``conv{e_1, ..., e_n}``."""
    return convex_hull(np.eye(n))


def corner_simplex(n: int = 3) -> Polytope:
    """``conv{0, e_1, ..., e_n}``."""
    return convex_hull(np.vstack([np.zeros(n), np.eye(n)]))


def cross_polytope(n: int = 3, r: float = 1.0) -> Polytope:
    return convex_hull(np.vstack([r * np.eye(n), -r * np.eye(n)]))


def geodesic_sphere_points(level: int) -> np.ndarray:
    """Vertices of the icosahedron refined ``level`` times (all on the unit sphere)."""
    T = geodesic_triangles(level)
    # shared edge midpoints are computed bit-identically by every triangle
    return np.unique(T.reshape(-1, 3), axis=0)


def geodesic_ball(level: int) -> Polytope:
    """Inscribed polytope approximation of the unit ball in R^3."""
    return convex_hull(geodesic_sphere_points(level))


def ellipsoid_polytope(A, level: int) -> Polytope:
    """Geodesic approximation of the ellipsoid ``A B``."""
    return linear_image(geodesic_ball(level), A)


def uniform_ball_points(rng: np.random.Generator, m: int, n: int = 3) -> np.ndarray:
    X = rng.standard_normal((m, n))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    return X * rng.random((m, 1)) ** (1.0 / n)


def random_polytope(rng: np.random.Generator, n: int = 3, npoints: int | None = None,
                    shift=None) -> Polytope:
    """Hull of i.i.d. uniform points in the unit ball, optionally translated.

    Retries until the hull is full-dimensional.
    """
    while True:
        m = npoints if npoints is not None else int(rng.integers(n + 1, 31))
        pts = uniform_ball_points(rng, m, n)
        if shift is not None:
            pts = pts + np.asarray(shift, dtype=float)
        K = convex_hull(pts)
        if K.is_full_dimensional:
            return K


def random_shift(rng: np.random.Generator, n: int = 3, low: float = 1.5, high: float = 3.0) -> np.ndarray:
    """A translation of length in ``[low, high]``; with ``low > 1`` it moves
    any subset of the unit ball away from the origin."""
    d = rng.standard_normal(n)
    return d / np.linalg.norm(d) * rng.uniform(low, high)


def random_rotation(rng: np.random.Generator, n: int = 3) -> np.ndarray:
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] *= -1
    return Q


def random_gl_plus(rng: np.random.Generator, n: int = 3, max_cond: float = 100.0) -> np.ndarray:
    """Random matrix with positive determinant and condition number <= ``max_cond``."""
    s = np.exp(rng.uniform(0.0, np.log(max_cond), size=n))
    s[0], s[-1] = 1.0, max_cond ** rng.uniform(0.0, 1.0)
    s *= rng.uniform(0.5, 2.0)
    return random_rotation(rng, n) @ np.diag(s) @ random_rotation(rng, n).T


# -- the simplex dissection by H_lambda(i, j) ----------------------------------
# Indices are 0-based: (i, j) = (0, 1) is the pair (e_1, e_2).

def dissection_hyperplane(lam: float, i: int, j: int, n: int = 3) -> Hyperplane:
    """Hyperplane through 0 with normal ``lam e_j - (1 - lam) e_i``.

    It contains ``lam e_i + (1 - lam) e_j`` and every ``e_k`` with ``k != i, j``;
    ``H+`` is the side containing ``e_j``.
    """
    _check_pair(lam, i, j, n)
    normal = np.zeros(n)
    normal[j] = lam
    normal[i] = -(1.0 - lam)
    return Hyperplane.from_normal(normal, 0.0)


def dissection_maps(lam: float, i: int, j: int, n: int = 3) -> tuple[np.ndarray, np.ndarray]:
    """Linear maps ``(phi, psi)`` carrying ``conv{e_k}`` onto its two pieces.

    ``phi`` sends ``e_i`` and ``psi`` sends ``e_j`` to ``lam e_i + (1 - lam) e_j``;
    all other basis vectors are fixed.  ``det phi = lam``, ``det psi = 1 - lam``.
    """
    _check_pair(lam, i, j, n)
    p = np.zeros(n)
    p[i], p[j] = lam, 1.0 - lam
    phi_m, psi_m = np.eye(n), np.eye(n)
    phi_m[:, i] = p
    psi_m[:, j] = p
    return phi_m, psi_m


def _check_pair(lam, i, j, n):
    if not 0.0 < lam < 1.0:
        raise ValueError("lambda must lie in (0, 1)")
    if not 0 <= i < j < n:
        raise ValueError("need 0 <= i < j < n")
