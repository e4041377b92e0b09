"""Reference computations that share no code path with the package."""

import itertools
import math

import numpy as np
from scipy.spatial import ConvexHull, HalfspaceIntersection


def simplex_volume(points) -> float:
    """|det| / n! for an n-simplex given by n+1 points."""
    P = np.asarray(points, dtype=float)
    return abs(np.linalg.det(P[1:] - P[0])) / math.factorial(P.shape[1])


def triangle_area(a, b, c) -> float:
    a, b, c = (np.asarray(x, dtype=float) for x in (a, b, c))
    return 0.5 * float(np.linalg.norm(np.cross(b - a, c - a)))


def zonotope_vertices(G: np.ndarray) -> np.ndarray:
    """Superset of the vertices of ``Σ [-g, g]`` in R^3 (points of the zonotope).

    Each vertex maximizes ``v . x`` for some ``v`` in the open normal cone;
    vertices of the face with normal ``± g_i × g_j`` are ``Σ_{k≠i,j} sign(v.g_k) g_k ± g_i ± g_j``.
    """
    G = np.asarray(G, dtype=float)
    pts = []
    for i, j in itertools.combinations(range(len(G)), 2):
        v = np.cross(G[i], G[j])
        if np.linalg.norm(v) == 0:
            continue
        for s in (1.0, -1.0):
            signs = np.sign(G @ (s * v))
            signs[[i, j]] = 0.0
            base = signs @ G
            for a, b in itertools.product((1.0, -1.0), repeat=2):
                pts.append(base + a * G[i] + b * G[j])
    return np.array(pts)


def zonotope_polar_volume(G: np.ndarray) -> float:
    """Exact ``V(Z*)`` in R^3: intersect the halfspaces ``x . p <= 1`` over zonotope
    points ``p`` and take the hull volume."""
    P = zonotope_vertices(G)
    halfspaces = np.hstack([P, -np.ones((len(P), 1))])
    hs = HalfspaceIntersection(halfspaces, np.zeros(3))
    return float(ConvexHull(hs.intersections).volume)


def cube_shadow(u, half_width: float = 1.0) -> float:
    """Area of the shadow of ``[-a, a]^3`` on ``u^⊥``: ``(2a)^2 Σ |u_i|``."""
    return (2 * half_width) ** 2 * float(np.abs(u).sum())


def random_unit(rng, m: int, n: int = 3) -> np.ndarray:
    U = rng.standard_normal((m, n))
    return U / np.linalg.norm(U, axis=1, keepdims=True)


def kappa(m: int) -> float:
    return math.pi ** (m / 2) / math.gamma(m / 2 + 1)
