"""Quadrature on the unit sphere.

For ``n = 3`` the sphere is cut into the ``20 * 4**level`` spherical triangles
of a subdivided icosahedron.  Each triangle carries three nodes (the interior
degree-2 rule at barycentric ``(2/3, 1/6, 1/6)`` and permutations, mapped
radially from the flat triangle with its exact Jacobian), and the three
weights are rescaled so that they add up to the triangle's spherical area.
Constants therefore integrate to ``4 pi`` up to rounding.

For ``n >= 4`` the rule is antipodally symmetrized Monte Carlo with equal
weights.

In both cases ``nodes[N//2:] == -nodes[:N//2]`` exactly, which lets even
integrands be evaluated on half of the nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np

from .errors import InvalidDimensionError

_BARY = np.array([[2 / 3, 1 / 6, 1 / 6],
                  [1 / 6, 2 / 3, 1 / 6],
                  [1 / 6, 1 / 6, 2 / 3]])


def sphere_area(n: int) -> float:
    """Surface area of ``S^{n-1}``."""
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)


def kappa(m: int) -> float:
    """Volume of the unit ball in ``R^m``."""
    return math.pi ** (m / 2) / math.gamma(m / 2 + 1)


def icosahedron() -> tuple[np.ndarray, np.ndarray]:
    """Unit icosahedron: 12 vertices (row ``2k+1`` is minus row ``2k``) and 20 faces."""
    g = (1 + math.sqrt(5)) / 2
    base = [(-1, g, 0), (1, g, 0), (-1, -g, 0), (1, -g, 0),
            (0, -1, g), (0, 1, g), (0, -1, -g), (0, 1, -g),
            (g, 0, -1), (g, 0, 1), (-g, 0, -1), (-g, 0, 1)]
    V = np.array(base, dtype=float)
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    F = np.array([(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
                  (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
                  (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
                  (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)])
    return V, F


def _antipodal_half(V: np.ndarray, F: np.ndarray) -> np.ndarray:
    """Ten faces of the icosahedron, none the antipode of another."""
    anti = [int(np.argmin(np.abs(V + v).sum(axis=1))) for v in V]
    chosen, seen = [], set()
    for face in F:
        key = frozenset(face.tolist())
        if key in seen:
            continue
        chosen.append(face)
        seen.add(key)
        seen.add(frozenset(anti[i] for i in face))
    return np.array(chosen)


def subdivide(T: np.ndarray) -> np.ndarray:
    """Split each spherical triangle in a ``(F, 3, 3)`` stack into four."""
    a, b, c = T[:, 0], T[:, 1], T[:, 2]

    def mid(x, y):
        m = x + y
        return m / np.linalg.norm(m, axis=1, keepdims=True)

    ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
    children = np.stack([np.stack(t, axis=1) for t in
                         ((a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca))], axis=1)
    return children.reshape(-1, 3, 3)


def geodesic_triangles(level: int, half: bool = False) -> np.ndarray:
    """Spherical triangles of the icosahedron refined ``level`` times."""
    V, F = icosahedron()
    if half:
        F = _antipodal_half(V, F)
    T = V[F]
    for _ in range(level):
        T = subdivide(T)
    return T


def spherical_triangle_area(T: np.ndarray) -> np.ndarray:
    """Solid angle of each triangle (Van Oosterom–Strackee)."""
    a, b, c = T[:, 0], T[:, 1], T[:, 2]
    num = np.abs(np.einsum("ij,ij->i", a, np.cross(b, c)))
    den = (1.0 + np.einsum("ij,ij->i", a, b) + np.einsum("ij,ij->i", b, c)
           + np.einsum("ij,ij->i", c, a))
    return 2.0 * np.arctan2(num, den)


def _triangle_rule(T: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    P = np.einsum("kj,tjd->tkd", _BARY, T)
    r = np.linalg.norm(P, axis=2)
    normal = np.cross(T[:, 1] - T[:, 0], T[:, 2] - T[:, 0])
    twice_flat = np.linalg.norm(normal, axis=1)
    height = np.abs(np.einsum("ij,ij->i", normal, T[:, 0])) / twice_flat
    # radial projection: dOmega = height / |p|^3 dA
    w = (twice_flat * height / 6.0)[:, None] / r ** 3
    w *= (spherical_triangle_area(T) / w.sum(axis=1))[:, None]
    return (P / r[..., None]).reshape(-1, 3), w.reshape(-1)


@dataclass(frozen=True, eq=False)
class SphericalQuadrature:
    nodes: np.ndarray
    weights: np.ndarray
    level: int
    seed: Optional[int] = None
    n_cells: int = 0

    @property
    def dim(self) -> int:
        return self.nodes.shape[1]

    def __len__(self) -> int:
        return len(self.weights)

    def integrate(self, values: np.ndarray) -> float:
        """``Σ_j w_j f(u_j)`` for precomputed values at every node."""
        return float((self.weights * values).sum())

    def integrate_func(self, f: Callable[[np.ndarray], np.ndarray], even: bool = False) -> float:
        """Integrate a vectorized ``f``; ``even=True`` evaluates half of the nodes."""
        if even:
            half = len(self) // 2
            return 2.0 * float((self.weights[:half] * f(self.nodes[:half])).sum())
        return self.integrate(f(self.nodes))


def _freeze(*arrays):
    for a in arrays:
        a.setflags(write=False)


@lru_cache(maxsize=16)
def make_quadrature(n: int, level: int, seed: int = 0) -> SphericalQuadrature:
    """Deterministic rule on ``S^{n-1}``; see the module docstring.

    ``seed`` only matters for ``n >= 4`` where ``1000 * 10**level`` antipodal
    node pairs are drawn.
    """
    if n < 3:
        raise InvalidDimensionError(f"quadrature is provided for n >= 3, got n={n}")
    if level < 0:
        raise ValueError("level must be >= 0")
    if n == 3:
        T = geodesic_triangles(level, half=True)
        X, w = _triangle_rule(T)
        ncells = 2 * len(T)
        q_seed = None
    else:
        m = 1000 * 10 ** level
        X = np.random.default_rng(seed).standard_normal((m, n))
        X /= np.linalg.norm(X, axis=1, keepdims=True)
        w = np.full(m, sphere_area(n) / (2 * m))
        ncells = m
        q_seed = seed
    nodes = np.concatenate([X, -X])
    weights = np.concatenate([w, w])
    _freeze(nodes, weights)
    return SphericalQuadrature(nodes, weights, level, q_seed, ncells)


def save_quadrature(q: SphericalQuadrature, path: Union[str, Path]) -> None:
    np.savez(path, nodes=q.nodes, weights=q.weights, level=q.level,
             seed=-1 if q.seed is None else q.seed, n_cells=q.n_cells)


def load_quadrature(path: Union[str, Path]) -> SphericalQuadrature:
    with np.load(path) as data:
        nodes, weights = data["nodes"].copy(), data["weights"].copy()
        seed = int(data["seed"])
        q = SphericalQuadrature(nodes, weights, int(data["level"]),
                                None if seed < 0 else seed, int(data["n_cells"]))
    _freeze(q.nodes, q.weights)
    return q
