"""Polytopes in vertex representation, with facet data derived on demand.

A :class:`Polytope` is always canonical: its vertex array holds exactly the
extreme points of the input, sorted lexicographically.  The empty body is a
regular value with ``intrinsic_dim == -1`` so that halfspace cuts compose
without special cases.

Bodies of intrinsic dimension ``n - 1`` follow a two-atom convention for their
facet data: a flat body ``K`` in a hyperplane with unit normal ``w`` has the
two facets ``(w, A)`` and ``(-w, A)`` where ``A`` is its ``(n-1)``-volume.
Bodies of lower dimension have no facets at all.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Literal, Sequence, Union

import numpy as np
from scipy.linalg import null_space
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import ConvexHull, cKDTree

from .errors import EmptyBodyError, EmptyInputError, PolytopeFormatError

#: rank / coplanarity tolerance, relative to the body's scale
RANK_TOL = 1e-9
#: near-duplicate vertices closer than this (relative to scale) are merged
DEDUP_TOL = 1e-12
#: facet normals closer than this (max norm) belong to the same facet
NORMAL_MERGE_TOL = 1e-9
#: tolerance on ``|u| = 1`` for direction arguments
UNIT_TOL = 1e-12

Side = Literal["+", "-", "on"]


def _bbox_scale(points: np.ndarray) -> float:
    if len(points) == 0:
        return 0.0
    return float(np.linalg.norm(points.max(axis=0) - points.min(axis=0)))


def cluster_labels(points: np.ndarray, tol: float) -> tuple[int, np.ndarray]:
    """Connected components of the graph joining rows closer than ``tol`` (max norm)."""
    m = len(points)
    if m <= 1:
        return m, np.zeros(m, dtype=int)
    pairs = cKDTree(points).query_pairs(tol, p=np.inf, output_type="ndarray")
    if len(pairs) == 0:
        return m, np.arange(m)
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(m, m))
    return connected_components(graph, directed=False)


def _dedup(points: np.ndarray, tol: float) -> np.ndarray:
    """Drop rows within ``tol`` of an earlier row (first occurrence wins)."""
    if len(points) <= 1 or tol <= 0:
        return points
    ncomp, labels = cluster_labels(points, tol)
    if ncomp == len(points):
        return points
    _, first = np.unique(labels, return_index=True)
    return points[np.sort(first)]


def _affine_frame(points: np.ndarray) -> tuple[np.ndarray, np.ndarray, int]:
    """Centroid, orthonormal principal axes (rows) and affine rank of ``points``."""
    center = points.mean(axis=0)
    centered = points - center
    _, _, vt = np.linalg.svd(centered, full_matrices=True)
    coords = centered @ vt.T
    extents = np.ptp(coords, axis=0)
    rank = int(np.count_nonzero(extents > RANK_TOL * _bbox_scale(points)))
    return center, vt, rank


def _hull_volume(points: np.ndarray) -> float:
    """``d``-volume of the hull of ``points`` in ``R^d``; 0 when degenerate."""
    d = points.shape[1]
    if len(points) <= d:
        return 0.0
    _, _, rank = _affine_frame(points)
    if rank < d:
        return 0.0
    if d == 1:
        return float(np.ptp(points[:, 0]))
    return float(ConvexHull(points).volume)


def sign_normalize(v: np.ndarray, rel_tol: float = 1e-12) -> np.ndarray:
    """Flip ``v`` so that its first non-negligible coordinate is positive."""
    mag = np.abs(v)
    if not v.size or mag.max() == 0:
        return v
    first = int(np.argmax(mag > rel_tol * mag.max()))
    return -v if v[first] < 0 else v


def _lexsorted(points: np.ndarray) -> np.ndarray:
    if len(points) <= 1:
        return points
    order = np.lexsort(points.T[::-1])
    return points[order]


@dataclass(frozen=True)
class Facet:
    outer_normal: np.ndarray
    measure: float


@dataclass(frozen=True)
class Hyperplane:
    """The plane ``{x : x . normal = offset}`` with a unit ``normal``.

    ``H+`` is ``x . normal >= offset`` and ``H-`` is ``x . normal <= offset``.
    """

    normal: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        normal = np.array(self.normal, dtype=float)
        if normal.ndim != 1:
            raise ValueError("hyperplane normal must be a vector")
        if abs(np.linalg.norm(normal) - 1.0) > UNIT_TOL:
            raise ValueError("hyperplane normal must have unit length; use Hyperplane.from_normal")
        normal.setflags(write=False)
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def from_normal(cls, normal, offset: float = 0.0) -> Hyperplane:
        """Build from an arbitrary nonzero normal, rescaling the offset to match."""
        normal = np.asarray(normal, dtype=float)
        length = np.linalg.norm(normal)
        if length == 0:
            raise ValueError("zero normal")
        return cls(normal / length, offset / length)

    @classmethod
    def through(cls, normal, point) -> Hyperplane:
        plane = cls.from_normal(normal)
        return cls(plane.normal, float(plane.normal @ np.asarray(point, dtype=float)))

    def signed_distance(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=float) @ self.normal - self.offset


@dataclass(frozen=True, eq=False)
class Polytope:
    """Convex polytope given by its extreme points.

    Use :func:`convex_hull` (or :func:`empty_polytope`) to build instances;
    the constructor trusts its arguments.
    """

    vertices: np.ndarray
    intrinsic_dim: int

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def is_empty(self) -> bool:
        return self.intrinsic_dim < 0

    @property
    def is_full_dimensional(self) -> bool:
        return self.intrinsic_dim == self.dim

    def __len__(self) -> int:
        return len(self.vertices)

    def __repr__(self) -> str:
        return f"Polytope(dim={self.dim}, intrinsic_dim={self.intrinsic_dim}, nvertices={len(self)})"

    @cached_property
    def scale(self) -> float:
        """Bounding-box diagonal; the length unit for all relative tolerances."""
        return _bbox_scale(self.vertices)

    @cached_property
    def frame(self) -> tuple[np.ndarray, np.ndarray]:
        """``(point, axes)``: a point of ``aff K`` and an orthonormal basis of R^n
        whose first ``intrinsic_dim`` rows span the direction space of ``aff K``."""
        if self.is_empty:
            raise EmptyBodyError("empty polytope has no affine hull")
        center, vt, _ = _affine_frame(self.vertices)
        return center, vt

    @cached_property
    def hull(self) -> ConvexHull:
        """Qhull structure of the body inside its own affine hull (dimension >= 2)."""
        k = self.intrinsic_dim
        if k < 2:
            raise ValueError("no qhull structure below dimension 2")
        if k == self.dim:
            return ConvexHull(self.vertices)
        center, vt = self.frame
        return ConvexHull((self.vertices - center) @ vt[:k].T)

    @cached_property
    def facets(self) -> tuple[Facet, ...]:
        return tuple(_compute_facets(self))

    @cached_property
    def origin_hull(self) -> Polytope:
        return conv_with_origin(self)

    def contains(self, x, tol: float = RANK_TOL) -> bool:
        """Membership test with slack ``tol`` relative to the body's scale."""
        if self.is_empty:
            return False
        x = np.asarray(x, dtype=float)
        slack = tol * max(self.scale, np.linalg.norm(x), 1e-300)
        k = self.intrinsic_dim
        center, vt = self.frame
        coords = vt @ (x - center)
        if k < self.dim and np.any(np.abs(coords[k:]) > slack):
            return False
        if k == 0:
            return True
        if k == 1:
            span = (self.vertices - center) @ vt[0]
            return bool(span.min() - slack <= coords[0] <= span.max() + slack)
        if k == self.dim:
            eq = self.hull.equations
            return bool(np.all(eq[:, :-1] @ x + eq[:, -1] <= slack))
        eq = self.hull.equations
        return bool(np.all(eq[:, :-1] @ coords[:k] + eq[:, -1] <= slack))

    def contains_origin(self, tol: float = RANK_TOL) -> bool:
        return self.contains(np.zeros(self.dim), tol)

    def origin_in_interior(self, tol: float = RANK_TOL) -> bool:
        """True when every facet hyperplane has positive distance from 0."""
        if not self.is_full_dimensional:
            return False
        offsets = -self.hull.equations[:, -1]
        return bool(np.all(offsets > tol * self.scale))

    def origin_in_affine_hull(self, tol: float = RANK_TOL) -> bool:
        if self.is_empty:
            return False
        center, vt = self.frame
        perp = vt[self.intrinsic_dim:] @ (-center)
        return bool(np.all(np.abs(perp) <= tol * max(self.scale, 1e-300)))


def empty_polytope(n: int) -> Polytope:
    vertices = np.zeros((0, n))
    vertices.setflags(write=False)
    return Polytope(vertices, -1)


def convex_hull(points: Union[np.ndarray, Sequence[Sequence[float]]]) -> Polytope:
    """Canonical polytope spanned by ``points`` (an ``(m, n)`` array).

    >>> convex_hull([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [.25, .25, .25]]).intrinsic_dim
    3
    """
    pts = np.array(points, dtype=float)
    if pts.size == 0:
        raise EmptyInputError("convex_hull needs at least one point")
    if pts.ndim != 2:
        raise ValueError("points must form an (m, n) array")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points must be finite")
    pts = _dedup(pts, DEDUP_TOL * _bbox_scale(pts))
    n = pts.shape[1]
    center, vt, k = _affine_frame(pts)
    if k == 0:
        keep = np.array([0])
    elif k == 1:
        t = (pts - center) @ vt[0]
        keep = np.unique([int(np.argmin(t)), int(np.argmax(t))])
    elif k == n:
        keep = ConvexHull(pts).vertices
    else:
        keep = ConvexHull((pts - center) @ vt[:k].T).vertices
    vertices = _lexsorted(pts[np.sort(keep)])
    vertices.setflags(write=False)
    return Polytope(vertices, k)


def _simplex_vector_areas(P: np.ndarray) -> np.ndarray:
    """Normal vectors of length vol_{n-1} for a stack of ``(n, n)`` facet simplices."""
    F, n, _ = P.shape
    E = P[:, 1:, :] - P[:, :1, :]
    if n == 3:
        return np.cross(E[:, 0], E[:, 1]) / 2.0
    # generalized cross product: N . x = det([E; x])
    N = np.empty((F, n))
    M = np.empty((F, n, n))
    M[:, :-1, :] = E
    for k in range(n):
        M[:, -1, :] = 0.0
        M[:, -1, k] = 1.0
        N[:, k] = np.linalg.det(M)
    return N / math.factorial(n - 1)


def _compute_facets(K: Polytope) -> list[Facet]:
    n, k = K.dim, K.intrinsic_dim
    if k == n:
        hull = K.hull
        outward = hull.equations[:, :-1]
        N = _simplex_vector_areas(K.vertices[hull.simplices])
        N[np.einsum("ij,ij->i", N, outward) < 0] *= -1.0
        ngroups, labels = cluster_labels(outward, NORMAL_MERGE_TOL)
        vec = np.zeros((ngroups, n))
        np.add.at(vec, labels, N)
        area = np.linalg.norm(vec, axis=1)
        keep = area > 0
        normals = _lexsorted_rows_with(vec[keep] / area[keep, None], area[keep])
        return [Facet(u, float(a)) for u, a in normals]
    if k == n - 1:
        center, vt = K.frame
        w = sign_normalize(vt[n - 1].copy())
        coords = (K.vertices - center) @ vt[: n - 1].T
        area = _hull_volume(coords)
        if area <= 0:
            return []
        w.setflags(write=False)
        neg = -w + 0.0  # avoid -0.0 entries
        neg.setflags(write=False)
        return [Facet(w, area), Facet(neg, area)]
    return []


def _lexsorted_rows_with(rows: np.ndarray, values: np.ndarray) -> list[tuple[np.ndarray, float]]:
    order = np.lexsort(rows.T[::-1]) if len(rows) > 1 else np.arange(len(rows))
    out = []
    for i in order:
        r = rows[i].copy()
        r.setflags(write=False)
        out.append((r, values[i]))
    return out


def facets(K: Polytope) -> list[Facet]:
    """Facet normals and ``(n-1)``-measures of ``K``.

    Full-dimensional bodies get one entry per geometric facet; flat bodies
    get the two-sided pair ``(w, A), (-w, A)``; anything thinner gets none.
    """
    return list(K.facets)


def support(K: Polytope, x) -> float:
    """Support function ``h(K, x) = max_{y in K} x . y``."""
    if K.is_empty:
        raise EmptyBodyError("support function of the empty body is undefined")
    return float(np.max(K.vertices @ np.asarray(x, dtype=float)))


def volume(K: Polytope) -> float:
    if not K.is_full_dimensional:
        return 0.0
    return float(K.hull.volume)


def _check_unit(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if abs(np.linalg.norm(u) - 1.0) > UNIT_TOL:
        raise ValueError("direction must be a unit vector")
    return u


def project(K: Polytope, u) -> Polytope:
    """Orthogonal projection ``K | u^perp``, embedded in R^n."""
    u = _check_unit(u)
    if K.is_empty:
        return K
    V = K.vertices
    return convex_hull(V - np.outer(V @ u, u))


def shadow_area(K: Polytope, u) -> float:
    """``vol_{n-1}(K | u^perp)`` computed from the projected vertex hull.

    This route never touches facet data, so it serves as an independent
    check on the cosine-transform formula for projection bodies.
    """
    u = _check_unit(u)
    if K.is_empty or K.intrinsic_dim < K.dim - 1:
        return 0.0
    basis = null_space(u[None, :])
    return _hull_volume(K.vertices @ basis)


def _edge_pairs(K: Polytope) -> np.ndarray:
    m = len(K)
    if K.is_full_dimensional and m > K.dim + 1:
        simp = K.hull.simplices
        cols = [np.stack([simp[:, a], simp[:, b]], axis=1)
                for a in range(simp.shape[1]) for b in range(a + 1, simp.shape[1])]
        pairs = np.sort(np.concatenate(cols), axis=1)
        return np.unique(pairs, axis=0)
    i, j = np.triu_indices(m, k=1)
    return np.stack([i, j], axis=1)


def intersect_halfspace(K: Polytope, H: Hyperplane, side: Side) -> Polytope:
    """``K ∩ H+``, ``K ∩ H-`` or ``K ∩ H`` (``side`` is ``"+"``, ``"-"`` or ``"on"``)."""
    if side not in ("+", "-", "on"):
        raise ValueError(f"side must be '+', '-' or 'on', not {side!r}")
    if K.is_empty:
        return K
    V = K.vertices
    s = H.signed_distance(V)
    tol = DEDUP_TOL * max(K.scale, abs(H.offset))
    pos, neg = s > tol, s < -tol
    on = ~(pos | neg)
    keep = {"+": pos | on, "-": neg | on, "on": on}[side]
    pieces = [V[keep]]
    if pos.any() and neg.any():
        pairs = _edge_pairs(K)
        a, b = pairs[:, 0], pairs[:, 1]
        cross = (pos[a] & neg[b]) | (neg[a] & pos[b])
        a, b = a[cross], b[cross]
        t = s[a] / (s[a] - s[b])
        pieces.append(V[a] + t[:, None] * (V[b] - V[a]))
    pts = np.concatenate(pieces)
    if len(pts) == 0:
        return empty_polytope(K.dim)
    return convex_hull(pts)


def linear_image(K: Polytope, M) -> Polytope:
    """``M K``; singular ``M`` is allowed and flattens the body."""
    M = np.asarray(M, dtype=float)
    if M.shape != (K.dim, K.dim):
        raise ValueError(f"expected a {K.dim}x{K.dim} matrix, got {M.shape}")
    if K.is_empty:
        return K
    return convex_hull(K.vertices @ M.T)


def translate(K: Polytope, t) -> Polytope:
    if K.is_empty:
        return K
    return convex_hull(K.vertices + np.asarray(t, dtype=float))


def conv_with_origin(K: Polytope) -> Polytope:
    """``K_o = conv({0} ∪ K)``."""
    if K.is_empty:
        raise EmptyBodyError("conv({0} ∪ ∅) is not defined here")
    return convex_hull(np.vstack([K.vertices, np.zeros((1, K.dim))]))


# -- JSON file format: {"dim": n, "vertices": [[...], ...]} -------------------

def polytope_from_dict(data: dict) -> Polytope:
    if not isinstance(data, dict) or "vertices" not in data or "dim" not in data:
        raise PolytopeFormatError('polytope document needs "dim" and "vertices" keys')
    n = data["dim"]
    if not isinstance(n, int) or n < 1:
        raise PolytopeFormatError(f'"dim" must be a positive integer, got {n!r}')
    rows = data["vertices"]
    if not isinstance(rows, list) or not rows:
        raise PolytopeFormatError('"vertices" must be a nonempty list')
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise PolytopeFormatError(f"vertex {i} does not have {n} coordinates")
        if not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in row):
            raise PolytopeFormatError(f"vertex {i} has non-numeric coordinates")
    return convex_hull(rows)


def polytope_to_dict(K: Polytope) -> dict:
    return {"dim": K.dim, "vertices": K.vertices.tolist()}


def loads_polytope(text: str, source: str = "<string>") -> Polytope:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        lines = text.splitlines()
        line = lines[exc.lineno - 1] if exc.lineno <= len(lines) else ""
        raise PolytopeFormatError(
            f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}\n    {line}") from exc
    try:
        return polytope_from_dict(data)
    except PolytopeFormatError as exc:
        raise PolytopeFormatError(f"{source}: {exc}") from None


def read_polytope(path: Union[str, Path]) -> Polytope:
    path = Path(path)
    return loads_polytope(path.read_text(), str(path))


def write_polytope(K: Polytope, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(polytope_to_dict(K)) + "\n")
