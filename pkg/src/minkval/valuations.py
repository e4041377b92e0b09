"""Projection bodies and the two-parameter family ``c1 * Pi + c2 * Pi_o``.

For a polytope, the projection body is the zonotope generated by the
half-weighted facet normals, so every valuation value here is a
:class:`Zonotope`.  Equality of valuation values is decided on canonical
generator lists rather than on sampled support functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .errors import CrossCheckError, InvalidParamsError, SingularMatrixError
from .polytope import Polytope, cluster_labels, shadow_area

#: parallel generators / equal atom directions closer than this are merged
MERGE_TOL = 1e-10
#: an atom is negative if its weight is below -NEGATIVE_REL * total |mass|
NEGATIVE_REL = 1e-12
#: relative agreement required between the two phi evaluation routes
CROSS_CHECK_TOL = 1e-9

_SIGN_TOL = 1e-12


def _sign_normalize_rows(D: np.ndarray) -> np.ndarray:
    """Flip rows so that the first non-negligible coordinate is positive."""
    if len(D) == 0:
        return D
    mag = np.abs(D)
    first = np.argmax(mag > _SIGN_TOL * mag.max(axis=1, keepdims=True), axis=1)
    flip = D[np.arange(len(D)), first] < 0
    out = D.copy()
    out[flip] *= -1.0
    return out + 0.0


def _lexorder(rows: np.ndarray) -> np.ndarray:
    if len(rows) <= 1:
        return np.arange(len(rows))
    return np.lexsort(rows.T[::-1])


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


# -- discrete measures on the sphere ------------------------------------------

@dataclass(frozen=True, eq=False)
class DiscreteSphericalMeasure:
    """Finite sum of weighted point masses on ``S^{n-1}``."""

    directions: np.ndarray
    weights: np.ndarray
    signed: bool = False

    def __post_init__(self):
        D = np.asarray(self.directions, dtype=float)
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if D.ndim != 2 or len(D) != len(w):
            raise ValueError("directions must be (m, n) and weights (m,)")
        if not self.signed and np.any(w < 0):
            raise ValueError("unsigned measure with negative weight")
        object.__setattr__(self, "directions", _readonly(D))
        object.__setattr__(self, "weights", _readonly(w))

    @property
    def dim(self) -> int:
        return self.directions.shape[1]

    def __len__(self) -> int:
        return len(self.weights)

    @property
    def atoms(self) -> list[tuple[np.ndarray, float]]:
        return [(u, float(w)) for u, w in zip(self.directions, self.weights)]

    @property
    def total_mass(self) -> float:
        return math.fsum(self.weights)

    @property
    def total_variation(self) -> float:
        return math.fsum(np.abs(self.weights))

    def weight_at(self, u, tol: float = 1e-9) -> float:
        """Weight of the atom at direction ``u`` (0 if there is none)."""
        if len(self) == 0:
            return 0.0
        u = np.asarray(u, dtype=float)
        hit = np.max(np.abs(self.directions - u), axis=1) <= tol
        return math.fsum(self.weights[hit])

    def negative_atoms(self, rel: float = NEGATIVE_REL) -> list[tuple[np.ndarray, float]]:
        cut = -rel * self.total_variation
        return [(u, float(w)) for u, w in zip(self.directions, self.weights) if w < cut]

    def cosine_transform(self, u) -> float:
        """``∫ |u . v| dmu(v)``."""
        u = np.asarray(u, dtype=float)
        return math.fsum(self.weights * np.abs(self.directions @ u))


def make_measure(directions, weights, dim: int | None = None,
                 signed: bool = False) -> DiscreteSphericalMeasure:
    """Canonical measure: equal directions merged, zero atoms dropped, sorted."""
    D = np.asarray(directions, dtype=float)
    w = np.asarray(weights, dtype=float).reshape(-1)
    if D.size == 0:
        if dim is None:
            raise ValueError("dim is required for an empty measure")
        return DiscreteSphericalMeasure(np.zeros((0, dim)), np.zeros(0), signed)
    D = D / np.linalg.norm(D, axis=1, keepdims=True)
    ngroups, labels = cluster_labels(D, MERGE_TOL)
    _, first = np.unique(labels, return_index=True)
    reps = D[first]
    merged = np.zeros(ngroups)
    np.add.at(merged, labels, w)
    # unique() orders groups by label; re-pair representatives with sums
    sums = merged[labels[first]]
    keep = sums != 0
    reps, sums = reps[keep], sums[keep]
    order = _lexorder(reps)
    return DiscreteSphericalMeasure(reps[order], sums[order], signed)


def combine_measures(terms: Iterable[tuple[float, DiscreteSphericalMeasure]],
                     dim: int) -> DiscreteSphericalMeasure:
    """Signed linear combination ``Σ coef_k mu_k`` with atoms merged by direction."""
    dirs, weights = [], []
    for coef, mu in terms:
        if len(mu):
            dirs.append(mu.directions)
            weights.append(coef * mu.weights)
    if not dirs:
        return make_measure([], [], dim=dim, signed=True)
    return make_measure(np.concatenate(dirs), np.concatenate(weights), signed=True)


def measure_to_dict(mu: DiscreteSphericalMeasure) -> dict:
    return {"dim": mu.dim,
            "atoms": [{"u": u.tolist(), "w": float(w)} for u, w in mu.atoms]}


# -- zonotopes ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Zonotope:
    """Origin-symmetric zonotope ``Σ_i [-g_i, g_i]``.

    Build canonical instances with :func:`make_zonotope`; the constructor
    stores generators as given.
    """

    generators: np.ndarray
    canonical: bool = False

    def __post_init__(self):
        G = np.asarray(self.generators, dtype=float)
        if G.ndim != 2:
            raise ValueError("generators must be an (m, n) array")
        object.__setattr__(self, "generators", _readonly(G))

    @classmethod
    def zero(cls, n: int) -> Zonotope:
        return cls(np.zeros((0, n)), canonical=True)

    @property
    def dim(self) -> int:
        return self.generators.shape[1]

    def __len__(self) -> int:
        return len(self.generators)

    @property
    def is_zero(self) -> bool:
        return len(self.generators) == 0 or not np.any(self.generators)

    @property
    def rank(self) -> int:
        if len(self) == 0:
            return 0
        return int(np.linalg.matrix_rank(self.generators))

    def scaled(self, c: float) -> Zonotope:
        if c < 0:
            raise ValueError("zonotopes are symmetric; scale by c >= 0")
        if c == 0:
            return Zonotope.zero(self.dim)
        return Zonotope(self.generators * c, canonical=self.canonical)

    def support_many(self, U: np.ndarray, chunk: int = 2048) -> np.ndarray:
        """``h(Z, u)`` for every row of ``U``, evaluated in fixed-size chunks."""
        U = np.asarray(U, dtype=float)
        out = np.empty(len(U))
        if len(self) == 0:
            out[:] = 0.0
            return out
        G = self.generators.T
        for start in range(0, len(U), chunk):
            stop = start + chunk
            out[start:stop] = np.abs(U[start:stop] @ G).sum(axis=1)
        return out

    def __repr__(self) -> str:
        return f"Zonotope(dim={self.dim}, ngenerators={len(self)}, canonical={self.canonical})"


def _parallel_labels(D: np.ndarray) -> tuple[int, np.ndarray]:
    """Group unit rows that agree up to sign within MERGE_TOL."""
    m = len(D)
    if m <= 1:
        return m, np.zeros(m, dtype=int)
    tree = cKDTree(D)
    same = tree.query_pairs(MERGE_TOL, p=np.inf, output_type="ndarray")
    opposite = tree.sparse_distance_matrix(cKDTree(-D), MERGE_TOL, p=np.inf,
                                           output_type="ndarray")
    rows = [same[:, 0]] if len(same) else []
    cols = [same[:, 1]] if len(same) else []
    if len(opposite):
        rows.append(opposite["i"])
        cols.append(opposite["j"])
    if not rows:
        return m, np.arange(m)
    r, c = np.concatenate(rows), np.concatenate(cols)
    graph = coo_matrix((np.ones(len(r)), (r, c)), shape=(m, m))
    return connected_components(graph, directed=False)


def canonical_generators(G: np.ndarray) -> np.ndarray:
    """Merge parallel generators, drop zeros, sign-normalize and sort."""
    G = np.asarray(G, dtype=float)
    norms = np.linalg.norm(G, axis=1)
    G, norms = G[norms > 0], norms[norms > 0]
    if len(G) == 0:
        return G
    D = _sign_normalize_rows(G / norms[:, None])
    ngroups, labels = _parallel_labels(D)
    if ngroups < len(G):
        _, first = np.unique(labels, return_index=True)
        rep = np.empty_like(D[:ngroups])
        rep[labels[first]] = D[first]
        signs = np.where(np.einsum("ij,ij->i", G, rep[labels]) < 0, -1.0, 1.0)
        merged = np.zeros((ngroups, G.shape[1]))
        np.add.at(merged, labels, signs[:, None] * G)
        G = merged
    G = _sign_normalize_rows(G)
    return G[_lexorder(G)]


def make_zonotope(generators, dim: int | None = None) -> Zonotope:
    G = np.asarray(generators, dtype=float)
    if G.size == 0:
        if dim is None:
            raise ValueError("dim is required for a zonotope without generators")
        return Zonotope.zero(dim)
    return Zonotope(canonical_generators(G), canonical=True)


def canonicalize(Z: Zonotope) -> Zonotope:
    if Z.canonical:
        return Z
    return make_zonotope(Z.generators, dim=Z.dim)


def zonotope_support(Z: Zonotope, u) -> float:
    """``h(Z, u) = Σ_i |u . g_i|``, summed exactly (independent of term order)."""
    u = np.asarray(u, dtype=float)
    if len(Z) == 0:
        return 0.0
    return math.fsum(np.abs((Z.generators * u).sum(axis=1)))


def minkowski_sum(Z1: Zonotope, Z2: Zonotope) -> Zonotope:
    if Z1.dim != Z2.dim:
        raise ValueError("dimension mismatch")
    return make_zonotope(np.concatenate([Z1.generators, Z2.generators]), dim=Z1.dim)


def zonotope_residual(Z1: Zonotope, Z2: Zonotope) -> float:
    """Largest canonical-generator discrepancy, relative to the zonotopes' size.

    Generators are matched up to sign by nearest neighbour in both
    directions, so a generator missing on one side counts with its full
    length.  The size unit is the larger of the two sums ``Σ |g_i|``.
    """
    if Z1.dim != Z2.dim:
        raise ValueError("dimension mismatch")
    A, B = canonicalize(Z1).generators, canonicalize(Z2).generators
    scale = max(np.linalg.norm(A, axis=1).sum(), np.linalg.norm(B, axis=1).sum())
    if scale == 0:
        return 0.0
    if len(A) == 0 or len(B) == 0:
        return float(np.linalg.norm(np.concatenate([A, B]), axis=1).max() / scale)
    d_ab, _ = cKDTree(np.concatenate([B, -B])).query(A)
    d_ba, _ = cKDTree(np.concatenate([A, -A])).query(B)
    return float(max(d_ab.max(), d_ba.max()) / scale)


def zonotope_equal(Z1: Zonotope, Z2: Zonotope, tol: float = 1e-9) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    return zonotope_residual(Z1, Z2) <= tol


def contravariant_image(Z: Zonotope, M) -> Zonotope:
    """``|det M| M^{-T} Z``, the transformation rule of projection bodies."""
    M = np.asarray(M, dtype=float)
    if M.shape != (Z.dim, Z.dim):
        raise ValueError(f"expected a {Z.dim}x{Z.dim} matrix")
    s = np.linalg.svd(M, compute_uv=False)
    if s[-1] <= Z.dim * np.finfo(float).eps * s[0]:
        raise SingularMatrixError("matrix is singular")
    if len(Z) == 0:
        return Zonotope.zero(Z.dim)
    det = abs(np.linalg.det(M))
    G = det * np.linalg.solve(M.T, Z.generators.T).T
    return make_zonotope(G, dim=Z.dim)


def zonotope_to_dict(Z: Zonotope) -> dict:
    return {"dim": Z.dim, "generators": canonicalize(Z).generators.tolist()}


def zonotope_from_dict(data: dict) -> Zonotope:
    return make_zonotope(np.asarray(data["generators"], dtype=float).reshape(-1, data["dim"]),
                         dim=data["dim"])


# -- the valuation family -----------------------------------------------------

@dataclass(frozen=True)
class ValuationParams:
    """Coefficients of ``Phi = c1 * Pi + c2 * Pi_o``; both must be >= 0.

    The same valuation has support function
    ``a1 * vol(K|u^⊥) + a2 * vol((K_o|u^⊥) \\ (K|u^⊥))`` with
    ``a1 = c1 + c2`` and ``a2 = c2``.
    """

    c1: float
    c2: float

    def __post_init__(self):
        for name in ("c1", "c2"):
            v = getattr(self, name)
            if not isinstance(v, (int, float, np.floating, np.integer)) or not math.isfinite(v):
                raise InvalidParamsError(f"{name} must be a finite real, got {v!r}")
            if v < 0:
                raise InvalidParamsError(f"{name} must be >= 0, got {v}")
            object.__setattr__(self, name, float(v))

    @classmethod
    def from_alternate(cls, a1: float, a2: float) -> ValuationParams:
        if a2 < 0 or a1 < a2:
            raise InvalidParamsError("need a1 >= a2 >= 0")
        return cls(a1 - a2, a2)

    @classmethod
    def lam(cls, lam: float) -> ValuationParams:
        """``lam * Pi + (1 - lam) * Pi_o``, normalized so that Phi B = Pi B."""
        if not 0.0 <= lam <= 1.0:
            raise InvalidParamsError("lambda must lie in [0, 1]")
        return cls(lam, 1.0 - lam)

    @property
    def a1(self) -> float:
        return self.c1 + self.c2

    @property
    def a2(self) -> float:
        return self.c2

    @property
    def is_trivial(self) -> bool:
        return self.c1 == 0 and self.c2 == 0


ParamsLike = Union[ValuationParams, Sequence[float]]


def as_params(p: ParamsLike) -> ValuationParams:
    if isinstance(p, ValuationParams):
        return p
    c1, c2 = p
    return ValuationParams(c1, c2)


def surface_area_measure(K: Polytope) -> DiscreteSphericalMeasure:
    """``S_{n-1}(K, .)``: atoms at facet normals weighted by facet measure."""
    fs = K.facets if not K.is_empty else ()
    if not fs:
        return DiscreteSphericalMeasure(np.zeros((0, K.dim)), np.zeros(0))
    return DiscreteSphericalMeasure(np.array([f.outer_normal for f in fs]),
                                    np.array([f.measure for f in fs]))


def projection_body(K: Polytope) -> Zonotope:
    """``Pi K``: the zonotope generated by ``(a_i / 2) u_i`` over the facets of K."""
    mu = surface_area_measure(K)
    if len(mu) == 0:
        return Zonotope.zero(K.dim)
    return make_zonotope(0.5 * mu.weights[:, None] * mu.directions, dim=K.dim)


def projection_body_o(K: Polytope) -> Zonotope:
    """``Pi_o K = Pi(conv({0} ∪ K))``; the empty body maps to {0}."""
    if K.is_empty:
        return Zonotope.zero(K.dim)
    return projection_body(K.origin_hull)


def _cross_check_directions(n: int) -> np.ndarray:
    rng = np.random.default_rng(20240917 + n)
    U = np.concatenate([np.eye(n), np.ones((1, n)), rng.normal(size=(12, n))])
    return U / np.linalg.norm(U, axis=1, keepdims=True)


def phi_support_by_shadows(K: Polytope, p: ParamsLike, u) -> float:
    """``h(Phi K, u)`` via shadow areas: ``a1 |K|u| + a2 (|K_o|u| - |K|u|)``.

    The difference of shadows is the area of ``(K_o|u^⊥) \\ (K|u^⊥)`` because
    ``K|u^⊥`` is contained in ``K_o|u^⊥``.
    """
    p = as_params(p)
    if K.is_empty:
        return 0.0
    s = shadow_area(K, u)
    s_o = shadow_area(K.origin_hull, u) if p.a2 else s
    return p.a1 * s + p.a2 * (s_o - s)


def phi(K: Polytope, p: ParamsLike, cross_check: bool = False) -> Zonotope:
    """``Phi K = c1 Pi K + c2 Pi_o K`` as a canonical zonotope.

    With ``cross_check=True`` the result is compared against the shadow-area
    route of :func:`phi_support_by_shadows` on a fixed set of directions and
    :class:`CrossCheckError` is raised on disagreement.
    """
    p = as_params(p)
    parts = []
    if p.c1:
        parts.append(projection_body(K).scaled(p.c1).generators)
    if p.c2:
        parts.append(projection_body_o(K).scaled(p.c2).generators)
    Z = make_zonotope(np.concatenate(parts) if parts else [], dim=K.dim)
    if cross_check:
        for u in _cross_check_directions(K.dim):
            via_gen = zonotope_support(Z, u)
            via_shadow = phi_support_by_shadows(K, p, u)
            unit = max(abs(via_gen), abs(via_shadow), (p.a1 + p.a2) * K.scale ** (K.dim - 1), 1e-300)
            if abs(via_gen - via_shadow) > CROSS_CHECK_TOL * unit:
                raise CrossCheckError(
                    f"h(Phi K, u) mismatch at u={u.tolist()}: generators {via_gen!r}, "
                    f"shadows {via_shadow!r}")
    return Z


def rho_measure(K: Polytope, c1: float, c2: float) -> DiscreteSphericalMeasure:
    """The signed measure ``(c1/2) S(K_o, .) - (c2/2) S(K, .)``.

    Its cosine transform is ``c1 vol(K_o|u^⊥) - c2 vol(K|u^⊥)``, the support
    function a valuation with ``a1 < a2`` would need; the measure has a
    negative atom on the standard simplex, which rules that case out.
    """
    if K.is_empty:
        return make_measure([], [], dim=K.dim, signed=True)
    return combine_measures([(c1 / 2.0, surface_area_measure(K.origin_hull)),
                             (-c2 / 2.0, surface_area_measure(K))], dim=K.dim)
