"""Polar bodies, radial functions and polar volumes by spherical integration.

Bodies enter as oracles evaluated on stacks of unit vectors (``(N, n)``
arrays), so the same code handles zonotopes, polytopes, balls and exact
ellipsoids.  The volume of a star body is ``(1/n) ∫ rho(u)^n du`` and the polar
of ``K`` has radial function ``1 / h(K, .)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import DegenerateBodyError, DegenerateRadialError, OriginNotInteriorError
from .polytope import Polytope, volume
from .quadrature import SphericalQuadrature, kappa
from .valuations import ParamsLike, Zonotope, phi

Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SupportOracle:
    """``u -> h(K, u)`` on unit vectors.

    ``positive`` records whether the origin is interior to ``K`` (so that the
    polar is bounded); ``even`` marks origin-symmetric bodies.
    """

    dim: int
    eval: Evaluator
    positive: bool
    even: bool = False


@dataclass(frozen=True)
class RadialOracle:
    dim: int
    eval: Evaluator
    even: bool = False


def zonotope_support_oracle(Z: Zonotope) -> SupportOracle:
    return SupportOracle(Z.dim, Z.support_many, positive=Z.rank == Z.dim, even=True)


def polytope_support_oracle(K: Polytope) -> SupportOracle:
    V = K.vertices

    def h(U):
        return (np.asarray(U) @ V.T).max(axis=1)

    return SupportOracle(K.dim, h, positive=K.origin_in_interior())


def ball_support_oracle(n: int, r: float = 1.0) -> SupportOracle:
    return SupportOracle(n, lambda U: np.full(len(U), float(r)), positive=r > 0, even=True)


def ellipsoid_support_oracle(A) -> SupportOracle:
    """Exact support function of ``E = A B``: ``h(E, u) = |A^T u|``."""
    A = np.asarray(A, dtype=float)
    invertible = np.linalg.matrix_rank(A) == A.shape[0]
    return SupportOracle(A.shape[0], lambda U: np.linalg.norm(np.asarray(U) @ A, axis=1),
                         positive=bool(invertible), even=True)


def polytope_radial_oracle(K: Polytope) -> RadialOracle:
    """Radial function of a polytope with the origin in its interior."""
    if not K.origin_in_interior():
        raise OriginNotInteriorError("radial function needs 0 in the interior")
    eq = K.hull.equations
    N, b = eq[:, :-1], -eq[:, -1]

    def rho(U):
        d = np.asarray(U) @ N.T
        with np.errstate(divide="ignore"):
            ratio = np.where(d > 0, b / np.where(d > 0, d, 1.0), np.inf)
        return ratio.min(axis=1)

    return RadialOracle(K.dim, rho)


def as_support_oracle(body: Union[SupportOracle, Zonotope, Polytope]) -> SupportOracle:
    if isinstance(body, SupportOracle):
        return body
    if isinstance(body, Zonotope):
        return zonotope_support_oracle(body)
    if isinstance(body, Polytope):
        return polytope_support_oracle(body)
    raise TypeError(f"cannot build a support oracle from {type(body).__name__}")


def polar_radial(h: SupportOracle) -> RadialOracle:
    """Radial function of the polar body: ``rho(K*, u) = 1 / h(K, u)``."""
    if not h.positive:
        raise OriginNotInteriorError("polar body is unbounded: 0 is not interior")

    def rho(U):
        vals = h.eval(U)
        if np.any(vals <= 0):
            raise OriginNotInteriorError("support function vanished at a queried direction")
        return 1.0 / vals

    return RadialOracle(h.dim, rho, even=h.even)


def star_volume(rho: RadialOracle, q: SphericalQuadrature) -> float:
    n = q.dim
    if rho.dim != n:
        raise ValueError(f"oracle dimension {rho.dim} != quadrature dimension {n}")
    return q.integrate_func(lambda U: rho.eval(U) ** n, even=rho.even) / n


def polar_volume(K: Union[SupportOracle, Zonotope, Polytope], q: SphericalQuadrature) -> float:
    """``V(K*)`` for a body with the origin in its interior."""
    return star_volume(polar_radial(as_support_oracle(K)), q)


def harmonic_combination(alpha: float, K: RadialOracle, beta: float, L: RadialOracle) -> RadialOracle:
    """``alpha . K +^ beta . L``: reciprocal radial functions add with weights.

    This is the polar of ``alpha K* + beta L*``.
    """
    if alpha < 0 or beta < 0 or alpha + beta <= 0:
        raise ValueError("need alpha, beta >= 0, not both zero")
    if K.dim != L.dim:
        raise ValueError("dimension mismatch")

    def rho(U):
        rk, rl = K.eval(U), L.eval(U)
        if np.any(rk <= 0) or np.any(rl <= 0):
            raise DegenerateRadialError("radial function vanished at a queried direction")
        return 1.0 / (alpha / rk + beta / rl)

    return RadialOracle(K.dim, rho, even=K.even and L.even)


def dual_bm_gap(K: RadialOracle, L: RadialOracle, q: SphericalQuadrature) -> float:
    """``V(K +^ L)^{-1/n} - V(K)^{-1/n} - V(L)^{-1/n}`` (nonnegative for convex K, L)."""
    n = q.dim
    v_sum = star_volume(harmonic_combination(1.0, K, 1.0, L), q)
    return v_sum ** (-1 / n) - star_volume(K, q) ** (-1 / n) - star_volume(L, q) ** (-1 / n)


def petty_bound(n: int) -> float:
    """``V(B)^{n-1} V(Pi* B) = (kappa_n / kappa_{n-1})^n``."""
    return (kappa(n) / kappa(n - 1)) ** n


def phi_polar_volume(K: Polytope, p: ParamsLike, q: SphericalQuadrature) -> float:
    """``V(Phi* K)``; raises :class:`OriginNotInteriorError` when ``Phi K`` is flat."""
    return polar_volume(phi(K, p), q)


def affine_product(K: Polytope, p: ParamsLike, q: SphericalQuadrature) -> float:
    """``V(K)^{n-1} V(Phi* K)``, the quantity bounded by :func:`petty_bound`."""
    if not K.is_full_dimensional:
        raise DegenerateBodyError("affine product needs a full-dimensional body")
    return volume(K) ** (K.dim - 1) * phi_polar_volume(K, p, q)
