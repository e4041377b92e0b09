"""Seeded verification harness.

Every check returns a :class:`CheckReport`.  Exact-path checks (generator
algebra) run at ``1e-9`` or tighter; checks that go through spherical
quadrature use a relative tolerance of ``1e-5`` at level 5 unless overridden.

:func:`run_suite` builds each case from its own random stream
``default_rng([seed, check_index, case_index])``, so the report list does not
depend on evaluation order or on the number of worker processes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Iterable, Optional, Sequence

import numpy as np
from scipy.linalg import null_space
from scipy.spatial import ConvexHull

from . import bodies
from .errors import DegenerateBodyError, GeometryError, WrongStratumError
from .polar import (RadialOracle, dual_bm_gap, ellipsoid_support_oracle, petty_bound,
                    polar_volume, polytope_radial_oracle)
from .polytope import (Hyperplane, Polytope, convex_hull, intersect_halfspace, linear_image,
                       shadow_area, volume)
from .quadrature import SphericalQuadrature, kappa, make_quadrature
from .valuations import (ParamsLike, ValuationParams, Zonotope, as_params, contravariant_image,
                         make_zonotope, minkowski_sum, phi, projection_body, projection_body_o,
                         rho_measure, zonotope_residual, zonotope_support)

SCHEMA = "minkval.report/1"

EXACT_TOL = 1e-9
CONTRAVARIANCE_TOL = 1e-8
LEMMA5_TOL = 1e-12
RHO_TOL = 1e-12
CAUCHY_TOL = 1e-9
DUAL_BM_TOL = 1e-8
QUAD_TOL = 1e-5
ABS_COS_TOL = 1e-6
EQUALITY_TOL = 1e-4
PETTY_TOL = 1e-4
# "strictly smaller" needs slack above STRICT_BAND * tol; otherwise inconclusive
STRICT_BAND = 10.0
DEFAULT_LEVEL = 5

PARAM_GRID: tuple[tuple[float, float], ...] = ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (2.0, 3.0))
LAMBDA_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)
DISSECTION_LAMBDAS = tuple(round(0.1 * k, 1) for k in range(1, 10))

PhiFn = Callable[[Polytope, ParamsLike], Zonotope]


@dataclass
class CheckReport:
    check: str
    params: dict
    residual: float
    tol: float
    passed: bool = field(init=False)
    inconclusive: bool = False
    witness: Optional[dict] = None
    seed: Optional[int] = None

    def __post_init__(self):
        self.residual = float(self.residual)
        self.tol = float(self.tol)
        self.passed = bool(self.residual <= self.tol)

    def to_dict(self) -> dict:
        d = asdict(self)
        return {"schema": SCHEMA, **d}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), allow_nan=False)


def _failure(check: str, params: dict, exc: BaseException, seed=None, witness=None) -> CheckReport:
    """Report for a check whose computation raised: an infinite residual is
    recorded as the largest finite double so the JSON stays standard."""
    w = dict(witness or {})
    w["error"] = f"{type(exc).__name__}: {exc}"
    return CheckReport(check, params, np.finfo(float).max, 0.0, witness=w, seed=seed)


def _vlist(K: Polytope) -> list:
    return K.vertices.tolist()


def _pair(p: ParamsLike) -> list[float]:
    if isinstance(p, ValuationParams):
        return [p.c1, p.c2]
    return [float(p[0]), float(p[1])]


# -- dissections ----------------------------------------------------------------

@dataclass(frozen=True)
class DissectionCase:
    body: Polytope
    plane: Hyperplane
    plus: Polytope
    minus: Polytope
    cut: Polytope
    provenance: str

    @classmethod
    def from_plane(cls, body: Polytope, plane: Hyperplane, provenance: str = "random-cut"):
        return cls(body, plane, intersect_halfspace(body, plane, "+"),
                   intersect_halfspace(body, plane, "-"), intersect_halfspace(body, plane, "on"),
                   provenance)

    def describe(self) -> dict:
        return {"provenance": self.provenance, "n": self.body.dim,
                "body_dim": self.body.intrinsic_dim}

    def witness(self) -> dict:
        return {"body": _vlist(self.body), "normal": self.plane.normal.tolist(),
                "offset": self.plane.offset}


def dissection_case(lam: float, i: int, j: int, n: int = 3) -> DissectionCase:
    """The standard simplex cut by ``H_lambda(i, j)`` (indices 0-based)."""
    S = bodies.standard_simplex(n)
    H = bodies.dissection_hyperplane(lam, i, j, n)
    return DissectionCase.from_plane(S, H, provenance=f"dissection(lambda={lam}, i={i}, j={j})")


def _phi_of(phi_fn: PhiFn, K: Polytope, p) -> Zonotope:
    if K.is_empty:
        return Zonotope.zero(K.dim)
    return phi_fn(K, p)


def check_valuation_identity(case: DissectionCase, p: ParamsLike, phi_fn: PhiFn = phi,
                             tol: float = EXACT_TOL, seed=None) -> CheckReport:
    """``Phi K+ + Phi K- = Phi K + Phi (K ∩ H)`` as canonical zonotopes."""
    params = {**case.describe(), "p": _pair(p)}
    try:
        left = minkowski_sum(_phi_of(phi_fn, case.plus, p), _phi_of(phi_fn, case.minus, p))
        right = minkowski_sum(_phi_of(phi_fn, case.body, p), _phi_of(phi_fn, case.cut, p))
        r = zonotope_residual(left, right)
    except (GeometryError, ValueError) as exc:
        return _failure("valuation_identity", params, exc, seed, case.witness())
    rep = CheckReport("valuation_identity", params, r, tol, seed=seed)
    if not rep.passed:
        rep.witness = case.witness()
    return rep


def check_contravariance(K: Polytope, M, p: ParamsLike, phi_fn: PhiFn = phi,
                         tol: float = CONTRAVARIANCE_TOL, seed=None) -> CheckReport:
    """``Phi(M K) = |det M| M^{-T} Phi K``; raises on singular ``M``."""
    M = np.asarray(M, dtype=float)
    params = {"n": K.dim, "p": _pair(p), "det": float(np.linalg.det(M)),
              "cond": float(np.linalg.cond(M))}
    expected = contravariant_image(phi_fn(K, p), M)
    try:
        r = zonotope_residual(phi_fn(linear_image(K, M), p), expected)
    except (GeometryError, ValueError) as exc:
        return _failure("contravariance", params, exc, seed, {"body": _vlist(K), "M": M.tolist()})
    rep = CheckReport("contravariance", params, r, tol, seed=seed)
    if not rep.passed:
        rep.witness = {"body": _vlist(K), "M": M.tolist()}
    return rep


# -- degenerate bodies ---------------------------------------------------------------

def _measure_in_span(points: np.ndarray, axes: np.ndarray) -> float:
    """k-volume of ``conv(points)`` where the points lie in ``span(axes)`` (k rows)."""
    coords = points @ axes.T
    k = axes.shape[0]
    if k == 1:
        return float(coords.max() - coords.min())
    return float(ConvexHull(coords).volume)


def lemma5_stratum(K: Polytope) -> str:
    n, k = K.dim, K.intrinsic_dim
    if k == n:
        raise WrongStratumError("full-dimensional bodies have no degenerate law")
    if k <= n - 3:
        return "low"
    through = K.origin_in_affine_hull()
    if k == n - 2:
        return "codim2-through-origin" if through else "codim2-off-origin"
    return "hyperplane-through-origin" if through else "hyperplane-off-origin"


def check_lemma5(K: Polytope, p: ParamsLike, phi_fn: PhiFn = phi,
                 tol: float = LEMMA5_TOL, seed=None) -> CheckReport:
    """Degenerate-body laws for ``Phi``:

    * ``dim K <= n-3``, or ``dim K = n-2`` with ``0 ∈ aff K``: ``Phi K = {0}``;
    * ``dim K = n-2``, ``0 ∉ aff K``: the segment ``c2 vol_{n-1}(K_o) [-w, w]``;
    * ``dim K = n-1``, ``0 ∈ aff K``: ``Phi K`` lies on the normal line of ``aff K``
      and equals ``(c1 vol(K) + c2 vol(K_o)) [-w, w]``.

    A hyperplane body off the origin has no closed-form law and reports a
    trivial pass.  The expected generators come from direct volume formulas,
    not from facet data.
    """
    pp = as_params(p)
    n = K.dim
    stratum = lemma5_stratum(K)
    params = {"n": n, "body_dim": K.intrinsic_dim, "stratum": stratum, "p": _pair(p)}
    try:
        Z = phi_fn(K, p)
        if stratum in ("low", "codim2-through-origin"):
            expected = Zonotope.zero(n)
        elif stratum == "codim2-off-origin":
            center, axes = K.frame
            k = K.intrinsic_dim
            direction = axes[:k]
            # distance from 0 to aff K and the unit normal of aff({0} ∪ K)
            foot = center - direction.T @ (direction @ center)
            dist = float(np.linalg.norm(foot))
            base = _measure_in_span(K.vertices - center, direction)
            vol_o = base * dist / (n - 1)
            w = null_space(np.vstack([direction, foot]))[:, 0]
            expected = make_zonotope([pp.c2 * vol_o * w], dim=n)
            params["vol_origin_hull"] = vol_o
        elif stratum == "hyperplane-through-origin":
            _, axes = K.frame
            direction, w = axes[: n - 1], axes[n - 1]
            vol_k = _measure_in_span(K.vertices, direction)
            vol_o = _measure_in_span(np.vstack([K.vertices, np.zeros(n)]), direction)
            expected = make_zonotope([(pp.c1 * vol_k + pp.c2 * vol_o) * w], dim=n)
            params["vol"], params["vol_origin_hull"] = vol_k, vol_o
        else:
            params["law"] = "none"
            return CheckReport("lemma5", params, 0.0, tol, seed=seed)
        r = zonotope_residual(Z, expected)
        if stratum == "hyperplane-through-origin" and len(Z):
            # containment in the normal line, relative to the generator size
            G = Z.generators
            off = np.linalg.norm(G - np.outer(G @ w, w), axis=1).max()
            r = max(r, float(off / np.linalg.norm(G, axis=1).sum()))
    except (GeometryError, ValueError) as exc:
        return _failure("lemma5", params, exc, seed, {"body": _vlist(K)})
    rep = CheckReport("lemma5", params, r, tol, seed=seed)
    if not rep.passed:
        rep.witness = {"body": _vlist(K), "generators": Z.generators.tolist(),
                       "expected": expected.generators.tolist()}
    return rep


def check_rho_obstruction(c1: float, c2: float, n: int = 3, tol: float = RHO_TOL,
                          seed=None) -> CheckReport:
    """The signed measure of the standard simplex has weight
    ``-(c2/2) vol_{n-1}(P)`` at ``-(1,...,1)/sqrt(n)``."""
    params = {"n": n, "c1": float(c1), "c2": float(c2)}
    if c2 == 0:
        params["applicable"] = False
        return CheckReport("rho_obstruction", params, 0.0, tol, seed=seed)
    P = bodies.standard_simplex(n)
    mu = rho_measure(P, c1, c2)
    w = -np.ones(n) / math.sqrt(n)
    # vol_{n-1} of conv{e_1..e_n} is sqrt(n)/(n-1)!
    expected = -(c2 / 2.0) * math.sqrt(n) / math.factorial(n - 1)
    got = mu.weight_at(w)
    negative = [(u.tolist(), float(x)) for u, x in mu.negative_atoms()]
    r = abs(got - expected) if got < 0 else abs(expected)
    params["expected_weight"] = expected
    params["weight"] = got
    rep = CheckReport("rho_obstruction", params, r, tol, seed=seed,
                      witness={"direction": w.tolist(), "negative_atoms": negative})
    return rep


def check_cauchy(K: Polytope, U: np.ndarray, tol: float = CAUCHY_TOL, seed=None) -> CheckReport:
    """``h(Pi K, u)`` from generators against the shadow area of ``K`` on ``u^⊥``."""
    Z = projection_body(K)
    worst, arg = 0.0, None
    for u in U:
        s = shadow_area(K, u)
        err = abs(zonotope_support(Z, u) - s) / s
        if err > worst:
            worst, arg = err, u
    rep = CheckReport("cauchy", {"n": K.dim, "directions": len(U)}, worst, tol, seed=seed)
    if not rep.passed:
        rep.witness = {"body": _vlist(K), "u": arg.tolist()}
    return rep


# -- quadrature-path checks ------------------------------------------------------------

def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


def check_theorem8_chain(K: Polytope, lam: float, q: SphericalQuadrature,
                         tol: float = QUAD_TOL, seed=None) -> CheckReport:
    """Inequalities for ``Phi = lam Pi + (1 - lam) Pi_o``:

    (a) ``V(Phi*)^{-1/n} >= lam V(Pi*)^{-1/n} + (1-lam) V(Pi_o*)^{-1/n}``,
    (b) ``V(Pi_o*) <= V(Pi*)`` with equality when ``0 ∈ K``,
    (c) ``V(Phi*) <= V(Pi*)``, equality when ``0 ∈ K`` or ``lam = 1``,
    (d) ``V(K)^{n-1} V(Phi*) <= (kappa_n / kappa_{n-1})^n``.

    Violations are measured relatively.  Equality deviations are compared
    with ``EQUALITY_TOL`` and rescaled to ``tol`` in the residual, so
    ``passed`` still means ``residual <= tol``.  Expected strict inequalities
    whose slack is under ``STRICT_BAND * tol`` mark the report inconclusive.
    """
    if not K.is_full_dimensional:
        raise DegenerateBodyError("the inequality chain needs a full-dimensional body")
    n = K.dim
    contains_origin = K.contains_origin()
    params = {"n": n, "lambda": float(lam), "contains_origin": contains_origin,
              "level": q.level}
    try:
        pi, pi_o = projection_body(K), projection_body_o(K)
        v_pi, v_o = polar_volume(pi, q), polar_volume(pi_o, q)
        v_phi = polar_volume(phi(K, ValuationParams.lam(lam)), q)
    except (GeometryError, ValueError) as exc:
        return _failure("theorem8_chain", params, exc, seed, {"body": _vlist(K)})
    vol = volume(K)
    bound = petty_bound(n)
    lhs_a = v_phi ** (-1 / n)
    rhs_a = lam * v_pi ** (-1 / n) + (1 - lam) * v_o ** (-1 / n)
    product = vol ** (n - 1) * v_phi
    dev = {
        "a": max(0.0, rhs_a - lhs_a) / lhs_a,
        "b": max(0.0, v_o / v_pi - 1.0),
        "c": max(0.0, v_phi / v_pi - 1.0),
        "d": max(0.0, product / bound - 1.0),
    }
    scale = tol / EQUALITY_TOL
    inconclusive = []
    if contains_origin:
        dev["b_equality"] = _rel(v_o, v_pi) * scale
        dev["c_equality"] = _rel(v_phi, v_pi) * scale
    else:
        if 1.0 - v_o / v_pi <= STRICT_BAND * tol:
            inconclusive.append("b")
        if lam < 1.0 and 1.0 - v_phi / v_pi <= STRICT_BAND * tol:
            inconclusive.append("c")
    if lam == 1.0:
        dev["c_equality"] = _rel(v_phi, v_pi) * scale
    params.update({"V_pi_polar": v_pi, "V_pi_o_polar": v_o, "V_phi_polar": v_phi,
                   "affine_product": product, "bound": bound})
    r = max(dev.values())
    rep = CheckReport("theorem8_chain", params, r, tol, seed=seed)
    if inconclusive:
        rep.inconclusive = True
        rep.params["inconclusive_parts"] = inconclusive
    if not rep.passed:
        rep.witness = {"body": _vlist(K), "deviations": dev}
    return rep


def check_dual_bm(K: RadialOracle, L: RadialOracle, q: SphericalQuadrature, dilates: bool,
                  tol: float = DUAL_BM_TOL, seed=None, witness=None) -> CheckReport:
    """Harmonic dual Brunn–Minkowski: gap ``>= 0``, and ``= 0`` for dilates."""
    gap = dual_bm_gap(K, L, q)
    r = abs(gap) if dilates else max(0.0, -gap)
    rep = CheckReport("dual_bm", {"n": q.dim, "dilates": dilates, "gap": gap}, r, tol, seed=seed)
    if not rep.passed:
        rep.witness = witness
    return rep


def quadrature_cases(q: SphericalQuadrature) -> list[tuple[str, Callable[[], float], float, float]]:
    """``(name, compute, exact value, default tolerance)`` for analytic integrals.

    ``Pi [-1,1]^n = [-2^{n-1}, 2^{n-1}]^n`` whose polar is a cross-polytope of
    volume ``2^n / n! * 2^{-n(n-1)}``; ``∫ |u . e| du = 2 kappa_{n-1}``.
    """
    n = q.dim
    cube = bodies.cube(n)
    axes = np.diag(np.arange(1.0, n + 1.0))
    e_last = np.eye(n)[-1]
    return [
        ("ball_polar", lambda: polar_volume(ellipsoid_support_oracle(np.eye(n)), q),
         kappa(n), QUAD_TOL),
        ("cube_projection_polar", lambda: polar_volume(projection_body(cube), q),
         2.0 ** n / math.factorial(n) * 2.0 ** (-n * (n - 1)), QUAD_TOL),
        ("ellipsoid_polar", lambda: polar_volume(ellipsoid_support_oracle(axes), q),
         kappa(n) / math.factorial(n), QUAD_TOL),
        ("abs_cosine", lambda: q.integrate_func(lambda U: np.abs(U @ e_last), even=True),
         2.0 * kappa(n - 1), ABS_COS_TOL),
    ]


def check_quadrature(name: str, value: float, exact: float, tol: float, level: int,
                     seed=None) -> CheckReport:
    r = _rel(value, exact)
    rep = CheckReport("quadrature", {"case": name, "level": level, "value": value,
                                     "exact": exact}, r, tol, seed=seed)
    if not rep.passed:
        rep.witness = {"value": value, "exact": exact}
    return rep


def check_petty_value(name: str, product: float, expected: float, tol: float = PETTY_TOL,
                      seed=None, extra: Optional[dict] = None) -> CheckReport:
    r = _rel(product, expected)
    params = {"case": name, "product": product, "expected": expected, **(extra or {})}
    rep = CheckReport("petty", params, r, tol, seed=seed)
    if not rep.passed:
        rep.witness = {"product": product, "expected": expected}
    return rep


def check_ball_convergence(levels: Sequence[int], q: SphericalQuadrature,
                           slack: float = PETTY_TOL, low: float = 0.999, seed=None) -> CheckReport:
    """Geodesic ball approximations: products increase with refinement and the
    finest ratio to the ball bound lies in ``[low, 1 + slack]``."""
    from .polar import affine_product
    bound = petty_bound(3)
    ratios = [affine_product(bodies.geodesic_ball(L), (1.0, 0.0), q) / bound for L in levels]
    drops = [max(0.0, a - b) for a, b in zip(ratios, ratios[1:])]
    final = ratios[-1]
    band = max(0.0, low - final, final - (1.0 + slack))
    r = max([band, *drops])
    params = {"case": "geodesic_ball", "levels": list(levels), "ratios": ratios}
    rep = CheckReport("petty", params, r, slack, seed=seed)
    if not rep.passed:
        rep.witness = {"ratios": ratios}
    return rep


# -- case generators ---------------------------------------------------------------

def _random_body(rng: np.random.Generator, n: int = 3) -> Polytope:
    kind = rng.integers(0, 10)
    if kind < 5:
        return bodies.random_polytope(rng, n)
    if kind < 7:
        return bodies.random_polytope(rng, n, shift=bodies.random_shift(rng, n))
    if kind == 7:
        return linear_image(bodies.cube(n), bodies.random_gl_plus(rng, n, 10.0))
    if kind == 8:
        return bodies.corner_simplex(n)
    # flat polygon (n=3) or flat polytope in a random hyperplane
    axes = bodies.random_rotation(rng, n)[: n - 1]
    pts = rng.standard_normal((int(rng.integers(n, 12)), n - 1)) @ axes
    if rng.random() < 0.5:
        pts = pts + bodies.random_shift(rng, n, 0.2, 1.5)
    return convex_hull(pts)


def _random_plane(rng: np.random.Generator, K: Polytope) -> Hyperplane:
    """A cut through ``K`` at least ``1e-6 * diam`` away from every vertex, or
    (rarely) a plane missing ``K`` entirely."""
    n = K.dim
    diam = K.scale
    if rng.random() < 0.05:
        u = rng.standard_normal(n)
        u /= np.linalg.norm(u)
        return Hyperplane(u, float((K.vertices @ u).max() + 0.5 * diam))
    for _ in range(1000):
        u = rng.standard_normal(n)
        u /= np.linalg.norm(u)
        wts = rng.dirichlet(np.ones(len(K)))
        x = wts @ K.vertices
        H = Hyperplane(u, float(u @ x))
        if np.abs(H.signed_distance(K.vertices)).min() > 1e-6 * diam:
            return H
    return H


def _dissection_cases(rng, n=3) -> DissectionCase:
    K = _random_body(rng, n)
    return DissectionCase.from_plane(K, _random_plane(rng, K))


def _lemma5_body(rng: np.random.Generator, stratum: str, n: int) -> Polytope:
    R = bodies.random_rotation(rng, n)
    if stratum == "low":
        k = int(rng.integers(0, n - 2))
        pts = rng.standard_normal((k + 1, k)) @ R[:k] if k else np.zeros((1, n))
        return convex_hull(pts + rng.standard_normal(n))
    if stratum == "codim2-through-origin":
        k = n - 2
        pts = rng.standard_normal((int(rng.integers(k + 1, 8)), k)) @ R[:k]
        if rng.random() < 0.5:
            # keep the origin in the affine hull but outside the body
            pts = pts + 2.0 * R[0] * np.sign(rng.standard_normal())
        return convex_hull(pts)
    if stratum == "codim2-off-origin":
        k = n - 2
        pts = rng.standard_normal((int(rng.integers(k + 1, 8)), k)) @ R[:k]
        return convex_hull(pts + R[k] * rng.uniform(0.3, 2.0)
                           + R[: k].T @ rng.standard_normal(k))
    if stratum == "hyperplane-through-origin":
        k = n - 1
        pts = rng.standard_normal((int(rng.integers(n, 12)), k)) @ R[:k]
        if rng.random() < 0.5:
            pts = pts + 3.0 * R[0]
        return convex_hull(pts)
    raise ValueError(stratum)


LEMMA5_STRATA = ("low", "codim2-through-origin", "codim2-off-origin", "hyperplane-through-origin")


def _centered(K: Polytope) -> Polytope:
    return convex_hull(K.vertices - K.vertices.mean(axis=0))


def _theorem8_body(rng: np.random.Generator, idx: int) -> Polytope:
    if idx == 0:
        return bodies.cube(3)
    if idx == 1:
        return bodies.cube(3, 0.5, center=(1.5, 1.5, 1.5))
    if idx % 3 == 0:
        return bodies.random_polytope(rng, 3, shift=bodies.random_shift(rng, 3, 1.2, 2.5))
    if idx % 3 == 1:
        return _centered(bodies.random_polytope(rng, 3))
    return bodies.random_polytope(rng, 3, shift=bodies.random_shift(rng, 3, 0.0, 0.9))


# -- suite ---------------------------------------------------------------------------

DEFAULT_COUNTS = {
    "cauchy": 100,
    "valuation_identity": 500,
    "dissection_grid": 1,
    "contravariance": 200,
    "lemma5": 50,
    "rho_obstruction": 10,
    "theorem8_chain": 100,
    "dual_bm": 100,
    "dual_bm_dilates": 20,
    "quadrature": 1,
    "petty": 1,
}

CHECK_ORDER = tuple(DEFAULT_COUNTS)


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = 42
    counts: tuple = tuple(DEFAULT_COUNTS.items())
    quad_tol: float = QUAD_TOL
    level: int = DEFAULT_LEVEL
    ball_levels: tuple = (3, 4, 5)
    phi_fn: PhiFn = phi

    @property
    def count(self) -> dict:
        return dict(self.counts)


def _task(config: SuiteConfig, check: str, idx: int) -> list[CheckReport]:
    seed = config.seed
    rng = np.random.default_rng([seed, CHECK_ORDER.index(check), idx])
    tq = config.quad_tol
    phi_fn = config.phi_fn
    out: list[CheckReport] = []
    if check == "cauchy":
        n = 3 if idx % 10 else 4
        K = bodies.random_polytope(rng, n, shift=bodies.random_shift(rng, n, 0.0, 2.0))
        U = rng.standard_normal((100, n))
        U /= np.linalg.norm(U, axis=1, keepdims=True)
        out.append(check_cauchy(K, U, seed=seed))
    elif check == "valuation_identity":
        n = 3 if idx % 25 else 4
        case = _dissection_cases(rng, n)
        for p in PARAM_GRID:
            out.append(check_valuation_identity(case, p, phi_fn, seed=seed))
    elif check == "dissection_grid":
        for lam in DISSECTION_LAMBDAS:
            for i, j in ((0, 1), (0, 2), (1, 2)):
                case = dissection_case(lam, i, j, 3)
                for p in PARAM_GRID:
                    out.append(check_valuation_identity(case, p, phi_fn, seed=seed))
    elif check == "contravariance":
        n = 3 if idx % 20 else 4
        K = _random_body(rng, n)
        M = bodies.random_gl_plus(rng, n, 100.0)
        out.append(check_contravariance(K, M, PARAM_GRID[idx % 4], phi_fn, seed=seed))
    elif check == "lemma5":
        n = 3 if idx % 5 else 4
        p = PARAM_GRID[idx % 4]
        for stratum in LEMMA5_STRATA:
            K = _lemma5_body(rng, stratum, n)
            rep = check_lemma5(K, p, phi_fn, seed=seed)
            rep.params["intended_stratum"] = stratum
            if rep.params["stratum"] != stratum:
                rep.passed = False
                rep.witness = {"body": _vlist(K), "error": "generator produced the wrong stratum"}
            out.append(rep)
    elif check == "rho_obstruction":
        if idx == 0:
            for c1, c2 in ((1.0, 1.0), (5.0, 1.0), (1.0, 0.0)):
                out.append(check_rho_obstruction(c1, c2, seed=seed))
        c1, c2 = rng.uniform(0.0, 5.0), rng.uniform(0.01, 5.0)
        out.append(check_rho_obstruction(c1, c2, n=3 if idx % 5 else 4, seed=seed))
    elif check == "theorem8_chain":
        q = make_quadrature(3, config.level)
        K = _theorem8_body(rng, idx)
        for lam in LAMBDA_GRID:
            out.append(check_theorem8_chain(K, lam, q, tol=tq, seed=seed))
    elif check == "dual_bm":
        q = make_quadrature(3, config.level)
        K = _centered(bodies.random_polytope(rng, 3))
        L = _centered(bodies.random_polytope(rng, 3))
        out.append(check_dual_bm(polytope_radial_oracle(K), polytope_radial_oracle(L), q, False,
                                 seed=seed, witness={"K": _vlist(K), "L": _vlist(L)}))
    elif check == "dual_bm_dilates":
        q = make_quadrature(3, config.level)
        K = _centered(bodies.random_polytope(rng, 3))
        L = linear_image(K, rng.uniform(0.2, 5.0) * np.eye(3))
        out.append(check_dual_bm(polytope_radial_oracle(K), polytope_radial_oracle(L), q, True,
                                 seed=seed, witness={"K": _vlist(K), "L": _vlist(L)}))
    elif check == "quadrature":
        q = make_quadrature(3, config.level)
        for name, compute, exact, default_tol in quadrature_cases(q):
            tol = default_tol if tq == QUAD_TOL else tq
            out.append(check_quadrature(name, compute(), exact, tol, q.level, seed=seed))
    elif check == "petty":
        from .polar import affine_product
        q = make_quadrature(3, config.level)
        ptol = PETTY_TOL if tq == QUAD_TOL else tq
        out.append(check_petty_value("cube", affine_product(bodies.cube(3), (1.0, 0.0), q),
                                     4.0 / 3.0, ptol, seed=seed))
        out.append(check_ball_convergence(config.ball_levels, q, slack=ptol, seed=seed))
        for k in range(5):
            A = bodies.random_gl_plus(rng, 3, 4.0)
            out.append(_ellipsoid_petty(A, q, ptol, seed, k))
    else:
        raise ValueError(f"unknown check {check!r}")
    for rep in out:
        rep.params.setdefault("case_index", idx)
    return out


def _ellipsoid_petty(A: np.ndarray, q: SphericalQuadrature, tol: float, seed, k: int) -> CheckReport:
    """Equality case on an exact ellipsoid ``E = A B``: ``Pi E = kappa_{n-1} |det A| A^{-T} B``."""
    n = A.shape[0]
    det = abs(np.linalg.det(A))
    pi_e = ellipsoid_support_oracle(kappa(n - 1) * det * np.linalg.inv(A).T)
    product = (kappa(n) * det) ** (n - 1) * polar_volume(pi_e, q)
    return check_petty_value("ellipsoid", product, petty_bound(n), tol, seed=seed,
                             extra={"ellipsoid_index": k})


def _run_task(args) -> list[CheckReport]:
    return _task(*args)


def run_suite(seed: int = 42, counts: Optional[dict] = None, quad_tol: Optional[float] = None,
              workers: int = 1, level: int = DEFAULT_LEVEL, phi_fn: PhiFn = phi,
              checks: Optional[Iterable[str]] = None) -> list[CheckReport]:
    """Run the battery; deterministic in ``seed`` and independent of ``workers``.

    ``counts`` overrides per-check case counts (see ``DEFAULT_COUNTS``);
    ``quad_tol`` replaces the tolerance of every quadrature-path check.
    """
    c = dict(DEFAULT_COUNTS)
    if counts:
        unknown = set(counts) - set(c)
        if unknown:
            raise ValueError(f"unknown checks: {sorted(unknown)}")
        c.update(counts)
    if checks is not None:
        wanted = set(checks)
        c = {k: (v if k in wanted else 0) for k, v in c.items()}
    config = SuiteConfig(seed=seed, counts=tuple(c.items()),
                         quad_tol=QUAD_TOL if quad_tol is None else quad_tol,
                         level=level, phi_fn=phi_fn)
    tasks = [(config, name, i) for name in CHECK_ORDER for i in range(c[name])]
    if workers <= 1:
        results = map(_run_task, tasks)
        return [r for batch in results for r in batch]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        results = pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (8 * workers)))
        return [r for batch in results for r in batch]


# -- output -----------------------------------------------------------------------

CSV_FIELDS = ("schema", "check", "passed", "inconclusive", "residual", "tol", "seed",
              "params", "witness")


def reports_to_jsonl(reports: Iterable[CheckReport]) -> str:
    return "".join(r.to_json() + "\n" for r in reports)


def reports_to_csv(reports: Iterable[CheckReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for r in reports:
        writer.writerow([SCHEMA, r.check, int(r.passed), int(r.inconclusive),
                         "%.17g" % r.residual, "%.17g" % r.tol,
                         "" if r.seed is None else r.seed,
                         json.dumps(r.params, allow_nan=False),
                         "" if r.witness is None else json.dumps(r.witness, allow_nan=False)])
    return buf.getvalue()


def summarize(reports: Sequence[CheckReport]) -> dict[str, Any]:
    by_check: dict[str, dict[str, int]] = {}
    for r in reports:
        s = by_check.setdefault(r.check, {"total": 0, "failed": 0, "inconclusive": 0})
        s["total"] += 1
        s["failed"] += not r.passed
        s["inconclusive"] += r.inconclusive
    failed = sum(s["failed"] for s in by_check.values())
    return {"total": len(reports), "failed": failed, "by_check": by_check}
