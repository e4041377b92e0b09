import math

import numpy as np
import pytest
from hypothesis import given, settings

import oracles
from conftest import centered, random_body, seeds
from minkval import bodies
from minkval.errors import (DegenerateBodyError, DegenerateRadialError, OriginNotInteriorError)
from minkval.polar import (RadialOracle, affine_product, ball_support_oracle, dual_bm_gap,
                           ellipsoid_support_oracle, harmonic_combination, petty_bound,
                           phi_polar_volume, polar_radial, polar_volume, polytope_radial_oracle,
                           polytope_support_oracle, star_volume, zonotope_support_oracle)
from minkval.polytope import linear_image
from minkval.quadrature import kappa, make_quadrature
from minkval.valuations import ValuationParams, make_zonotope, phi, projection_body, projection_body_o

Q5 = make_quadrature(3, 5)
Q3 = make_quadrature(3, 3)
U = oracles.random_unit(np.random.default_rng(0), 500)


def test_ball_is_self_dual():
    rho = polar_radial(ball_support_oracle(3))
    assert np.all(rho.eval(U) == 1.0)
    assert abs(star_volume(rho, Q5) - 4 * math.pi / 3) < 1e-12
    assert abs(polar_volume(ball_support_oracle(3), Q3) - kappa(3)) < 1e-12


def test_dilated_ball():
    assert np.allclose(polar_radial(ball_support_oracle(3, 2.5)).eval(U), 1 / 2.5)


def test_cube_polar_is_cross_polytope():
    rho = polar_radial(polytope_support_oracle(bodies.cube()))
    cross = polytope_radial_oracle(bodies.cross_polytope())
    assert np.allclose(rho.eval(U), cross.eval(U), rtol=1e-14)
    # boundary points of conv{±e_i} have l1 norm one
    X = rho.eval(U)[:, None] * U
    assert np.allclose(np.abs(X).sum(axis=1), 1.0)
    assert math.isclose(star_volume(rho, Q5), 4 / 3, rel_tol=1e-5)


def test_ellipsoid_polar():
    h = ellipsoid_support_oracle(np.diag([1.0, 2.0, 3.0]))
    assert math.isclose(polar_volume(h, Q5), kappa(3) / 6, rel_tol=1e-5)


def test_polar_of_pi_ball():
    assert math.isclose(polar_volume(ball_support_oracle(3, math.pi), Q5), kappa(3) / math.pi ** 3,
                        rel_tol=1e-12)


def test_cube_projection_polar():
    Z = projection_body(bodies.cube())
    assert math.isclose(polar_volume(Z, Q5), 1 / 48, rel_tol=1e-5)
    assert math.isclose(oracles.zonotope_polar_volume(Z.generators), 1 / 48, rel_tol=1e-12)


@given(seeds)
@settings(max_examples=10)
def test_zonotope_polar_against_exact_oracle(seed):
    # h(Z, .) has kinks along great circles, so random zonotopes converge more
    # slowly than smooth integrands: median error ~1e-6, worst seen ~1e-4
    Z = projection_body(centered(random_body(seed)))
    exact = oracles.zonotope_polar_volume(Z.generators)
    assert math.isclose(polar_volume(Z, Q5), exact, rel_tol=3e-4)


def test_dilate_rule():
    Z = projection_body(random_body(4))
    for r in (0.5, 2.0, 3.0):
        assert math.isclose(polar_volume(Z.scaled(r), Q3), r ** -3 * polar_volume(Z, Q3),
                            rel_tol=1e-14)


def test_polar_radial_requires_interior_origin():
    with pytest.raises(OriginNotInteriorError):
        polar_radial(polytope_support_oracle(bodies.corner_simplex()))
    with pytest.raises(OriginNotInteriorError):
        polar_volume(make_zonotope([[1.0, 0, 0], [0, 1.0, 0]]), Q3)
    with pytest.raises(OriginNotInteriorError):
        polytope_radial_oracle(bodies.cube(3, 1.0, center=(2, 0, 0)))


def test_zonotope_oracle_positivity_flag():
    assert zonotope_support_oracle(projection_body(bodies.cube())).positive
    assert not zonotope_support_oracle(make_zonotope([[1.0, 0, 0]])).positive


# -- harmonic combinations ---------------------------------------------------------------

def _cube_radial():
    return polytope_radial_oracle(bodies.cube())


def test_harmonic_half_half_is_identity():
    K = _cube_radial()
    assert np.allclose(harmonic_combination(.5, K, .5, K).eval(U), K.eval(U), rtol=1e-15)


def test_harmonic_dilate():
    K = _cube_radial()
    assert np.allclose(harmonic_combination(1.0, K, .5, K).eval(U), K.eval(U) / 1.5, rtol=1e-15)


@given(seeds)
@settings(max_examples=20)
def test_harmonic_of_polars_is_polar_of_phi(seed):
    lam = np.random.default_rng(seed).uniform()
    K = random_body(seed, shifted=seed % 2 == 0)
    pi_star = polar_radial(zonotope_support_oracle(projection_body(K)))
    pi_o_star = polar_radial(zonotope_support_oracle(projection_body_o(K)))
    combined = harmonic_combination(lam, pi_star, 1 - lam, pi_o_star)
    h_phi = phi(K, ValuationParams.lam(lam)).support_many(U)
    assert np.allclose(combined.eval(U), 1 / h_phi, rtol=1e-12)


def test_harmonic_errors():
    K = _cube_radial()
    zero = RadialOracle(3, lambda V: np.zeros(len(V)))
    with pytest.raises(DegenerateRadialError):
        harmonic_combination(1, K, 1, zero).eval(U)
    with pytest.raises(ValueError):
        harmonic_combination(0, K, 0, K)
    with pytest.raises(ValueError):
        harmonic_combination(-1, K, 1, K)


# -- dual Brunn-Minkowski ---------------------------------------------------------------------

def test_dual_bm_dilates():
    K = _cube_radial()
    L = polytope_radial_oracle(linear_image(bodies.cube(), 2 * np.eye(3)))
    assert abs(dual_bm_gap(K, L, make_quadrature(3, 4))) < 1e-8
    assert abs(dual_bm_gap(K, K, Q3)) < 1e-12


def test_dual_bm_strict_for_cube_and_ball():
    K = polar_radial(polytope_support_oracle(bodies.cube()))
    L = polar_radial(ball_support_oracle(3))
    assert dual_bm_gap(K, L, Q5) > 1e-3


@given(seeds)
@settings(max_examples=25)
def test_dual_bm_nonnegative(seed):
    K = polytope_radial_oracle(centered(random_body(seed)))
    L = polytope_radial_oracle(centered(random_body(seed + 1)))
    assert dual_bm_gap(K, L, Q3) >= -1e-8


# -- affine products -------------------------------------------------------------------------------

def test_petty_bound():
    assert math.isclose(petty_bound(3), 64 / 27, rel_tol=1e-14)
    assert math.isclose(petty_bound(3), (kappa(3) / kappa(2)) ** 3)


def test_cube_affine_product():
    assert math.isclose(affine_product(bodies.cube(), (1, 0), Q5), 4 / 3, rel_tol=1e-4)


def test_exact_ellipsoid_meets_bound():
    rng = np.random.default_rng(2)
    A = bodies.random_gl_plus(rng, 3, 5.0)
    det = abs(np.linalg.det(A))
    pi_e = ellipsoid_support_oracle(kappa(2) * det * np.linalg.inv(A).T)
    product = (kappa(3) * det) ** 2 * polar_volume(pi_e, Q5)
    assert math.isclose(product, petty_bound(3), rel_tol=1e-6)


def test_affine_product_degenerate():
    with pytest.raises(DegenerateBodyError):
        affine_product(bodies.standard_simplex(), (1, 0), Q3)
    with pytest.raises(OriginNotInteriorError):
        phi_polar_volume(bodies.standard_simplex(), (1, 0), Q3)


@given(seeds)
@settings(max_examples=10)
def test_affine_invariance(seed):
    rng = np.random.default_rng(seed)
    K = random_body(seed, shifted=True)
    M = bodies.random_gl_plus(rng, 3, 3.0)
    a = affine_product(K, (1, 1), Q5)
    b = affine_product(linear_image(K, M), (1, 1), Q5)
    assert math.isclose(a, b, rel_tol=1e-4)
