import math

import numpy as np
import pytest

import oracles
from minkval.errors import InvalidDimensionError
from minkval.polar import ellipsoid_support_oracle, polar_volume
from minkval.quadrature import (geodesic_triangles, kappa, load_quadrature, make_quadrature,
                                save_quadrature, sphere_area, spherical_triangle_area)


@pytest.mark.parametrize("level", range(0, 6))
def test_weights_sum_to_sphere_area(level):
    q = make_quadrature(3, level)
    assert abs(q.weights.sum() - 4 * math.pi) < 1e-12
    assert np.all(q.weights > 0)
    assert np.allclose(np.linalg.norm(q.nodes, axis=1), 1.0, atol=1e-15)


@pytest.mark.parametrize("level", range(0, 5))
def test_cell_count(level):
    q = make_quadrature(3, level)
    assert q.n_cells == 20 * 4 ** level
    assert len(geodesic_triangles(level)) == 20 * 4 ** level
    assert len(q) == 3 * q.n_cells


def test_nodes_antipodal():
    q = make_quadrature(3, 3)
    half = len(q) // 2
    assert np.array_equal(q.nodes[half:], -q.nodes[:half])
    assert np.array_equal(q.weights[half:], q.weights[:half])


def test_triangle_areas_tile_sphere():
    for level in range(4):
        assert math.isclose(spherical_triangle_area(geodesic_triangles(level)).sum(), 4 * math.pi,
                            rel_tol=1e-13)


def test_abs_cosine_integral():
    q = make_quadrature(3, 5)
    assert abs(q.integrate_func(lambda U: np.abs(U[:, 2]), even=True) - 2 * math.pi) < 1e-6 * 2 * math.pi


def test_even_shortcut_matches_full_sum():
    q = make_quadrature(3, 3)
    f = lambda U: U[:, 0] ** 2 + np.abs(U[:, 1])  # noqa: E731
    assert math.isclose(q.integrate_func(f, even=True), q.integrate_func(f), rel_tol=1e-13)


def test_convergence_order_at_least_two():
    exact = kappa(3) / 6
    h = ellipsoid_support_oracle(np.diag([1.0, 2.0, 3.0]))
    errors = [abs(polar_volume(h, make_quadrature(3, k)) / exact - 1) for k in range(2, 6)]
    orders = [math.log2(a / b) for a, b in zip(errors, errors[1:])]
    assert min(orders) >= 2.0


def test_deterministic():
    a, b = make_quadrature(3, 2), make_quadrature.__wrapped__(3, 2)
    assert np.array_equal(a.nodes, b.nodes) and np.array_equal(a.weights, b.weights)


def test_monte_carlo_in_four_dimensions():
    q = make_quadrature(4, 1, seed=3)
    assert len(q) == 2 * 10_000
    assert q.seed == 3
    assert math.isclose(q.weights.sum(), sphere_area(4), rel_tol=1e-12)
    assert math.isclose(sphere_area(4), 2 * math.pi ** 2)
    half = len(q) // 2
    assert np.array_equal(q.nodes[half:], -q.nodes[:half])
    again = make_quadrature.__wrapped__(4, 1, seed=3)
    assert np.array_equal(q.nodes, again.nodes)
    assert not np.array_equal(q.nodes, make_quadrature(4, 1, seed=4).nodes)
    # the unit ball's polar volume is exact for any equal-weight rule
    assert math.isclose(polar_volume(ellipsoid_support_oracle(np.eye(4)), q), kappa(4),
                        rel_tol=1e-12)


def test_unsupported_dimension():
    with pytest.raises(InvalidDimensionError):
        make_quadrature(2, 3)
    with pytest.raises(ValueError):
        make_quadrature(3, -1)


def test_save_load_round_trip(tmp_path):
    q = make_quadrature(3, 2)
    path = tmp_path / "q.npz"
    save_quadrature(q, path)
    r = load_quadrature(path)
    assert np.array_equal(q.nodes, r.nodes) and np.array_equal(q.weights, r.weights)
    assert (r.level, r.seed, r.n_cells) == (2, None, q.n_cells)
    assert not r.nodes.flags.writeable


def test_sphere_constants():
    assert math.isclose(sphere_area(3), 4 * math.pi)
    assert math.isclose(kappa(2), math.pi) and math.isclose(kappa(3), 4 * math.pi / 3)
    assert math.isclose(kappa(3), oracles.kappa(3))
