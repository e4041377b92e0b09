import csv
import io
import json
import math

import numpy as np
import pytest

from conftest import random_body
from minkval import bodies
from minkval.errors import DegenerateBodyError, SingularMatrixError, WrongStratumError
from minkval.polytope import Hyperplane, convex_hull, linear_image
from minkval.quadrature import make_quadrature
from minkval.valuations import as_params, make_zonotope, phi, projection_body_o
from minkval import verify
from minkval.verify import (CheckReport, DissectionCase, check_contravariance, check_lemma5,
                            check_rho_obstruction, check_theorem8_chain,
                            check_valuation_identity, dissection_case, reports_to_csv,
                            reports_to_jsonl, run_suite, summarize)

E = np.eye(3)
Q5 = make_quadrature(3, 5)
SMALL = {k: min(v, 3) for k, v in verify.DEFAULT_COUNTS.items()}


def test_report_pass_flag_follows_residual():
    assert CheckReport("x", {}, 1e-10, 1e-9).passed
    assert not CheckReport("x", {}, 2e-9, 1e-9).passed
    assert CheckReport("x", {}, 1e-9, 1e-9).passed


def test_report_json_schema():
    d = json.loads(CheckReport("x", {"a": 1}, 0.0, 1.0, seed=4).to_json())
    assert d["schema"] == verify.SCHEMA
    assert set(d) == {"schema", "check", "params", "residual", "tol", "passed", "inconclusive",
                      "witness", "seed"}


# -- valuation identity -------------------------------------------------------------------

def test_cube_cut_identity():
    case = DissectionCase.from_plane(bodies.cube(), Hyperplane(E[0], 0.0))
    rep = check_valuation_identity(case, (1, 1))
    assert rep.passed and rep.residual < 1e-12


def test_plane_missing_body():
    case = DissectionCase.from_plane(bodies.cube(), Hyperplane(E[0], 3.0))
    assert case.plus.is_empty and case.cut.is_empty
    assert check_valuation_identity(case, (2, 3)).passed


def test_dissection_grid_case():
    case = dissection_case(1 / 3, 0, 1)
    phi_m, psi_m = bodies.dissection_maps(1 / 3, 0, 1)
    assert np.allclose(case.plus.vertices, linear_image(case.body, phi_m).vertices)
    assert np.allclose(case.minus.vertices, linear_image(case.body, psi_m).vertices)
    assert check_valuation_identity(case, (0, 1)).residual < 1e-12


def test_dissection_cut_piece_is_not_trivial():
    # for the degree n-1 family the cut S ∩ H contributes: the four-term identity
    # does not collapse to a two-term one
    case = dissection_case(0.5, 0, 1)
    assert not phi(case.cut, (0, 1)).is_zero


def _squared_areas_phi(K, p):
    """A non-valuation: projection body built from squared facet areas."""
    p = as_params(p)
    G = [f.outer_normal * f.measure ** 2 / 2 for f in K.facets]
    G += [f.outer_normal * p.c2 * f.measure for f in K.origin_hull.facets]
    return make_zonotope(G, dim=K.dim)


def _negated_c1_phi(K, p):
    p = as_params(p)
    return phi(K, (-p.c1, p.c2))


def test_identity_catches_a_non_valuation():
    case = DissectionCase.from_plane(bodies.cube(), Hyperplane.from_normal([1, 2, 3], 0.4))
    rep = check_valuation_identity(case, (1, 0), phi_fn=_squared_areas_phi)
    assert not rep.passed
    assert rep.witness["body"]


def test_suite_is_sensitive_to_corruption():
    reports = run_suite(42, counts=SMALL, checks=["valuation_identity"], phi_fn=_negated_c1_phi)
    failed = [r for r in reports if not r.passed]
    assert failed
    assert all("InvalidParamsError" in r.witness["error"] for r in failed)
    reports = run_suite(42, counts=SMALL, checks=["valuation_identity", "contravariance"],
                        phi_fn=_squared_areas_phi)
    assert sum(not r.passed for r in reports) > 0


# -- contravariance / degenerate strata / rho ------------------------------------------------------------

def test_contravariance_identity_and_singular():
    K = random_body(8, shifted=True)
    assert check_contravariance(K, np.eye(3), (2, 3)).residual == 0
    with pytest.raises(SingularMatrixError):
        check_contravariance(K, np.diag([1.0, 1.0, 0.0]), (1, 1))


def test_contravariance_catches_origin_dependence():
    def shifted_phi(K, p):
        return projection_body_o(convex_hull(K.vertices + E[0]))
    K = random_body(8, shifted=True)
    M = bodies.random_gl_plus(np.random.default_rng(1), 3, 10.0)
    assert not check_contravariance(K, M, (0, 1), phi_fn=shifted_phi).passed


def test_lemma5_examples():
    rep = check_lemma5(convex_hull([E[0]]), (1, 1))
    assert rep.passed and rep.params["stratum"] == "low"
    rep = check_lemma5(convex_hull([-E[0], E[0]]), (1, 1))
    assert rep.passed and rep.params["stratum"] == "codim2-through-origin"
    rep = check_lemma5(convex_hull([E[0], E[0] + E[1]]), (3, 2))
    assert rep.passed and rep.params["stratum"] == "codim2-off-origin"
    assert math.isclose(rep.params["vol_origin_hull"], 0.5)
    rep = check_lemma5(convex_hull([E[0], E[1], -E[0] - E[1]]), (1, 2))
    assert rep.passed and rep.params["stratum"] == "hyperplane-through-origin"
    rep = check_lemma5(bodies.standard_simplex(), (1, 1))
    assert rep.passed and rep.params["law"] == "none"


def test_lemma5_rejects_full_dimensional():
    with pytest.raises(WrongStratumError):
        check_lemma5(bodies.cube(), (1, 1))


def test_lemma5_catches_wrong_segment():
    def doubled(K, p):
        return phi(K, p).scaled(2.0)
    assert not check_lemma5(convex_hull([E[0], E[0] + E[1]]), (3, 2), phi_fn=doubled).passed


def test_rho_examples():
    rep = check_rho_obstruction(1, 1)
    assert rep.passed
    assert math.isclose(rep.params["weight"], -math.sqrt(3) / 4, rel_tol=1e-14)
    assert math.isclose(check_rho_obstruction(5, 1).params["weight"], -math.sqrt(3) / 4,
                        rel_tol=1e-14)
    rep = check_rho_obstruction(1, 0)
    assert rep.passed and rep.params["applicable"] is False


def test_rho_in_four_dimensions():
    rep = check_rho_obstruction(1.0, 2.0, n=4)
    # vol_3(conv{e_1..e_4}) = sqrt(4)/3! = 1/3
    assert rep.passed and math.isclose(rep.params["weight"], -1.0 / 3.0, rel_tol=1e-12)


# -- inequality chain ------------------------------------------------------------------------------

@pytest.mark.parametrize("lam", verify.LAMBDA_GRID)
def test_chain_on_centered_cube(lam):
    rep = check_theorem8_chain(bodies.cube(), lam, Q5)
    assert rep.passed and not rep.inconclusive
    assert math.isclose(rep.params["affine_product"], 4 / 3, rel_tol=1e-4)
    assert rep.params["V_pi_o_polar"] == rep.params["V_pi_polar"]


def test_chain_strict_for_translated_cube():
    K = bodies.cube(3, 0.5, center=(1.5, 1.5, 1.5))
    rep = check_theorem8_chain(K, 0.5, Q5)
    assert rep.passed and not rep.inconclusive
    assert rep.params["V_pi_o_polar"] < rep.params["V_pi_polar"] * (1 - 1e-3)
    assert rep.params["V_phi_polar"] < rep.params["V_pi_polar"] * (1 - 1e-3)


def test_chain_rejects_flat_body():
    with pytest.raises(DegenerateBodyError):
        check_theorem8_chain(bodies.standard_simplex(), 0.5, Q5)


def test_chain_inconclusive_band():
    # the origin just outside a facet: Pi_o and Pi nearly coincide
    K = bodies.cube(3, 1.0, center=(1.0 + 1e-6, 0, 0))
    rep = check_theorem8_chain(K, 0.0, Q5)
    assert not rep.params["contains_origin"]
    assert rep.passed
    assert rep.inconclusive


def test_tight_tolerance_fails_quadrature_checks():
    reports = run_suite(42, counts={k: 0 for k in verify.DEFAULT_COUNTS} | {"quadrature": 1},
                        quad_tol=1e-15)
    by_case = {r.params["case"]: r for r in reports}
    # constant integrands are exact; everything else misses 1e-15
    assert by_case.pop("ball_polar").passed
    assert all(not r.passed and r.witness for r in by_case.values())


# -- suite ------------------------------------------------------------------------------------------

def test_small_suite_passes_and_is_deterministic():
    a = run_suite(7, counts=SMALL)
    b = run_suite(7, counts=SMALL)
    assert summarize(a)["failed"] == 0
    assert reports_to_jsonl(a) == reports_to_jsonl(b)
    assert {r.check for r in a} == {"cauchy", "valuation_identity", "contravariance", "lemma5",
                                    "rho_obstruction", "theorem8_chain", "dual_bm", "quadrature",
                                    "petty"}


def test_suite_order_independent_of_subset():
    full = run_suite(3, counts=SMALL, checks=["contravariance", "lemma5"])
    part = run_suite(3, counts=SMALL, checks=["lemma5"])
    assert reports_to_jsonl([r for r in full if r.check == "lemma5"]) == reports_to_jsonl(part)


def test_suite_with_workers_matches_serial():
    counts = {k: (2 if k in ("valuation_identity", "lemma5", "contravariance") else 0)
              for k in verify.DEFAULT_COUNTS}
    assert (reports_to_jsonl(run_suite(5, counts=counts))
            == reports_to_jsonl(run_suite(5, counts=counts, workers=2)))


def test_unknown_check_rejected():
    with pytest.raises(ValueError):
        run_suite(1, counts={"nope": 1})


def test_csv_and_jsonl_agree():
    reports = run_suite(2, counts=SMALL, checks=["lemma5", "rho_obstruction"])
    rows = list(csv.DictReader(io.StringIO(reports_to_csv(reports))))
    lines = [json.loads(x) for x in reports_to_jsonl(reports).splitlines()]
    assert len(rows) == len(lines)
    for row, line in zip(rows, lines):
        assert row["check"] == line["check"]
        assert bool(int(row["passed"])) == line["passed"]
        assert float(row["residual"]) == line["residual"]
        assert json.loads(row["params"]) == line["params"]
