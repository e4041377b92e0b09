"""Contravariant Minkowski valuations ``c1 * Pi + c2 * Pi_o`` on polytopes,
polar volumes, and a seeded harness for the identities and inequalities
they satisfy."""

from .errors import (CrossCheckError, DegenerateBodyError, DegenerateRadialError, EmptyBodyError,
                     EmptyInputError, GeometryError, InvalidDimensionError, InvalidParamsError,
                     OriginNotInteriorError, PolytopeFormatError, SingularMatrixError,
                     WrongStratumError)
from .polar import (RadialOracle, SupportOracle, affine_product, dual_bm_gap,
                    harmonic_combination, petty_bound, phi_polar_volume, polar_radial,
                    polar_volume, star_volume)
from .polytope import (Facet, Hyperplane, Polytope, conv_with_origin, convex_hull, facets,
                       intersect_halfspace, linear_image, project, read_polytope, shadow_area,
                       support, translate, volume, write_polytope)
from .quadrature import SphericalQuadrature, kappa, make_quadrature, sphere_area
from .valuations import (DiscreteSphericalMeasure, ValuationParams, Zonotope,
                         contravariant_image, minkowski_sum, phi, projection_body,
                         projection_body_o, rho_measure, surface_area_measure, zonotope_equal,
                         zonotope_residual, zonotope_support)

__version__ = "0.1.0"

__all__ = [
    "CrossCheckError",
    "DegenerateBodyError",
    "DegenerateRadialError",
    "DiscreteSphericalMeasure",
    "EmptyBodyError",
    "EmptyInputError",
    "Facet",
    "GeometryError",
    "Hyperplane",
    "InvalidDimensionError",
    "InvalidParamsError",
    "OriginNotInteriorError",
    "Polytope",
    "PolytopeFormatError",
    "RadialOracle",
    "SingularMatrixError",
    "SphericalQuadrature",
    "SupportOracle",
    "ValuationParams",
    "WrongStratumError",
    "Zonotope",
    "affine_product",
    "contravariant_image",
    "conv_with_origin",
    "convex_hull",
    "dual_bm_gap",
    "facets",
    "harmonic_combination",
    "intersect_halfspace",
    "kappa",
    "linear_image",
    "make_quadrature",
    "minkowski_sum",
    "petty_bound",
    "phi",
    "phi_polar_volume",
    "polar_radial",
    "polar_volume",
    "project",
    "projection_body",
    "projection_body_o",
    "read_polytope",
    "rho_measure",
    "shadow_area",
    "sphere_area",
    "star_volume",
    "support",
    "surface_area_measure",
    "translate",
    "volume",
    "write_polytope",
    "zonotope_equal",
    "zonotope_residual",
    "zonotope_support",
]
