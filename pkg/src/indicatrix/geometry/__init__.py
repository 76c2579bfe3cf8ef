"""Domains, boundary sampling and geometric measurements."""
from .boundary import (BoundarySampling, boundary_normal_exponent, fit_power_law,
                       normal_modulus, polyline_sampling, sample_boundary)
from .construct import (build_theorem3_domain, junction_mismatches, straight_segment_scan,
                        svg_path)
from .domains import (AffineImage, Assembled, Disk, Piece, Polygon, Rectangle, Special,
                      affine_image, diameter, domain_from_json, koch_snowflake,
                      random_convex_polygon, regular_polygon)
from .measures import (MCEstimate, minkowski_dimension, neighborhood_area,
                       symmetric_difference_measure)
from .profiles import (Profile, constant_profile, cosine_profile, derivative_modulus,
                       fitted_modulus_constant, is_nowhere_linear, lacunary_periodic_profile,
                       linear_profile, make_surrogate_profile, profile_from_json,
                       theorem3_profile_violations)

__all__ = [name for name in dir() if not name.startswith("_")]
