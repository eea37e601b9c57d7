"""Dually flat geometry of finite exponential families and the Weyl group of their torification."""
from __future__ import annotations

__version__ = "0.1.0"

from .errors import (DuplicateLabel, FamilyParseError, Mismatch, NoConvergence, NonAffineChange,
                     NonIntegral, NotInSpan, OutsidePolytope, PositivityLost, RankDeficient,
                     SingularBasis, TooLarge, TooManyVertices, ToricWeylError)
from .scalars import LogRational, parse_log_rational
from .expfam import (FiniteExpFam, binomial, categorical, christoffel_alpha, expectation,
                     family_from_dict, family_to_dict, fisher, fisher_def, log_partition,
                     mean_params, new_family, prob_vector)
from .geometry import (check_dual_affinity, check_duality_identity, dual_metric,
                       legendre_dual_point, legendre_roundtrip, theta_grid)
from .dombrowski import AffineChange, check_kahler, complex_structure, connector_at, kahler_at
from .weyl import (PermSymmetry, WeylGroupReport, action_on_statistics, affine_witness,
                   check_isometry, check_probability_action, describe_group, enumerate_weyl)
from .polytope import (affine_symmetries, cross_validate, metric_symmetries, momentum_polytope,
                       polytope_from_points)
from .torus import (SemidirectElement, SemidirectModel, TorusElement, rho_matrix, sd_inverse,
                    sd_mul, verify_normalizer_model)
from .report import CheckReport
