"""Numerical laboratory for invariant-metric geometry on convex model
domains in C^2.

The package builds certified two-sided bounds on the invariant
pseudodistance of unbounded convex model domains, constructs and
certifies almost-geodesic curve families, runs Gromov-product growth
diagnostics, and classifies boundary points through dyadic gauge
integrals — including the chord-built counterexample profiles.
"""

import importlib.metadata

from ._core import BACKEND
from .errors import (AttachmentFailure, BalanceViolation, ConfigError,
                     DisconnectedGrid, EscapedDepthCap, KobalabError,
                     NonFiniteIntegrand, NonSmoothPoint, NotOnBoundary,
                     OutOfRange, OutsideDomain, ZeroDirection)
from .geometry import (CCONVEX, CONVEX, CPoint, CVector, DomainOracle,
                       FaceSegment)
from .profiles import (Mollifier, ProfileFunction, build_piecewise_max,
                       exp_power, from_callable, mollify)
from .metric import (BoundInterval, DistanceGrid, build_distance_grid,
                     curve_kappa_length_bounds, decompose_tangential_normal,
                     exact_halfplane_distance, gromov_product_bounds,
                     halfplane_geodesic, halfplane_geodesic_point,
                     kappa_bounds, kdist_lower, kdist_upper_graph,
                     kdist_upper_multi, refine_distance_grid)
from .geodesics import (DEFAULT_HEIGHT_CAP, GeodesicCertificate,
                        SampledCurve, STATUS_ESCAPED, STATUS_REACHED,
                        TerminalDepth, balanced_gromov_lower,
                        certify_lambda_geodesic,
                        construct_tangential_geodesic,
                        endpoint_face_distance, find_balanced_parameter,
                        max_boundary_distance, predicted_terminal_depth)
from .goldilocks import (ClassificationReport, GaugeSampling,
                         IntegralVerdict, classify_point, face_witness,
                         gauge_shape_check, improper_integral_verdict,
                         tangential_gauge)
from .experiments import (ExperimentConfig, ExperimentReport, emit,
                          parse_config, run_balanced_validation,
                          run_counterexample_suite,
                          run_halfplane_validation, run_visibility_family)

try:
    __version__ = importlib.metadata.version("kobalab")
except importlib.metadata.PackageNotFoundError:
    __version__ = "unknown"

__all__ = [
    "BACKEND",
    "__version__",
    # errors
    "KobalabError", "ConfigError", "OutsideDomain", "NotOnBoundary",
    "NonSmoothPoint", "OutOfRange", "EscapedDepthCap", "BalanceViolation",
    "NonFiniteIntegrand", "ZeroDirection", "DisconnectedGrid",
    "AttachmentFailure",
    # geometry
    "CONVEX", "CCONVEX", "CPoint", "CVector", "FaceSegment",
    "DomainOracle",
    # profiles
    "ProfileFunction", "Mollifier", "exp_power", "from_callable",
    "build_piecewise_max", "mollify",
    # metric
    "BoundInterval", "DistanceGrid", "kappa_bounds",
    "decompose_tangential_normal", "curve_kappa_length_bounds",
    "kdist_lower", "build_distance_grid", "refine_distance_grid",
    "kdist_upper_multi", "kdist_upper_graph", "gromov_product_bounds",
    "exact_halfplane_distance", "halfplane_geodesic",
    "halfplane_geodesic_point",
    # geodesics
    "DEFAULT_HEIGHT_CAP", "STATUS_REACHED", "STATUS_ESCAPED",
    "SampledCurve", "TerminalDepth", "GeodesicCertificate",
    "predicted_terminal_depth", "construct_tangential_geodesic",
    "max_boundary_distance", "endpoint_face_distance",
    "certify_lambda_geodesic", "find_balanced_parameter",
    "balanced_gromov_lower",
    # goldilocks
    "IntegralVerdict", "GaugeSampling", "ClassificationReport",
    "improper_integral_verdict", "tangential_gauge", "gauge_shape_check",
    "classify_point", "face_witness",
    # experiments
    "ExperimentConfig", "ExperimentReport", "parse_config",
    "run_visibility_family", "run_counterexample_suite",
    "run_halfplane_validation", "run_balanced_validation", "emit",
]
