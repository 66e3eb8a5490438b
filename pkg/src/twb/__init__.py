"""Tangent-category workbench: differential bundles over pluggable instances."""
from .bundles import (
    DifferentialBundle,
    LinearBundleMap,
    build_key_diagram,
    check_bundle,
    construct_bundle,
    corollary_check,
    induced_linear,
    lambda_k,
    limit_of_bundle_diagram,
    mu_map,
    reconstruct_sigma,
    tangent_bundle,
    tangent_space,
    theorem_iso,
    trivial_bundle,
    verify_linear,
)
from .core import (
    CheckReport,
    Diagram,
    Limit,
    Verdict,
    check_tangent_axioms,
    compute_limit,
    fibre_power,
    is_limit,
    pullback,
    wide_pullback,
)

__version__ = "0.1.0"
