"""Finite commutative rings with the dual-number tangent structure."""
from .examples import (
    classify_bundle_maps,
    counterexample_ex_fail,
    find_linear_isos,
    linear_maps_over_identity,
    square_zero_bundle,
    square_zero_carrier,
)
from .homs import enumerate_ring_homs, generating_set, is_module_hom, module_homs, module_isomorphic
from .instance import FinRingInstance, LimitRing, TrivialInstance, tangent_of_ring
from .modules import (
    FiniteModule,
    direct_sum,
    free_module,
    ideals,
    kernel_module,
    quotient_module,
    small_modules,
    zero_module,
)
from .rings import (
    DualRing,
    FiniteRing,
    RingMor,
    TableRing,
    TruncPoly,
    compose,
    from_tables,
    hom_violation,
    identity,
    product,
    ring_hom,
    tangent_ring,
    trunc_poly,
    zmod,
)
