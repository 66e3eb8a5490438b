"""Polynomial maps between R^n as a cartesian differential instance."""
from .instance import (
    PolyCDC,
    block_permutation,
    chain_rule_check,
    poly_map,
    projection_bundle,
    tangent_of_polymor,
    tangent_space_at,
)
from .parser import ParseError, format_poly, parse_poly
from .poly import Poly, PolyMor, Space, compose, constant_map, identity, projection
