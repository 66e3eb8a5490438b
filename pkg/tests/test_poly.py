from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from twb.polycdc import ParseError, Poly, PolyMor, Space, compose, format_poly, parse_poly
from twb.polycdc.poly import identity

NV = 3
X = sympy.symbols("x1:4")


def polys(nvars=NV, max_deg=3, max_terms=5):
    exps = st.tuples(*[st.integers(0, max_deg)] * nvars)
    coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4)
    return st.dictionaries(exps, coeffs, max_size=max_terms).map(lambda d: Poly(nvars, d))


def to_sympy(p):
    return sum((sympy.Rational(c.numerator, c.denominator) * sympy.prod([x**k for x, k in zip(X, e)])
                for e, c in p.terms), sympy.Integer(0))


def same(p, expr):
    return sympy.Poly(to_sympy(p) - expr, *X, domain="QQ").is_zero


@settings(max_examples=60, deadline=None)
@given(polys(), polys())
def test_arithmetic_agrees_with_sympy(p, q):
    a, b = to_sympy(p), to_sympy(q)
    assert same(p + q, a + b)
    assert same(p - q, a - b)
    assert same(p * q, a * b)


@settings(max_examples=60, deadline=None)
@given(polys(), st.integers(0, NV - 1))
def test_derivative_agrees_with_sympy(p, i):
    assert same(p.derivative(i), sympy.diff(to_sympy(p), X[i]))


@settings(max_examples=60, deadline=None)
@given(polys(), polys(), st.integers(0, NV - 1))
def test_leibniz_rule(p, q, i):
    assert (p * q).derivative(i) == p.derivative(i) * q + p * q.derivative(i)


SMALL = polys(max_deg=2, max_terms=4)


@settings(max_examples=40, deadline=None)
@given(SMALL, SMALL, SMALL, SMALL)
def test_substitution_agrees_with_sympy(p, a, b, c):
    sub = p.substitute([a, b, c], NV)
    expr = to_sympy(p).xreplace({X[0]: to_sympy(a), X[1]: to_sympy(b), X[2]: to_sympy(c)})
    assert same(sub, expr)


@settings(max_examples=80, deadline=None)
@given(polys())
def test_format_parse_round_trip(p):
    assert parse_poly(format_poly(p), NV) == p


@settings(max_examples=40, deadline=None)
@given(polys(), st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=3), min_size=NV, max_size=NV))
def test_evaluation_agrees_with_sympy(p, pt):
    val = to_sympy(p).subs({x: sympy.Rational(v.numerator, v.denominator) for x, v in zip(X, pt)})
    assert p.evaluate(pt) == Fraction(int(sympy.numer(val)), int(sympy.denom(val)))


def test_format_is_graded_and_canonical():
    p = parse_poly("(x1 + 1)^3", 1)
    assert format_poly(p) == "x1^3 + 3*x1^2 + 3*x1 + 1"
    q = parse_poly("3/4 - x1*x2^2/2", 2)
    assert format_poly(q) == "-1/2*x1*x2^2 + 3/4"
    assert format_poly(Poly.zero(2)) == "0"


@pytest.mark.parametrize("text,msg", [
    ("x1 +", "expected a number, variable or '('"),
    ("x1^^2", "expected a number"),
    ("x4", "unknown variable"),
    ("x1/x2", "division by a non-constant"),
    ("x1/0", "division by zero"),
    ("x1^-1", "negative exponent"),
    ("(x1", "expected ')'"),
    ("x1 $ 2", "unexpected character"),
])
def test_parse_errors_point_at_the_problem(text, msg):
    with pytest.raises(ParseError) as exc:
        parse_poly(text, 3)
    assert msg in str(exc.value) and "<here>" in str(exc.value)


def test_compose_is_diagrammatic():
    f = PolyMor(Space(1), Space(2), [parse_poly("x1^2", 1), parse_poly("x1 + 1", 1)])
    g = PolyMor(Space(2), Space(1), [parse_poly("x1*x2", 2)])
    h = compose(f, g)
    assert h.comps[0] == parse_poly("x1^3 + x1^2", 1)
    assert compose(identity(Space(1)), f) == f and compose(f, identity(Space(2))) == f


def test_maps_out_of_the_point():
    c = PolyMor(Space(0), Space(2), [Poly.const(0, 3), Poly.const(0, Fraction(1, 2))])
    f = PolyMor(Space(2), Space(1), [parse_poly("x1*x2", 2)])
    assert compose(c, f).comps[0] == Poly.const(0, Fraction(3, 2))
