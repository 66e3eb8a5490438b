import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twb.errors import ConstructionError, PreconditionError
from twb.finring import (
    DualRing,
    compose,
    from_tables,
    hom_violation,
    identity,
    product,
    ring_hom,
    trunc_poly,
    zmod,
)
from twb.finring.rings import validate_ring


def test_zmod_tables_match_integer_arithmetic():
    for n in range(1, 9):
        R = zmod(n)
        for a, b in itertools.product(range(n), repeat=2):
            assert R.add_table[a, b] == (a + b) % n
            assert R.mul_table[a, b] == (a * b) % n
        assert R.zero == 0 and R.one == (1 % n)


@pytest.mark.parametrize("R", [zmod(2), zmod(3), zmod(4), zmod(6), trunc_poly(zmod(2), 3),
                               trunc_poly(zmod(3), 2), product(zmod(2), zmod(3))])
def test_constructed_rings_satisfy_the_axioms(R):
    validate_ring(R)  # raises on the first violated law


def _poly_mul_mod(a, b, n, k):
    out = [0] * k
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            if i + j < k:
                out[i + j] = (out[i + j] + x * y) % n
    return out


@pytest.mark.parametrize("n,k", [(2, 3), (3, 2), (4, 2), (2, 4)])
def test_trunc_poly_multiplication_against_coefficient_convolution(n, k):
    E = trunc_poly(zmod(n), k)
    for a, b in itertools.product(itertools.product(range(n), repeat=k), repeat=2):
        x, y = E.element(a), E.element(b)
        assert E.mul(x, y) == E.element(_poly_mul_mod(a, b, n, k))
        assert E.add(x, y) == E.element([(u + v) % n for u, v in zip(a, b)])


def test_trunc_poly_X_is_nilpotent_of_order_k():
    E = trunc_poly(zmod(2), 3)
    X = E.X
    X2 = E.mul(X, X)
    assert X2 != E.zero
    assert E.mul(X2, X) == E.zero
    assert E.label(X2) == "X^2"


def test_dual_ring_multiplication():
    R = zmod(5)
    D = DualRing(R)
    for a, b, c, d in itertools.product(range(5), repeat=4):
        x, y = D.join(a, b), D.join(c, d)
        assert D.mul(x, y) == D.join((a * c) % 5, (a * d + b * c) % 5)
    assert D.mul(D.eps, D.eps) == D.zero


def test_product_is_componentwise():
    P = product(zmod(2), zmod(3))
    for x, y in itertools.product(range(6), repeat=2):
        a, b = divmod(x, 3)
        c, d = divmod(y, 3)
        assert P.mul(x, y) == ((a * c) % 2) * 3 + (b * d) % 3


def test_from_tables_validates_the_tables():
    add = [[0, 1], [1, 0]]
    mul = [[0, 0], [0, 1]]
    assert from_tables(add, mul).size == 2
    with pytest.raises(ConstructionError):
        from_tables([[0, 1], [1, 1]], mul)  # 1 has no additive inverse


def test_ring_hom_validation_reports_the_violated_law():
    with pytest.raises(ConstructionError) as exc:
        ring_hom(zmod(4), zmod(2), [0, 1, 1, 1])
    assert "preserves +" in str(exc.value)
    f = ring_hom(zmod(4), zmod(2), [0, 1, 0, 1])
    assert hom_violation(f) is None


def test_compose_is_diagrammatic_and_unital():
    f = ring_hom(zmod(4), zmod(2), [0, 1, 0, 1])
    g = identity(zmod(2))
    assert compose(f, g) == f
    assert compose(identity(zmod(4)), f) == f
    with pytest.raises(PreconditionError):
        compose(g, f)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3, 4, 6]), st.data())
def test_dual_ring_distributes(n, data):
    D = DualRing(zmod(n))
    x, y, w = (data.draw(st.integers(0, D.size - 1)) for _ in range(3))
    assert D.mul(x, D.add(y, w)) == D.add(D.mul(x, y), D.mul(x, w))
    assert D.mul(x, y) == D.mul(y, x)
