import itertools

import numpy as np
import pytest

from twb.finring import FinRingInstance


@pytest.fixture
def inst():
    return FinRingInstance()


def brute_ring_homs(A, B):
    """Every map A -> B preserving 0, 1, + and *, by trying all |B|^|A| tables."""
    out = []
    add_a, mul_a = A.add_table, A.mul_table
    add_b, mul_b = B.add_table, B.mul_table
    for t in itertools.product(range(B.size), repeat=A.size):
        t = np.array(t)
        if t[A.zero] != B.zero or t[A.one] != B.one:
            continue
        if np.array_equal(t[add_a], add_b[t[:, None], t[None, :]]) and \
                np.array_equal(t[mul_a], mul_b[t[:, None], t[None, :]]):
            out.append(tuple(int(v) for v in t))
    return out


def brute_module_homs(M, N):
    out = []
    for t in itertools.product(range(N.size), repeat=M.size):
        t = np.array(t)
        if not np.array_equal(t[M.add_table], N.add_table[t[:, None], t[None, :]]):
            continue
        if np.array_equal(t[M.act_table], N.act_table[:, t]):
            out.append(tuple(int(v) for v in t))
    return out


def mutated_instance(R, family, pos, shift=1):
    """A fresh instance whose ``family`` map on R has entry ``pos`` moved by ``shift``."""
    from twb.finring import RingMor

    base = FinRingInstance()
    f = getattr(base, family)(R)
    t = np.array(f.table)
    t[pos] = (t[pos] + shift) % f.cod.size
    bad = RingMor(f.dom, f.cod, table=t, name=f"{family}*")
    return FinRingInstance(overrides={(family, R.key): bad})


def brute_limit(d):
    """Compatible tuples of a finite diagram, in lexicographic node order."""
    objs = [X for _, X in d.nodes]
    names = d.names
    out = []
    for row in itertools.product(*(range(X.size) for X in objs)):
        val = dict(zip(names, row))
        if all(f(val[s]) == val[t] for s, t, f in d.edges):
            out.append(row)
    return out


def bundle_suite(inst):
    """Trivial and tangent bundles plus every square-zero bundle with |M| <= 4 over Z/2 and Z/4."""
    from twb.bundles import tangent_bundle, trivial_bundle
    from twb.finring import small_modules, square_zero_bundle, trunc_poly, zmod

    out = [trivial_bundle(inst, zmod(2)), trivial_bundle(inst, zmod(4)),
           tangent_bundle(inst, zmod(2)), tangent_bundle(inst, zmod(4)),
           tangent_bundle(inst, trunc_poly(zmod(2), 3))]
    for R in (zmod(2), zmod(4)):
        for M in small_modules(R, 4):
            out.append(square_zero_bundle(inst, R, M))
    return out


def random_polymor(rng, dom, cod, max_deg=4, max_terms=4):
    """A random polynomial map R^dom -> R^cod with total degree <= max_deg."""
    from fractions import Fraction

    from twb.polycdc import Poly, PolyMor, Space

    comps = []
    for _ in range(cod):
        terms = {}
        for _ in range(rng.randint(1, max_terms)):
            deg = rng.randint(0, max_deg)
            e = [0] * dom
            for _ in range(deg if dom else 0):
                e[rng.randrange(dom)] += 1
            terms[tuple(e)] = Fraction(rng.randint(-6, 6), rng.randint(1, 3))
        comps.append(Poly(dom, terms))
    return PolyMor(Space(dom), Space(cod), comps)
