"""Finite commutative rings with identity, and total maps between them.

Elements are the integers ``0 .. size-1``.  All ring operations are
vectorised over numpy integer arrays so that large tangent rings such as
T(T(E)) never need materialised operation tables.
"""
from __future__ import annotations

import itertools
from functools import cached_property

import numpy as np

from .._keys import digest
from ..errors import ConstructionError, PreconditionError, ResourceError

IDX = np.int64


def _arr(x):
    return np.asarray(x, dtype=IDX)


def _frozen(a):
    a = np.ascontiguousarray(a, dtype=IDX)
    a.flags.writeable = False
    return a


class FiniteRing:
    """Abstract finite commutative ring on the carrier ``range(size)``."""

    size: int
    name: str
    key: str

    def add(self, x, y):
        raise NotImplementedError

    def mul(self, x, y):
        raise NotImplementedError

    def neg(self, x):
        raise NotImplementedError

    @property
    def zero(self) -> int:
        raise NotImplementedError

    @property
    def one(self) -> int:
        raise NotImplementedError

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def elements(self):
        return np.arange(self.size, dtype=IDX)

    def label(self, x) -> str:
        return str(int(x))

    @cached_property
    def add_table(self):
        return self._table(self.add)

    @cached_property
    def mul_table(self):
        return self._table(self.mul)

    def _table(self, op):
        n = self.size
        if n * n > 4 * 10**6:
            raise ResourceError(f"operation table of {self.name} too large", n * n)
        xs = np.repeat(np.arange(n, dtype=IDX), n)
        ys = np.tile(np.arange(n, dtype=IDX), n)
        return _frozen(op(xs, ys).reshape(n, n))

    def __eq__(self, other):
        return isinstance(other, FiniteRing) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"<ring {self.name} |{self.size}|>"


class TableRing(FiniteRing):
    """A ring given by explicit addition and multiplication tables."""

    def __init__(self, add_table, mul_table, name, key=None, labels=None, validate=True):
        add_table = _frozen(add_table)
        mul_table = _frozen(mul_table)
        n = add_table.shape[0]
        if n < 1 or add_table.shape != (n, n) or mul_table.shape != (n, n):
            raise ConstructionError("tables must be square and non-empty", "shape")
        if add_table.min() < 0 or add_table.max() >= n or mul_table.min() < 0 or mul_table.max() >= n:
            raise ConstructionError("table values outside the carrier", "closure")
        self.size = n
        self.name = name
        self.key = key or digest("tables", add_table.tobytes(), mul_table.tobytes())
        self.__dict__["add_table"] = add_table
        self.__dict__["mul_table"] = mul_table
        self._labels = labels
        self._zero = _find_identity(add_table)
        self._one = _find_identity(mul_table)
        if self._zero is None:
            raise ConstructionError(f"{name}: no additive identity", "additive identity")
        if self._one is None:
            raise ConstructionError(f"{name}: no multiplicative identity", "multiplicative identity")
        neg = np.full(n, -1, dtype=IDX)
        rows, cols = np.nonzero(add_table == self._zero)
        neg[rows] = cols
        if (neg < 0).any():
            bad = int(np.nonzero(neg < 0)[0][0])
            raise ConstructionError(f"{name}: {bad} has no additive inverse", "additive inverses", (bad,))
        self._neg = _frozen(neg)
        if validate:
            validate_ring(self)

    @property
    def zero(self):
        return self._zero

    @property
    def one(self):
        return self._one

    def add(self, x, y):
        return self.add_table[_arr(x), _arr(y)]

    def mul(self, x, y):
        return self.mul_table[_arr(x), _arr(y)]

    def neg(self, x):
        return self._neg[_arr(x)]

    def label(self, x):
        if self._labels is not None:
            return self._labels[int(x)]
        return str(int(x))


def _find_identity(table):
    n = table.shape[0]
    ar = np.arange(n)
    for e in range(n):
        if np.array_equal(table[e], ar) and np.array_equal(table[:, e], ar):
            return e
    return None


def validate_ring(R: FiniteRing):
    """Exhaustively check the commutative-ring axioms; raise on the first failure."""
    n = R.size
    a, m = R.add_table, R.mul_table
    for name, t in (("addition", a), ("multiplication", m)):
        bad = np.argwhere(t != t.T)
        if len(bad):
            x, y = map(int, bad[0])
            raise ConstructionError(f"{R.name}: {name} not commutative at ({x}, {y})",
                                    f"commutativity of {name}", (x, y))
    if n**3 > 5 * 10**7:
        raise ResourceError(f"{R.name}: associativity check too large", n**3)
    for name, t in (("addition", a), ("multiplication", m)):
        lhs = t[t, :]          # (x*y)*w indexed [x, y, w]
        rhs = t[:, t]          # x*(y*w) indexed [x, y, w]
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            x, y, w = map(int, bad[0])
            raise ConstructionError(f"{R.name}: {name} not associative at ({x}, {y}, {w})",
                                    f"associativity of {name}", (x, y, w))
    # x*(y+w) == x*y + x*w
    lhs = m[:, a]
    rhs = a[m[:, :, None], m[:, None, :]]
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        x, y, w = map(int, bad[0])
        raise ConstructionError(f"{R.name}: distributivity fails at ({x}, {y}, {w})",
                                "distributivity", (x, y, w))


class DualRing(FiniteRing):
    """R[eps] with eps^2 = 0; ``a + b eps`` is encoded as ``a * |R| + b``."""

    def __init__(self, base: FiniteRing):
        self.base = base
        self.n = base.size
        self.size = self.n * self.n
        self.name = f"T({base.name})"
        self.key = digest("T", base.key)

    def split(self, x):
        x = _arr(x)
        return x // self.n, x % self.n

    def join(self, a, b):
        return _arr(a) * self.n + _arr(b)

    @property
    def zero(self):
        return self.base.zero * self.n + self.base.zero

    @property
    def one(self):
        return self.base.one * self.n + self.base.zero

    @property
    def eps(self):
        return self.base.zero * self.n + self.base.one

    def add(self, x, y):
        a, b = self.split(x)
        c, d = self.split(y)
        R = self.base
        return self.join(R.add(a, c), R.add(b, d))

    def mul(self, x, y):
        a, b = self.split(x)
        c, d = self.split(y)
        R = self.base
        return self.join(R.mul(a, c), R.add(R.mul(a, d), R.mul(b, c)))

    def neg(self, x):
        a, b = self.split(x)
        return self.join(self.base.neg(a), self.base.neg(b))

    def label(self, x):
        a, b = divmod(int(x), self.n)
        return f"({self.base.label(a)})+({self.base.label(b)})e"


# ---------------------------------------------------------------- morphisms


class RingMor:
    """A total map between finite rings, stored as a table or a vectorised rule.

    Equality is extensional.  ``key`` records how the map was built so that
    limits formed from it get reproducible identities.
    """

    def __init__(self, dom: FiniteRing, cod: FiniteRing, table=None, fn=None, key=None, name=None):
        if (table is None) == (fn is None):
            raise ValueError("give exactly one of table / fn")
        self.dom = dom
        self.cod = cod
        self.name = name
        if table is not None:
            t = _frozen(table)
            if t.shape != (dom.size,):
                raise ConstructionError(
                    f"map table has {t.shape[0] if t.ndim else 0} entries, domain has {dom.size}", "totality")
            if t.size and (t.min() < 0 or t.max() >= cod.size):
                raise ConstructionError("map values outside the codomain", "totality")
            self.__dict__["table"] = t
            self._fn = None
            self.key = key or digest("table", dom.key, cod.key, t.tobytes())
        else:
            self._fn = fn
            if key is None:
                raise ValueError("rule-defined maps need a structural key")
            self.key = key

    def apply(self, xs):
        xs = _arr(xs)
        if "table" in self.__dict__:
            return self.table[xs]
        return _arr(self._fn(xs))

    def __call__(self, x):
        return int(self.apply(np.array([x]))[0])

    @cached_property
    def table(self):
        if self.dom.size > 16 * 10**6:
            raise ResourceError(f"cannot tabulate a map out of {self.dom.name}", self.dom.size)
        return _frozen(self._fn(np.arange(self.dom.size, dtype=IDX)))

    def __eq__(self, other):
        return (isinstance(other, RingMor) and self.dom == other.dom and self.cod == other.cod
                and np.array_equal(self.table, other.table))

    def __hash__(self):
        return hash((self.dom.key, self.cod.key, self.table.tobytes()))

    def __repr__(self):
        label = self.name or self.key[:8]
        return f"<map {label}: {self.dom.name} -> {self.cod.name}>"


def identity(R: FiniteRing) -> RingMor:
    return RingMor(R, R, fn=lambda xs: xs, key=digest("id", R.key), name=f"1_{R.name}")


def compose(f: RingMor, g: RingMor) -> RingMor:
    """f followed by g."""
    if f.cod != g.dom:
        raise PreconditionError(f"cannot compose {f!r} with {g!r}")
    if f.key == digest("id", f.dom.key):
        return g
    if g.key == digest("id", g.dom.key):
        return f
    h = RingMor(f.dom, g.cod, fn=lambda xs: g.apply(f.apply(xs)), key=digest("comp", f.key, g.key))
    h.first = f
    return h


def hom_violation(f: RingMor):
    """First ring-homomorphism law violated by ``f``, or None."""
    A, B = f.dom, f.cod
    t = f.table
    if t[A.zero] != B.zero:
        return ("preserves 0", ())
    if t[A.one] != B.one:
        return ("preserves 1", ())
    xs = np.repeat(A.elements(), A.size)
    ys = np.tile(A.elements(), A.size)
    for law, opA, opB in (("preserves +", A.add, B.add), ("preserves *", A.mul, B.mul)):
        bad = np.nonzero(t[opA(xs, ys)] != opB(t[xs], t[ys]))[0]
        if len(bad):
            i = bad[0]
            return (law, (int(xs[i]), int(ys[i])))
    return None


def ring_hom(dom, cod, table, name=None) -> RingMor:
    """A validated ring homomorphism."""
    f = RingMor(dom, cod, table=table, name=name)
    bad = hom_violation(f)
    if bad:
        raise ConstructionError(f"{name or 'map'} is not a ring homomorphism: {bad[0]} fails at {bad[1]}",
                                bad[0], bad[1])
    return f


# ---------------------------------------------------------------- constructors


def zmod(n: int) -> TableRing:
    if n < 1:
        raise ConstructionError("zmod needs n >= 1", "size")
    r = np.arange(n)
    return TableRing((r[:, None] + r[None, :]) % n, (r[:, None] * r[None, :]) % n,
                     name=f"zmod({n})", key=digest("zmod", n), validate=False)


def product(R: FiniteRing, S: FiniteRing) -> TableRing:
    n, m = R.size, S.size
    xs = np.repeat(np.arange(n * m), n * m)
    ys = np.tile(np.arange(n * m), n * m)
    a, b = divmod(xs, m)
    c, d = divmod(ys, m)
    add = (R.add(a, c) * m + S.add(b, d)).reshape(n * m, n * m)
    mul = (R.mul(a, c) * m + S.mul(b, d)).reshape(n * m, n * m)
    labels = [f"({R.label(i // m)},{S.label(i % m)})" for i in range(n * m)]
    return TableRing(add, mul, name=f"product({R.name},{S.name})", key=digest("product", R.key, S.key),
                     labels=labels, validate=False)


class TruncPoly(TableRing):
    """R[X]/(X^k); the element sum c_i X^i has index with c_0 most significant."""

    def __init__(self, base: FiniteRing, k: int):
        if k < 1:
            raise ConstructionError("trunc_poly needs k >= 1", "degree")
        n = base.size
        size = n**k
        if size > 4096:
            raise ResourceError(f"trunc_poly({base.name},{k}) has {size} elements", size, 4096)
        self.base = base
        self.k = k
        coeffs = np.array(list(itertools.product(range(n), repeat=k)), dtype=IDX).reshape(size, k)
        weights = n ** np.arange(k - 1, -1, -1)
        xs = np.repeat(np.arange(size), size)
        ys = np.tile(np.arange(size), size)
        A, B = coeffs[xs], coeffs[ys]
        add_c = np.stack([base.add(A[:, i], B[:, i]) for i in range(k)], axis=1)
        mul_c = np.full((len(xs), k), base.zero, dtype=IDX)
        for i in range(k):
            for j in range(k - i):
                mul_c[:, i + j] = base.add(mul_c[:, i + j], base.mul(A[:, i], B[:, j]))
        add = (add_c @ weights).reshape(size, size)
        mul = (mul_c @ weights).reshape(size, size)
        self.coeffs = _frozen(coeffs)
        self.weights = weights
        super().__init__(add, mul, name=f"trunc_poly({base.name},{k})",
                         key=digest("trunc_poly", base.key, k), validate=False)

    def element(self, coeffs) -> int:
        c = list(coeffs) + [self.base.zero] * (self.k - len(coeffs))
        return int(np.dot(c, self.weights))

    @property
    def X(self) -> int:
        return self.element([self.base.zero, self.base.one]) if self.k > 1 else self.zero

    def label(self, x):
        terms = []
        for i, c in enumerate(self.coeffs[int(x)]):
            if c == self.base.zero:
                continue
            mono = "" if i == 0 else ("X" if i == 1 else f"X^{i}")
            cl = self.base.label(c)
            terms.append(cl if not mono else (mono if c == self.base.one else f"{cl}{mono}"))
        return "+".join(terms) or "0"

    def augmentation(self) -> RingMor:
        """q: R[X]/(X^k) -> R, X -> 0."""
        return RingMor(self, self.base, table=self.coeffs[:, 0], key=digest("aug", self.key),
                       name=f"aug({self.name})")

    def inclusion(self) -> RingMor:
        """z: R -> R[X]/(X^k), constants."""
        t = [self.element([r]) for r in range(self.base.size)]
        return RingMor(self.base, self, table=t, key=digest("incl", self.key), name=f"incl({self.name})")


def trunc_poly(R: FiniteRing, k: int) -> TruncPoly:
    return TruncPoly(R, k)


def from_tables(add, mul, name="tables") -> TableRing:
    return TableRing(np.asarray(add), np.asarray(mul), name=name)


def tangent_ring(R: FiniteRing) -> DualRing:
    return DualRing(R)
