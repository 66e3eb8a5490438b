"""The finite-ring instance: dual-number tangent structure and carrier limits."""
from __future__ import annotations

import numpy as np

from .._keys import digest
from ..core import (
    Diagram,
    Limit,
    LimitVerdict,
    TangentInstance,
    equation,
    factor_through_T,
    fibre_power,
    limit_check,
    pair,
)
from ..errors import ConstructionError, InputError, ResourceError
from .rings import IDX, DualRing, FiniteRing, RingMor, _arr, _frozen, compose, identity, zmod

_CHUNK = 1 << 20


def _weights(radices):
    """Mixed-radix place values, or None when the codes would overflow int64."""
    total = 1
    for r in radices:
        total *= max(r, 1)
    if total >= 2**62:
        return None
    w = [1] * len(radices)
    for i in range(len(radices) - 2, -1, -1):
        w[i] = w[i + 1] * max(radices[i + 1], 1)
    return np.array(w, dtype=IDX)


def _sorted_rows(rows, radices):
    """Rows in lexicographic order; the enumeration usually produces them sorted."""
    if len(rows) < 2:
        return rows
    w = _weights(radices)
    if w is None:
        return rows[np.lexsort(rows.T[::-1])]
    codes = rows @ w
    if (codes[1:] >= codes[:-1]).all():
        return rows
    return rows[np.argsort(codes, kind="stable")]


class RowIndex:
    """Sorted lookup of integer rows (the carrier of a limit ring)."""

    def __init__(self, rows, radices):
        self.rows = rows
        self.weights = _weights([int(r) for r in radices])
        if self.weights is not None:
            self.codes = rows @ self.weights
            self._dict = None
        else:
            self._dict = {tuple(r): i for i, r in enumerate(rows.tolist())}

    def lookup(self, rows):
        """Indices of ``rows``; -1 where a row is absent."""
        rows = np.atleast_2d(_arr(rows))
        if self._dict is not None:
            return np.array([self._dict.get(tuple(r), -1) for r in rows.tolist()], dtype=IDX)
        return self._search(rows @ self.weights)

    def lookup_columns(self, cols):
        """Like ``lookup`` for rows given column by column."""
        if self._dict is not None:
            return self.lookup(np.column_stack(cols))
        codes = _arr(cols[0]) * self.weights[0]
        for c, w in zip(cols[1:], self.weights[1:]):
            codes += _arr(c) * w
        return self._search(codes)

    def _search(self, codes):
        pos = np.searchsorted(self.codes, codes)
        pos = np.minimum(pos, len(self.codes) - 1)
        return np.where(self.codes[pos] == codes, pos, -1)


class LimitRing(FiniteRing):
    """The compatible-tuple subring of a product, with componentwise operations."""

    def __init__(self, factors, rows, key, name):
        self.factors = list(factors)
        self.rows = _frozen(rows)
        self.size = len(rows)
        self.key = key
        self.name = name
        self.index = RowIndex(self.rows, [F.size for F in self.factors])
        self._zero = self._find([F.zero for F in self.factors], "additive identity")
        self._one = self._find([F.one for F in self.factors], "multiplicative identity")

    def _find(self, row, law):
        i = int(self.index.lookup([row])[0])
        if i < 0:
            raise ConstructionError(f"{self.name}: compatible tuples lack the {law}", law)
        return i

    @property
    def zero(self):
        return self._zero

    @property
    def one(self):
        return self._one

    def locate(self, cols, law="closure"):
        """Indices of the tuples with the given columns; raises if one is missing."""
        out = self.index.lookup_columns(cols)
        if (out < 0).any():
            raise ConstructionError(f"{self.name}: induced operation leaves the compatible tuples", law)
        return out

    def _op(self, name, x, y):
        x, y = _arr(x), _arr(y)
        shape = np.broadcast(x, y).shape
        x, y = np.broadcast_to(x, shape).ravel(), np.broadcast_to(y, shape).ravel()
        a, b = self.rows[x], self.rows[y]
        cols = [getattr(F, name)(a[:, i], b[:, i]) for i, F in enumerate(self.factors)]
        return self.locate(cols, name).reshape(shape)

    def add(self, x, y):
        return self._op("add", x, y)

    def mul(self, x, y):
        return self._op("mul", x, y)

    def neg(self, x):
        x = _arr(x)
        a = self.rows[x.ravel()]
        cols = [F.neg(a[:, i]) for i, F in enumerate(self.factors)]
        return self.locate(cols, "neg").reshape(x.shape)

    def label(self, x):
        row = self.rows[int(x)]
        return "(" + ", ".join(F.label(v) for F, v in zip(self.factors, row)) + ")"


def _apply_chunked(f, n):
    if n <= _CHUNK:
        return f.apply(np.arange(n, dtype=IDX))
    return np.concatenate([f.apply(np.arange(s, min(n, s + _CHUNK), dtype=IDX)) for s in range(0, n, _CHUNK)])


class FinRingInstance(TangentInstance):
    """Finite commutative rings with T(R) = R[eps].

    ``overrides`` maps ``(family, ring_key)`` to a replacement structure map;
    it exists so that tests can inject mutations into p, 0, + or the lift.
    """

    name = "finring"
    all_limits_preserved = True

    def __init__(self, max_carrier=None, overrides=None):
        super().__init__(max_carrier)
        self.overrides = dict(overrides or {})
        self._T = {}

    # category
    def identity(self, X):
        return identity(X)

    def compose(self, f, g):
        return compose(f, g)

    def size(self, X):
        return X.size

    def owns(self, thing):
        return isinstance(thing, (FiniteRing, RingMor))

    def _values(self, f):
        if f.dom.size > self.max_carrier:
            raise ResourceError(f"cannot evaluate a map out of {f.dom.name}", f.dom.size, self.max_carrier)
        if "table" in f.__dict__:
            return f.table
        # tabulate the first factor of a composite too: pairings and equations
        # evaluate the same legs several times over the same large domain
        first = getattr(f, "first", None)
        if first is not None and first.dom is f.dom:
            self._values(first)
        t = _frozen(_apply_chunked(f, f.dom.size))
        f.__dict__["table"] = t
        return t

    def equal(self, f, g):
        if f.dom != g.dom or f.cod != g.cod:
            return False
        if f.key == g.key:
            return True
        return bool(np.array_equal(self._values(f), self._values(g)))

    def difference(self, f, g, limit=64):
        if f.dom != g.dom or f.cod != g.cod:
            return {"message": "different domain or codomain",
                    "lhs": f"{f.dom.name} -> {f.cod.name}", "rhs": f"{g.dom.name} -> {g.cod.name}"}
        a, b = self._values(f), self._values(g)
        bad = np.nonzero(a != b)[0]
        shown = np.arange(min(f.dom.size, limit))
        out = {
            "mismatches": int(len(bad)),
            "witness": [{"x": f.dom.label(x), "lhs": f.cod.label(a[x]), "rhs": f.cod.label(b[x])}
                        for x in bad[:8]],
            "lhs_table": [int(v) for v in a[shown]],
            "rhs_table": [int(v) for v in b[shown]],
        }
        if f.dom.size > limit:
            out["truncated"] = True
        return out

    # tangent structure
    def T(self, X):
        T = self._T.get(X.key)
        if T is None:
            T = self._T[X.key] = DualRing(X)
        return T

    def Tmor(self, f):
        TA, TB = self.T(f.dom), self.T(f.cod)
        n, m = f.dom.size, f.cod.size

        def go(xs):
            a, b = np.divmod(xs, n)
            return f.apply(a) * m + f.apply(b)

        return RingMor(TA, TB, fn=go, key=digest("T", f.key), name=f"T({f.name})" if f.name else None)

    def _override(self, family, X):
        return self.overrides.get((family, X.key))

    def p(self, X):
        o = self._override("p", X)
        if o is not None:
            return o
        n = X.size
        return RingMor(self.T(X), X, fn=lambda xs: xs // n, key=digest("p", X.key), name=f"p_{X.name}")

    def zero(self, X):
        o = self._override("zero", X)
        if o is not None:
            return o
        n, z = X.size, X.zero
        return RingMor(X, self.T(X), fn=lambda xs: xs * n + z, key=digest("zero", X.key), name=f"0_{X.name}")

    def lift(self, X):
        o = self._override("lift", X)
        if o is not None:
            return o
        n, z = X.size, X.zero
        n2 = n * n

        def go(xs):
            a, b = np.divmod(xs, n)
            return (a * n + z) * n2 + (z * n + b)

        return RingMor(self.T(X), self.T(self.T(X)), fn=go, key=digest("lift", X.key), name=f"l_{X.name}")

    def add(self, X):
        o = self._override("add", X)
        if o is not None:
            return o
        T2 = fibre_power(self, X, 2).obj
        n = X.size
        rows = T2.rows

        def go(xs):
            r = rows[xs]
            a, b1 = np.divmod(r[:, 0], n)
            b2 = r[:, 1] % n
            return a * n + X.add(b1, b2)

        return RingMor(T2, self.T(X), fn=go, key=digest("add", X.key), name=f"+_{X.name}")

    def flip(self, X):
        """c: T^2 X -> T^2 X exchanging the two infinitesimals."""
        n = X.size
        n2 = n * n
        TTX = self.T(self.T(X))

        def go(xs):
            u, v = np.divmod(xs, n2)
            a, b = np.divmod(u, n)
            c, d = np.divmod(v, n)
            return (a * n + c) * n2 + (b * n + d)

        return RingMor(TTX, TTX, fn=go, key=digest("flip", X.key), name=f"c_{X.name}")

    # limits
    def _limit(self, d: Diagram) -> Limit:
        names = d.names
        objs = dict(d.nodes)
        cols = {}
        order = []
        budget = self.max_carrier

        def check(n):
            if n > budget:
                raise ResourceError(f"limit needs more than {budget} candidate rows", n, budget)

        def assign(name, values, keep=None, via=None):
            if keep is not None:
                for k in list(cols):
                    cols[k] = cols[k][keep]
            cols[name] = values
            order.append(name)
            mask = np.ones(len(values), dtype=bool)
            for i, (s, t, f) in enumerate(d.edges):
                # the edge that produced the column holds by construction
                if i != via and ((s == name and t in cols) or (t == name and s in cols)):
                    mask &= f.apply(cols[s]) == cols[t]
            if not mask.all():
                for k in list(cols):
                    cols[k] = cols[k][mask]

        first = names[0]
        check(objs[first].size)
        assign(first, np.arange(objs[first].size, dtype=IDX))
        while len(cols) < len(names):
            forced = [(i, s, t, f) for i, (s, t, f) in enumerate(d.edges) if s in cols and t not in cols]
            if forced:
                i, s, t, f = forced[0]
                assign(t, f.apply(cols[s]), via=i)
                continue
            fibred = [(i, s, t, f) for i, (s, t, f) in enumerate(d.edges) if t in cols and s not in cols]
            if fibred:
                i, s, t, f = fibred[0]
                table = self._values(f)
                srt = np.argsort(table, kind="stable")
                counts = np.bincount(table, minlength=f.cod.size)
                starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
                vals = cols[t]
                rep = counts[vals]
                total = int(rep.sum())
                check(total)
                row = np.repeat(np.arange(len(vals)), rep)
                offs = np.arange(total) - np.repeat(np.cumsum(rep) - rep, rep)
                pre = srt[np.repeat(starts[vals], rep) + offs]
                assign(s, pre.astype(IDX), keep=row, via=i)
                continue
            name = next(n for n in names if n not in cols)
            m = objs[name].size
            cur = len(cols[first])
            check(cur * m)
            assign(name, np.tile(np.arange(m, dtype=IDX), cur), keep=np.repeat(np.arange(cur), m))
        rows = _sorted_rows(np.column_stack([cols[n] for n in names]).astype(IDX), [objs[n].size for n in names])
        key = digest("lim", d.key)
        apex = LimitRing([objs[n] for n in names], rows, key=key,
                         name="lim(" + ",".join(f"{n}:{objs[n].name}" for n in names) + ")")
        legs = {n: RingMor(apex, objs[n], table=rows[:, i], key=digest("leg", key, n), name=f"pi_{n}")
                for i, n in enumerate(names)}
        return Limit(d, apex, legs, status="verified-limit", method="carrier")

    def _pair(self, lim, legs):
        apex = lim.apex
        names = lim.diagram.names
        ls = [legs[n] for n in names]

        def go(xs):
            return apex.locate([leg.apply(xs) for leg in ls], "mediating map")

        X = ls[0].dom
        return RingMor(X, apex, fn=go, key=digest("pair", apex.key, tuple(leg.key for leg in ls)))

    def _factor_through_T(self, lim, legs):
        apex = lim.apex
        names = lim.diagram.names
        ls = [legs[n] for n in names]
        sizes = [lim.diagram.obj(n).size for n in names]
        TA = self.T(apex)
        X = ls[0].dom

        def go(xs):
            parts = [np.divmod(leg.apply(xs), s) for leg, s in zip(ls, sizes)]
            a = apex.locate([p[0] for p in parts], "factorization")
            b = apex.locate([p[1] for p in parts], "factorization")
            return a * apex.size + b

        return RingMor(X, TA, fn=go, key=digest("factorT", apex.key, tuple(leg.key for leg in ls)))

    def _compare(self, d, legs):
        from ..core import compute_limit

        lim = compute_limit(self, d)
        names = d.names
        X = legs[names[0]].dom
        if X.size > self.max_carrier:
            raise ResourceError(f"comparison out of {X.name} exceeds budget", X.size, self.max_carrier)
        xs = np.arange(X.size, dtype=IDX)
        img = lim.apex.index.lookup(np.column_stack([legs[n].apply(xs) for n in names]))
        detail = {"cone_size": int(X.size), "limit_size": int(lim.apex.size)}
        if (img < 0).any():
            raise ConstructionError("cone leaves the compatible tuples", "cone")
        uniq, first, counts = np.unique(img, return_index=True, return_counts=True)
        if (counts > 1).any():
            v = uniq[np.argmax(counts > 1)]
            w = np.nonzero(img == v)[0][:2]
            detail["injective"] = False
            detail["witness"] = [X.label(int(w[0])), X.label(int(w[1]))]
            return LimitVerdict(False, "carrier", detail)
        detail["injective"] = True
        if len(uniq) < lim.apex.size:
            missing = np.setdiff1d(np.arange(lim.apex.size), uniq)[0]
            detail["surjective"] = False
            detail["witness"] = [lim.apex.label(int(missing))]
            return LimitVerdict(False, "carrier", detail)
        detail["surjective"] = True
        return LimitVerdict(True, "carrier", detail)

    def is_iso(self, f):
        t = self._values(f)
        return f.dom.size == f.cod.size and len(np.unique(t)) == f.dom.size

    def inverse(self, f):
        if not self.is_iso(f):
            raise ConstructionError("map is not bijective", "bijection")
        t = self._values(f)
        inv = np.empty_like(t)
        inv[t] = np.arange(len(t))
        return RingMor(f.cod, f.dom, table=inv, key=digest("inv", f.key))

    def enumerable(self, objs, n):
        return all(X.size ** (2**n) <= self.max_carrier for X in objs)

    def tn_certificate(self, d, legs):
        # T acts on carriers coordinatewise, so T^n of a cone is its 2^n-th power.
        return "coordinatewise"

    def terminal(self):
        return zmod(1)

    def to_terminal(self, X):
        return RingMor(X, self.terminal(), table=np.zeros(X.size, dtype=IDX), key=digest("bang", X.key))

    # extended suite (flip and lift laws) registered as data
    def extended_checks(self, X):
        return extended_suite(self, X)


def extended_suite(inst, X):
    """Flip and lift laws for the dual-number structure, one callable per equation."""
    c, T = inst.compose, inst.Tmor
    S = "instance-extended"

    def flip_involution(subject):
        return equation(inst, "flip-involution", subject, lambda: c(inst.flip(X), inst.flip(X)),
                        lambda: inst.identity(inst.T(inst.T(X))), S)

    def flip_lift(subject):
        return equation(inst, "flip-lift", subject, lambda: c(inst.lift(X), inst.flip(X)),
                        lambda: inst.lift(X), S)

    def flip_proj(subject):
        return equation(inst, "flip-proj", subject, lambda: c(inst.flip(X), T(inst.p(X))),
                        lambda: inst.p(inst.T(X)), S)

    def coassoc(subject):
        l = inst.lift(X)
        return equation(inst, "lift-coassoc", subject, lambda: c(l, inst.lift(inst.T(X))),
                        lambda: c(l, T(l)), S)

    def additive(subject):
        def rhs():
            fp = fibre_power(inst, X, 2)
            l = inst.lift(X)
            legs = {"0": c(fp.limit.legs["0"], l), "1": c(fp.limit.legs["1"], l)}
            return c(factor_through_T(inst, fp.limit, legs), T(inst.add(X)))

        return equation(inst, "lift-additive", subject, lambda: c(inst.add(X), inst.lift(X)), rhs, S)

    def universal(subject):
        from ..bundles import universality_cone

        def cone():
            return universality_cone(inst, inst.p(X), inst.zero(X), inst.add(X), inst.lift(X))

        return limit_check(inst, "lift-universal", subject, cone, 0, S)

    return [flip_involution, flip_lift, flip_proj, coassoc, additive, universal]


class TrivialInstance(FinRingInstance):
    """Finite rings with the identity functor as tangent structure."""

    name = "trivial-finring"

    def T(self, X):
        return X

    def Tmor(self, f):
        return f

    def p(self, X):
        return identity(X)

    def zero(self, X):
        return identity(X)

    def lift(self, X):
        return identity(X)

    def add(self, X):
        return fibre_power(self, X, 2).limit.legs["0"]

    def _factor_through_T(self, lim, legs):
        return self._pair(lim, legs)

    def enumerable(self, objs, n):
        return all(X.size <= self.max_carrier for X in objs)

    def tn_certificate(self, d, legs):
        return "identity-functor"

    def extended_checks(self, X):
        return []


def tangent_of_ring(R, inst=None):
    """(T(R), p, 0, +, lift) for the dual-number structure."""
    inst = inst or FinRingInstance()
    return inst.T(R), inst.p(R), inst.zero(R), inst.add(R), inst.lift(R)


def as_ring(thing):
    if not isinstance(thing, FiniteRing):
        raise InputError(f"{thing!r} is not a finite ring")
    return thing
