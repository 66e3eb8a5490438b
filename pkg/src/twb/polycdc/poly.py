"""Exact multivariate polynomials over the rationals, and tuples of them."""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .._keys import digest
from ..errors import InputError, PreconditionError


def _frac(c) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(c)


class Poly:
    """A polynomial in ``nvars`` variables with terms ``{exponents: coefficient}``.

    Zero coefficients are never stored and terms are kept sorted, so two
    polynomials are equal iff their term tuples are equal.
    """

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping | Iterable = ()):
        self.nvars = nvars
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc = {}
        for e, c in items:
            e = tuple(e)
            if len(e) != nvars:
                raise InputError(f"exponent {e} does not have {nvars} entries")
            acc[e] = acc.get(e, 0) + _frac(c)
        self.terms = tuple(sorted((e, c) for e, c in acc.items() if c != 0))
        self._hash = None

    # constructors
    @classmethod
    def const(cls, nvars, c):
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars, i):
        """The i-th variable (0-based)."""
        if not 0 <= i < nvars:
            raise InputError(f"variable index {i} out of range for {nvars} variables")
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def zero(cls, nvars):
        return cls(nvars)

    # structure
    def is_zero(self):
        return not self.terms

    def degree(self):
        return max((sum(e) for e, _ in self.terms), default=-1)

    def is_affine(self):
        return self.degree() <= 1

    def variables(self):
        return sorted({i for e, _ in self.terms for i, k in enumerate(e) if k})

    def coeff(self, exps) -> Fraction:
        return dict(self.terms).get(tuple(exps), Fraction(0))

    def constant(self) -> Fraction:
        return self.coeff((0,) * self.nvars)

    def linear_coeffs(self):
        return [self.coeff(tuple(1 if j == i else 0 for j in range(self.nvars))) for i in range(self.nvars)]

    # arithmetic
    def _check(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(self.nvars, other)
        if other.nvars != self.nvars:
            raise PreconditionError(f"polynomials in {self.nvars} and {other.nvars} variables")
        return other

    def __add__(self, other):
        other = self._check(other)
        return Poly(self.nvars, list(self.terms) + list(other.terms))

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, [(e, -c) for e, c in self.terms])

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        acc = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                acc[e] = acc.get(e, 0) + c1 * c2
        return Poly(self.nvars, acc)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise InputError("exponents must be non-negative integers")
        out, base = Poly.const(self.nvars, 1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def scale(self, c):
        c = _frac(c)
        return Poly(self.nvars, [(e, c * v) for e, v in self.terms])

    def derivative(self, i: int) -> "Poly":
        out = []
        for e, c in self.terms:
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                out.append((tuple(e2), c * e[i]))
        return Poly(self.nvars, out)

    def substitute(self, polys, nvars: int) -> "Poly":
        """Replace variable i by ``polys[i]``, each a polynomial in ``nvars`` variables."""
        polys = list(polys)
        if len(polys) != self.nvars:
            raise PreconditionError(f"need {self.nvars} substitutions, got {len(polys)}")
        n = nvars
        powers = [{0: Poly.const(n, 1)} for _ in polys]

        def pw(i, k):
            if k not in powers[i]:
                powers[i][k] = pw(i, k - 1) * polys[i]
            return powers[i][k]

        out = Poly.zero(n)
        for e, c in self.terms:
            term = Poly.const(n, c)
            for i, k in enumerate(e):
                if k:
                    term = term * pw(i, k)
            out = out + term
        return out

    def embed(self, nvars: int, offset: int = 0) -> "Poly":
        """The same polynomial read in ``nvars`` variables starting at ``offset``."""
        if offset + self.nvars > nvars:
            raise PreconditionError("embedding does not fit")
        pad = (0,) * offset
        tail = (0,) * (nvars - offset - self.nvars)
        return Poly(nvars, [(pad + e + tail, c) for e, c in self.terms])

    def evaluate(self, point) -> Fraction:
        point = [_frac(x) for x in point]
        total = Fraction(0)
        for e, c in self.terms:
            v = c
            for x, k in zip(point, e):
                if k:
                    v *= x**k
            total += v
        return total

    # comparison
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(self.nvars, other)
        return isinstance(other, Poly) and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, self.terms))
        return self._hash

    def __repr__(self):
        from .parser import format_poly

        return f"Poly({self.nvars}, {format_poly(self)!r})"

    def __str__(self):
        from .parser import format_poly

        return format_poly(self)


class Space:
    """The object R^n of the polynomial instance."""

    __slots__ = ("dim", "key", "name")

    def __init__(self, dim: int):
        if dim < 0:
            raise InputError("dimension must be non-negative")
        self.dim = dim
        self.key = digest("space", dim)
        self.name = f"R^{dim}"

    def __eq__(self, other):
        return isinstance(other, Space) and other.dim == self.dim

    def __hash__(self):
        return hash(("space", self.dim))

    def __repr__(self):
        return self.name


class PolyMor:
    """A polynomial map R^m -> R^n given by n polynomials in m variables."""

    def __init__(self, dom: Space, cod: Space, comps, name=None):
        comps = tuple(comps)
        if len(comps) != cod.dim:
            raise InputError(f"map into {cod} needs {cod.dim} components, got {len(comps)}")
        for p in comps:
            if p.nvars != dom.dim:
                raise InputError(f"component in {p.nvars} variables, domain is {dom}")
        self.dom, self.cod, self.comps, self.name = dom, cod, comps, name
        self._key = None

    @property
    def key(self):
        if self._key is None:
            self._key = digest("polymor", self.dom.dim, self.cod.dim, tuple(p.terms for p in self.comps))
        return self._key

    def __call__(self, point):
        return tuple(p.evaluate(point) for p in self.comps)

    def is_affine(self):
        return all(p.is_affine() for p in self.comps)

    def jacobian(self):
        return [[p.derivative(j) for j in range(self.dom.dim)] for p in self.comps]

    def __eq__(self, other):
        return (isinstance(other, PolyMor) and self.dom == other.dom and self.cod == other.cod
                and self.comps == other.comps)

    def __hash__(self):
        return hash((self.dom.dim, self.cod.dim, self.comps))

    def __repr__(self):
        body = ", ".join(str(p) for p in self.comps)
        return f"<{self.name or 'map'} {self.dom}->{self.cod}: ({body})>"


def identity(X: Space) -> PolyMor:
    return PolyMor(X, X, [Poly.var(X.dim, i) for i in range(X.dim)], name=f"1_{X.name}")


def compose(f: PolyMor, g: PolyMor) -> PolyMor:
    """f followed by g."""
    if f.cod != g.dom:
        raise PreconditionError(f"cannot compose {f.dom}->{f.cod} with {g.dom}->{g.cod}")
    return PolyMor(f.dom, g.cod, [p.substitute(f.comps, f.dom.dim) for p in g.comps])


def projection(n: int, idx) -> PolyMor:
    """R^n -> R^len(idx) selecting coordinates ``idx``."""
    return PolyMor(Space(n), Space(len(idx)), [Poly.var(n, i) for i in idx])


def tuple_map(dom: Space, comps) -> PolyMor:
    return PolyMor(dom, Space(len(comps)), comps)


def constant_map(dom: Space, values) -> PolyMor:
    return PolyMor(dom, Space(len(values)), [Poly.const(dom.dim, v) for v in values])
