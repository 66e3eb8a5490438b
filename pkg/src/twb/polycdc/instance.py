"""The polynomial cartesian differential instance.

Objects are ``Space(n)``; T(R^n) = R^2n with the tangent block after the
base block, so p is the first-block projection, 0 = <1, 0> and the lift is
(x, v) |-> (x, 0, 0, v).
"""
from __future__ import annotations

import random
from fractions import Fraction

from ..anchors import anchor
from ..bundles import DifferentialBundle, construct_bundle, wide_pullback  # noqa: F401
from ..core import Diagram, Limit, LimitVerdict, TangentInstance, Verdict, fibre_power
from ..errors import ConstructionError, InputError, UnsupportedLimit
from .poly import Poly, PolyMor, Space, compose, identity


class PolyCDC(TangentInstance):
    name = "polycdc"
    all_limits_preserved = False

    def __init__(self, max_carrier=None, probes=8, seed=0):
        super().__init__(max_carrier)
        self.probes = probes
        self.seed = seed

    # category
    def identity(self, X):
        return identity(X)

    def compose(self, f, g):
        return compose(f, g)

    def equal(self, f, g):
        return f == g

    def difference(self, f, g):
        return {"lhs": [str(p) for p in f.comps], "rhs": [str(p) for p in g.comps],
                "lhs_shape": f"{f.dom}->{f.cod}", "rhs_shape": f"{g.dom}->{g.cod}"}

    def owns(self, thing):
        return isinstance(thing, (Space, PolyMor))

    # tangent structure
    def T(self, X):
        return Space(2 * X.dim)

    def Tmor(self, f):
        return tangent_of_polymor(f)

    def p(self, X):
        n = X.dim
        return PolyMor(Space(2 * n), X, [Poly.var(2 * n, i) for i in range(n)], name=f"p_{X.name}")

    def zero(self, X):
        n = X.dim
        return PolyMor(X, Space(2 * n), [Poly.var(n, i) for i in range(n)] + [Poly.zero(n)] * n,
                       name=f"0_{X.name}")

    def lift(self, X):
        n = X.dim
        v = [Poly.var(2 * n, i) for i in range(2 * n)]
        zero = [Poly.zero(2 * n)] * n
        return PolyMor(Space(2 * n), Space(4 * n), v[:n] + zero + zero + v[n:], name=f"l_{X.name}")

    def add(self, X):
        fp = fibre_power(self, X, 2)
        a, b = fp.limit.legs["0"], fp.limit.legs["1"]
        n = X.dim
        comps = list(a.comps[:n]) + [a.comps[n + i] + b.comps[n + i] for i in range(n)]
        return PolyMor(fp.obj, Space(2 * n), comps, name=f"+_{X.name}")

    # limits
    def _limit(self, d: Diagram) -> Limit:
        names = d.names
        dims = {n: X.dim for n, X in d.nodes}
        offs, total = {}, 0
        for n in names:
            offs[n] = total
            total += dims[n]
        V = lambda n, i: Poly.var(total, offs[n] + i)  # noqa: E731
        eqs = []
        for s, t, f in d.edges:
            src = [V(s, i) for i in range(dims[s])]
            for j, comp in enumerate(f.comps):
                eqs.append(V(t, j) - comp.substitute(src, total))
        # value of each variable in terms of the remaining free variables
        value = [Poly.var(total, i) for i in range(total)]
        for _ in range(len(eqs)):
            eqs = [e for e in eqs if not e.is_zero()]
            if not eqs:
                break
            pick = None
            for e in eqs:
                if e.degree() == 0:
                    raise UnsupportedLimit("the limit is empty (inconsistent equations)")
                for i in sorted(e.variables(), reverse=True):
                    if _solvable(e, i):
                        pick = (e, i)
                        break
                if pick:
                    break
            if pick is None:
                raise UnsupportedLimit("diagram is not a registered shape (equations not solvable "
                                       "for a single variable)")
            e, i = pick
            c = e.linear_coeffs()[i]
            unit = [0] * total
            unit[i] = 1
            sol = (e - Poly(total, {tuple(unit): c})).scale(-1 / c)
            subst = [Poly.var(total, j) if j != i else sol for j in range(total)]
            value = [v.substitute(subst, total) for v in value]
            eqs = [x.substitute(subst, total) for x in eqs if x is not e]
        free = sorted({j for v in value for j in v.variables()})
        k = len(free)
        where = {j: pos for pos, j in enumerate(free)}
        # rewrite values in the apex coordinates
        back = [Poly.var(k, where[j]) if j in where else Poly.zero(k) for j in range(total)]
        vals = [v.substitute(back, k) for v in value]
        apex = Space(k)
        legs = {n: PolyMor(apex, dict(d.nodes)[n], vals[offs[n]:offs[n] + dims[n]], name=f"pi_{n}")
                for n in names}
        coords = tuple(_locate(j, names, offs, dims) for j in free)
        return Limit(d, apex, legs, status="verified-limit", method="registered-shape", data=coords)

    def _pair(self, lim, legs):
        comps = [legs[n].comps[i] for n, i in lim.data]
        X = next(iter(legs.values())).dom
        return PolyMor(X, lim.apex, comps)

    def _factor_through_T(self, lim, legs):
        X = next(iter(legs.values())).dom
        dims = {n: Y.dim for n, Y in lim.diagram.nodes}
        base = [legs[n].comps[i] for n, i in lim.data]
        tang = [legs[n].comps[dims[n] + i] for n, i in lim.data]
        return PolyMor(X, self.T(lim.apex), base + tang)

    def _compare(self, d, legs):
        from ..core import compute_limit

        lim = compute_limit(self, d)
        h = self._pair(lim, legs)
        detail = {"cone_dim": h.dom.dim, "limit_dim": h.cod.dim}
        if h.dom.dim != h.cod.dim:
            return LimitVerdict(False, "registered-shape", detail)
        if h.is_affine():
            ok = _rank(_linear_part(h)) == h.dom.dim
            return LimitVerdict(ok, "registered-shape", detail)
        ok = self._probe_jacobian(h)
        detail["probes"] = self.probes
        detail["seed"] = self.seed
        detail["caveat"] = "necessary condition only: Jacobian invertible at probe points"
        return LimitVerdict(ok, "probe-only", detail)

    def _probe_jacobian(self, h):
        rng = random.Random(self.seed)
        J = h.jacobian()
        for _ in range(self.probes):
            pt = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(h.dom.dim)]
            M = [[p.evaluate(pt) for p in row] for row in J]
            if _rank(M) < h.dom.dim:
                return False
        return True

    def is_iso(self, f):
        if f.dom.dim != f.cod.dim:
            return False
        if not f.is_affine():
            raise UnsupportedLimit("isomorphism test is only available for affine maps")
        return _rank(_linear_part(f)) == f.dom.dim

    def inverse(self, f):
        if not self.is_iso(f):
            raise ConstructionError("map is not invertible", "bijection")
        n = f.dom.dim
        A = _linear_part(f)
        b = [p.constant() for p in f.comps]
        Ainv = _invert(A)
        comps = []
        for i in range(n):
            terms = {tuple(1 if k == j else 0 for k in range(n)): Ainv[i][j] for j in range(n)}
            const = -sum(Ainv[i][j] * b[j] for j in range(n))
            terms[(0,) * n] = const
            comps.append(Poly(n, terms))
        return PolyMor(f.cod, f.dom, comps)

    def tn_certificate(self, d, legs):
        # limits found by elimination are graphs of polynomial maps, and T
        # carries a graph to the graph of the tangent map
        return "registered-shape"

    def terminal(self):
        return Space(0)

    def to_terminal(self, X):
        return PolyMor(X, Space(0), [])

    def point(self, values):
        return PolyMor(Space(0), Space(len(values)), [Poly.const(0, v) for v in values])


def _solvable(e: Poly, i: int) -> bool:
    """e = c * x_i + (terms free of x_i) with c a nonzero constant."""
    for exps, c in e.terms:
        if exps[i] and (exps[i] > 1 or sum(exps) > 1):
            return False
    return e.linear_coeffs()[i] != 0


def _locate(j, names, offs, dims):
    for n in names:
        if offs[n] <= j < offs[n] + dims[n]:
            return (n, j - offs[n])
    raise AssertionError(j)


def _linear_part(f):
    return [p.linear_coeffs() for p in f.comps]


def _rank(M) -> int:
    M = [list(map(Fraction, row)) for row in M]
    rank, rows = 0, len(M)
    cols = len(M[0]) if M else 0
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if M[r][c] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for r in range(rows):
            if r != rank and M[r][c] != 0:
                k = M[r][c] / M[rank][c]
                M[r] = [a - k * b for a, b in zip(M[r], M[rank])]
        rank += 1
    return rank


def _invert(A):
    n = len(A)
    M = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    for c in range(n):
        piv = next(r for r in range(c, n) if M[r][c] != 0)
        M[c], M[piv] = M[piv], M[c]
        inv = 1 / M[c][c]
        M[c] = [x * inv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                k = M[r][c]
                M[r] = [a - k * b for a, b in zip(M[r], M[c])]
    return [row[n:] for row in M]


# ---------------------------------------------------------------- operations


def tangent_of_polymor(f: PolyMor) -> PolyMor:
    """T(f)(x, v) = (f(x), J_f(x) v)."""
    m, n = f.dom.dim, f.cod.dim
    base = [p.embed(2 * m) for p in f.comps]
    vs = [Poly.var(2 * m, m + j) for j in range(m)]
    deriv = []
    for p in f.comps:
        acc = Poly.zero(2 * m)
        for j in range(m):
            dj = p.derivative(j)
            if not dj.is_zero():
                acc = acc + dj.embed(2 * m) * vs[j]
        deriv.append(acc)
    name = f"T({f.name})" if f.name else None
    return PolyMor(Space(2 * m), Space(2 * n), base + deriv, name=name)


def projection_bundle(inst: PolyCDC, m: int, f: int) -> DifferentialBundle:
    """The product projection R^m x R^f -> R^m with its fibrewise structure."""
    E, M = Space(m + f), Space(m)
    n = m + f
    x = [Poly.var(n, i) for i in range(n)]
    q = PolyMor(E, M, x[:m], name="q")
    z = PolyMor(M, E, [Poly.var(m, i) for i in range(m)] + [Poly.zero(m)] * f, name="z")
    e2 = wide_pullback(inst, q, 2)
    a, b = e2.legs["0"], e2.legs["1"]
    sigma = PolyMor(e2.apex, E, list(a.comps[:m]) + [a.comps[m + i] + b.comps[m + i] for i in range(f)],
                    name="sigma")
    zero_n = [Poly.zero(n)]
    # layout (base, fibre, base-tangent, fibre-tangent)
    lam = PolyMor(E, Space(2 * n), x[:m] + zero_n * f + zero_n * m + x[m:], name="lambda")
    return DifferentialBundle(inst, q, z, sigma, lam, name=f"proj({m},{f})")


def chain_rule_check(f: PolyMor, g: PolyMor, samples=4, seed=0) -> Verdict:
    """T(fg) = T(f) T(g) exactly, plus evaluation at rational sample points."""
    subject = f"{f.dom}->{f.cod}->{g.cod}"
    if f.cod != g.dom:
        raise InputError("maps are not composable")
    lhs = tangent_of_polymor(compose(f, g))
    rhs = compose(tangent_of_polymor(f), tangent_of_polymor(g))
    exact = lhs == rhs
    rng = random.Random(seed)
    spot = True
    for _ in range(samples):
        pt = [Fraction(rng.randint(-7, 7), rng.randint(1, 4)) for _ in range(lhs.dom.dim)]
        spot &= lhs(pt) == rhs(pt)
    detail = {"spot_checks": samples, "spot_ok": spot}
    if not exact:
        detail.update({"lhs": [str(p) for p in lhs.comps], "rhs": [str(p) for p in rhs.comps]})
    status = "pass" if exact and spot else "fail"
    return Verdict("chain-rule", status, anchor("chain-rule"), subject, "polycdc", "exact", detail)


def block_permutation(a: int, b: int) -> PolyMor:
    """T(A x B) = (xa, xb, va, vb) -> T(A) x T(B) = (xa, va, xb, vb)."""
    n = 2 * (a + b)
    v = [Poly.var(n, i) for i in range(n)]
    xa, xb, va, vb = v[:a], v[a:a + b], v[a + b:2 * a + b], v[2 * a + b:]
    return PolyMor(Space(n), Space(n), xa + va + xb + vb)


def tangent_space_at(inst: PolyCDC, n: int, point=None):
    from ..bundles import tangent_space

    point = point if point is not None else [0] * n
    return tangent_space(inst, Space(n), inst.point(point))


def poly_map(dom: int, texts, name=None) -> PolyMor:
    from .parser import parse_poly

    return PolyMor(Space(dom), Space(len(texts)), [parse_poly(t, dom) for t in texts], name=name)


__all__ = [
    "PolyCDC",
    "block_permutation",
    "chain_rule_check",
    "construct_bundle",
    "poly_map",
    "projection_bundle",
    "tangent_of_polymor",
    "tangent_space_at",
]
