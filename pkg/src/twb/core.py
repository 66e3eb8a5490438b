"""Instance-agnostic tangent-category machinery.

Morphisms compose in diagrammatic order: ``compose(f, g)`` is f followed by g.
An *instance* supplies objects, morphisms, the tangent functor with its
structure maps, and finite limits; everything in this module (and in
:mod:`twb.bundles`) is written against that interface only.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from ._keys import digest
from .anchors import anchor
from .errors import (
    ConstructionError,
    InputError,
    PreconditionError,
    ResourceError,
    UnsupportedLimit,
)

DEFAULT_MAX_CARRIER = 10**6


def default_max_carrier() -> int:
    env = os.environ.get("TWB_MAX_CARRIER")
    return int(env) if env else DEFAULT_MAX_CARRIER


# ---------------------------------------------------------------- diagrams


@dataclass(frozen=True)
class Diagram:
    """A finite diagram: named nodes and edges ``(source, target, morphism)``."""

    nodes: tuple
    edges: tuple = ()

    def __post_init__(self):
        names = [n for n, _ in self.nodes]
        if len(set(names)) != len(names):
            raise InputError(f"duplicate node names in diagram: {names}")
        objs = dict(self.nodes)
        for s, t, f in self.edges:
            if s not in objs or t not in objs:
                raise InputError(f"edge {s}->{t} has an endpoint outside the diagram")
            if f.dom != objs[s] or f.cod != objs[t]:
                raise InputError(f"edge {s}->{t} does not match its node objects")

    @property
    def names(self):
        return [n for n, _ in self.nodes]

    def obj(self, name):
        return dict(self.nodes)[name]

    @property
    def key(self) -> str:
        return digest(
            "diagram",
            tuple((n, X.key) for n, X in self.nodes),
            tuple((s, t, f.key) for s, t, f in self.edges),
        )

    def map(self, on_obj, on_mor) -> "Diagram":
        return Diagram(
            tuple((n, on_obj(X)) for n, X in self.nodes),
            tuple((s, t, on_mor(f)) for s, t, f in self.edges),
        )


@dataclass(frozen=True, eq=False)
class Limit:
    """A limit cone over ``diagram`` with apex and one leg per node."""

    diagram: Diagram
    apex: Any
    legs: dict
    status: str = "verified-limit"
    method: str = "carrier"
    identity_node: Optional[str] = None
    data: Any = None  # instance bookkeeping (e.g. coordinate map of the apex)

    def leg(self, name):
        return self.legs[name]


@dataclass
class LimitVerdict:
    ok: Optional[bool]
    method: str
    detail: dict = field(default_factory=dict)

    @property
    def status(self):
        if self.ok is None:
            return "skip"
        if self.method == "probe-only":
            return "probe-only"
        return "pass" if self.ok else "fail"


# ---------------------------------------------------------------- reports


@dataclass
class Verdict:
    name: str
    status: str  # pass | fail | skip | probe-only
    anchor: str
    subject: str = ""
    suite: str = "core"
    method: str = "exact"
    detail: dict = field(default_factory=dict)
    reason: Optional[str] = None

    @property
    def passed(self):
        return self.status in ("pass", "probe-only")

    def to_dict(self):
        d = {
            "name": self.name,
            "status": self.status,
            "anchor": self.anchor,
            "subject": self.subject,
            "suite": self.suite,
            "method": self.method,
        }
        if self.reason:
            d["reason"] = self.reason
        if self.detail:
            d["detail"] = self.detail
        return d


@dataclass
class CheckReport:
    """Ordered list of verdicts plus the bounds they were computed under."""

    title: str
    verdicts: list = field(default_factory=list)
    bounds: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts if v.status != "skip")

    @property
    def skipped(self):
        return [v for v in self.verdicts if v.status == "skip"]

    @property
    def failures(self):
        return [v for v in self.verdicts if v.status == "fail"]

    def get(self, name, subject=None):
        for v in self.verdicts:
            if v.name == name and (subject is None or v.subject == subject):
                return v
        raise KeyError(name)

    def statuses(self, name):
        return [v.status for v in self.verdicts if v.name == name]

    def to_dict(self):
        return {
            "title": self.title,
            "bounds": self.bounds,
            "passed": self.passed,
            "verdicts": [v.to_dict() for v in self.verdicts],
        }


# ---------------------------------------------------------------- instances


class TangentInstance:
    """Interface every instance category implements.

    Subclasses provide the category, the tangent structure (p, 0, +, l) and
    finite limits.  Methods prefixed with ``_`` are called only through the
    generic wrappers below, which handle trivial limits and cone completion.
    """

    name = "abstract"
    # T preserves every limit the instance can form (enables shortcuts).
    all_limits_preserved = False

    def __init__(self, max_carrier: Optional[int] = None):
        self.max_carrier = max_carrier or default_max_carrier()
        self._limit_cache = {}

    # category
    def identity(self, X):
        raise NotImplementedError

    def compose(self, f, g):
        raise NotImplementedError

    def equal(self, f, g) -> bool:
        raise NotImplementedError

    def difference(self, f, g) -> dict:
        return {}

    def size(self, X) -> Optional[int]:
        return None

    def owns(self, thing) -> bool:
        return True

    # tangent structure
    def T(self, X):
        raise NotImplementedError

    def Tmor(self, f):
        raise NotImplementedError

    def p(self, X):
        raise NotImplementedError

    def zero(self, X):
        raise NotImplementedError

    def lift(self, X):
        raise NotImplementedError

    def add(self, X):
        """+_X : T_2 X -> T X, with T_2 X = ``fibre_power(self, X, 2).obj``."""
        raise NotImplementedError

    # limits
    def _limit(self, d: Diagram) -> Limit:
        raise UnsupportedLimit(f"{self.name} cannot form this limit")

    def _pair(self, lim: Limit, legs: dict):
        raise NotImplementedError

    def _factor_through_T(self, lim: Limit, legs: dict):
        raise NotImplementedError

    def _compare(self, d: Diagram, legs: dict) -> LimitVerdict:
        raise NotImplementedError

    def is_iso(self, f) -> bool:
        raise NotImplementedError

    def inverse(self, f):
        raise NotImplementedError

    def enumerable(self, objs, n: int) -> bool:
        """Whether T^n of every object in ``objs`` fits the budget."""
        return False

    def tn_certificate(self, d: Diagram, legs: dict) -> Optional[str]:
        """Name of an argument that reduces T^n-preservation to n = 0, if any."""
        return None

    def extended_checks(self, X) -> list:
        return []

    def terminal(self):
        raise UnsupportedLimit(f"{self.name} has no registered terminal object")

    def to_terminal(self, X):
        raise UnsupportedLimit(f"{self.name} has no registered terminal object")


def Tn_obj(inst, X, n):
    for _ in range(n):
        X = inst.T(X)
    return X


def Tn_mor(inst, f, n):
    for _ in range(n):
        f = inst.Tmor(f)
    return f


# ---------------------------------------------------------------- limits


def compute_limit(inst, d: Diagram) -> Limit:
    if not d.nodes:
        raise InputError("empty diagram")
    if len(d.nodes) == 1 and not d.edges:
        (name, X), = d.nodes
        return Limit(d, X, {name: inst.identity(X)}, identity_node=name, method="trivial")
    key = d.key
    lim = inst._limit_cache.get(key)
    if lim is None:
        lim = inst._limit(d)
        inst._limit_cache[key] = lim
    return lim


def complete_cone(inst, d: Diagram, legs: dict, on_edge=None) -> dict:
    """Fill in legs of nodes reachable along edges from nodes already given.

    ``on_edge`` maps an edge morphism before composing (used for T-images).
    """
    legs = dict(legs)
    unknown = [n for n in d.names if n not in legs]
    changed = True
    while unknown and changed:
        changed = False
        for s, t, f in d.edges:
            if t not in legs and s in legs:
                legs[t] = inst.compose(legs[s], on_edge(f) if on_edge else f)
                changed = True
        unknown = [n for n in d.names if n not in legs]
    if unknown:
        raise PreconditionError(f"cone has no leg for nodes {unknown}")
    return legs


def check_cone(inst, d: Diagram, legs: dict, on_edge=None):
    for s, t, f in d.edges:
        e = on_edge(f) if on_edge else f
        if not inst.equal(inst.compose(legs[s], e), legs[t]):
            raise PreconditionError(f"cone does not commute with edge {s}->{t}")


def pair(inst, lim: Limit, legs: dict):
    """Mediating morphism into the apex of ``lim`` determined by a cone."""
    legs = complete_cone(inst, lim.diagram, legs)
    check_cone(inst, lim.diagram, legs)
    if lim.identity_node is not None:
        return legs[lim.identity_node]
    return inst._pair(lim, legs)


def factor_through_T(inst, lim: Limit, legs: dict):
    """Given legs ``X -> T(D_i)`` return ``X -> T(apex)``.

    This is the inverse of the canonical comparison ``T(lim D) -> lim T(D)``
    composed with the mediating map into ``lim T(D)``.
    """
    legs = complete_cone(inst, lim.diagram, legs, on_edge=inst.Tmor)
    check_cone(inst, lim.diagram, legs, on_edge=inst.Tmor)
    if lim.identity_node is not None:
        return legs[lim.identity_node]
    return inst._factor_through_T(lim, legs)


def is_limit(inst, d: Diagram, legs: dict) -> LimitVerdict:
    """Decide whether the cone ``legs`` over ``d`` is a limit cone."""
    legs = complete_cone(inst, d, legs)
    check_cone(inst, d, legs)
    if len(d.nodes) == 1 and not d.edges:
        (name, _), = d.nodes
        return LimitVerdict(inst.is_iso(legs[name]), "trivial")
    return inst._compare(d, legs)


def limit_preserved(inst, d: Diagram, legs: dict, n: int) -> LimitVerdict:
    """Whether T^n carries the cone ``legs`` to a limit cone of T^n(d)."""
    legs = complete_cone(inst, d, legs)
    if n == 0:
        return is_limit(inst, d, legs)
    apex = next(iter(legs.values())).dom
    objs = [X for _, X in d.nodes] + [apex]
    if inst.enumerable(objs, n):
        Td = d.map(lambda X: Tn_obj(inst, X, n), lambda f: Tn_mor(inst, f, n))
        Tlegs = {k: Tn_mor(inst, f, n) for k, f in legs.items()}
        v = is_limit(inst, Td, Tlegs)
        if v.method != "probe-only":
            v.method = f"{v.method}@T^{n}"
        return v
    cert = inst.tn_certificate(d, legs)
    if cert is not None:
        v = is_limit(inst, d, legs)
        v.method = f"{cert}@T^{n}"
        return v
    return LimitVerdict(None, "skipped", {"reason": "budget", "n": n})


def pullback(inst, f, g) -> Limit:
    if f.cod != g.cod:
        raise PreconditionError("pullback of maps with different codomains")
    d = Diagram((("0", f.dom), ("1", g.dom), ("base", f.cod)),
                (("0", "base", f), ("1", "base", g)))
    return compute_limit(inst, d)


def wide_pullback(inst, q, k: int) -> Limit:
    """E_k: k copies of q over its codomain.  E_0 = M and E_1 = E on the nose."""
    if k < 0:
        raise InputError("k must be non-negative")
    E, M = q.dom, q.cod
    if k == 0:
        d = Diagram((("base", M),))
        return Limit(d, M, {"base": inst.identity(M)}, identity_node="base", method="trivial")
    nodes = tuple((str(i), E) for i in range(k)) + (("base", M),)
    edges = tuple((str(i), "base", q) for i in range(k))
    d = Diagram(nodes, edges)
    if k == 1:
        return Limit(d, E, {"0": inst.identity(E), "base": q}, identity_node="0", method="trivial")
    return compute_limit(inst, d)


@dataclass(frozen=True, eq=False)
class FibrePower:
    obj: Any
    proj: Any
    zero: Any
    limit: Limit


def fibre_power(inst, M, k: int) -> FibrePower:
    """T_k M with its iterated projection p_k and zero 0_k."""
    if k < 0:
        raise InputError("k must be non-negative")
    if k == 0:
        one = inst.identity(M)
        return FibrePower(M, one, one, wide_pullback(inst, one, 0))
    lim = wide_pullback(inst, inst.p(M), k)
    if k == 1:
        return FibrePower(inst.T(M), inst.p(M), inst.zero(M), lim)
    zk = pair(inst, lim, {str(i): inst.zero(M) for i in range(k)})
    return FibrePower(lim.apex, lim.legs["base"], zk, lim)


def Tk_mor(inst, f, k: int):
    """T_k(f) : T_k M -> T_k N, the map induced on fibre powers."""
    if k == 0:
        return f
    if k == 1:
        return inst.Tmor(f)
    src = fibre_power(inst, f.dom, k).limit
    tgt = fibre_power(inst, f.cod, k).limit
    Tf = inst.Tmor(f)
    return pair(inst, tgt, {str(i): inst.compose(src.legs[str(i)], Tf) for i in range(k)})


# ---------------------------------------------------------------- equations


def run_check(name, subject, thunk, suite="core", anchor_key=None) -> Verdict:
    """Run ``thunk`` (returning a Verdict) converting budget errors to skips."""
    a = anchor(anchor_key or name)
    try:
        return thunk()
    except ResourceError as exc:
        return Verdict(name, "skip", a, subject, suite, "budget", {"message": str(exc)}, "budget")
    except UnsupportedLimit as exc:
        return Verdict(name, "skip", a, subject, suite, "unsupported",
                       {"message": str(exc)}, "unsupported-limit")


def equation(inst, name, subject, lhs: Callable, rhs: Callable, suite="core",
             anchor_key=None) -> Verdict:
    a = anchor(anchor_key or name)

    def go():
        try:
            left, right = lhs(), rhs()
        except (PreconditionError, ConstructionError) as exc:
            return Verdict(name, "fail", a, subject, suite, "exact", {"message": str(exc)})
        if inst.equal(left, right):
            return Verdict(name, "pass", a, subject, suite)
        return Verdict(name, "fail", a, subject, suite, "exact", inst.difference(left, right))

    return run_check(name, subject, go, suite, anchor_key)


def limit_check(inst, name, subject, d_thunk, n=0, suite="core", anchor_key=None) -> Verdict:
    """Verdict for 'the cone returned by ``d_thunk`` is a limit after T^n'."""
    a = anchor(anchor_key or name)

    def go():
        try:
            d, legs = d_thunk()
            v = limit_preserved(inst, d, legs, n)
        except (PreconditionError, ConstructionError) as exc:
            return Verdict(name, "fail", a, subject, suite, "exact", {"message": str(exc), "n": n})
        detail = dict(v.detail)
        detail["n"] = n
        if v.ok is None:
            return Verdict(name, "skip", a, subject, suite, v.method, detail, detail.get("reason", "budget"))
        return Verdict(name, v.status, a, subject, suite, v.method, detail)

    return run_check(name, subject, go, suite, anchor_key)


def additive_equations(inst, subject, q, z, sigma, e2: Limit, e3_thunk, prefix, suite):
    """Unit, commutativity, associativity and projection laws of an addition."""
    c = inst.compose
    p0, p1 = e2.legs["0"], e2.legs["1"]
    E = q.dom
    qz = c(q, z)
    out = [
        equation(inst, f"{prefix}-unit", subject,
                 lambda: c(pair(inst, e2, {"0": qz, "1": inst.identity(E)}), sigma),
                 lambda: inst.identity(E), suite),
        equation(inst, f"{prefix}-unit", subject,
                 lambda: c(pair(inst, e2, {"0": inst.identity(E), "1": qz}), sigma),
                 lambda: inst.identity(E), suite),
        equation(inst, f"{prefix}-comm", subject,
                 lambda: c(pair(inst, e2, {"0": p1, "1": p0}), sigma),
                 lambda: sigma, suite),
        equation(inst, f"{prefix}-proj", subject,
                 lambda: c(sigma, q), lambda: c(p0, q), suite),
    ]

    def assoc_sides():
        e3 = e3_thunk()
        a, b, d = e3.legs["0"], e3.legs["1"], e3.legs["2"]
        ab = c(pair(inst, e2, {"0": a, "1": b}), sigma)
        bd = c(pair(inst, e2, {"0": b, "1": d}), sigma)
        left = c(pair(inst, e2, {"0": ab, "1": d}), sigma)
        right = c(pair(inst, e2, {"0": a, "1": bd}), sigma)
        return left, right

    cache = {}

    def side(i):
        if "v" not in cache:
            cache["v"] = assoc_sides()
        return cache["v"][i]

    out.append(equation(inst, f"{prefix}-assoc", subject, lambda: side(0), lambda: side(1), suite))
    return out


def check_tangent_axioms(inst, objects, morphisms=(), N: int = 1) -> CheckReport:
    """Evaluate the tangent-structure equations on objects T^n M, n < N."""
    if N < 1:
        raise InputError("N must be at least 1")
    for thing in list(objects) + list(morphisms):
        if not inst.owns(thing):
            raise InputError(f"{thing!r} does not belong to instance {inst.name}")
    report = CheckReport(f"tangent axioms ({inst.name})", bounds={"N": N, "max_carrier": inst.max_carrier})
    c, T = inst.compose, inst.Tmor
    for n in range(N):
        for M0 in objects:
            subject = f"T^{n}({_label(M0)})"
            try:
                M = Tn_obj(inst, M0, n)
                sz = inst.size(M)
                if sz is not None and sz > inst.max_carrier:
                    raise ResourceError(f"carrier of {subject} exceeds budget", sz, inst.max_carrier)
            except ResourceError as exc:
                report.verdicts.append(Verdict("level", "skip", anchor("zero-proj"), subject, "core",
                                               "budget", {"message": str(exc)}, "budget"))
                continue
            report.verdicts.extend(_object_equations(inst, M, subject))
            for check in inst.extended_checks(M):
                report.verdicts.append(check(subject))
        for f0 in morphisms:
            subject = f"T^{n}({_label(f0)})"
            f = Tn_mor(inst, f0, n)
            report.verdicts.extend(_naturality(inst, f, subject))
        ids = [inst.identity(Tn_obj(inst, X, n)) for X in objects]
        mors = [Tn_mor(inst, f, n) for f in morphisms]
        for i, one in enumerate(ids):
            report.verdicts.append(equation(inst, "functor-id", f"T^{n}({_label(objects[i])})",
                                            lambda one=one: T(one),
                                            lambda one=one: inst.identity(inst.T(one.dom))))
        allm = mors + ids
        for f in allm:
            for g in allm:
                if f.cod == g.dom:
                    report.verdicts.append(equation(
                        inst, "functor-comp", f"level {n}",
                        lambda f=f, g=g: T(c(f, g)), lambda f=f, g=g: c(T(f), T(g))))
    return report


def _label(thing):
    return getattr(thing, "name", None) or repr(thing)


def _object_equations(inst, M, subject):
    c, T = inst.compose, inst.Tmor
    p, z, l = inst.p(M), inst.zero(M), inst.lift(M)
    out = [
        equation(inst, "zero-proj", subject, lambda: c(z, p), lambda: inst.identity(M)),
        equation(inst, "zero-lift", subject, lambda: c(z, l), lambda: c(z, T(z))),
        equation(inst, "lift-proj", subject, lambda: c(l, T(p)), lambda: c(p, z)),
    ]
    try:
        e2 = fibre_power(inst, M, 2).limit
        plus = inst.add(M)
    except ResourceError as exc:
        out.append(Verdict("add-unit", "skip", anchor("add-unit"), subject, "core", "budget",
                           {"message": str(exc)}, "budget"))
        return out
    except ConstructionError as exc:
        # e.g. a corrupted p whose fibre power is not a subring
        out.append(Verdict("add-unit", "fail", anchor("add-unit"), subject, "core", "exact",
                           {"message": str(exc)}))
        return out
    out.extend(additive_equations(
        inst, subject, p, z, plus, e2, lambda: fibre_power(inst, M, 3).limit, "add", "core"))
    return out


def _naturality(inst, f, subject):
    c, T = inst.compose, inst.Tmor
    M, N = f.dom, f.cod
    out = [
        equation(inst, "nat-p", subject, lambda: c(T(f), inst.p(N)), lambda: c(inst.p(M), f)),
        equation(inst, "nat-zero", subject, lambda: c(inst.zero(M), T(f)), lambda: c(f, inst.zero(N))),
        equation(inst, "nat-lift", subject, lambda: c(inst.lift(M), T(T(f))), lambda: c(T(f), inst.lift(N))),
        equation(inst, "nat-add", subject, lambda: c(inst.add(M), T(f)),
                 lambda: c(Tk_mor(inst, f, 2), inst.add(N))),
    ]
    return out
