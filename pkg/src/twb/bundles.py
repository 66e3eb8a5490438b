"""Differential bundles: construction, verification and linear maps.

Every function takes the hosting instance first and uses only the generic
interface from :mod:`twb.core`, so the same code runs over finite rings and
over polynomial maps.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

from .anchors import anchor
from .core import (
    CheckReport,
    Diagram,
    Limit,
    Verdict,
    Tk_mor,
    additive_equations,
    compute_limit,
    equation,
    factor_through_T,
    fibre_power,
    limit_check,
    limit_preserved,
    pair,
    run_check,
    wide_pullback,
)
from .errors import (
    ConstructionError,
    CorollaryViolation,
    HypothesisViolation,
    InputError,
    PreconditionError,
    ResourceError,
    SectionError,
    TheoremViolation,
)

BundleCheckReport = CheckReport

# node order of the double pullback M x_TM TE x_E M; the apex is ordered
# lexicographically on (M, TE, M)
KEY_NODES = ("M1", "TE", "M2", "TM", "E")


class DifferentialBundle:
    """Structure maps (q, z, sigma, lambda) of a differential bundle.

    ``limit`` is set on constructed bundles and holds the double-pullback
    cone whose apex is the total object.
    """

    def __init__(self, inst, q, z, sigma, lam, name="bundle", limit: Optional[Limit] = None):
        self.inst = inst
        self.q, self.z, self.sigma, self.lam = q, z, sigma, lam
        self.name = name
        self.limit = limit
        self._wide = {}
        E, M = q.dom, q.cod
        if z.dom != M or z.cod != E:
            raise InputError(f"{name}: z must map {M!r} to {E!r}")
        if not inst.equal(inst.compose(z, q), inst.identity(M)):
            raise SectionError(f"{name}: z is not a section of q")
        if lam.dom != E or lam.cod != inst.T(E):
            raise InputError(f"{name}: lambda must map E to T(E)")
        if sigma.cod != E or sigma.dom != self.wide(2).apex:
            raise InputError(f"{name}: sigma must map E_2 to E")

    @property
    def total(self):
        return self.q.dom

    @property
    def base(self):
        return self.q.cod

    def wide(self, k) -> Limit:
        if k not in self._wide:
            self._wide[k] = wide_pullback(self.inst, self.q, k)
        return self._wide[k]

    def __repr__(self):
        return f"<bundle {self.name}: {self.total!r} -> {self.base!r}>"


@dataclass
class LinearBundleMap:
    g: Any
    f: Any
    source: DifferentialBundle
    target: DifferentialBundle
    verified: Optional[CheckReport] = None

    @property
    def ok(self):
        return self.verified is not None and self.verified.passed


@dataclass
class BundleDiagram:
    """A finite diagram of bundles and linear maps."""

    nodes: tuple
    edges: tuple = ()
    shape: tuple = field(default_factory=tuple)

    def bundle(self, name):
        return dict(self.nodes)[name]


# ---------------------------------------------------------------- basic bundles


def trivial_bundle(inst, M, name=None):
    """The trivial bundle (1_M, 1_M, pi_1, 0_M)."""
    one = inst.identity(M)
    e2 = wide_pullback(inst, one, 2)
    return DifferentialBundle(inst, one, one, e2.legs["0"], inst.zero(M), name or f"c({_name(M)})")


def tangent_bundle(inst, M, name=None):
    """The tangent bundle (p_M, 0_M, +_M, l_M)."""
    return DifferentialBundle(inst, inst.p(M), inst.zero(M), inst.add(M), inst.lift(M),
                              name or f"T({_name(M)})")


def transport_bundle(inst, b: DifferentialBundle, phi, psi, name=None) -> DifferentialBundle:
    """Move b along an isomorphism phi: E' -> E with inverse psi: E -> E'."""
    c = inst.compose
    if not (inst.equal(c(phi, psi), inst.identity(phi.dom)) and inst.equal(c(psi, phi), inst.identity(phi.cod))):
        raise PreconditionError("phi and psi are not mutually inverse")
    q = c(phi, b.q)
    z = c(b.z, psi)
    e2 = wide_pullback(inst, q, 2)
    into = pair(inst, b.wide(2), {"0": c(e2.legs["0"], phi), "1": c(e2.legs["1"], phi), "base": e2.legs["base"]})
    sigma = c(c(into, b.sigma), psi)
    lam = c(c(phi, b.lam), inst.Tmor(psi))
    return DifferentialBundle(inst, q, z, sigma, lam, name or f"{b.name}'")


def _name(X):
    return getattr(X, "name", None) or repr(X)


# ---------------------------------------------------------------- key diagram


def build_key_diagram(inst, q, z) -> BundleDiagram:
    """The five bundles cM -> TM <- TE -> cE <- cM with their linear maps."""
    E, M = q.dom, q.cod
    if not inst.equal(inst.compose(z, q), inst.identity(M)):
        raise SectionError("z is not a section of q")
    cM, cE = trivial_bundle(inst, M), trivial_bundle(inst, E)
    TM, TE = tangent_bundle(inst, M), tangent_bundle(inst, E)
    nodes = (("M1", cM), ("TE", TE), ("M2", cM), ("TM", TM), ("E", cE))
    edges = (
        ("M1", "TM", LinearBundleMap(inst.zero(M), inst.identity(M), cM, TM)),
        ("TE", "TM", LinearBundleMap(inst.Tmor(q), q, TE, TM)),
        ("TE", "E", LinearBundleMap(inst.p(E), inst.identity(E), TE, cE)),
        ("M2", "E", LinearBundleMap(z, z, cM, cE)),
    )
    return BundleDiagram(nodes, edges, shape=("M1", "TM", "TE", "E", "M2"))


def _level_diagram(inst, bd: BundleDiagram, k: int) -> Diagram:
    """The diagram E_k^. of k-fold wide pullbacks, with the induced maps."""
    nodes = tuple((n, b.wide(k).apex) for n, b in bd.nodes)
    edges = []
    for s, t, m in bd.edges:
        edges.append((s, t, _wide_map(inst, m, k)))
    return Diagram(nodes, tuple(edges))


def _wide_map(inst, m: LinearBundleMap, k):
    if k == 0:
        return m.f
    if k == 1:
        return m.g
    src, tgt = m.source.wide(k), m.target.wide(k)
    return pair(inst, tgt, {str(i): inst.compose(src.legs[str(i)], m.g) for i in range(k)})


def check_levelwise_limits(inst, bd: BundleDiagram, K, N) -> list:
    """Levelwise limits at bounds: lim E_k^. exists and is T^n-preserved, k <= K, n <= N."""
    out = []
    for k in range(0, K + 1):
        d = _level_diagram(inst, bd, k)
        lim = compute_limit(inst, d)
        for n in range(1, N + 1):
            v = limit_preserved(inst, d, lim.legs, n)
            out.append((k, n, v))
            if v.ok is False:
                raise HypothesisViolation(f"levelwise limit not preserved at k={k}, n={n}", k, n, v.detail)
    return out


def limit_of_bundle_diagram(inst, bd: BundleDiagram, K=2, N=2) -> DifferentialBundle:
    """Limit of a diagram of bundles, computed levelwise."""
    if len(bd.nodes) == 1 and not bd.edges:
        return bd.nodes[0][1]
    check_levelwise_limits(inst, bd, K, N)
    c = inst.compose
    L1 = compute_limit(inst, _level_diagram(inst, bd, 1))
    L0 = compute_limit(inst, _level_diagram(inst, bd, 0))
    bundles = dict(bd.nodes)
    q = pair(inst, L0, {n: c(L1.legs[n], b.q) for n, b in bundles.items()})
    z = pair(inst, L1, {n: c(L0.legs[n], b.z) for n, b in bundles.items()})
    lam = factor_through_T(inst, L1, {n: c(L1.legs[n], b.lam) for n, b in bundles.items()})
    E2 = wide_pullback(inst, q, 2)
    legs2 = {}
    for n, b in bundles.items():
        into = pair(inst, b.wide(2), {"0": c(E2.legs["0"], L1.legs[n]), "1": c(E2.legs["1"], L1.legs[n])})
        legs2[n] = c(into, b.sigma)
    sigma = pair(inst, L1, legs2)
    return DifferentialBundle(inst, q, z, sigma, lam, name="lim", limit=L1)


# ---------------------------------------------------------------- construction


def double_pullback_diagram(inst, q, z, k=1) -> Diagram:
    """M x_{T_k M} T_k E x_E M along 0_k, T_k(q), p_k and z."""
    E, M = q.dom, q.cod
    fE, fM = fibre_power(inst, E, k), fibre_power(inst, M, k)
    return Diagram(
        (("M1", M), ("TE", fE.obj), ("M2", M), ("TM", fM.obj), ("E", E)),
        (("M1", "TM", fM.zero), ("TE", "TM", Tk_mor(inst, q, k)), ("TE", "E", fE.proj), ("M2", "E", z)),
    )


def check_hypotheses(inst, q, z, K=2, N=2) -> list:
    """Existence and T^n-preservation of the double pullbacks over T_k, 1 <= k <= K."""
    out = []
    for k in range(1, max(K, 1) + 1):
        d = double_pullback_diagram(inst, q, z, k)
        lim = compute_limit(inst, d)
        for n in range(1, N + 1):
            v = limit_preserved(inst, d, lim.legs, n)
            out.append({"k": k, "n": n, "status": v.status, "method": v.method})
            if v.ok is False:
                raise HypothesisViolation(f"double pullback over T_{k} not preserved by T^{n}", k, n, v.detail)
    return out


def construct_bundle(inst, q, z, K=2, N=2, name=None) -> DifferentialBundle:
    """The bundle on M x_TM TE x_E M built from a map and a section."""
    E, M = q.dom, q.cod
    c = inst.compose
    if z.dom != M or z.cod != E:
        raise InputError("z must map the codomain of q to its domain")
    if not inst.equal(c(z, q), inst.identity(M)):
        raise SectionError("z is not a section of q")
    hyp = check_hypotheses(inst, q, z, K, N)
    V = compute_limit(inst, double_pullback_diagram(inst, q, z, 1))
    legs = V.legs
    q1 = legs["M1"]
    if not inst.equal(q1, legs["M2"]):
        raise ConstructionError("the two projections to M differ", "construct-q")
    z1 = pair(inst, V, {"M1": inst.identity(M), "TE": c(z, inst.zero(E)), "M2": inst.identity(M)})
    V2 = wide_pullback(inst, q1, 2)
    W2 = compute_limit(inst, double_pullback_diagram(inst, q, z, 2))
    T2E = fibre_power(inst, E, 2).limit
    to_T2E = pair(inst, T2E, {"0": c(V2.legs["0"], legs["TE"]), "1": c(V2.legs["1"], legs["TE"])})
    iso = pair(inst, W2, {"M1": V2.legs["base"], "TE": to_T2E, "M2": V2.legs["base"]})
    plus = pair(inst, V, {"M1": W2.legs["M1"], "TE": c(W2.legs["TE"], inst.add(E)), "M2": W2.legs["M2"]})
    sigma1 = c(iso, plus)
    lam1 = factor_through_T(inst, V, {
        "M1": c(legs["M1"], inst.zero(M)),
        "TE": c(legs["TE"], inst.lift(E)),
        "M2": c(legs["M2"], inst.zero(M)),
    })
    b = DifferentialBundle(inst, q1, z1, sigma1, lam1, name or f"V({_name(E)})", limit=V)
    b.hypotheses = hyp
    return b


def v0_iso(inst, q, z):
    """<1_M, z, 1_M> : M -> V_0, checked to be an isomorphism."""
    E, M = q.dom, q.cod
    one = inst.identity(M)
    d = Diagram((("M1", M), ("E", E), ("M2", M), ("M", M), ("E2", E)),
                (("M1", "M", one), ("E", "M", q), ("E", "E2", inst.identity(E)), ("M2", "E2", z)))
    legs = {"M1": one, "E": z, "M2": one}
    return d, legs


# ---------------------------------------------------------------- lifts


def universality_cone(inst, q, z, sigma, lam):
    """The square E_2 -mu-> TE over M -0_M-> TM as (diagram, cone legs)."""
    E, M = q.dom, q.cod
    e2 = wide_pullback(inst, q, 2)
    mu = _mu(inst, e2, q, sigma, lam)
    d = Diagram((("TE", inst.T(E)), ("M", M), ("TM", inst.T(M))),
                (("TE", "TM", inst.Tmor(q)), ("M", "TM", inst.zero(M))))
    return d, {"TE": mu, "M": e2.legs["base"]}


def _mu(inst, e2, q, sigma, lam):
    c = inst.compose
    E = q.dom
    into = factor_through_T(inst, e2, {"0": c(e2.legs["0"], lam), "1": c(e2.legs["1"], inst.zero(E))})
    return c(into, inst.Tmor(sigma))


def mu_map(inst, b: DifferentialBundle):
    """mu = <pi_1 lambda, pi_2 0_E> T(sigma), checked against mu p_E = pi_2."""
    mu = _mu(inst, b.wide(2), b.q, b.sigma, b.lam)
    if not inst.equal(inst.compose(mu, inst.p(b.total)), b.wide(2).legs["1"]):
        raise ConstructionError("mu p_E differs from the second projection", "mu-proj")
    return mu


def lambda_k(inst, b: DifferentialBundle, k: int):
    """The map E_k -> T_k E induced by lambda and z."""
    if k < 0:
        raise InputError("k must be non-negative")
    if k == 0:
        return b.z
    if k == 1:
        return b.lam
    src = b.wide(k)
    tgt = fibre_power(inst, b.total, k).limit
    return pair(inst, tgt, {str(i): inst.compose(src.legs[str(i)], b.lam) for i in range(k)})


def _lambda_k_data(inst, q, z, lam, k):
    if k == 1:
        return lam
    src = wide_pullback(inst, q, k)
    tgt = fibre_power(inst, q.dom, k).limit
    return pair(inst, tgt, {str(i): inst.compose(src.legs[str(i)], lam) for i in range(k)})


# ---------------------------------------------------------------- checks


def check_bundle(inst, b: DifferentialBundle, K=2, N=2) -> CheckReport:
    """All bundle axioms at bounds (K, N); failures are verdicts."""
    c, T = inst.compose, inst.Tmor
    q, z, sigma, lam = b.q, b.z, b.sigma, b.lam
    E, M = b.total, b.base
    S = b.name
    cited = "cited-definition"
    rep = CheckReport(f"check_bundle({b.name})", bounds={"K": K, "N": N, "max_carrier": inst.max_carrier})
    v = rep.verdicts
    v.append(equation(inst, "section", S, lambda: c(z, q), lambda: inst.identity(M)))
    v.extend(additive_equations(inst, S, q, z, sigma, b.wide(2), lambda: b.wide(3), "sigma", cited))
    v.append(equation(inst, "lambda-Tq", S, lambda: c(lam, T(q)), lambda: c(q, inst.zero(M))))
    v.append(equation(inst, "lambda-pE", S, lambda: c(lam, inst.p(E)), lambda: c(q, z)))
    v.append(equation(inst, "lambda-coherence", S, lambda: c(lam, inst.lift(E)), lambda: c(lam, T(lam))))
    v.append(equation(inst, "lambda-zero", S, lambda: c(z, lam), lambda: c(inst.zero(M), T(z)), cited))

    def additive_T():
        e2 = b.wide(2)
        into = factor_through_T(inst, e2, {"0": c(e2.legs["0"], lam), "1": c(e2.legs["1"], lam)})
        return c(into, T(sigma))

    def additive_E():
        e2 = b.wide(2)
        T2E = fibre_power(inst, E, 2).limit
        into = pair(inst, T2E, {"0": c(e2.legs["0"], lam), "1": c(e2.legs["1"], lam)})
        return c(into, inst.add(E))

    v.append(equation(inst, "lambda-additive-T", S, lambda: c(sigma, lam), additive_T, cited))
    v.append(equation(inst, "lambda-additive-E", S, lambda: c(sigma, lam), additive_E, cited))
    v.append(equation(inst, "mu-proj", S, lambda: c(_mu(inst, b.wide(2), q, sigma, lam), inst.p(E)),
                      lambda: b.wide(2).legs["1"]))
    for n in range(0, N + 1):
        v.append(limit_check(inst, "universality", S,
                             lambda: universality_cone(inst, q, z, sigma, lam), n))
    for k in range(2, K + 1):
        for n in range(0, N + 1):
            def cone(k=k):
                w = b.wide(k)
                return w.diagram, w.legs
            v.append(limit_check(inst, "wide-pullback", f"{S} k={k}", cone, n))
    return rep


def verify_linear(inst, m: LinearBundleMap, b=None, b2=None) -> CheckReport:
    """Linear-map laws for (g, f): b -> b2, plus the derived addition law."""
    b = b or m.source
    b2 = b2 or m.target
    c, T = inst.compose, inst.Tmor
    g, f = m.g, m.f
    if g.dom != b.total or g.cod != b2.total or f.dom != b.base or f.cod != b2.base:
        raise InputError("linear map endpoints do not match the bundles")
    S = f"{b.name} -> {b2.name}"
    rep = CheckReport(f"linear({S})")
    rep.verdicts = [
        equation(inst, "linear-q", S, lambda: c(g, b2.q), lambda: c(b.q, f)),
        equation(inst, "linear-z", S, lambda: c(b.z, g), lambda: c(f, b2.z)),
        equation(inst, "linear-lambda", S, lambda: c(g, b2.lam), lambda: c(b.lam, T(g))),
    ]

    def gg():
        e2 = b.wide(2)
        return c(pair(inst, b2.wide(2), {"0": c(e2.legs["0"], g), "1": c(e2.legs["1"], g)}), b2.sigma)

    if all(x.status == "pass" for x in rep.verdicts[:1]):
        rep.verdicts.append(equation(inst, "linear-sigma", S, lambda: c(b.sigma, g), gg, "derived"))
    else:
        rep.verdicts.append(Verdict("linear-sigma", "skip", anchor("linear-sigma"), S, "derived", "exact",
                                    {}, "projection law fails"))
    m.verified = rep
    return rep


def theorem_iso(inst, b: DifferentialBundle, K=2, N=2) -> LinearBundleMap:
    """<q, lambda, q> from b onto the bundle constructed from (q, z)."""
    V = construct_bundle(inst, b.q, b.z, K, N)
    try:
        i = pair(inst, V.limit, {"M1": b.q, "TE": b.lam, "M2": b.q})
    except PreconditionError as exc:
        raise TheoremViolation(f"<q, lambda, q> is not a cone: {exc}") from exc
    if not inst.is_iso(i):
        raise TheoremViolation("<q, lambda, q> is not an isomorphism")
    m = LinearBundleMap(i, inst.identity(b.base), b, V)
    rep = verify_linear(inst, m, b, V)
    if not rep.passed:
        raise TheoremViolation("<q, lambda, q> is not linear: "
                               + ", ".join(v.name for v in rep.failures))
    m.hypotheses = V.hypotheses
    return m


def reconstruct_sigma(inst, q, z, lam, K=2, N=2):
    """sigma = <q_2, lambda_2 (+_E), q_2> followed by the inverse of <q, lambda, q>."""
    c = inst.compose
    E = q.dom
    verdict = corollary_check(inst, q, z, lam, K, N)
    if not verdict.passed:
        raise CorollaryViolation("(q, z, lambda) is rejected: "
                                 + ", ".join(f"{v.name} {v.subject}" for v in verdict.failures))
    V = compute_limit(inst, double_pullback_diagram(inst, q, z, 1))
    i1 = pair(inst, V, {"M1": q, "TE": lam, "M2": q})
    if not inst.is_iso(i1):
        raise CorollaryViolation("<q, lambda, q> is not invertible")
    i1_inv = inst.inverse(i1)
    e2 = wide_pullback(inst, q, 2)
    lam2 = _lambda_k_data(inst, q, z, lam, 2)
    q2 = e2.legs["base"]
    into = pair(inst, V, {"M1": q2, "TE": c(lam2, inst.add(E)), "M2": q2})
    return c(into, i1_inv)


def corollary_check(inst, q, z, lam, K=2, N=2, shortcut=None) -> CheckReport:
    """Decide whether (q, z, lambda) underlies a bundle: z is a section of q,
    the wide pullbacks of q are T^n-preserved, and the lift cone is a limit.

    With ``shortcut`` (default: when T preserves every limit of the instance)
    the lift cone is tested only for k = 1, n = 0.
    """
    c = inst.compose
    E, M = q.dom, q.cod
    if shortcut is None:
        shortcut = inst.all_limits_preserved
    rep = CheckReport("corollary", bounds={"K": K, "N": N, "shortcut": bool(shortcut)})
    v = rep.verdicts
    v.append(equation(inst, "corollary-section", "z q = 1", lambda: c(z, q), lambda: inst.identity(M)))
    if rep.verdicts[0].status == "fail":
        return rep
    if lam.dom != E or lam.cod != inst.T(E):
        v.append(Verdict("corollary-lift", "fail", anchor("corollary-lift"), "lambda", detail={"message": "bad type"}))
        return rep
    ks = [1] if shortcut else list(range(1, K + 1))
    ns = [0] if shortcut else list(range(0, N + 1))
    if not shortcut:
        for k in range(2, K + 1):
            for n in range(1, N + 1):
                def cone(k=k):
                    w = wide_pullback(inst, q, k)
                    return w.diagram, w.legs
                v.append(limit_check(inst, "corollary-wide", f"k={k}", cone, n))
    for k in ks:
        for n in ns:
            def cone3(k=k):
                d = double_pullback_diagram(inst, q, z, k)
                w = wide_pullback(inst, q, k)
                base = w.legs["base"]
                return d, {"M1": base, "TE": _lambda_k_data(inst, q, z, lam, k), "M2": base}
            v.append(limit_check(inst, "corollary-lift", f"k={k}", cone3, n))
    return rep


def induced_linear(inst, g, f, q, z, q2, z2, K=2, N=2) -> LinearBundleMap:
    """f x_T(f) T(g) x_g f between the bundles constructed from (q, z) and (q2, z2)."""
    c = inst.compose
    if not inst.equal(c(g, q2), c(q, f)):
        raise PreconditionError("g q' differs from q f")
    if not inst.equal(c(z, g), c(f, z2)):
        raise PreconditionError("z g differs from f z'")
    V, V2 = construct_bundle(inst, q, z, K, N), construct_bundle(inst, q2, z2, K, N)
    legs = V.limit.legs
    h = pair(inst, V2.limit, {"M1": c(legs["M1"], f), "TE": c(legs["TE"], inst.Tmor(g)),
                              "M2": c(legs["M2"], f)})
    m = LinearBundleMap(h, f, V, V2)
    verify_linear(inst, m, V, V2)
    return m


def tangent_space(inst, E, z, K=2, N=2) -> DifferentialBundle:
    """The bundle constructed from E -> 1 and a point z: 1 -> E."""
    one = inst.terminal()
    if z.dom != one or z.cod != E:
        raise InputError("z must be a point 1 -> E")
    return construct_bundle(inst, inst.to_terminal(E), z, K, N, name=f"T_z({_name(E)})")


def theorem_report(inst, b, K=2, N=2) -> CheckReport:
    """theorem_iso as a report (errors become fail verdicts)."""
    rep = CheckReport(f"theorem_iso({b.name})", bounds={"K": K, "N": N})

    def go():
        try:
            m = theorem_iso(inst, b, K, N)
        except (TheoremViolation, HypothesisViolation, SectionError) as exc:
            return Verdict("theorem-iso", "fail", anchor("theorem-iso"), b.name, detail={"message": str(exc)})
        return Verdict("theorem-iso", "pass", anchor("theorem-iso"), b.name,
                       detail={"iso": True, "linear": m.ok, "hypotheses": m.hypotheses})

    rep.verdicts.append(run_check("theorem-iso", b.name, go))
    return rep


__all__ = [
    "BundleCheckReport",
    "BundleDiagram",
    "DifferentialBundle",
    "LinearBundleMap",
    "ResourceError",
    "build_key_diagram",
    "check_bundle",
    "check_levelwise_limits",
    "construct_bundle",
    "corollary_check",
    "double_pullback_diagram",
    "induced_linear",
    "lambda_k",
    "limit_of_bundle_diagram",
    "mu_map",
    "reconstruct_sigma",
    "tangent_bundle",
    "tangent_space",
    "theorem_iso",
    "theorem_report",
    "trivial_bundle",
    "universality_cone",
    "verify_linear",
]
