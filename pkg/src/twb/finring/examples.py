"""Square-zero bundles, the classification of their linear maps, and the
truncated polynomial counterexample."""
from __future__ import annotations

import numpy as np

from .._keys import digest
from ..bundles import (
    DifferentialBundle,
    LinearBundleMap,
    construct_bundle,
    induced_linear,
    verify_linear,
    wide_pullback,
)
from ..errors import ResourceError
from .homs import enumerate_ring_homs, module_homs
from .instance import FinRingInstance
from .modules import FiniteModule, kernel_module
from .rings import FiniteRing, RingMor, TableRing, trunc_poly


def square_zero_carrier(R: FiniteRing, M: FiniteModule) -> TableRing:
    """R + M eps with (r, m)(s, n) = (rs, rn + sm); (r, m) has index r * |M| + m."""
    if M.ring != R:
        raise ValueError("module over a different ring")
    n, m = R.size, M.size
    idx = np.arange(n * m)
    r, v = np.divmod(idx, m)
    xs, ys = np.repeat(idx, n * m), np.tile(idx, n * m)
    r1, v1, r2, v2 = r[xs], v[xs], r[ys], v[ys]
    add = R.add(r1, r2) * m + M.add_table[v1, v2]
    mul = R.mul(r1, r2) * m + M.add_table[M.act_table[r1, v2], M.act_table[r2, v1]]
    labels = [f"{R.label(a)}+{M.label(b)}e" for a, b in zip(r, v)]
    return TableRing(add.reshape(n * m, n * m), mul.reshape(n * m, n * m), name=f"{R.name}+{M.name}e",
                     key=digest("square_zero", R.key, M.key), labels=labels, validate=False)


def square_zero_bundle(inst, R: FiniteRing, M: FiniteModule, name=None) -> DifferentialBundle:
    E = square_zero_carrier(R, M)
    m = M.size
    mzero = M.zero
    q = RingMor(E, R, table=np.arange(E.size) // m, key=digest("sz-q", E.key), name="q")
    z = RingMor(R, E, table=np.arange(R.size) * m + mzero, key=digest("sz-z", E.key), name="z")
    e2 = wide_pullback(inst, q, 2)
    rows = e2.apex.rows

    def add(xs):
        a, b = rows[xs, 0], rows[xs, 1]
        return (a // m) * m + M.add_table[a % m, b % m]

    sigma = RingMor(e2.apex, E, fn=add, key=digest("sz-sigma", E.key), name="sigma")
    xs = np.arange(E.size)
    # r + m eps  |->  (r + 0 eps) + (0 + m eps) eps'
    lam_t = (xs // m * m + mzero) * E.size + (R.zero * m + xs % m)
    lam = RingMor(E, inst.T(E), table=lam_t, key=digest("sz-lambda", E.key), name="lambda")
    return DifferentialBundle(inst, q, z, sigma, lam, name or f"sqz({R.name},{M.name})")


def over_identity_homs(b1, b2, budget=10**6):
    """Ring maps g: E1 -> E2 with g q2 = q1 and z1 g = z2 (both bases equal)."""
    fix = {int(b1.z.table[r]): int(b2.z.table[r]) for r in range(b1.base.size)}
    q1, q2 = b1.q.table, b2.q.table
    return enumerate_ring_homs(b1.total, b2.total, fix=fix, budget=budget,
                               where=lambda g: np.array_equal(q2[g.table], q1))


def linear_maps_over_identity(inst, b1, b2):
    one = inst.identity(b1.base)
    out = []
    for g in over_identity_homs(b1, b2):
        m = LinearBundleMap(g, one, b1, b2)
        if verify_linear(inst, m, b1, b2).passed:
            out.append(m)
    return out


def find_linear_isos(inst, b1, b2, max_carrier=64):
    """Linear bijections over the identity, by exhaustive search."""
    if b1.total.size != b2.total.size:
        return []
    if b1.total.size > max_carrier:
        raise ResourceError("isomorphism search is limited to small carriers", b1.total.size, max_carrier)
    return [m for m in linear_maps_over_identity(inst, b1, b2) if inst.is_iso(m.g)]


def counterexample_ex_fail(inst, R: FiniteRing, k: int = 3) -> dict:
    """Linear maps over 1_R that no bundle map T(R) -> R[X]/(X^k) induces."""
    inst = inst or FinRingInstance()
    E = trunc_poly(R, k)
    q, z = E.augmentation(), E.inclusion()
    TR = inst.T(R)
    eps, X = TR.eps, E.X
    b1 = construct_bundle(inst, inst.p(R), inst.zero(R), name="V(p_R)")
    b2 = construct_bundle(inst, q, z, name="V(q)")
    linear = linear_maps_over_identity(inst, b1, b2)
    # e in V1 is the image of eps under <p, l, p>
    e_v1 = int(np.asarray(_pair_value(inst, b1, TR, eps)))
    rowsV2 = b2.limit.apex.rows
    te_col = b2.limit.diagram.names.index("TE")

    def eps_image(m):
        t = int(rowsV2[int(m.g.table[e_v1]), te_col])
        return int(t % E.size)

    target = [m for m in linear if eps_image(m) == X]
    bundle_maps = enumerate_ring_homs(TR, E, where=lambda g: np.array_equal(
        q.table[g.table], inst.p(R).table) and np.array_equal(g.table[inst.zero(R).table], z.table))
    induced = []
    for g in bundle_maps:
        h = induced_linear(inst, g, inst.identity(R), inst.p(R), inst.zero(R), q, z)
        induced.append(h)
    inducing = [g for g, h in zip(bundle_maps, induced)
                if any(inst.equal(h.g, m.g) for m in target)]
    homs_eps_X = enumerate_ring_homs(TR, E, fix={eps: X})
    not_induced = [m for m in linear if not any(inst.equal(h.g, m.g) for h in induced)]
    report = {
        "label": "truncated variant",
        "ring": R.name,
        "k": k,
        "kernel_size": int(kernel_module(q, z).size),
        "linear_maps": len(linear),
        "linear_maps_verified": all(m.ok for m in linear),
        "phi_found": len(target) == 1,
        "phi_verified": bool(target) and target[0].ok,
        "bundle_maps": len(bundle_maps),
        "inducing_bundle_maps": len(inducing),
        "homs_eps_to_X": len(homs_eps_X),
        "not_induced": len(not_induced),
        "counterexample": len(target) == 1 and not inducing and not homs_eps_X,
    }
    if not report["counterexample"]:
        report["note"] = f"no counterexample at k={k}"
    return report


def _pair_value(inst, b1, TR, x):
    from ..core import pair

    i1 = pair(inst, b1.limit, {"M1": inst.p(TR.base), "TE": inst.lift(TR.base), "M2": inst.p(TR.base)})
    return i1(x)


def classify_bundle_maps(inst, R: FiniteRing, M: FiniteModule, M2: FiniteModule) -> dict:
    """Linear maps sqz(R, M) -> sqz(R, M2) over 1_R against Hom_R(M, M2)."""
    b1, b2 = square_zero_bundle(inst, R, M), square_zero_bundle(inst, R, M2)
    linear = linear_maps_over_identity(inst, b1, b2)
    m1, m2 = M.size, M2.size
    zero1 = R.zero * m1
    restricted = []
    clean = True
    for m in linear:
        img = m.g.table[zero1 + np.arange(m1)]
        if (img // m2 != R.zero).any():
            clean = False
        restricted.append(tuple(int(v) for v in img % m2))
    homs = module_homs(M, M2)
    bijective = clean and len(set(restricted)) == len(restricted) and set(restricted) == set(homs)
    return {
        "ring": R.name,
        "modules": [M.name, M2.name],
        "linear_maps": len(linear),
        "module_homs": len(homs),
        "bijection": bijective,
    }
