"""Acceptance criteria.  Every test prints exactly one ACCEPTANCE line."""
import json
import os
import random
import subprocess
import sys
import time

import numpy as np
import pytest

from conftest import brute_module_homs, bundle_suite, mutated_instance, random_polymor
from twb.bundles import check_bundle, construct_bundle, corollary_check, reconstruct_sigma, theorem_iso
from twb.cli import bundled_scenarios
from twb.core import check_tangent_axioms
from twb.finring import (
    FinRingInstance,
    RingMor,
    classify_bundle_maps,
    counterexample_ex_fail,
    find_linear_isos,
    kernel_module,
    small_modules,
    square_zero_bundle,
    trunc_poly,
    zmod,
)
from twb.polycdc import PolyCDC, Space, chain_rule_check, projection_bundle, tangent_space_at


@pytest.fixture
def verdict(capsys):
    def emit(n, ok, text):
        with capsys.disabled():
            print(f"\nACCEPTANCE {n} {'PASS' if ok else 'FAIL'}: {text}")
        assert ok, text
    return emit


def test_1_tangent_axiom_suite(verdict):
    t0 = time.perf_counter()
    inst = FinRingInstance()
    objs = [zmod(2), zmod(3), zmod(4), zmod(6), trunc_poly(zmod(2), 3)]
    rep = check_tangent_axioms(inst, objs, N=2)
    R = zmod(4)
    base = FinRingInstance()
    cases = missed = 0
    for family in ("p", "zero", "add", "lift"):
        size = getattr(base, family)(R).dom.size
        for pos in range(size):
            cases += 1
            if check_tangent_axioms(mutated_instance(R, family, pos), [R], N=1).passed:
                missed += 1
    dt = time.perf_counter() - t0
    ok = rep.passed and cases >= 12 and missed == 0 and dt <= 10
    verdict(1, ok, f"{sum(v.status == 'pass' for v in rep.verdicts)} equations pass, "
                   f"{len(rep.skipped)} budget skips; {cases - missed}/{cases} mutations of p/0/+/l on Z/4 "
                   f"detected; {dt:.2f}s (limit 10s)")


def test_2_construction(verdict):
    t0 = time.perf_counter()
    inst = FinRingInstance()
    E = trunc_poly(zmod(2), 3)
    q, z = E.augmentation(), E.inclusion()
    V = construct_bundle(inst, q, z, K=2, N=2)
    rep = check_bundle(inst, V, 2, 2)
    S = square_zero_bundle(inst, zmod(2), kernel_module(q, z))
    isos = find_linear_isos(inst, V, S)
    iso_ok = bool(isos) and all(m.ok and inst.is_iso(m.g) for m in isos)
    dt = time.perf_counter() - t0
    ok = V.total.size == 8 and rep.passed and iso_ok and dt <= 30
    verdict(2, ok, f"|V| = {V.total.size}, check_bundle(K=2,N=2) {'passes' if rep.passed else 'fails'}, "
                   f"{len(isos)} linear isomorphisms to sqz(Z/2, ker q) by exhaustive search; "
                   f"{dt:.2f}s (limit 30s)")


def test_3_classification_theorem(verdict):
    t0 = time.perf_counter()
    inst = FinRingInstance()
    suite = bundle_suite(inst)
    bad = []
    for b in suite:
        m = theorem_iso(inst, b, 2, 2)
        if not (m.ok and inst.is_iso(m.g)):
            bad.append(b.name)
    dt = time.perf_counter() - t0
    ok = not bad and dt <= 60
    verdict(3, ok, f"theorem_iso bijective and linear on {len(suite) - len(bad)}/{len(suite)} bundles; "
                   f"{dt:.2f}s (limit 60s)")


def lambda_variants(inst, b, count=5):
    """Deterministic wrong vertical lifts: zero lift, fibre collisions, then cone-breaking edits."""
    lam = np.array(b.lam.table)
    TE = b.lam.cod
    q = np.array(b.q.table)
    zero_lift = np.array(inst.compose(inst.compose(b.q, b.z), inst.zero(b.total)).table)
    cands = [zero_lift]
    for x in range(len(lam)):
        for y in range(len(lam)):
            if x != y and q[x] == q[y] and lam[x] != lam[y]:
                t = lam.copy()
                t[x] = lam[y]
                cands.append(t)
    for shift in range(1, TE.size):
        for x in range(len(lam)):
            t = lam.copy()
            t[x] = (t[x] + shift) % TE.size
            cands.append(t)
    out, seen = [], {lam.tobytes()}
    for t in cands:
        if t.tobytes() not in seen:
            seen.add(t.tobytes())
            out.append(RingMor(b.total, TE, table=t))
        if len(out) == count:
            break
    return out


def test_4_sigma_determined(verdict):
    inst = FinRingInstance()
    suite = bundle_suite(inst)
    sigma_ok = rejected = total = 0
    for b in suite:
        if inst.equal(reconstruct_sigma(inst, b.q, b.z, b.lam, 2, 2), b.sigma):
            sigma_ok += 1
        variants = lambda_variants(inst, b)
        for lam in variants:
            total += 1
            if not corollary_check(inst, b.q, b.z, lam, 2, 2).passed:
                rejected += 1
    ok = sigma_ok == len(suite) and total == 5 * len(suite) and rejected == total
    verdict(4, ok, f"reconstructed sigma equals stored sigma on {sigma_ok}/{len(suite)} bundles; "
                   f"{rejected}/{total} mutated lambdas rejected")


def test_5_counterexample(verdict):
    rep3 = counterexample_ex_fail(None, zmod(2), 3)
    rep2 = counterexample_ex_fail(None, zmod(2), 2)
    ok = (rep3["linear_maps"] == 4 and rep3["phi_found"] and rep3["inducing_bundle_maps"] == 0
          and rep3["not_induced"] >= 1 and rep3["counterexample"]
          and not rep2["counterexample"] and rep2.get("note") == "no counterexample at k=2")
    verdict(5, ok, f"k=3: {rep3['linear_maps']} linear maps, {rep3['not_induced']} not induced, "
                   f"eps->X induced by {rep3['inducing_bundle_maps']} of {rep3['bundle_maps']} bundle maps; "
                   f"k=2: {rep2.get('note')}")


def test_6_square_zero_classification(verdict):
    inst = FinRingInstance()
    pairs = good = 0
    for R in (zmod(2), zmod(4)):
        mods = small_modules(R, 4)
        for M in mods:
            for N in mods:
                pairs += 1
                res = classify_bundle_maps(inst, R, M, N)
                oracle = len(brute_module_homs(M, N))
                if res["bijection"] and res["linear_maps"] == res["module_homs"] == oracle:
                    good += 1
    verdict(6, good == pairs, f"linear maps <-> module maps bijective with brute-force counts on "
                              f"{good}/{pairs} module pairs over Z/2 and Z/4")


def test_7_cdc_instance(verdict):
    rng = random.Random(2024)
    chain = 0
    for _ in range(100):
        a, b, c = (rng.randint(1, 3) for _ in range(3))
        f, g = random_polymor(rng, a, b), random_polymor(rng, b, c)
        chain += chain_rule_check(f, g, samples=2, seed=rng.randint(0, 10**6)).status == "pass"
    cdc = PolyCDC()
    proj_ok = 0
    for m in range(3):
        for fd in range(3):
            rep = check_bundle(cdc, projection_bundle(cdc, m, fd), 2, 2)
            uni = [v.method.split("@")[0] for v in rep.verdicts if v.name == "universality"]
            if rep.passed and all(v.status == "pass" for v in rep.verdicts) and set(uni) == {"registered-shape"}:
                proj_ok += 1
    dims = [tangent_space_at(cdc, n).total == Space(n) for n in range(4)]
    ok = chain == 100 and proj_ok == 9 and all(dims)
    verdict(7, ok, f"chain rule exact on {chain}/100 random pairs; {proj_ok}/9 projection bundles pass "
                   f"with registered-shape universality; tangent spaces of R^0..R^3 have dims "
                   f"{[tangent_space_at(cdc, n).total.dim for n in range(4)]}")


def test_8_determinism(verdict, tmp_path):
    same = 0
    names = [n for n, _, _ in bundled_scenarios()]
    for name in names:
        blobs = []
        for i, hashseed in enumerate(("1", "2")):
            out = tmp_path / f"{name}.{i}.json"
            env = dict(os.environ, PYTHONHASHSEED=hashseed)
            subprocess.run([sys.executable, "-m", "twb.cli", "run", name, "--seed", "5", "--json", str(out)],
                           check=True, capture_output=True, env=env)
            data = json.loads(out.read_text())
            data.pop("timing")
            blobs.append(json.dumps(data, indent=2, sort_keys=True).encode())
        same += blobs[0] == blobs[1]
    verdict(8, same == len(names), f"{same}/{len(names)} bundled scenarios give byte-identical reports "
                                   f"across two processes (timing excluded)")
