import numpy as np
import pytest

from conftest import brute_module_homs, brute_ring_homs
from twb.bundles import check_bundle
from twb.finring import (
    DualRing,
    classify_bundle_maps,
    counterexample_ex_fail,
    free_module,
    kernel_module,
    small_modules,
    square_zero_bundle,
    square_zero_carrier,
    trunc_poly,
    zmod,
)
from twb.finring.rings import validate_ring


def test_square_zero_carrier_is_a_ring_with_square_zero_fibre():
    R = zmod(4)
    for M in small_modules(R, 4):
        E = square_zero_carrier(R, M)
        validate_ring(E)
        m = M.size
        fibre = [R.zero * m + v for v in range(m)]
        for x in fibre:
            for y in fibre:
                assert E.mul(x, y) == E.zero


def test_square_zero_bundles_pass(inst):
    for R in (zmod(2), zmod(4)):
        for M in small_modules(R, 4):
            assert check_bundle(inst, square_zero_bundle(inst, R, M), 2, 1).passed


def _bundle_map_oracle(R, k):
    """Ring maps T(R) -> R[X]/(X^k) over q and z, by brute force over all tables."""
    TR, E = DualRing(R), trunc_poly(R, k)
    q, z = E.augmentation().table, E.inclusion().table
    maps = []
    for t in brute_ring_homs(TR, E):
        t = np.array(t)
        if np.array_equal(q[t], np.arange(TR.size) // R.size) and np.array_equal(t[np.arange(R.size) * R.size], z):
            maps.append(t)
    return maps


def test_counterexample_at_k3():
    R = zmod(2)
    rep = counterexample_ex_fail(None, R, 3)
    E = trunc_poly(R, 3)
    # oracle: linear maps over 1_R correspond to module maps R -> ker q
    K = kernel_module(E.augmentation(), E.inclusion())
    assert rep["linear_maps"] == len(brute_module_homs(free_module(R), K)) == 4
    oracle = _bundle_map_oracle(R, 3)
    assert rep["bundle_maps"] == len(oracle) == 2
    # no ring map sends eps to X, since X^2 != 0
    assert all(t[DualRing(R).eps] != E.X for t in oracle)
    assert rep["inducing_bundle_maps"] == 0
    assert rep["phi_found"] and rep["phi_verified"] and rep["counterexample"]


def test_counterexample_degenerates_at_k2():
    rep = counterexample_ex_fail(None, zmod(2), 2)
    assert rep["counterexample"] is False
    assert rep["note"] == "no counterexample at k=2"
    assert rep["linear_maps"] == rep["bundle_maps"] == len(_bundle_map_oracle(zmod(2), 2)) == 2


def test_counterexample_over_z4():
    rep = counterexample_ex_fail(None, zmod(4), 3)
    E = trunc_poly(zmod(4), 3)
    K = kernel_module(E.augmentation(), E.inclusion())
    assert rep["linear_maps"] == len(brute_module_homs(free_module(zmod(4)), K)) == 16
    assert rep["counterexample"]


@pytest.mark.parametrize("R", [zmod(2), zmod(4)])
def test_classification_matches_module_hom_oracle(inst, R):
    mods = small_modules(R, 4)
    for M in mods:
        for N in mods:
            res = classify_bundle_maps(inst, R, M, N)
            assert res["bijection"], (M.name, N.name)
            assert res["linear_maps"] == res["module_homs"] == len(brute_module_homs(M, N))
