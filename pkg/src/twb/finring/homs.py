"""Backtracking enumeration of ring and module homomorphisms."""
from __future__ import annotations

import itertools

import numpy as np

from ..errors import ResourceError
from .modules import FiniteModule
from .rings import FiniteRing, RingMor


def generating_set(R: FiniteRing) -> list:
    """Greedy list of elements generating R as a ring (1 is always available)."""
    gens = []
    reached = _ring_closure(R, {R.zero: None, R.one: None})
    for x in range(R.size):
        if x not in reached:
            gens.append(x)
            reached = _ring_closure(R, dict.fromkeys(list(reached) + [x]))
    return gens


def _ring_closure(R, start):
    seen = set()
    frontier = list(start)
    while frontier:
        x = frontier.pop()
        if x in seen:
            continue
        seen.add(x)
        for y in list(seen):
            frontier.append(int(R.add(x, y)))
            frontier.append(int(R.mul(x, y)))
        frontier.append(int(R.neg(x)))
    return seen


def _extend(A, B, assignment):
    """Propagate ``assignment`` (A-index -> B-index) through + and *.

    Returns the full map as a list, or None on a conflict or if the
    generated subring is not all of A.
    """
    image = {A.zero: B.zero, A.one: B.one}
    for a, b in assignment.items():
        if image.get(a, b) != b:
            return None
        image[a] = b
    frontier = list(image)
    done = []
    while frontier:
        x = frontier.pop()
        fx = image[x]
        done.append(x)
        for y in done:
            fy = image[y]
            for s, fs in ((int(A.add(x, y)), int(B.add(fx, fy))), (int(A.mul(x, y)), int(B.mul(fx, fy)))):
                old = image.get(s)
                if old is None:
                    image[s] = fs
                    frontier.append(s)
                elif old != fs:
                    return None
    if len(image) != A.size:
        return None
    return [image[x] for x in range(A.size)]


def enumerate_ring_homs(A: FiniteRing, B: FiniteRing, fix=None, budget=10**6, where=None) -> list:
    """All ring homomorphisms A -> B extending the partial assignment ``fix``.

    ``where`` optionally filters candidates (a predicate on RingMor).
    The order is lexicographic in the images of the generators.
    """
    fix = {int(a): int(b) for a, b in (fix or {}).items()}
    gens = [g for g in generating_set(A) if g not in fix]
    if len(gens) and B.size ** len(gens) > budget:
        raise ResourceError(f"{B.size}^{len(gens)} candidate homomorphisms exceed budget", B.size ** len(gens),
                            budget)
    found = []
    for images in itertools.product(range(B.size), repeat=len(gens)):
        assignment = dict(fix)
        assignment.update(zip(gens, images))
        table = _extend(A, B, assignment)
        if table is None:
            continue
        f = RingMor(A, B, table=table)
        if _is_hom(f) and (where is None or where(f)):
            found.append(f)
    return found


def _is_hom(f):
    from .rings import hom_violation

    return hom_violation(f) is None


# ---------------------------------------------------------------- modules


def module_generators(M: FiniteModule) -> list:
    from .modules import submodule_closure

    gens, reached = [], {M.zero}
    for x in range(M.size):
        if x not in reached:
            gens.append(x)
            reached = set(submodule_closure(M, gens))
    return gens


def module_homs(M: FiniteModule, N: FiniteModule, budget=10**6) -> list:
    """All R-linear maps M -> N, as tuples of images, by generator images."""
    if M.ring != N.ring:
        raise ValueError("modules over different rings")
    R = M.ring
    gens = module_generators(M)
    if N.size ** len(gens) > budget:
        raise ResourceError("module hom candidates exceed budget", N.size ** len(gens), budget)
    out = []
    for images in itertools.product(range(N.size), repeat=len(gens)):
        image = {M.zero: N.zero}
        ok = True
        frontier = []
        for g, v in zip(gens, images):
            if image.get(g, v) != v:
                ok = False
                break
            image[g] = v
            frontier.append(g)
        while ok and frontier:
            x = frontier.pop()
            fx = image[x]
            new = [(int(M.act_table[r, x]), int(N.act_table[r, fx])) for r in range(R.size)]
            new += [(int(M.add_table[x, y]), int(N.add_table[fx, image[y]])) for y in list(image)]
            for s, fs in new:
                old = image.get(s)
                if old is None:
                    image[s] = fs
                    frontier.append(s)
                elif old != fs:
                    ok = False
                    break
        if ok and len(image) == M.size:
            t = np.array([image[x] for x in range(M.size)])
            if is_module_hom(M, N, t):
                out.append(tuple(int(v) for v in t))
    return out


def is_module_hom(M, N, t) -> bool:
    t = np.asarray(t)
    if not np.array_equal(t[M.add_table], N.add_table[t[:, None], t[None, :]]):
        return False
    return np.array_equal(t[M.act_table], N.act_table[:, t])


def module_isomorphic(M: FiniteModule, N: FiniteModule) -> bool:
    if M.size != N.size or M.ring != N.ring:
        return False
    return any(len(set(h)) == M.size for h in module_homs(M, N))
