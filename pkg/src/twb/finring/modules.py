"""Finite modules over finite commutative rings."""
from __future__ import annotations

import itertools

import numpy as np

from .._keys import digest
from ..errors import ConstructionError, SectionError
from .rings import FiniteRing, RingMor, _frozen


class FiniteModule:
    """An R-module on ``range(size)`` with addition and action tables.

    ``act[r, m]`` is ``r . m``.
    """

    def __init__(self, ring: FiniteRing, add_table, act_table, name, key=None, labels=None, validate=True):
        self.ring = ring
        self.add_table = _frozen(add_table)
        self.act_table = _frozen(act_table)
        self.size = self.add_table.shape[0]
        self.name = name
        self.key = key or digest("module", ring.key, self.add_table.tobytes(), self.act_table.tobytes())
        self._labels = labels
        ar = np.arange(self.size)
        zeros = [e for e in range(self.size) if np.array_equal(self.add_table[e], ar)]
        if not zeros:
            raise ConstructionError(f"{name}: no zero element", "additive identity")
        self.zero = zeros[0]
        neg = np.full(self.size, -1)
        rows, cols = np.nonzero(self.add_table == self.zero)
        neg[rows] = cols
        self.neg_table = _frozen(neg)
        if validate:
            validate_module(self)

    def add(self, x, y):
        return self.add_table[np.asarray(x), np.asarray(y)]

    def act(self, r, m):
        return self.act_table[np.asarray(r), np.asarray(m)]

    def elements(self):
        return np.arange(self.size)

    def label(self, m):
        return self._labels[int(m)] if self._labels else str(int(m))

    def __eq__(self, other):
        return isinstance(other, FiniteModule) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"<module {self.name} |{self.size}| over {self.ring.name}>"


def validate_module(M: FiniteModule):
    R, a, act = M.ring, M.add_table, M.act_table
    n = M.size
    if act.shape != (R.size, n):
        raise ConstructionError(f"{M.name}: action table has the wrong shape", "shape")
    if (M.neg_table < 0).any():
        raise ConstructionError(f"{M.name}: missing additive inverses", "additive inverses")
    checks = [
        ("commutativity", np.argwhere(a != a.T)),
        ("associativity", np.argwhere(a[a, :] != a[:, a])),
        ("unital action", np.argwhere(act[R.one] != np.arange(n))),
    ]
    for law, bad in checks:
        if len(bad):
            raise ConstructionError(f"{M.name}: {law} fails at {tuple(map(int, bad[0]))}", law,
                                    tuple(map(int, bad[0])))
    Rm, Ra = R.mul_table, R.add_table
    # (rs).m = r.(s.m)
    bad = np.argwhere(act[Rm, :] != act[:, act][:, :, :])
    if len(bad):
        raise ConstructionError(f"{M.name}: associative action fails at {tuple(map(int, bad[0]))}",
                                "associative action", tuple(map(int, bad[0])))
    # (r+s).m = r.m + s.m
    bad = np.argwhere(act[Ra, :] != a[act[:, None, :], act[None, :, :]])
    if len(bad):
        raise ConstructionError(f"{M.name}: distributivity over ring addition fails", "distributivity",
                                tuple(map(int, bad[0])))
    # r.(m+m') = r.m + r.m'
    bad = np.argwhere(act[:, a] != a[act[:, :, None], act[:, None, :]])
    if len(bad):
        raise ConstructionError(f"{M.name}: distributivity over module addition fails", "distributivity",
                                tuple(map(int, bad[0])))


def zero_module(R: FiniteRing) -> FiniteModule:
    return FiniteModule(R, [[0]], np.zeros((R.size, 1), dtype=int), name=f"0_{R.name}",
                        key=digest("zero_module", R.key))


def free_module(R: FiniteRing) -> FiniteModule:
    """R as a module over itself."""
    return FiniteModule(R, R.add_table, R.mul_table, name=f"free({R.name})",
                        key=digest("free_module", R.key), labels=[R.label(i) for i in range(R.size)])


def submodule_closure(M: FiniteModule, gens) -> list:
    seen = {M.zero}
    frontier = list(gens)
    while frontier:
        x = frontier.pop()
        if x in seen:
            continue
        seen.add(x)
        for r in range(M.ring.size):
            frontier.append(int(M.act_table[r, x]))
        for y in list(seen):
            frontier.append(int(M.add_table[x, y]))
    return sorted(seen)


def quotient_module(R: FiniteRing, ideal) -> FiniteModule:
    """R / I for an ideal given as a list of ring elements."""
    ideal = sorted(set(int(i) for i in ideal))
    cls = {}
    reps = []
    for x in range(R.size):
        if x in cls:
            continue
        idx = len(reps)
        reps.append(x)
        for i in ideal:
            cls[int(R.add(x, i))] = idx
    coset = np.array([cls[x] for x in range(R.size)])
    r = np.array(reps)
    add = coset[R.add_table[np.ix_(r, r)]]
    act = coset[R.mul_table[:, r]]
    return FiniteModule(R, add, act, name=f"{R.name}/({','.join(map(str, ideal))})",
                        key=digest("quotient_module", R.key, tuple(ideal)),
                        labels=[R.label(x) for x in reps])


def direct_sum(M: FiniteModule, N: FiniteModule) -> FiniteModule:
    if M.ring != N.ring:
        raise ConstructionError("direct sum of modules over different rings", "ring")
    m, n = M.size, N.size
    idx = np.arange(m * n)
    a, b = np.divmod(idx, n)
    add = M.add_table[a[:, None], a[None, :]] * n + N.add_table[b[:, None], b[None, :]]
    act = M.act_table[:, a] * n + N.act_table[:, b]
    return FiniteModule(M.ring, add, act, name=f"({M.name}+{N.name})",
                        key=digest("direct_sum", M.key, N.key),
                        labels=[f"({M.label(i)},{N.label(j)})" for i, j in zip(a, b)])


def kernel_module(q: RingMor, z: RingMor) -> FiniteModule:
    """ker(q) as a module over the base ring, acting through z."""
    E, R = q.dom, q.cod
    if z.dom != R or z.cod != E or not np.array_equal(q.table[z.table], np.arange(R.size)):
        raise SectionError("z is not a section of q")
    ker = np.nonzero(q.table == R.zero)[0]
    pos = {int(e): i for i, e in enumerate(ker)}
    add = np.array([[pos[int(E.add(x, y))] for y in ker] for x in ker])
    act = np.array([[pos[int(E.mul(z.table[r], x))] for x in ker] for r in range(R.size)])
    M = FiniteModule(R, add, act, name=f"ker({q.name or 'q'})", key=digest("kernel", q.key, z.key),
                     labels=[E.label(e) for e in ker])
    M.embedding = ker
    return M


def ideals(R: FiniteRing) -> list:
    """All ideals of R as sorted element tuples (sums of ideals generated by <= 2 elements)."""
    found = set()
    for r in (1, 2):
        for gens in itertools.combinations(range(R.size), r):
            found.add(tuple(_ideal_closure(R, gens)))
    changed = True
    while changed:
        changed = False
        for I, J in itertools.combinations(sorted(found), 2):
            K = tuple(_ideal_closure(R, I + J))
            if K not in found:
                found.add(K)
                changed = True
    return sorted(found, key=lambda I: (len(I), I))


def _ideal_closure(R, gens):
    seen = {R.zero}
    frontier = list(gens)
    while frontier:
        x = int(frontier.pop())
        if x in seen:
            continue
        seen.add(x)
        frontier.extend(int(v) for v in R.mul_table[x])
        frontier.extend(int(R.add(x, y)) for y in list(seen))
    return sorted(seen)


def small_modules(R: FiniteRing, max_size: int) -> list:
    """Direct sums of cyclic modules R/I with at most ``max_size`` elements, up to isomorphism."""
    from .homs import module_isomorphic

    cyclic = [quotient_module(R, I) for I in ideals(R) if len(I) < R.size]
    cyclic = [C for C in cyclic if C.size <= max_size]
    out = [zero_module(R)]
    frontier = [zero_module(R)]
    while frontier:
        nxt = []
        for M in frontier:
            for C in cyclic:
                S = C if M.size == 1 else direct_sum(M, C)
                if S.size > max_size:
                    continue
                if any(S.size == N.size and module_isomorphic(S, N) for N in out):
                    continue
                out.append(S)
                nxt.append(S)
        frontier = nxt
    return sorted(out, key=lambda M: (M.size, M.name))
