"""Quotients of finite commutative monoids by a submonoid image."""

from __future__ import annotations

from typing import Sequence

from .couple import Report
from .nodes import FiniteNode


class HypothesisError(ValueError):
    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


def _is_comm_monoid(N: FiniteNode) -> bool:
    if N.actual_kind not in ("zero", "finite_monoid", "group", "abelian_group"):
        return False
    r = range(N.size)
    return all(N.op(a, b) == N.op(b, a) for a in r for b in r)


def _is_hom(f: Sequence[int], src: FiniteNode, dst: FiniteNode) -> bool:
    if len(f) != src.size or f[src.base] != dst.base:
        return False
    r = range(src.size)
    return all(f[src.op(a, b)] == dst.op(f[a], f[b]) for a in r for b in r)


def congruence_classes(M: FiniteNode, sub: set[int]) -> list[int]:
    """Class label per element of M for the congruence generated by
    m1 ~ m2 iff m1 + s1 = m2 + s2 with s1, s2 in sub."""
    parent = list(range(M.size))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        a, b = find(a), find(b)
        if a != b:
            parent[max(a, b)] = min(a, b)
            return True
        return False

    # generating pairs
    hit: dict[int, int] = {}
    for m in range(M.size):
        for s in sub:
            v = M.op(m, s)
            if v in hit:
                union(hit[v], m)
            else:
                hit[v] = m
    # close under translation until stable
    changed = True
    while changed:
        changed = False
        for a in range(M.size):
            for b in range(M.size):
                if find(a) == find(b):
                    for c in range(M.size):
                        changed |= union(M.op(a, c), M.op(b, c))
    return [find(x) for x in range(M.size)]


def monoid_hom_theorem_check(L: FiniteNode, M: FiniteNode, A: FiniteNode,
                             f: Sequence[int], g: Sequence[int]) -> Report:
    """Check that g induces an isomorphism M/f(L) -> A for an exact
    sequence L -> M -> A of finite commutative monoids with A a group.
    Raises HypothesisError when the hypotheses fail."""
    problems = []
    for name, N in (("L", L), ("M", M), ("A", A)):
        if not _is_comm_monoid(N):
            problems.append(f"{name} is not a commutative monoid")
    if not A.is_group:
        problems.append("A is not a group")
    if not _is_hom(f, L, M):
        problems.append("f is not a monoid homomorphism")
    if not _is_hom(g, M, A):
        problems.append("g is not a monoid homomorphism")
    if len(set(f)) != len(f):
        problems.append("f is not injective")
    if set(g) != set(range(A.size)):
        problems.append("g is not surjective")
    if {m for m in range(M.size) if g[m] == A.base} != set(f):
        problems.append("ker g != im f")
    if problems:
        raise HypothesisError(problems)

    rep = Report()
    cls = congruence_classes(M, set(f))
    reps = sorted(set(cls))
    pos = {c: t for t, c in enumerate(reps)}
    table = tuple(tuple(pos[cls[M.op(a, b)]] for b in reps) for a in reps)
    Q = FiniteNode("finite_monoid" if len(reps) > 1 else "zero",
                   tuple(M.elements[c] for c in reps), table, pos[cls[M.base]])
    rep.checked += 1
    if not Q.is_group:
        rep.fail(check="quotient_is_group", kind=Q.actual_kind)
    gbar = []
    for c in reps:
        vals = {g[m] for m in range(M.size) if cls[m] == c}
        rep.checked += 1
        if len(vals) != 1:
            rep.fail(check="gbar_well_defined", cls=M.elements[c],
                     values=sorted(A.elements[v] for v in vals))
        gbar.append(min(vals))
    rep.checked += 2
    if len(set(gbar)) != len(gbar) or len(gbar) != A.size:
        rep.fail(check="gbar_bijective", quotient_size=len(reps), target_size=A.size)
    if not _is_hom(gbar, Q, A):
        rep.fail(check="gbar_hom")
    rep.details = {"quotient_size": len(reps),
                   "classes": [[M.elements[m] for m in range(M.size) if cls[m] == c] for c in reps],
                   "quotient_kind": Q.actual_kind}
    return rep
