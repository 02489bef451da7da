"""Two payload engines sharing one interface.

GroupEngine: nodes are presented abelian groups, maps are integer matrices,
subobjects are generator matrices.  TableEngine: nodes are finite tables,
maps are index tuples, subobjects are frozensets of element indices.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from math import gcd

import numpy as np

from .. import zlinalg as zl
from .nodes import ZERO_GROUP, ZERO_TABLE, FiniteNode


class NotInImage(ValueError):
    """k-image outside im i^{r-1}: a Z^r membership bug."""


class IllDefined(ValueError):
    pass


def _orders_of_abelian(torsion) -> tuple[int, ...]:
    """Sorted element orders of Z/d_1 + ... + Z/d_k."""
    from itertools import product
    out = []
    for x in product(*[range(d) for d in torsion]):
        o = 1
        for xi, d in zip(x, torsion):
            oi = d // gcd(xi, d)
            o = o * oi // gcd(o, oi)
        out.append(o)
    return tuple(sorted(out))


@dataclass(frozen=True)
class QuotientDescriptor:
    size: int | None                  # None when infinite
    orders: tuple[int, ...] | None    # element orders when a finite group
    text: str

    def to_json(self):
        return {"size": self.size, "text": self.text}


class GroupEngine:
    name = "group"
    zero_node = ZERO_GROUP

    def is_zero(self, N) -> bool:
        return N.n == 0

    def zero_map(self, src, dst):
        return zl.zeros(dst.n, src.n)

    def identity(self, N):
        return zl.eye(N.n)

    def compose(self, g, f):
        return g @ f

    def whole(self, N):
        return zl.eye(N.n)

    def trivial(self, N):
        return zl.zeros(N.n, 0)

    def image(self, f, src, dst, S):
        return zl.hom_image(f, S)

    def preimage(self, f, src, dst, T):
        return zl.hom_preimage(f, src, dst, T)

    def kernel(self, f, src, dst):
        return zl.hom_preimage(f, src, dst, zl.zeros(dst.n, 0))

    def contains(self, N, A, B) -> bool:
        return N.contains(A, B)

    def equal(self, N, A, B) -> bool:
        return N.sub_equal(A, B)

    def is_trivial_sub(self, N, A) -> bool:
        return N.contains(zl.zeros(N.n, 0), A)

    def is_hom(self, f, src, dst) -> bool:
        return zl.is_hom(f, src, dst)

    def actual_kind(self, N) -> str:
        return "zero" if N.invariants.trivial else "abelian_group"

    def quotient(self, N, A, B) -> QuotientDescriptor:
        if not N.contains(A, B):
            raise ValueError("quotient of a subgroup by a non-subgroup")
        inv = N.quotient(A, B).invariants
        if inv.rank:
            return QuotientDescriptor(None, None, str(inv))
        return QuotientDescriptor(inv.order, _orders_of_abelian(inv.torsion), str(inv))

    def describe_sub(self, N, A) -> str:
        return str(N.quotient(A, zl.zeros(N.n, 0)).invariants)

    # the relation z -> c(b^{-1}(a(z))), well defined modulo `modulus` in dst
    def zigzag(self, a, b, c, src, mid, pre, dst, Z, modulus):
        s = Z.shape[1]
        cols = []
        lhs = zl.hstack(b, mid.R, rows=mid.n)
        for t in range(s):
            y = a @ Z[:, t:t + 1]
            sol = zl.solve(lhs, y) if lhs.shape[1] else (zl.zeros(0, 1) if zl.is_zero(y) else None)
            if sol is None:
                raise NotInImage("element has no preimage")
            x = sol[: pre.n, :]
            cols.append(c @ x)
        M = zl.hstack(*cols, rows=dst.n) if cols else zl.zeros(dst.n, 0)
        amb = zl.hom_image(c, self.kernel(b, pre, mid))
        if not dst.contains(modulus, amb):
            raise IllDefined("fiber ambiguity not absorbed by the modulus")
        return {"M": M, "Z": Z}

    def rep_kernel(self, rep, src, dst, modulus):
        M, Z = rep["M"], rep["Z"]
        s = Z.shape[1]
        if s == 0:
            return zl.zeros(src.n, 0)
        C = zl.hom_preimage(M, zl.FgAbelianGroup(s), dst, modulus)
        return Z @ C if C.shape[1] else zl.zeros(src.n, 0)

    def rep_image(self, rep, dst, modulus):
        return zl.hstack(rep["M"], modulus, rows=dst.n)

    def rep_values(self, rep, dst):
        return rep["M"]

    def perturb(self, rep, dst):
        """Fault injection: add a generator of dst to the first column."""
        M = rep["M"].copy()
        if M.shape[1] and dst.n:
            M[0, 0] = M[0, 0] + 1
        return {"M": M, "Z": rep["Z"]}


class TableEngine:
    name = "table"
    zero_node = ZERO_TABLE

    def is_zero(self, N) -> bool:
        return N.size == 1

    def zero_map(self, src, dst):
        return (dst.base,) * src.size

    def identity(self, N):
        return tuple(range(N.size))

    def compose(self, g, f):
        return tuple(g[x] for x in f)

    def whole(self, N):
        return frozenset(range(N.size))

    def trivial(self, N):
        return frozenset({N.base})

    def image(self, f, src, dst, S):
        return frozenset(f[x] for x in S)

    def preimage(self, f, src, dst, T):
        return frozenset(x for x in range(src.size) if f[x] in T)

    def kernel(self, f, src, dst):
        return self.preimage(f, src, dst, frozenset({dst.base}))

    def contains(self, N, A, B) -> bool:
        return B <= A

    def equal(self, N, A, B) -> bool:
        return A == B

    def is_trivial_sub(self, N, A) -> bool:
        return A <= {N.base}

    def is_hom(self, f, src, dst) -> bool:
        if f[src.base] != dst.base:
            return False
        if src.table is None or dst.table is None:
            return True
        if src.actual_kind == "pointed_set" or dst.actual_kind == "pointed_set":
            return True
        return all(f[src.op(a, b)] == dst.op(f[a], f[b]) for a in range(src.size) for b in range(src.size))

    def actual_kind(self, N) -> str:
        return N.actual_kind

    def cosets(self, N, A, B) -> list[frozenset]:
        """Left cosets aB of B inside A (B must be a subgroup of a group)."""
        out, seen = [], set()
        for a in sorted(A):
            if a in seen:
                continue
            c = frozenset(N.op(a, b) for b in B)
            out.append(c)
            seen |= c
        return out

    def quotient(self, N, A, B) -> QuotientDescriptor:
        if not B <= A:
            raise ValueError("quotient of a subobject by a non-subobject")
        if not N.is_group:
            raise ValueError("quotient needs a group node")
        cs = self.cosets(N, A, B)
        normal = all(frozenset(N.op(N.op(a, b), N.inverse[a]) for b in B) <= B for a in A)
        orders = None
        if normal:
            which = {x: t for t, c in enumerate(cs) for x in c}
            orders = []
            for c in cs:
                x, o = min(c), 1
                y = x
                while which[y] != which[N.base]:
                    y = N.op(y, x)
                    o += 1
                orders.append(o)
            orders = tuple(sorted(orders))
        kind = "cosets" if not normal else "group"
        return QuotientDescriptor(len(cs), orders, f"{len(cs)} {kind}")

    def describe_sub(self, N, A) -> str:
        return f"{len(A)} elements"

    def _equiv(self, N, x, y, modulus) -> bool:
        if x == y:
            return True
        if not N.is_group:
            return False
        return N.op(N.inverse[x], y) in modulus

    def zigzag(self, a, b, c, src, mid, pre, dst, Z, modulus):
        out = {}
        for z in sorted(Z):
            y = a[z]
            xs = [x for x in range(pre.size) if b[x] == y]
            if not xs:
                raise NotInImage(f"element {src.elements[z]} has no preimage")
            vals = sorted({c[x] for x in xs})
            if not all(self._equiv(dst, vals[0], v, modulus) for v in vals):
                raise IllDefined(f"value at {src.elements[z]} depends on the preimage chosen")
            out[z] = vals
        return out

    def rep_kernel(self, rep, src, dst, modulus):
        return frozenset(z for z, vals in rep.items() if vals[0] in modulus)

    def rep_image(self, rep, dst, modulus):
        vals = {v for vs in rep.values() for v in vs} | {dst.base}
        if dst.is_group:
            return frozenset(dst.op(v, m) for v in vals for m in modulus) | modulus
        return frozenset(vals) | modulus

    def rep_values(self, rep, dst):
        return {z: vs for z, vs in rep.items()}

    def perturb(self, rep, dst):
        out = dict(rep)
        if out and dst.size > 1:
            z = max(out)
            out[z] = [(out[z][0] + 1) % dst.size]
        return out


ENGINES = {"group": GroupEngine(), "table": TableEngine()}
