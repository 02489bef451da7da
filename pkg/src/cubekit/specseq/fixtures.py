"""Small hand-built couples and complexes used by tests and the CLI."""

from __future__ import annotations

from .. import zlinalg as zl
from .couple import ExactCouple, Window
from .filtration import FilteredComplex
from .nodes import FiniteNode, cyclic_node, sign, symmetric_group_node


def s3_couple() -> ExactCouple:
    """Nonabelian couple: D_{0,1} = E_{0,1} = S3, i_{0,1} = sign onto
    D_{1,0} = Z/2, k_{1,1} embeds Z/3 as A3, k_{2,0}: Z/2 -> D_{1,0} iso."""
    S3, perms = symmetric_group_node(3)
    Z2, Z3 = cyclic_node(2), cyclic_node(3)
    cyc = perms.index((1, 2, 0))
    c2 = S3.op(cyc, cyc)
    D = {(0, 1): S3, (1, 0): Z2}
    E = {(0, 1): S3, (1, 1): Z3, (2, 0): Z2}
    i = {(0, 1): tuple(0 if sign(p) > 0 else 1 for p in perms)}
    j = {(0, 1): tuple(range(S3.size))}
    k = {(1, 1): (S3.base, cyc, c2), (2, 0): (0, 1)}
    return ExactCouple("table", Window(0, 3, -1, 2), D, E, i, j, k, name="s3")


def two_step_complex(levels: str = "skeletal") -> FilteredComplex:
    """C2 = C1 = C0 = Z with d2 = 2, d1 = 0."""
    bd = {1: zl.imat([[0]]), 2: zl.imat([[2]])}
    lv = {"skeletal": {0: [0], 1: [1], 2: [2]},
          "two_step": {0: [0], 1: [1], 2: [1]},
          "one_step": {0: [0], 1: [0], 2: [0]}}[levels]
    return FilteredComplex([1, 1, 1], bd, lv)


def monoid_fixture():
    """L = {0} x ({0,1}, max) -> M = Z/2 x ({0,1}, max) -> A = Z/2."""
    els = [(a, b) for a in range(2) for b in range(2)]
    pos = {e: t for t, e in enumerate(els)}
    M = FiniteNode("finite_monoid", tuple(f"{a}{b}" for a, b in els),
                   tuple(tuple(pos[((a + c) % 2, max(b, d))] for (c, d) in els) for (a, b) in els),
                   pos[(0, 0)])
    L = FiniteNode("finite_monoid", ("0", "1"), ((0, 1), (1, 1)), 0)
    A = cyclic_node(2)
    f = (pos[(0, 0)], pos[(0, 1)])
    g = tuple(a for a, _ in els)
    return L, M, A, f, g
