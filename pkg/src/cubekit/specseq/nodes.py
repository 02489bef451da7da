"""Graded nodes: presented abelian groups or finite tables."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from ..zlinalg import FgAbelianGroup

# weakest structure first; a node of kind K satisfies every requirement
# listed after K in this tuple
KINDS = ("zero", "abelian_group", "group", "finite_monoid", "pointed_set")


def kind_satisfies(kind: str, required: str) -> bool:
    return KINDS.index(kind) <= KINDS.index(required)


def required_kind_D(p: int, q: int) -> str:
    if p < 0:
        return "zero"
    if q >= 1:
        return "abelian_group" if p + q >= 2 else "group"
    if q == 0:
        if p >= 2:
            return "abelian_group"
        if p >= 1:
            return "finite_monoid"
    return "pointed_set"


def required_kind_E(p: int, q: int) -> str:
    if p < 0 or q < 0:
        return "zero"
    if q >= 1:
        return "abelian_group" if p + q >= 2 else "group"
    if p >= 3:
        return "abelian_group"
    if p >= 2:
        return "finite_monoid"
    return "pointed_set"


class TableError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteNode:
    """A pointed set, monoid or group given by an element list and a table."""
    kind: str
    elements: tuple[str, ...]
    table: tuple[tuple[int, ...], ...] | None
    base: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise TableError(f"unknown kind {self.kind!r}")
        m = len(self.elements)
        if m == 0 or not 0 <= self.base < m:
            raise TableError("node needs a basepoint")
        if self.kind == "zero" and m != 1:
            raise TableError("zero node must have one element")
        if self.kind != "pointed_set" and self.kind != "zero" and self.table is None:
            raise TableError(f"{self.kind} node needs an operation table")
        if self.table is not None:
            if len(self.table) != m or any(len(r) != m for r in self.table):
                raise TableError("operation table must be square")
            if any(not 0 <= v < m for r in self.table for v in r):
                raise TableError("operation table entry out of range")

    @property
    def size(self) -> int:
        return len(self.elements)

    def op(self, a: int, b: int) -> int:
        return self.table[a][b]

    @cached_property
    def inverse(self) -> tuple[int, ...] | None:
        if self.table is None:
            return None
        out = []
        for a in range(self.size):
            cands = [b for b in range(self.size) if self.op(a, b) == self.base and self.op(b, a) == self.base]
            if not cands:
                return None
            out.append(cands[0])
        return tuple(out)

    @cached_property
    def actual_kind(self) -> str:
        """Strongest kind the table supports."""
        if self.size == 1:
            return "zero"
        if self.table is None:
            return "pointed_set"
        rng = range(self.size)
        e = self.base
        if not all(self.op(e, a) == a and self.op(a, e) == a for a in rng):
            return "pointed_set"
        if not all(self.op(self.op(a, b), c) == self.op(a, self.op(b, c)) for a in rng for b in rng for c in rng):
            return "pointed_set"
        if self.inverse is None:
            return "finite_monoid"
        if all(self.op(a, b) == self.op(b, a) for a in rng for b in rng):
            return "abelian_group"
        return "group"

    @property
    def is_group(self) -> bool:
        return self.actual_kind in ("zero", "group", "abelian_group")

    def index(self, name: str) -> int:
        try:
            return self.elements.index(name)
        except ValueError:
            raise TableError(f"unknown element {name!r}") from None


ZERO_TABLE = FiniteNode("zero", ("0",), ((0,),), 0)
ZERO_GROUP = FgAbelianGroup(0)


def cyclic_node(m: int, prefix: str = "") -> FiniteNode:
    return FiniteNode("abelian_group" if m > 1 else "zero",
                      tuple(f"{prefix}{a}" for a in range(m)),
                      tuple(tuple((a + b) % m for b in range(m)) for a in range(m)), 0)


def symmetric_group_node(n: int = 3) -> tuple[FiniteNode, list[tuple[int, ...]]]:
    perms = list(itertools.permutations(range(n)))
    idx = {p: t for t, p in enumerate(perms)}
    # (a*b)(x) = a(b(x))
    table = tuple(tuple(idx[tuple(a[b[x]] for x in range(n))] for b in perms) for a in perms)
    names = tuple("".join(map(str, p)) for p in perms)
    return FiniteNode("group", names, table, idx[tuple(range(n))]), perms


def sign(perm: Sequence[int]) -> int:
    s = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                s = -s
    return s
