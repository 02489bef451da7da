"""The box category: morphisms I^n -> I^m in normal form.

Conventions: I = [-1, 1], positions are 1-based.  A morphism is stored as

    delta_{i_k} ... delta_{i_1} sigma_{j_1} ... sigma_{j_s}

where the word is read right to left (rightmost applied first).  The
insertion positions i_1 < ... < i_k are listed in application order and the
projection positions j_1 >= ... >= j_s are listed left to right.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

# A word letter is ("d", i, eps) or ("s", j).
Letter = tuple


@dataclass(frozen=True, order=True)
class BoxMorphism:
    dom_dim: int
    cod_dim: int
    insertions: tuple[tuple[int, int], ...] = ()
    projections: tuple[int, ...] = ()

    def __post_init__(self):
        n, m = self.dom_dim, self.cod_dim
        if n < 0 or m < 0:
            raise ValueError("dimensions must be nonnegative")
        r = n - len(self.projections)
        if r < 0 or r != m - len(self.insertions):
            raise ValueError(f"inconsistent morphism I^{n} -> I^{m}: {self!r}")
        pos = [i for i, _ in self.insertions]
        if any(a >= b for a, b in zip(pos, pos[1:])):
            raise ValueError("insertion positions must be strictly increasing")
        if any(not 1 <= i <= m for i in pos):
            raise ValueError("insertion position out of range")
        if any(e not in (-1, 1) for _, e in self.insertions):
            raise ValueError("insertion signs must be +-1")
        pr = self.projections
        if any(a < b for a, b in zip(pr, pr[1:])):
            raise ValueError("projection positions must be non-increasing")
        # j_t acts on a cube of dimension n - (s - t) ... check ranges by replay
        dim = n
        for j in reversed(pr):
            if not 1 <= j <= dim:
                raise ValueError("projection position out of range")
            dim -= 1

    @property
    def rank(self) -> int:
        return self.dom_dim - len(self.projections)

    def word(self) -> list[Letter]:
        """Generator word, leftmost letter applied last."""
        w: list[Letter] = [("d", i, e) for i, e in reversed(self.insertions)]
        w += [("s", j) for j in self.projections]
        return w

    def is_injective(self) -> bool:
        return not self.projections

    def __str__(self):
        parts = [f"d{i}{'+' if e > 0 else '-'}" for i, e in reversed(self.insertions)]
        parts += [f"s{j}" for j in self.projections]
        body = " ".join(parts) if parts else "id"
        return f"[{body}: I^{self.dom_dim}->I^{self.cod_dim}]"


def identity(n: int) -> BoxMorphism:
    return BoxMorphism(n, n)


def delta(n: int, i: int, eps: int) -> BoxMorphism:
    """Face insertion I^n -> I^{n+1} placing eps at position i."""
    return BoxMorphism(n, n + 1, ((i, eps),), ())


def sigma(n: int, j: int) -> BoxMorphism:
    """Projection I^n -> I^{n-1} deleting coordinate j."""
    return BoxMorphism(n, n - 1, (), (j,))


def _rewrite_once(w: list[Letter]) -> bool:
    for k in range(len(w) - 1):
        a, b = w[k], w[k + 1]
        if a[0] == "d" and b[0] == "d":
            if a[1] <= b[1]:
                w[k:k + 2] = [("d", b[1] + 1, b[2]), a]
                return True
        elif a[0] == "s" and b[0] == "s":
            if a[1] < b[1]:
                w[k:k + 2] = [("s", b[1] - 1), a]
                return True
        elif a[0] == "s" and b[0] == "d":
            j, i = a[1], b[1]
            if i < j:
                w[k:k + 2] = [b, ("s", j - 1)]
            elif i == j:
                del w[k:k + 2]
            else:
                w[k:k + 2] = [("d", i - 1, b[2]), a]
            return True
    return False


def normalize_word(word: Sequence[Letter], dom_dim: int) -> BoxMorphism:
    """Normal form of a word by rewriting with the co-cubical identities."""
    w = list(word)
    steps = 0
    while _rewrite_once(w):
        steps += 1
        if steps > 10_000:
            raise RuntimeError("rewriting did not terminate")
    ins = tuple((l[1], l[2]) for l in reversed(w) if l[0] == "d")
    proj = tuple(l[1] for l in w if l[0] == "s")
    cod = dom_dim - len(proj) + len(ins)
    return BoxMorphism(dom_dim, cod, ins, proj)


def compose(g: BoxMorphism, f: BoxMorphism) -> BoxMorphism:
    """Normal form of g o f (f applied first)."""
    if f.cod_dim != g.dom_dim:
        raise ValueError(f"cannot compose: cod {f.cod_dim} != dom {g.dom_dim}")
    return normalize_word(g.word() + f.word(), f.dom_dim)


def compose_all(*morphisms: BoxMorphism) -> BoxMorphism:
    """compose_all(h, g, f) = h o g o f."""
    out = morphisms[-1]
    for m in reversed(morphisms[:-1]):
        out = compose(m, out)
    return out


def apply_word(word: Sequence[Letter], x: Sequence[float]) -> list:
    """Geometric action of a raw word (rightmost letter first)."""
    v = list(x)
    for l in reversed(word):
        if l[0] == "d":
            if not 1 <= l[1] <= len(v) + 1:
                raise ValueError("insertion out of range")
            v.insert(l[1] - 1, l[2])
        else:
            if not 1 <= l[1] <= len(v):
                raise ValueError("projection out of range")
            del v[l[1] - 1]
    return v


def apply_geometric(f: BoxMorphism, x: Sequence[float]) -> list:
    if len(x) != f.dom_dim:
        raise ValueError(f"expected a point of I^{f.dom_dim}, got length {len(x)}")
    return apply_word(f.word(), x)


def from_data(n: int, deleted: Sequence[int], inserted: Sequence[tuple[int, int]]) -> BoxMorphism:
    """Morphism deleting the original coordinates `deleted` and then placing
    constants at the final positions `inserted`."""
    dels = sorted(deleted)
    proj = tuple(reversed([d - t for t, d in enumerate(dels)]))
    ins = tuple(sorted(inserted))
    return BoxMorphism(n, n - len(dels) + len(ins), ins, proj)


def enumerate_hom(n: int, m: int) -> list[BoxMorphism]:
    """All normal forms I^n -> I^m in a fixed order."""
    out = []
    for r in range(min(n, m) + 1):
        for kept in itertools.combinations(range(1, n + 1), r):
            deleted = [c for c in range(1, n + 1) if c not in kept]
            for pos in itertools.combinations(range(1, m + 1), m - r):
                for signs in itertools.product((-1, 1), repeat=m - r):
                    out.append(from_data(n, deleted, list(zip(pos, signs))))
    return out


def hom_count(n: int, m: int) -> int:
    from math import comb
    return sum(comb(n, r) * comb(m, r) * 2 ** (m - r) for r in range(min(n, m) + 1))


def injective_morphisms(m: int, n: int) -> Iterator[BoxMorphism]:
    """Insertion-only morphisms I^m -> I^n (nondegenerate cells of the n-cube)."""
    for pos in itertools.combinations(range(1, n + 1), n - m):
        for signs in itertools.product((-1, 1), repeat=n - m):
            yield BoxMorphism(m, n, tuple(zip(pos, signs)), ())


def random_word(rng, dom_dim: int, length: int) -> tuple[list[Letter], int]:
    """A random valid generator word starting at I^dom_dim; returns (word, cod)."""
    word: list[Letter] = []
    dim = dom_dim
    for _ in range(length):
        if dim == 0 or rng.random() < 0.5:
            letter = ("d", int(rng.integers(1, dim + 2)), int(rng.choice([-1, 1])))
            dim += 1
        else:
            letter = ("s", int(rng.integers(1, dim + 1)))
            dim -= 1
        word.insert(0, letter)
    return word, dim
