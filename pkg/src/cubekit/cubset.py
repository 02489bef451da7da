"""Finite, dimension-truncated cubical sets without connections.

A cube is a nondegenerate generator together with the sorted set of its
dummy coordinates (the positions it does not depend on).  Geometrically the
cube (g, D) is g composed with the projection deleting the coordinates in D.
The normalized degeneracy word sigma_{i_k} ... sigma_{i_1} with
i_1 < ... < i_k applied in that order has exactly D = {i_1, ..., i_k}.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

from . import boxcat


class CubicalError(ValueError):
    pass


class FormatError(CubicalError):
    def __init__(self, msg, line=None, col=None, path=None):
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
            if col is not None:
                where += f"{col}:"
        super().__init__(f"{where} {msg}".strip())
        self.line, self.col = line, col


@dataclass(frozen=True, order=True)
class Cube:
    gen: str
    gdim: int
    degen: tuple[int, ...] = ()

    @property
    def dim(self) -> int:
        return self.gdim + len(self.degen)

    @property
    def degenerate(self) -> bool:
        return bool(self.degen)

    def __str__(self):
        if not self.degen:
            return self.gen
        return f"{self.gen}[s {' '.join(map(str, self.degen))}]"


def compose_degen(inner: Sequence[int], outer: Sequence[int], total_dim: int) -> tuple[int, ...]:
    """Dummy set of (c o pi_outer) where c has dummy set `inner`.

    `outer` lives in I^total_dim, `inner` in the cube left after deleting
    `outer`.
    """
    outer_set = set(outer)
    free = [p for p in range(1, total_dim + 1) if p not in outer_set]
    return tuple(sorted(outer_set | {free[t - 1] for t in inner}))


def normalize_word(word: Sequence[int], start_dim: int) -> tuple[int, ...]:
    """Dummy set of sigma-word applied in the given order to a start_dim cube."""
    dummies: tuple[int, ...] = ()
    dim = start_dim
    for a in word:
        if not 1 <= a <= dim + 1:
            raise CubicalError(f"degeneracy index {a} out of range for dimension {dim}")
        dummies = compose_degen(dummies, (a,), dim + 1)
        dim += 1
    return dummies


class CubicalSet:
    """Generators per dimension plus a face table on generators."""

    def __init__(self, trunc_dim: int, generators: Mapping[int, Sequence[str]],
                 faces: Mapping[tuple[str, int, int], Cube], name: str = ""):
        self.trunc_dim = int(trunc_dim)
        self.generators: dict[int, tuple[str, ...]] = {
            k: tuple(v) for k, v in sorted(generators.items()) if k <= self.trunc_dim}
        self.dim_of: dict[str, int] = {}
        for k, gs in self.generators.items():
            for g in gs:
                if g in self.dim_of:
                    raise CubicalError(f"generator {g!r} declared twice")
                self.dim_of[g] = k
        self.faces = {key: c for key, c in faces.items() if key[0] in self.dim_of}
        self.name = name
        self._face_cache: dict = {}
        self._cubes_cache: dict = {}

    # ----- basic structure
    def gens(self, k: int) -> tuple[str, ...]:
        return self.generators.get(k, ())

    def all_gens(self) -> list[str]:
        return [g for k in sorted(self.generators) for g in self.generators[k]]

    def max_gen_dim(self) -> int:
        return max((k for k, v in self.generators.items() if v), default=-1)

    def cell_counts(self) -> list[int]:
        return [len(self.gens(k)) for k in range(self.max_gen_dim() + 1)]

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.cell_counts()))

    def gen_cube(self, g: str) -> Cube:
        return Cube(g, self.dim_of[g], ())

    def with_trunc(self, n: int) -> "CubicalSet":
        return CubicalSet(n, self.generators, self.faces, self.name)

    def cube(self, g: str, degen: Iterable[int] = ()) -> Cube:
        if g not in self.dim_of:
            raise CubicalError(f"unknown generator {g!r}")
        return Cube(g, self.dim_of[g], tuple(sorted(degen)))

    # ----- cubical operators
    def face(self, c: Cube, i: int, eps: int) -> Cube:
        key = (c, i, eps)
        hit = self._face_cache.get(key)
        if hit is not None:
            return hit
        n = c.dim
        if n < 1 or not 1 <= i <= n:
            raise CubicalError(f"face index {i} out of range for a {n}-cube")
        if eps not in (-1, 1):
            raise CubicalError("face sign must be +-1")
        dset = set(c.degen)
        shifted = tuple(d if d < i else d - 1 for d in c.degen if d != i)
        if i in dset:
            out = Cube(c.gen, c.gdim, shifted)
        else:
            ii = i - sum(1 for d in c.degen if d < i)
            try:
                f = self.faces[(c.gen, ii, eps)]
            except KeyError:
                raise CubicalError(f"missing face entry for {c.gen} {ii} {eps:+d}") from None
            out = Cube(f.gen, f.gdim, compose_degen(f.degen, shifted, n - 1))
        self._face_cache[key] = out
        return out

    def degeneracy(self, c: Cube, j: int) -> Cube:
        if not 1 <= j <= c.dim + 1:
            raise CubicalError(f"degeneracy index {j} out of range")
        return Cube(c.gen, c.gdim, compose_degen(c.degen, (j,), c.dim + 1))

    def degenerate_to(self, c: Cube, n: int) -> Cube:
        """sigma_1 ... sigma_1 c of dimension n."""
        out = c
        while out.dim < n:
            out = self.degeneracy(out, 1)
        return out

    def apply_box(self, c: Cube, phi: boxcat.BoxMorphism) -> Cube:
        """X(phi)(c) for phi: I^m -> I^{dim c}."""
        if phi.cod_dim != c.dim:
            raise CubicalError("box morphism does not end at the cube's dimension")
        out = c
        # phi = delta ... delta sigma ... sigma; X(phi) applies faces of the
        # leftmost insertions first.
        for letter in phi.word():
            if letter[0] == "d":
                out = self.face(out, letter[1], letter[2])
            else:
                out = self.degeneracy(out, letter[1])
        return out

    def faces_of(self, c: Cube) -> tuple[Cube, ...]:
        return tuple(self.face(c, i, e) for i in range(1, c.dim + 1) for e in (-1, 1))

    def cubes(self, n: int, order: str = "forward") -> tuple[Cube, ...]:
        """All n-cubes: generators by declaration order, then dummy sets
        lexicographically."""
        key = (n, order)
        if key not in self._cubes_cache:
            out = []
            for k in range(0, n + 1):
                for g in self.gens(k):
                    for d in itertools.combinations(range(1, n + 1), n - k):
                        out.append(Cube(g, k, d))
            out.sort(key=lambda c: (self._decl_index(c.gen), c.degen))
            if order == "reversed":
                out.reverse()
            self._cubes_cache[key] = tuple(out)
        return self._cubes_cache[key]

    def _decl_index(self, g):
        if not hasattr(self, "_decl"):
            self._decl = {h: t for t, h in enumerate(self.all_gens())}
        return self._decl[g]

    def __repr__(self):
        return f"CubicalSet({self.name or '?'}, cells={self.cell_counts()}, trunc={self.trunc_dim})"

    # ----- subsets
    def subset(self, gens: Iterable[str], name: str = "") -> "CubicalSet":
        keep = set(gens)
        out = CubicalSet(self.trunc_dim,
                         {k: [g for g in v if g in keep] for k, v in self.generators.items()},
                         self.faces, name)
        for (g, _, _), c in out.faces.items():
            if c.gen not in keep:
                raise CubicalError(f"subset not closed under faces: {g} -> {c.gen}")
        return out

    def face_closure(self, gens: Iterable[str]) -> set[str]:
        todo = list(gens)
        seen = set()
        while todo:
            g = todo.pop()
            if g in seen:
                continue
            seen.add(g)
            k = self.dim_of[g]
            for i in range(1, k + 1):
                for e in (-1, 1):
                    todo.append(self.faces[(g, i, e)].gen)
        return seen


# ---------------------------------------------------------------- validation

@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def check_structure(X: CubicalSet) -> None:
    """Raise on dangling references, missing entries, or dimension errors."""
    for k, gs in X.generators.items():
        for g in gs:
            for i in range(1, k + 1):
                for e in (-1, 1):
                    c = X.faces.get((g, i, e))
                    if c is None:
                        raise CubicalError(f"missing face entry: face {g} {i} {'+' if e > 0 else '-'}")
                    if c.gen not in X.dim_of:
                        raise CubicalError(f"dangling generator reference {c.gen!r} in face of {g}")
                    if X.dim_of[c.gen] != c.gdim:
                        raise CubicalError(f"generator {c.gen!r} referenced with wrong dimension")
                    if c.dim != k - 1:
                        raise CubicalError(f"face {g} {i} {e:+d} has dimension {c.dim}, expected {k - 1}")
                    if any(not 1 <= d <= k - 1 for d in c.degen) or len(set(c.degen)) != len(c.degen):
                        raise CubicalError(f"bad degeneracy indices in face of {g}")


def validate(X: CubicalSet) -> ValidationReport:
    """List every violated instance of d_i^e d_j^w = d_{j-1}^w d_i^e (i < j)."""
    check_structure(X)
    rep = ValidationReport()
    for k in sorted(X.generators):
        for g in X.generators[k]:
            c = X.gen_cube(g)
            for j in range(2, k + 1):
                for i in range(1, j):
                    for e in (-1, 1):
                        for w in (-1, 1):
                            lhs = X.face(X.face(c, j, w), i, e)
                            rhs = X.face(X.face(c, i, e), j - 1, w)
                            rep.checked += 1
                            if lhs != rhs:
                                rep.violations.append({
                                    "generator": g, "i": i, "eps": e, "j": j, "omega": w,
                                    "lhs": str(lhs), "rhs": str(rhs)})
    return rep


# ---------------------------------------------------------------- maps

class CubicalMap:
    def __init__(self, source: CubicalSet, target: CubicalSet, assignment: Mapping[str, Cube], name: str = "f"):
        self.source, self.target, self.name = source, target, name
        self.assignment = dict(assignment)
        for g in source.all_gens():
            if g not in self.assignment:
                raise CubicalError(f"map {name}: generator {g!r} unassigned")
            c = self.assignment[g]
            if c.gen not in target.dim_of or target.dim_of[c.gen] != c.gdim:
                raise CubicalError(f"map {name}: dangling target {c.gen!r}")
            if c.dim != source.dim_of[g]:
                raise CubicalError(f"map {name}: {g} sent to a cube of the wrong dimension")

    def __call__(self, c: Cube) -> Cube:
        a = self.assignment[c.gen]
        return Cube(a.gen, a.gdim, compose_degen(a.degen, c.degen, c.dim))


def validate_map(f: CubicalMap) -> ValidationReport:
    rep = ValidationReport()
    X, Y = f.source, f.target
    for g in X.all_gens():
        c = X.gen_cube(g)
        for i in range(1, c.dim + 1):
            for e in (-1, 1):
                rep.checked += 1
                lhs, rhs = f(X.face(c, i, e)), Y.face(f(c), i, e)
                if lhs != rhs:
                    rep.violations.append({"generator": g, "i": i, "eps": e,
                                           "lhs": str(lhs), "rhs": str(rhs)})
    return rep


def identity_map(X: CubicalSet) -> CubicalMap:
    return CubicalMap(X, X, {g: X.gen_cube(g) for g in X.all_gens()}, "id")


def constant_map(X: CubicalSet, Y: CubicalSet, vertex: str) -> CubicalMap:
    v = Y.gen_cube(vertex)
    if v.gdim != 0:
        raise CubicalError("constant map needs a 0-generator")
    return CubicalMap(X, Y, {g: Cube(vertex, 0, tuple(range(1, X.dim_of[g] + 1)))
                             for g in X.all_gens()}, "const")


def image(f: CubicalMap) -> CubicalSet:
    gens = {f.assignment[g].gen for g in f.source.all_gens()}
    return f.target.subset(f.target.face_closure(gens), name=f"im {f.name}")


def preimage(f: CubicalMap, B: CubicalSet) -> CubicalSet:
    keep = {g for g in f.source.all_gens() if f.assignment[g].gen in B.dim_of}
    return f.source.subset(keep, name=f"{f.name}^-1")


# ---------------------------------------------------------------- constructions

def cell_name(phi: boxcat.BoxMorphism) -> str:
    """'+-*' string of an insertion-only morphism into I^n."""
    if phi.projections:
        raise CubicalError("degenerate morphism has no cell name")
    chars = ["*"] * phi.cod_dim
    for i, e in phi.insertions:
        chars[i - 1] = "+" if e > 0 else "-"
    return "".join(chars) or "o"


def standard_cube(n: int, trunc: int | None = None) -> CubicalSet:
    gens: dict[int, list[str]] = {}
    faces: dict = {}
    for m in range(n + 1):
        for phi in boxcat.injective_morphisms(m, n):
            g = cell_name(phi)
            gens.setdefault(m, []).append(g)
            for i in range(1, m + 1):
                for e in (-1, 1):
                    psi = boxcat.compose(phi, boxcat.delta(m - 1, i, e))
                    faces[(g, i, e)] = Cube(cell_name(psi), m - 1, ())
    return CubicalSet(n if trunc is None else trunc, gens, faces, name=f"cube{n}")


def boundary_sphere(n: int, trunc: int | None = None) -> CubicalSet:
    if n < 1:
        raise CubicalError("boundary sphere needs n >= 1")
    C = standard_cube(n, trunc)
    keep = [g for g in C.all_gens() if C.dim_of[g] < n]
    return C.subset(keep, name=f"sphere{n}")


def horn(n: int, i: int, eps: int, trunc: int | None = None) -> CubicalSet:
    if n < 1 or not 1 <= i <= n or eps not in (-1, 1):
        raise CubicalError("invalid horn parameters")
    C = standard_cube(n, trunc)
    top = "*" * n
    missing = C.faces[(top, i, eps)].gen
    keep = [g for g in C.all_gens() if g not in (top, missing)]
    return C.subset(keep, name=f"horn{n}_{i}{'+' if eps > 0 else '-'}")


def point(trunc: int = 0) -> CubicalSet:
    return CubicalSet(trunc, {0: ["pt"]}, {}, name="point")


def discrete(names: Sequence[str], trunc: int = 0) -> CubicalSet:
    return CubicalSet(trunc, {0: list(names)}, {}, name="discrete")


def disjoint_union(X: CubicalSet, Y: CubicalSet, tags=("a", "b")) -> CubicalSet:
    def ren(t, g):
        return f"{t}.{g}"
    gens: dict[int, list[str]] = {}
    faces: dict = {}
    for t, Z in zip(tags, (X, Y)):
        for k, gs in Z.generators.items():
            gens.setdefault(k, []).extend(ren(t, g) for g in gs)
        for (g, i, e), c in Z.faces.items():
            faces[(ren(t, g), i, e)] = Cube(ren(t, c.gen), c.gdim, c.degen)
    return CubicalSet(min(X.trunc_dim, Y.trunc_dim), gens, faces, name="union")


def pair_name(x: str, y: str) -> str:
    return f"<{x},{y}>"


def reduced_product(X: CubicalSet, Y: CubicalSet, trunc: int | None = None) -> CubicalSet:
    """Nondegenerate cells are pairs of nondegenerate cells."""
    N = X.trunc_dim + Y.trunc_dim if trunc is None else trunc
    gens: dict[int, list[str]] = {}
    faces: dict = {}
    for kx in sorted(X.generators):
        for ky in sorted(Y.generators):
            if kx + ky > N:
                continue
            for x in X.generators[kx]:
                for y in Y.generators[ky]:
                    g = pair_name(x, y)
                    gens.setdefault(kx + ky, []).append(g)
                    for i in range(1, kx + ky + 1):
                        for e in (-1, 1):
                            if i <= kx:
                                h = X.faces[(x, i, e)]
                                c = Cube(pair_name(h.gen, y), h.gdim + ky, h.degen)
                            else:
                                h = Y.faces[(y, i - kx, e)]
                                c = Cube(pair_name(x, h.gen), kx + h.gdim,
                                         tuple(s + kx for s in h.degen))
                            faces[(g, i, e)] = c
    # keep declaration order grouped by total dimension
    ordered = {k: gens[k] for k in sorted(gens)}
    return CubicalSet(N, ordered, faces, name=f"({X.name}x{Y.name})")


def relabel(X: CubicalSet, mapping: Mapping[str, str]) -> CubicalSet:
    gens = {k: [mapping[g] for g in gs] for k, gs in X.generators.items()}
    faces = {(mapping[g], i, e): Cube(mapping[c.gen], c.gdim, c.degen)
             for (g, i, e), c in X.faces.items()}
    return CubicalSet(X.trunc_dim, gens, faces, X.name)


def isomorphic_via(X: CubicalSet, Y: CubicalSet, mapping: Mapping[str, str]) -> bool:
    """True iff the generator bijection `mapping` carries X's face table to Y's."""
    if sorted(mapping.values()) != sorted(Y.all_gens()) or sorted(mapping) != sorted(X.all_gens()):
        return False
    for (g, i, e), c in X.faces.items():
        d = Y.faces.get((mapping[g], i, e))
        if d is None or d != Cube(mapping[c.gen], c.gdim, c.degen):
            return False
    return all(X.dim_of[g] == Y.dim_of[mapping[g]] for g in mapping)


def all_cubes_upto(X: CubicalSet, n: int) -> Iterator[Cube]:
    for k in range(n + 1):
        yield from X.cubes(k)


# ---------------------------------------------------------------- text format

_CUBE_RE = re.compile(r"^([^\s\[\]#]+)(?:\[s((?:\s+\d+)*)\s*\])?$")


def parse_cube_token(tok: str, dim_of: Mapping[str, int], line=None, col=None, path=None) -> Cube:
    m = _CUBE_RE.match(tok)
    if not m:
        raise FormatError(f"malformed cube {tok!r}", line, col, path)
    g = m.group(1)
    if g not in dim_of:
        raise FormatError(f"dangling generator reference {g!r}", line, col, path)
    word = [int(s) for s in (m.group(2) or "").split()]
    try:
        degen = normalize_word(word, dim_of[g])
    except CubicalError as exc:
        raise FormatError(str(exc), line, col, path) from None
    return Cube(g, dim_of[g], degen)


def _tokenize_lines(text: str):
    for ln, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if body.strip():
            yield ln, raw, body


def _col(raw: str, tok: str) -> int:
    return raw.find(tok) + 1


def parse_cubical_set(text: str, path=None, name: str = "") -> CubicalSet:
    gens: dict[int, list[str]] = {}
    dim_of: dict[str, int] = {}
    pending = []
    trunc = None
    for ln, raw, body in _tokenize_lines(text):
        toks = body.split()
        head = toks[0]
        if head == "dim":
            m = re.match(r"^\s*dim\s+(\d+)\s*:(.*)$", body)
            if not m:
                raise FormatError("expected 'dim k: g1 g2 ...'", ln, 1, path)
            k = int(m.group(1))
            for gm in re.finditer(r"\S+", m.group(2)):
                g = gm.group()
                if g in dim_of:
                    col = len(raw) - len(body) + m.start(2) + gm.start() + 1
                    raise FormatError(f"generator {g!r} declared twice", ln, col, path)
                if "[" in g or "]" in g:
                    raise FormatError(f"bad generator name {g!r}", ln, _col(raw, g), path)
                dim_of[g] = k
                gens.setdefault(k, []).append(g)
        elif head == "face":
            pending.append((ln, raw, body))
        elif head == "trunc":
            if len(toks) != 2 or not toks[1].isdigit():
                raise FormatError("expected 'trunc N'", ln, 1, path)
            trunc = int(toks[1])
        elif head in ("map", "source", "target"):
            continue
        else:
            raise FormatError(f"unknown directive {head!r}", ln, _col(raw, head), path)
    faces = {}
    for ln, raw, body in pending:
        m = re.match(r"^\s*face\s+(\S+)\s+(\d+)\s+([+-])\s*=\s*(.+?)\s*$", body)
        if not m:
            raise FormatError("expected 'face g i +|- = h[s ...]'", ln, 1, path)
        g, i, sgn, rhs = m.group(1), int(m.group(2)), m.group(3), m.group(4)
        if g not in dim_of:
            raise FormatError(f"dangling generator reference {g!r}", ln, _col(raw, g), path)
        if not 1 <= i <= dim_of[g]:
            raise FormatError(f"face index {i} out of range for {g}", ln, _col(raw, m.group(2)), path)
        eps = 1 if sgn == "+" else -1
        if (g, i, eps) in faces:
            raise FormatError(f"duplicate face entry for {g} {i} {sgn}", ln, 1, path)
        faces[(g, i, eps)] = parse_cube_token(rhs, dim_of, ln, _col(raw, rhs), path)
    if trunc is None:
        trunc = max(gens, default=0)
    X = CubicalSet(trunc, gens, faces, name=name)
    try:
        check_structure(X)
    except CubicalError as exc:
        raise FormatError(str(exc), path=path) from None
    return X


def parse_map(text: str, source: CubicalSet, target: CubicalSet, path=None) -> CubicalMap:
    assign = {}
    name = "f"
    for ln, raw, body in _tokenize_lines(text):
        if not body.split()[0] == "map":
            continue
        m = re.match(r"^\s*map\s+(\S+)\s*:\s*(\S+)\s*->\s*(.+?)\s*$", body)
        if not m:
            raise FormatError("expected 'map f: g -> h[s ...]'", ln, 1, path)
        name, g, rhs = m.group(1), m.group(2), m.group(3)
        if g not in source.dim_of:
            raise FormatError(f"unknown source generator {g!r}", ln, _col(raw, g), path)
        assign[g] = parse_cube_token(rhs, target.dim_of, ln, _col(raw, rhs), path)
    try:
        return CubicalMap(source, target, assign, name)
    except CubicalError as exc:
        raise FormatError(str(exc), path=path) from None


def load_cubical_set(path) -> CubicalSet:
    p = Path(path)
    return parse_cubical_set(p.read_text(encoding="utf-8"), path=str(p), name=p.stem)


def load_map(path) -> CubicalMap:
    """A map file names its source and target files with 'source PATH' and
    'target PATH' lines (relative to the map file)."""
    p = Path(path)
    text = p.read_text(encoding="utf-8")
    refs = {}
    for ln, raw, body in _tokenize_lines(text):
        toks = body.split()
        if toks[0] in ("source", "target"):
            if len(toks) != 2:
                raise FormatError(f"expected '{toks[0]} PATH'", ln, 1, str(p))
            refs[toks[0]] = p.parent / toks[1]
    for key in ("source", "target"):
        if key not in refs:
            raise FormatError(f"map file lacks a '{key}' line", path=str(p))
    src, tgt = load_cubical_set(refs["source"]), load_cubical_set(refs["target"])
    return parse_map(text, src, tgt, path=str(p))


def format_cubical_set(X: CubicalSet) -> str:
    lines = [f"trunc {X.trunc_dim}"]
    for k in sorted(X.generators):
        if X.generators[k]:
            lines.append(f"dim {k}: " + " ".join(X.generators[k]))
    for g in X.all_gens():
        for i in range(1, X.dim_of[g] + 1):
            for e in (-1, 1):
                lines.append(f"face {g} {i} {'+' if e > 0 else '-'} = {X.faces[(g, i, e)]}")
    return "\n".join(lines) + "\n"


def cube_product_iso(m: int, n: int) -> dict[str, str]:
    """Generator bijection cube(m) (x) cube(n) -> cube(m+n): the pair of cells
    <a, b> goes to the cell whose name is a followed by b."""
    def strip(s):
        return "" if s == "o" else s

    A, B = standard_cube(m), standard_cube(n)
    out = {}
    for a in A.all_gens():
        for b in B.all_gens():
            out[pair_name(a, b)] = strip(a) + strip(b) or "o"
    return out
