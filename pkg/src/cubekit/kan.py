"""Horn filling, Kan and contractibility verdicts, combinatorial homotopy.

All searches run over the deterministic cube order of CubicalSet.cubes:
generators by declaration order, then dummy sets lexicographically.  Passing
order="reversed" flips it, which is how filler-independence is tested.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

from .cubset import Cube, CubicalError, CubicalMap, CubicalSet, compose_degen

Slot = tuple[int, int]


class IncompatibleHorn(ValueError):
    pass


class MissingCertificate(ValueError):
    pass


class GroupAxiomError(RuntimeError):
    pass


def slots(n: int) -> list[Slot]:
    return [(j, w) for j in range(1, n + 1) for w in (-1, 1)]


def slot_str(s: Slot) -> str:
    return f"{s[0]}{'+' if s[1] > 0 else '-'}"


@dataclass(frozen=True)
class HornInstance:
    n: int
    open_face: Slot | None          # None for a sphere
    assignment: tuple[tuple[Slot, Cube], ...]

    @classmethod
    def make(cls, n: int, open_face: Slot | None, assignment: Mapping[Slot, Cube]):
        return cls(n, open_face, tuple((s, assignment[s]) for s in slots(n) if s != open_face))

    def as_dict(self) -> dict[Slot, Cube]:
        return dict(self.assignment)

    def key(self) -> tuple[Cube, ...]:
        return tuple(c for _, c in self.assignment)

    def to_json(self) -> dict:
        out = {"n": self.n, "faces": {slot_str(s): str(c) for s, c in self.assignment}}
        if self.open_face is not None:
            out["open"] = slot_str(self.open_face)
        return out


def SphereInstance(n: int, assignment: Mapping[Slot, Cube]) -> HornInstance:
    return HornInstance.make(n, None, assignment)


def incompatible_pair(X: CubicalSet, n: int, assignment: Mapping[Slot, Cube]):
    """First (j,w),(k,e) with j<k violating d_j^w x_(k,e) = d_{k-1}^e x_(j,w)."""
    for (j, w), (k, e) in itertools.combinations(slots(n), 2):
        if j >= k or (j, w) not in assignment or (k, e) not in assignment:
            continue
        if X.face(assignment[(k, e)], j, w) != X.face(assignment[(j, w)], k - 1, e):
            return (j, w), (k, e)
    return None


class _FaceIndex:
    """Maps face tuples (minus one slot) to the first matching cube."""

    def __init__(self):
        self._tables: dict = {}

    def lookup(self, X: CubicalSet, n: int, skip: Slot | None, key, order: str, extra=None):
        tkey = (id(X), n, skip, order, id(extra) if extra is not None else None)
        entry = self._tables.get(tkey)
        if entry is None or entry[0] is not X or entry[1] is not extra:
            table = {}
            for c in X.cubes(n, order):
                fk = tuple(X.face(c, j, w) for (j, w) in slots(n) if (j, w) != skip)
                if extra is not None:
                    fk = (fk, extra(c))
                table.setdefault(fk, c)
            entry = (X, extra, table)
            self._tables[tkey] = entry
        return entry[2].get(key)


_INDEX = _FaceIndex()


def find_filler(X: CubicalSet, h: HornInstance, order: str = "forward") -> Cube | None:
    if h.n > X.trunc_dim:
        raise CubicalError(f"horn dimension {h.n} exceeds truncation {X.trunc_dim}")
    bad = incompatible_pair(X, h.n, h.as_dict())
    if bad is not None:
        raise IncompatibleHorn(f"incompatible pair {slot_str(bad[0])}, {slot_str(bad[1])}")
    if h.n == 0:
        cs = X.cubes(0, order)
        return cs[0] if cs else None
    return _INDEX.lookup(X, h.n, h.open_face, h.key(), order)


def enumerate_assignments(X: CubicalSet, n: int, skip: Slot | None) -> Iterator[dict[Slot, Cube]]:
    """All compatible assignments on the slots of I^n other than `skip`."""
    todo = [s for s in slots(n) if s != skip]
    cand = X.cubes(n - 1)
    assign: dict[Slot, Cube] = {}

    def ok(slot, c):
        k, e = slot
        for (j, w), x in assign.items():
            if j < k:
                if X.face(c, j, w) != X.face(x, k - 1, e):
                    return False
            elif j > k:
                if X.face(x, k, e) != X.face(c, j - 1, w):
                    return False
        return True

    def rec(t):
        if t == len(todo):
            yield dict(assign)
            return
        s = todo[t]
        for c in cand:
            if n == 1 or ok(s, c):
                assign[s] = c
                yield from rec(t + 1)
                del assign[s]

    yield from rec(0)


@dataclass
class KanCertificate:
    set_name: str
    up_to: int
    fillers: dict = field(default_factory=dict, repr=False)
    _ref: object = field(default=None, repr=False, compare=False)

    def covers(self, X: CubicalSet, n: int) -> bool:
        return self._ref is X and self.up_to >= n


@dataclass
class Verdict:
    ok: bool
    up_to: int
    kind: str
    checked: dict = field(default_factory=dict)
    counterexample: dict | None = None
    certificate: KanCertificate | None = None

    def summary(self) -> str:
        if self.ok:
            return f"{self.kind} up to {self.up_to}"
        return f"not {self.kind}: counterexample in dim {self.counterexample['n']}"

    def to_json(self) -> dict:
        return {"ok": self.ok, "up_to": self.up_to, "verdict": self.summary(),
                "checked": {str(k): v for k, v in sorted(self.checked.items())},
                "counterexample": self.counterexample}


def _kan_dim(X: CubicalSet, n: int, order: str, memo: dict | None):
    count = 0
    for s in slots(n):
        for a in enumerate_assignments(X, n, s):
            h = HornInstance.make(n, s, a)
            count += 1
            x = _INDEX.lookup(X, n, s, h.key(), order)
            if x is None:
                return count, h
            if memo is not None:
                memo[h] = x
    return count, None


def is_kan(X: CubicalSet, up_to: int, order: str = "forward", memo: bool = False,
           parallel: bool = False) -> Verdict:
    if up_to > X.trunc_dim:
        raise CubicalError(f"up_to {up_to} exceeds truncation {X.trunc_dim}")
    cert = KanCertificate(X.name, up_to, {} if memo else None, X)
    v = Verdict(True, up_to, "kan")
    for n in range(1, up_to + 1):
        count, bad = _kan_dim(X, n, order, cert.fillers)
        v.checked[n] = count
        if bad is not None:
            v.ok = False
            v.counterexample = bad.to_json()
            return v
    v.certificate = cert
    return v


def is_contractible(X: CubicalSet, up_to: int, order: str = "forward") -> Verdict:
    if up_to > X.trunc_dim:
        raise CubicalError(f"up_to {up_to} exceeds truncation {X.trunc_dim}")
    v = Verdict(True, up_to, "contractible")
    if not X.cubes(0):
        v.ok = False
        v.counterexample = {"n": 0, "faces": {}}
        return v
    v.checked[0] = 1
    for n in range(1, up_to + 1):
        count = 0
        for a in enumerate_assignments(X, n, None):
            h = SphereInstance(n, a)
            count += 1
            if _INDEX.lookup(X, n, None, h.key(), order) is None:
                v.checked[n] = count
                v.ok = False
                v.counterexample = h.to_json()
                return v
        v.checked[n] = count
    return v


def is_kan_fibration(f: CubicalMap, up_to: int, order: str = "forward") -> Verdict:
    E, B = f.source, f.target
    if up_to > min(E.trunc_dim, B.trunc_dim):
        raise CubicalError("up_to exceeds truncation")
    v = Verdict(True, up_to, "kan fibration")
    for n in range(1, up_to + 1):
        count = 0
        for s in slots(n):
            for a in enumerate_assignments(E, n, s):
                h = HornInstance.make(n, s, a)
                images = {t: f(c) for t, c in a.items()}
                for b in B.cubes(n):
                    if any(B.face(b, j, w) != images[(j, w)] for (j, w) in images):
                        continue
                    count += 1
                    x = _INDEX.lookup(E, n, s, (h.key(), b), order, extra=f)
                    if x is None:
                        v.checked[n] = count
                        v.ok = False
                        v.counterexample = dict(h.to_json(), base=str(b))
                        return v
        v.checked[n] = count
    return v


# ---------------------------------------------------------------- homotopy

def homotopy_key(X: CubicalSet, x: Cube, y: Cube) -> tuple[Cube, ...]:
    n = x.dim
    faces = {(1, -1): x, (1, 1): y}
    for i in range(2, n + 2):
        for e in (-1, 1):
            faces[(i, e)] = X.degeneracy(X.face(x, i - 1, e), 1)
    return tuple(faces[s] for s in slots(n + 1))


def homotopy_witness(X: CubicalSet, x: Cube, y: Cube, order: str = "forward") -> Cube | None:
    if x.dim != y.dim:
        raise CubicalError("homotopic: dimension mismatch")
    n = x.dim
    if n + 1 > X.trunc_dim:
        raise CubicalError(f"homotopy of {n}-cubes needs truncation >= {n + 1}")
    if X.faces_of(x) != X.faces_of(y):
        return None
    return _INDEX.lookup(X, n + 1, None, homotopy_key(X, x, y), order)


def homotopic(X: CubicalSet, x: Cube, y: Cube, order: str = "forward") -> bool:
    return homotopy_witness(X, x, y, order) is not None


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def pi0(X: CubicalSet) -> list[list[str]]:
    """Path components of the vertex set, via the generated equivalence."""
    if X.trunc_dim < 1:
        raise CubicalError("pi0 needs truncation >= 1")
    verts = list(X.gens(0))
    uf = _UnionFind(verts)
    for e in X.gens(1):
        uf.union(X.faces[(e, 1, -1)].gen, X.faces[(e, 1, 1)].gen)
    classes: dict[str, list[str]] = {}
    for v in verts:
        classes.setdefault(uf.find(v), []).append(v)
    return sorted(classes.values(), key=lambda c: verts.index(c[0]))


def degenerate_point(X: CubicalSet, k0: str, n: int) -> Cube:
    if X.dim_of.get(k0) != 0:
        raise CubicalError(f"basepoint {k0!r} is not a 0-generator")
    return Cube(k0, 0, tuple(range(1, n + 1)))


def loops(X: CubicalSet, k0: str, n: int, order: str = "forward") -> list[Cube]:
    base = degenerate_point(X, k0, n - 1)
    return [c for c in X.cubes(n, order) if all(f == base for f in X.faces_of(c))]


@dataclass
class PiGroup:
    n: int
    basepoint: str
    classes: list[list[Cube]]
    table: list[list[int]]
    identity: int

    @property
    def order(self) -> int:
        return len(self.classes)

    def class_of(self, c: Cube) -> int:
        for t, cl in enumerate(self.classes):
            if c in cl:
                return t
        raise KeyError(c)

    def to_json(self) -> dict:
        return {"n": self.n, "basepoint": self.basepoint, "order": self.order,
                "identity": self.identity,
                "classes": [[str(c) for c in cl] for cl in self.classes],
                "table": self.table}


def _product_horn(X: CubicalSet, a: Cube, b: Cube, k0: str, n: int) -> HornInstance:
    base = degenerate_point(X, k0, n)
    assign = {s: base for s in slots(n + 1) if s != (1, 1)}
    assign[(1, -1)] = a
    assign[(2, 1)] = b
    return HornInstance.make(n + 1, (1, 1), assign)


def pi_n(X: CubicalSet, k0: str, n: int, certificate: KanCertificate | Verdict | None,
         order: str = "forward") -> PiGroup:
    if isinstance(certificate, Verdict):
        certificate = certificate.certificate
    if certificate is None or not certificate.covers(X, n + 1):
        raise MissingCertificate(f"pi_{n} needs a Kan certificate up to dimension {n + 1}")
    if n < 1:
        raise CubicalError("pi_n needs n >= 1; use pi0")
    L = loops(X, k0, n, order)
    rel = {(a, b): homotopic(X, a, b, order) for a in L for b in L}
    for a in L:
        if not rel[(a, a)]:
            raise GroupAxiomError(f"homotopy not reflexive at {a}")
        for b in L:
            if rel[(a, b)] != rel[(b, a)]:
                raise GroupAxiomError(f"homotopy not symmetric at {a}, {b}")
            for c in L:
                if rel[(a, b)] and rel[(b, c)] and not rel[(a, c)]:
                    raise GroupAxiomError(f"homotopy not transitive at {a}, {b}, {c}")
    classes: list[list[Cube]] = []
    for a in L:
        for cl in classes:
            if rel[(cl[0], a)]:
                cl.append(a)
                break
        else:
            classes.append([a])
    where = {c: t for t, cl in enumerate(classes) for c in cl}
    m = len(classes)
    table = [[-1] * m for _ in range(m)]
    for s in range(m):
        for t in range(m):
            for a in classes[s]:
                for b in classes[t]:
                    h = _product_horn(X, a, b, k0, n)
                    x = find_filler(X, h, order)
                    if x is None:
                        raise GroupAxiomError(f"product horn of {a}, {b} has no filler")
                    r = X.face(x, 1, 1)
                    if r not in where:
                        raise GroupAxiomError(f"product of {a}, {b} is not a loop: {r}")
                    if table[s][t] == -1:
                        table[s][t] = where[r]
                    elif table[s][t] != where[r]:
                        raise GroupAxiomError(f"product depends on representatives at ({s},{t})")
    e = where[degenerate_point(X, k0, n)]
    for s in range(m):
        if table[e][s] != s or table[s][e] != s:
            raise GroupAxiomError("degenerate loop is not a two-sided identity")
        if not any(table[s][t] == e and table[t][s] == e for t in range(m)):
            raise GroupAxiomError(f"class {s} has no inverse")
        for t in range(m):
            for u in range(m):
                if table[table[s][t]][u] != table[s][table[t][u]]:
                    raise GroupAxiomError(f"associativity fails at ({s},{t},{u})")
    return PiGroup(n, k0, classes, table, e)


def same_group(g1: PiGroup, g2: PiGroup) -> bool:
    """Equal partitions of the loops and equal tables after matching classes."""
    if g1.order != g2.order:
        return False
    match = {}
    for s, cl in enumerate(g1.classes):
        t = g2.class_of(cl[0])
        if set(g2.classes[t]) != set(cl):
            return False
        match[s] = t
    return all(match[g1.table[s][t]] == g2.table[match[s]][match[t]]
               for s in range(g1.order) for t in range(g1.order))


# ---------------------------------------------------------------- constructions

def cube_token(c: Cube) -> str:
    return c.gen if not c.degen else f"{c.gen}^{'.'.join(map(str, c.degen))}"


def _strip(c: Cube, positions: Sequence[int]) -> Cube:
    """Remove dummy positions (all must be dummies of c)."""
    ps = set(positions)
    keep = [d for d in c.degen if d not in ps]
    return Cube(c.gen, c.gdim, tuple(d - sum(1 for p in ps if p < d) for d in keep))


def homotopy_fiber(f: CubicalMap, k0: str) -> CubicalSet:
    X, K = f.source, f.target
    N = min(X.trunc_dim, K.trunc_dim - 1)
    gens: dict[int, list[str]] = {}
    faces: dict = {}
    names: dict[tuple[Cube, Cube], str] = {}

    def normal(x: Cube, k: Cube):
        common = sorted(set(x.degen) & {d - 1 for d in k.degen})
        return _strip(x, common), _strip(k, [c + 1 for c in common]), tuple(common)

    for n in range(N + 1):
        base = degenerate_point(K, k0, n)
        for x in X.cubes(n):
            fx = f(x)
            for k in K.cubes(n + 1):
                if K.face(k, 1, 1) != fx or K.face(k, 1, -1) != base:
                    continue
                if set(x.degen) & {d - 1 for d in k.degen}:
                    continue
                name = f"<{cube_token(x)}|{cube_token(k)}>"
                names[(x, k)] = name
                gens.setdefault(n, []).append(name)
    for (x, k), name in names.items():
        n = x.dim
        for i in range(1, n + 1):
            for e in (-1, 1):
                x0, k1, common = normal(X.face(x, i, e), K.face(k, i + 1, e))
                faces[(name, i, e)] = Cube(names[(x0, k1)], x0.dim, common)
    return CubicalSet(N, gens, faces, name=f"hofib({f.name},{k0})")


def mapping_path_set(X: CubicalSet) -> CubicalSet:
    """P_n X = X_{n+1} with faces d_{i+1} and degeneracies s_{i+1}."""
    N = X.trunc_dim - 1
    gens: dict[int, list[str]] = {}
    faces: dict = {}
    gen_cubes = []
    for n in range(N + 1):
        for c in X.cubes(n + 1):
            if set(c.degen) <= {1}:
                gens.setdefault(n, []).append(cube_token(c))
                gen_cubes.append(c)
    for c in gen_cubes:
        n = c.dim - 1
        for i in range(1, n + 1):
            for e in (-1, 1):
                d = X.face(c, i + 1, e)
                head = tuple(t for t in d.degen if t == 1)
                tail = tuple(t - 1 for t in d.degen if t >= 2)
                faces[(cube_token(c), i, e)] = Cube(cube_token(Cube(d.gen, d.gdim, head)), n - 1 - len(tail), tail)
    return CubicalSet(N, gens, faces, name=f"P({X.name})")


class NotAGroup(ValueError):
    pass


def check_group_table(table: Sequence[Sequence[int]]) -> int:
    m = len(table)
    if m == 0 or any(len(r) != m for r in table):
        raise NotAGroup("table must be square and nonempty")
    if any(not 0 <= v < m for r in table for v in r):
        raise NotAGroup("table entries out of range")
    ids = [e for e in range(m) if all(table[e][a] == a and table[a][e] == a for a in range(m))]
    if not ids:
        raise NotAGroup("no identity element")
    e = ids[0]
    for a in range(m):
        if not any(table[a][b] == e and table[b][a] == e for b in range(m)):
            raise NotAGroup(f"element {a} has no inverse")
        for b in range(m):
            for c in range(m):
                if table[table[a][b]][c] != table[a][table[b][c]]:
                    raise NotAGroup(f"not associative at ({a},{b},{c})")
    return e


def build_BG(group_table: Sequence[Sequence[int]], up_to: int) -> CubicalSet:
    """Functions {-1,1}^n -> G modulo the diagonal left action."""
    e = check_group_table(group_table)
    m = len(group_table)
    inv = [next(b for b in range(m) if group_table[a][b] == e) for a in range(m)]

    def normalize(vals):
        g = inv[vals[0]]
        return tuple(group_table[g][v] for v in vals)

    def restrict(vals, n, i, eps):
        # vertices indexed with coordinate 1 as the most significant bit, -1 -> 0
        bit = 1 if eps > 0 else 0
        out = []
        for idx in range(2 ** n):
            if (idx >> (n - i)) & 1 == bit:
                out.append(vals[idx])
        return tuple(out)

    def dummies(vals, n):
        out = []
        for c in range(1, n + 1):
            mask = 1 << (n - c)
            if all(vals[idx] == vals[idx ^ mask] for idx in range(2 ** n)):
                out.append(c)
        return out

    def reduce(vals, n):
        ds = dummies(vals, n)
        core = vals
        dim = n
        for c in reversed(ds):
            core = restrict(core, dim, c, -1)
            dim -= 1
        return core, dim, tuple(ds)

    def name(vals, n):
        return f"b{n}:" + ".".join(map(str, vals))

    gens: dict[int, list[str]] = {}
    faces: dict = {}
    for n in range(up_to + 1):
        for rest in itertools.product(range(m), repeat=2 ** n - 1):
            vals = (e,) + rest
            if dummies(vals, n):
                continue
            g = name(vals, n)
            gens.setdefault(n, []).append(g)
            for i in range(1, n + 1):
                for eps in (-1, 1):
                    fv = normalize(restrict(vals, n, i, eps))
                    core, k, ds = reduce(fv, n - 1)
                    faces[(g, i, eps)] = Cube(name(core, k), k, ds)
    return CubicalSet(up_to, gens, faces, name=f"B(G{m})")


def cyclic_group_table(m: int) -> list[list[int]]:
    return [[(a + b) % m for b in range(m)] for a in range(m)]


def minimal_circle(trunc: int = 3) -> CubicalSet:
    v = Cube("v", 0, ())
    return CubicalSet(trunc, {0: ["v"], 1: ["e"]}, {("e", 1, -1): v, ("e", 1, 1): v}, name="circle")
