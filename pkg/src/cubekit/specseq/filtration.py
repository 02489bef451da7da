"""The exact couple of a bounded filtration of a finite chain complex.

D_{p,q} = H_{p+q}(F_p), E_{p,q} = H_{p+q}(F_p/F_{p-1}); i is induced by the
inclusion, j by the projection and k is the connecting map.  Chain groups
may carry a modulus m (coefficients in Z/m).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .. import zlinalg as zl
from .couple import ExactCouple, Window
from .nodes import FiniteNode


class FiltrationError(ValueError):
    pass


@dataclass
class FilteredComplex:
    ranks: list[int]
    boundaries: dict[int, np.ndarray]
    levels: dict[int, list[int]]
    modulus: int = 0

    def __post_init__(self):
        self.complex = zl.ChainComplex(list(self.ranks), dict(self.boundaries))
        for n, r in enumerate(self.ranks):
            lv = self.levels.get(n, [])
            if len(lv) != r:
                raise FiltrationError(f"degree {n}: {len(lv)} levels for {r} basis elements")
            if any(l < 0 for l in lv):
                raise FiltrationError("filtration levels must be nonnegative")
            if any(l > n for l in lv):
                raise FiltrationError("level exceeds degree; the filtration is not first-quadrant")
        bad = [n for n in range(2, self.top + 1)
               if not _zero_mod(self.complex.d(n - 1) @ self.complex.d(n), self.modulus)]
        if bad:
            raise zl.NotAComplex(f"d o d != 0 in degrees {bad}")
        for n in range(1, self.top + 1):
            d = self.complex.d(n)
            for col in range(self.ranks[n]):
                for row in range(self.ranks[n - 1]):
                    if int(d[row, col]) != 0 and self.levels[n - 1][row] > self.levels[n][col]:
                        if not (self.modulus and int(d[row, col]) % self.modulus == 0):
                            raise FiltrationError(f"boundary of a level-{self.levels[n][col]} element leaves F_p")

    @property
    def top(self) -> int:
        return len(self.ranks) - 1

    @property
    def max_level(self) -> int:
        return max((l for lv in self.levels.values() for l in lv), default=0)

    def d(self, n):
        return self.complex.d(n)

    def support(self, n, pred):
        return [b for b in range(self.complex.rank(n)) if pred(self.levels[n][b])]

    def to_json(self):
        return {"ranks": list(self.ranks),
                "boundaries": {str(n): [[int(x) for x in row] for row in self.boundaries[n].tolist()]
                               for n in sorted(self.boundaries)},
                "levels": {str(n): list(v) for n, v in sorted(self.levels.items())},
                "modulus": self.modulus}


def _zero_mod(A, m) -> bool:
    return all((int(x) % m == 0) if m else int(x) == 0 for x in A.flat)


def _embed(cols: np.ndarray, support, size) -> np.ndarray:
    out = zl.zeros(size, cols.shape[1])
    for t, b in enumerate(support):
        out[b, :] = cols[t, :]
    return out


def _mod_block(support, size, m) -> np.ndarray:
    if not m:
        return zl.zeros(size, 0)
    out = zl.zeros(size, len(support))
    for t, b in enumerate(support):
        out[b, t] = m
    return out


class _Homology:
    """Subquotients H_n(F_p) and H_n(F_p/F_{p-1}) with caching."""

    def __init__(self, fc: FilteredComplex):
        self.fc = fc
        self.m = fc.modulus
        self._cache: dict = {}

    def cycles_top(self, p, n):
        """Generators of the lattice of cycles of F_p in degree n (with m-multiples)."""
        fc, m = self.fc, self.m
        c = fc.complex.rank(n)
        S = fc.support(n, lambda l: l <= p)
        if not S:
            return zl.zeros(c, 0)
        if n == 0 or fc.complex.rank(n - 1) == 0:
            K = zl.eye(len(S))
        else:
            d = fc.d(n)[:, S]
            rows = fc.complex.rank(n - 1)
            big = zl.hstack(d, (-m * zl.eye(rows)) if m else None, rows=rows)
            K = zl.kernel_basis(big)[: len(S), :]
        return zl.hstack(_embed(K, S, c), _mod_block(S, c, m), rows=c)

    def boundaries(self, p, n):
        fc, m = self.fc, self.m
        c = fc.complex.rank(n)
        S = fc.support(n, lambda l: l <= p)
        if n + 1 > fc.top:
            B = zl.zeros(c, 0)
        else:
            B = fc.d(n + 1)[:, fc.support(n + 1, lambda l: l <= p)]
        return zl.hstack(B, _mod_block(S, c, m), rows=c)

    def H(self, p, n) -> zl.Subquotient:
        p = min(p, self.fc.max_level)
        key = ("H", p, n)
        if key not in self._cache:
            c = self.fc.complex.rank(n)
            self._cache[key] = zl.Subquotient(c, self.cycles_top(p, n), self.boundaries(p, n))
        return self._cache[key]

    def Hrel(self, p, n) -> zl.Subquotient:
        key = ("R", p, n)
        if key not in self._cache:
            fc, m = self.fc, self.m
            c = fc.complex.rank(n)
            L = fc.support(n, lambda l: l == p)
            if not L:
                top = zl.zeros(c, 0)
            elif n == 0:
                top = _embed(zl.eye(len(L)), L, c)
            else:
                Lb = fc.support(n - 1, lambda l: l == p)
                d = fc.d(n)[Lb, :][:, L] if Lb else zl.zeros(0, len(L))
                big = zl.hstack(d, (-m * zl.eye(len(Lb))) if m and Lb else None, rows=len(Lb))
                K = zl.kernel_basis(big)[: len(L), :] if len(Lb) else zl.eye(len(L))
                top = _embed(K, L, c)
            top = zl.hstack(top, _mod_block(L, c, m), rows=c)
            if n + 1 <= fc.top and L:
                Sb = fc.support(n + 1, lambda l: l <= p)
                B = fc.d(n + 1)[:, Sb]
                B = self._project(B, n, lambda l: l == p)
            else:
                B = zl.zeros(c, 0)
            bottom = zl.hstack(B, _mod_block(L, c, m), rows=c)
            self._cache[key] = zl.Subquotient(c, top, bottom)
        return self._cache[key]

    def _project(self, A, n, pred):
        out = A.copy()
        for b in range(out.shape[0]):
            if not pred(self.fc.levels[n][b]):
                out[b, :] = 0
        return out

    def proj_matrix(self, n, pred):
        return self._project(zl.eye(self.fc.complex.rank(n)), n, pred)


def build_filtration_couple(fc: FilteredComplex, r_max: int | None = None) -> ExactCouple:
    N, P = fc.top, fc.max_level
    r_max = N + P + 2 if r_max is None else r_max
    R = r_max + N + 2
    window = Window(0, P + R, -(R + 1), N + 1)
    Hm = _Homology(fc)
    D, E, i, j, k = {}, {}, {}, {}, {}
    for (p, q) in window.points():
        n = p + q
        if 0 <= n <= N:
            D[(p, q)] = Hm.H(p, n)
            if p <= P and q >= 0:
                E[(p, q)] = Hm.Hrel(p, n)
    for (p, q), src in D.items():
        n = p + q
        if (p + 1, q - 1) in window and (p + 1, q - 1) in D:
            i[(p, q)] = zl.induced_matrix(src, D[(p + 1, q - 1)], zl.eye(fc.complex.rank(n)))
        if (p, q) in E:
            j[(p, q)] = zl.induced_matrix(src, E[(p, q)], Hm.proj_matrix(n, lambda l: l == p))
    for (p, q), src in E.items():
        n = p + q
        if n >= 1 and (p - 1, q) in D:
            A = Hm.proj_matrix(n - 1, lambda l: l <= p - 1) @ fc.d(n)
            k[(p, q)] = zl.induced_matrix(src, D[(p - 1, q)], A)
    C = ExactCouple("group", window, D, E, i, j, k, name="filtration")
    C.r_max = r_max
    C.filtered = fc
    return C


def graded_homology(fc: FilteredComplex, p: int, n: int) -> zl.GroupInvariants:
    """F_p H_n / F_{p-1} H_n of the total homology, computed on chains."""
    Hm = _Homology(fc)
    c = fc.complex.rank(n)
    Btot = Hm.boundaries(fc.max_level, n)
    top = zl.hstack(Hm.cycles_top(p, n), Btot, rows=c)
    low = zl.hstack(Hm.cycles_top(p - 1, n), Btot, rows=c) if p >= 1 else Btot
    return zl.Subquotient(c, top, low).invariants


def random_filtered_complex(rng, top: int = 3, max_rank: int = 6, levels: int = 4,
                            modulus: int = 0) -> FilteredComplex:
    """Random first-quadrant filtered complex; boundaries drawn from cycle lattices."""
    ranks = [int(rng.integers(1, max_rank + 1)) for _ in range(top + 1)]
    lv = {n: sorted(int(rng.integers(0, min(n, levels - 1) + 1)) for _ in range(ranks[n]))
          for n in range(top + 1)}
    bd = {}
    for n in range(1, top + 1):
        d = zl.zeros(ranks[n - 1], ranks[n])
        for col in range(ranks[n]):
            S = [b for b in range(ranks[n - 1]) if lv[n - 1][b] <= lv[n][col]]
            if not S or rng.random() < 0.2:
                continue
            if n - 1 == 0:
                K = zl.eye(len(S))
            else:
                K = zl.kernel_basis(bd[n - 1][:, S])
            if K.shape[1] == 0:
                continue
            coeff = [int(c) for c in rng.integers(-2, 3, K.shape[1])]
            mult = int(rng.choice([1, 1, 2, 3]))
            v = K @ zl.imat(coeff, (K.shape[1], 1)) * mult
            for t, b in enumerate(S):
                d[b, col] = v[t, 0]
        bd[n] = d
    return FilteredComplex(ranks, bd, lv, modulus)


# ---------------------------------------------------------------- tables

def _finite_elements(G: zl.FgAbelianGroup):
    if G.n == 0:
        return [()], lambda x: (), [zl.zeros(0, 1)]
    s = zl._smith(G.R if G.R.shape[1] else zl.zeros(G.n, 0), want_ui=True) if G.R.shape[1] else None
    if s is None or len(s.diag) < G.n:
        raise FiltrationError("group is infinite; use a modulus")
    U = zl.imat(s.U, (G.n, G.n))
    Ui = zl.imat(s.Ui, (G.n, G.n))
    diag = s.diag
    live = [t for t, d in enumerate(diag) if d > 1]

    def key(x):
        y = U @ x
        return tuple(int(y[t, 0]) % diag[t] for t in live)

    elems, reps = [], []
    for vals in itertools.product(*[range(diag[t]) for t in live]):
        y = zl.zeros(G.n, 1)
        for t, v in zip(live, vals):
            y[t, 0] = v
        elems.append(tuple(vals))
        reps.append(Ui @ y)
    return elems, key, reps


def to_table_couple(C: ExactCouple) -> ExactCouple:
    """Enumerate a couple of finite presented groups into finite tables."""
    info = {}

    def conv(G):
        if id(G) in info:
            return info[id(G)][0]
        elems, key, reps = _finite_elements(G)
        idx = {e: t for t, e in enumerate(elems)}
        table = tuple(tuple(idx[key(reps[a] + reps[b])] if G.n else 0 for b in range(len(elems)))
                      for a in range(len(elems)))
        names = tuple("(" + ",".join(map(str, e)) + ")" for e in elems)
        node = FiniteNode("abelian_group" if len(elems) > 1 else "zero", names, table, idx[elems[0]] if G.n else 0)
        info[id(G)] = (node, key, reps, idx, G)
        return node

    def conv_map(F, src, dst):
        conv(src), conv(dst)
        _, _, reps, _, _ = info[id(src)]
        _, key, _, idx, _ = info[id(dst)]
        if dst.n == 0:
            return tuple(0 for _ in reps)
        return tuple(idx[key(F @ r)] if src.n else idx[key(zl.zeros(dst.n, 1))] for r in reps)

    D = {pq: conv(G) for pq, G in C._D.items()}
    E = {pq: conv(G) for pq, G in C._E.items()}
    i = {(p, q): conv_map(F, C._D[(p, q)], C._D[(p + 1, q - 1)]) for (p, q), F in C._i.items()}
    j = {(p, q): conv_map(F, C._D[(p, q)], C._E[(p, q)]) for (p, q), F in C._j.items()}
    k = {(p, q): conv_map(F, C._E[(p, q)], C._D[(p - 1, q)]) for (p, q), F in C._k.items()}
    T = ExactCouple("table", C.window, D, E, i, j, k, name=C.name + "/table")
    T.r_max = getattr(C, "r_max", None)
    return T
