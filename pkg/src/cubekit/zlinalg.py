"""Exact integer linear algebra on Python big ints.

Matrices are numpy object arrays holding Python ints, so `@` stays exact.
Subgroups of a presented group Z^n / colspan(R) are given by generator
matrices in the ambient coordinates of Z^n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np


def imat(rows, shape=None) -> np.ndarray:
    """Integer object matrix from nested lists (or an empty shape)."""
    if shape is not None and (rows is None or len(rows) == 0):
        return np.zeros(shape, dtype=object) * 0
    a = np.array(rows, dtype=object)
    if a.ndim == 1:
        a = a.reshape(-1, 1) if shape is None else a.reshape(shape)
    out = np.empty(a.shape, dtype=object)
    for idx, v in np.ndenumerate(a):
        out[idx] = int(v)
    return out


def zeros(m: int, n: int) -> np.ndarray:
    out = np.empty((m, n), dtype=object)
    out.fill(0)
    return out


def eye(n: int) -> np.ndarray:
    out = zeros(n, n)
    for i in range(n):
        out[i, i] = 1
    return out


def hstack(*mats: np.ndarray, rows: int | None = None) -> np.ndarray:
    mats = [m for m in mats if m is not None]
    if rows is None:
        rows = mats[0].shape[0]
    mats = [m for m in mats if m.shape[1] > 0]
    if not mats:
        return zeros(rows, 0)
    return np.concatenate(mats, axis=1)


def mat_eq(a: np.ndarray, b: np.ndarray) -> bool:
    return a.shape == b.shape and all(int(x) == int(y) for x, y in zip(a.flat, b.flat))


def is_zero(a: np.ndarray) -> bool:
    return all(int(x) == 0 for x in a.flat)


# ---------------------------------------------------------------- Smith form

@dataclass
class _Smith:
    U: list
    Ui: list
    S: list
    V: list
    diag: list  # nonzero diagonal entries d_1 | d_2 | ...


def _smith(M: np.ndarray, want_ui: bool = True) -> _Smith:
    m, n = M.shape
    A = [[int(x) for x in row] for row in M.tolist()] if m else []
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    Ui = [[int(i == j) for j in range(m)] for i in range(m)] if want_ui else None
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        if i == j:
            return
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]
        if Ui is not None:
            for row in Ui:
                row[i], row[j] = row[j], row[i]

    def swap_cols(i, j):
        if i == j:
            return
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q row_src
        if q == 0:
            return
        ra, rs = A[dst], A[src]
        for c in range(n):
            ra[c] += q * rs[c]
        ua, us = U[dst], U[src]
        for c in range(m):
            ua[c] += q * us[c]
        if Ui is not None:
            for row in Ui:
                row[src] -= q * row[dst]

    def add_col(dst, src, q):  # col_dst += q col_src
        if q == 0:
            return
        for row in A:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    def neg_row(i):
        A[i] = [-x for x in A[i]]
        U[i] = [-x for x in U[i]]
        if Ui is not None:
            for row in Ui:
                row[i] = -row[i]

    diag = []
    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = A[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        while True:
            p = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
                    if A[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
                    if A[t][j]:
                        dirty = True
            if dirty:
                best = None
                for i in range(t + 1, m):
                    if A[i][t] and (best is None or abs(A[i][t]) < best[0]):
                        best = (abs(A[i][t]), i, "r")
                for j in range(t + 1, n):
                    if A[t][j] and (best is None or abs(A[t][j]) < best[0]):
                        best = (abs(A[t][j]), j, "c")
                if best[0] < abs(p):
                    if best[2] == "r":
                        swap_rows(t, best[1])
                    else:
                        swap_cols(t, best[1])
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            neg_row(t)
        diag.append(A[t][t])
        t += 1
    return _Smith(U, Ui, A, V, diag)


def smith_normal_form(M) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(U, S, V) with S = U M V diagonal, d_1 | d_2 | ..., U and V unimodular."""
    M = imat(M) if not isinstance(M, np.ndarray) else M
    m, n = M.shape
    s = _smith(M, want_ui=False)
    return imat(s.U, (m, m)), imat(s.S, (m, n)), imat(s.V, (n, n))


def invariant_factors(M: np.ndarray) -> list[int]:
    """Nonzero diagonal of the Smith form."""
    if M.size == 0:
        return []
    return list(_smith(M, want_ui=False).diag)


def kernel_basis(M: np.ndarray) -> np.ndarray:
    """Columns spanning {x in Z^n : M x = 0} (a lattice basis)."""
    m, n = M.shape
    if m == 0:
        return eye(n)
    s = _smith(M, want_ui=False)
    r = len(s.diag)
    V = imat(s.V, (n, n))
    return V[:, r:]


def column_basis(M: np.ndarray) -> np.ndarray:
    """A basis of the column lattice of M."""
    m, n = M.shape
    if n == 0 or m == 0:
        return zeros(m, 0)
    s = _smith(M)
    Ui = imat(s.Ui, (m, m))
    r = len(s.diag)
    out = Ui[:, :r].copy()
    for c, d in enumerate(s.diag):
        out[:, c] = out[:, c] * d
    return out


def solve(M: np.ndarray, B: np.ndarray) -> np.ndarray | None:
    """Integer X with M X = B, or None."""
    m, n = M.shape
    if B.ndim == 1:
        B = B.reshape(-1, 1)
    k = B.shape[1]
    if k == 0:
        return zeros(n, 0)
    if n == 0:
        return zeros(0, k) if is_zero(B) else None
    s = _smith(M, want_ui=False)
    U = imat(s.U, (m, m))
    V = imat(s.V, (n, n))
    UB = U @ B
    Y = zeros(n, k)
    r = len(s.diag)
    for i in range(m):
        for c in range(k):
            v = int(UB[i, c])
            if i < r:
                d = s.diag[i]
                if v % d:
                    return None
                Y[i, c] = v // d
            elif v:
                return None
    return V @ Y


def in_span(M: np.ndarray, B: np.ndarray) -> bool:
    return solve(M, B) is not None


# ---------------------------------------------------------------- groups

@dataclass(frozen=True)
class GroupInvariants:
    torsion: tuple[int, ...]
    rank: int

    @property
    def trivial(self) -> bool:
        return not self.torsion and self.rank == 0

    @property
    def order(self):
        if self.rank:
            return None
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def __str__(self):
        parts = []
        if self.rank:
            parts.append("Z" if self.rank == 1 else f"Z^{self.rank}")
        parts += [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"

    def as_dict(self):
        return {"rank": self.rank, "torsion": list(self.torsion), "text": str(self)}


class FgAbelianGroup:
    """Z^n / colspan(R)."""

    def __init__(self, n: int, R: np.ndarray | None = None):
        self.n = int(n)
        self.R = zeros(self.n, 0) if R is None else R
        if self.R.shape[0] != self.n:
            raise ValueError("relation matrix has the wrong number of rows")

    @cached_property
    def invariants(self) -> GroupInvariants:
        diag = invariant_factors(self.R) if self.R.shape[1] else []
        return GroupInvariants(tuple(d for d in diag if d > 1), self.n - len(diag))

    def __repr__(self):
        return f"FgAbelianGroup({self.invariants})"

    # subgroups are generator matrices with n rows
    def whole(self) -> np.ndarray:
        return eye(self.n)

    def trivial_sub(self) -> np.ndarray:
        return zeros(self.n, 0)

    def contains(self, A: np.ndarray, B: np.ndarray) -> bool:
        """B <= A (modulo relations)."""
        if B.shape[1] == 0:
            return True
        return in_span(hstack(A, self.R, rows=self.n), B)

    def sub_equal(self, A, B) -> bool:
        return self.contains(A, B) and self.contains(B, A)

    def is_zero_element(self, v: np.ndarray) -> bool:
        return self.contains(zeros(self.n, 0), v)

    def quotient(self, A: np.ndarray, B: np.ndarray) -> "Subquotient":
        return Subquotient(self.n, hstack(A, self.R, rows=self.n), hstack(B, self.R, rows=self.n))


class Subquotient(FgAbelianGroup):
    """L1 / L2 for lattices L2 <= L1 <= Z^N, presented on a basis of L1."""

    def __init__(self, N: int, top: np.ndarray, bottom: np.ndarray):
        basis = column_basis(top)
        C = solve(basis, bottom) if bottom.shape[1] else zeros(basis.shape[1], 0)
        if C is None:
            raise ValueError("bottom lattice is not contained in the top lattice")
        super().__init__(basis.shape[1], C)
        self.N = N
        self.basis = basis

    def coords(self, V: np.ndarray) -> np.ndarray:
        X = solve(self.basis, V)
        if X is None:
            raise ValueError("vector not in the top lattice")
        return X


def induced_matrix(src: Subquotient, dst: Subquotient, A: np.ndarray) -> np.ndarray:
    """Coordinate matrix of the map induced by the ambient matrix A."""
    image = A @ src.basis if src.basis.shape[1] else zeros(A.shape[0], 0)
    F = dst.coords(image) if image.shape[1] else zeros(dst.n, 0)
    if src.R.shape[1] and not dst.contains(zeros(dst.n, 0), F @ src.R):
        raise ValueError("ambient matrix does not induce a map of subquotients")
    return F


def hom_kernel(F: np.ndarray, src: FgAbelianGroup, dst: FgAbelianGroup) -> np.ndarray:
    K = kernel_basis(hstack(F, -dst.R if dst.R.shape[1] else None, rows=dst.n))
    return K[: src.n, :]


def hom_image(F: np.ndarray, S: np.ndarray) -> np.ndarray:
    if S.shape[1] == 0:
        return zeros(F.shape[0], 0)
    return F @ S


def hom_preimage(F: np.ndarray, src: FgAbelianGroup, dst: FgAbelianGroup, T: np.ndarray) -> np.ndarray:
    parts = [F]
    if T.shape[1]:
        parts.append(-T)
    if dst.R.shape[1]:
        parts.append(-dst.R)
    K = kernel_basis(hstack(*parts, rows=dst.n))
    return K[: src.n, :]


def is_hom(F: np.ndarray, src: FgAbelianGroup, dst: FgAbelianGroup) -> bool:
    if F.shape != (dst.n, src.n):
        return False
    if src.R.shape[1] == 0:
        return True
    return dst.contains(zeros(dst.n, 0), F @ src.R)


# ---------------------------------------------------------------- chain complexes

@dataclass
class ChainComplex:
    """ranks[n] = rank of C_n; boundaries[n]: C_n -> C_{n-1} (shape ranks[n-1] x ranks[n])."""
    ranks: list[int]
    boundaries: dict[int, np.ndarray] = field(default_factory=dict)
    labels: dict[int, list] = field(default_factory=dict)

    def __post_init__(self):
        for n in range(1, len(self.ranks)):
            if n not in self.boundaries:
                self.boundaries[n] = zeros(self.ranks[n - 1], self.ranks[n])
            d = self.boundaries[n]
            if d.shape != (self.ranks[n - 1], self.ranks[n]):
                raise ValueError(f"boundary {n} has shape {d.shape}")

    @property
    def top(self) -> int:
        return len(self.ranks) - 1

    def d(self, n: int) -> np.ndarray:
        if n <= 0 or n > self.top:
            rows = self.ranks[n - 1] if 0 < n <= self.top + 1 else 0
            cols = self.ranks[n] if 0 <= n <= self.top else 0
            return zeros(rows, cols)
        return self.boundaries[n]

    def rank(self, n: int) -> int:
        return self.ranks[n] if 0 <= n <= self.top else 0

    def check(self) -> list[int]:
        """Degrees n where d_{n-1} d_n != 0."""
        bad = []
        for n in range(2, self.top + 1):
            if not is_zero(self.d(n - 1) @ self.d(n)):
                bad.append(n)
        return bad

    def euler_characteristic(self) -> int:
        return sum((-1) ** n * r for n, r in enumerate(self.ranks))


class NotAComplex(ValueError):
    pass


def homology(C: ChainComplex, n: int) -> Subquotient:
    """H_n = ker d_n / im d_{n+1}, presented on a basis of the cycles."""
    if C.check():
        raise NotAComplex(f"d o d != 0 in degrees {C.check()}")
    c = C.rank(n)
    Z = kernel_basis(C.d(n)) if n >= 1 and C.rank(n - 1) else eye(c)
    B = C.d(n + 1) if n + 1 <= C.top else zeros(c, 0)
    return Subquotient(c, Z, B)


def homology_all(C: ChainComplex) -> list[GroupInvariants]:
    return [homology(C, n).invariants for n in range(C.top + 1)]


def cubical_chain_complex(X) -> ChainComplex:
    """Normalized chains on the nondegenerate generators of a cubical set."""
    top = X.max_gen_dim()
    basis = {k: list(X.gens(k)) for k in range(top + 1)}
    index = {k: {g: t for t, g in enumerate(basis[k])} for k in basis}
    ranks = [len(basis[k]) for k in range(top + 1)]
    bd = {}
    for k in range(1, top + 1):
        d = zeros(ranks[k - 1], ranks[k])
        for col, g in enumerate(basis[k]):
            for i in range(1, k + 1):
                for e in (-1, 1):
                    f = X.faces[(g, i, e)]
                    if f.degen:
                        continue
                    d[index[k - 1][f.gen], col] += (-1) ** i * e
        bd[k] = d
    return ChainComplex(ranks, bd, labels=basis)


def random_unimodular(rng, n: int, steps: int = 12) -> tuple[np.ndarray, np.ndarray]:
    """(P, P^-1) from random elementary operations."""
    P, Pi = eye(n), eye(n)
    for _ in range(steps if n > 1 else 0):
        i, j = rng.choice(n, size=2, replace=False)
        q = int(rng.integers(-2, 3))
        P[i, :] = P[i, :] + q * P[j, :]
        Pi[:, j] = Pi[:, j] - q * Pi[:, i]
    return P, Pi
