"""Dice functions and their second-order jets.

All functions work on batches: a point set is an (N, n) array and every
intermediate quantity is a `VJet` carrying values, gradients and Hessians
with respect to the n input coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np


class OutsideDomain(ValueError):
    """A point lies outside every branch of the piecewise function."""


_NODES = 96


@lru_cache(maxsize=None)
def _gl():
    return np.polynomial.legendre.leggauss(_NODES)


@lru_cache(maxsize=None)
def _bump_norm(a: float) -> float:
    x, w = _gl()
    return float((w * _bump(x, a)).sum())


def _bump(v, a):
    v = np.asarray(v, dtype=float)
    out = np.zeros_like(v)
    inside = np.abs(v) < 1
    vi = v[inside]
    out[inside] = np.exp(-a / (1 - vi * vi))
    return out


def _bump_d(v, a):
    v = np.asarray(v, dtype=float)
    out = np.zeros_like(v)
    inside = np.abs(v) < 1
    vi = v[inside]
    out[inside] = np.exp(-a / (1 - vi * vi)) * (-2 * a * vi / (1 - vi * vi) ** 2)
    return out


def smooth_ramp(u, a: float = 1.0):
    """Normalized double integral of the bump exp(-a/(1-v^2)) on [-1, 1].

    Returns (R, R', R'') with R = 0 for u <= -1, R(u) = u for u >= 1 and
    R'' = bump / norm.  Integrals by Gauss-Legendre on [-1, u].
    """
    u = np.asarray(u, dtype=float)
    x, w = _gl()
    z = _bump_norm(a)
    r0 = np.where(u >= 1, u, 0.0)
    r1 = np.where(u >= 1, 1.0, 0.0)
    mid = (u > -1) & (u < 1)
    if mid.any():
        um = u[mid]
        half = (um + 1) / 2
        v = half[:, None] * (x[None, :] + 1) - 1
        ww = half[:, None] * w[None, :]
        b = _bump(v, a) * ww / z
        r1[mid] = b.sum(axis=1)
        r0[mid] = (b * (um[:, None] - v)).sum(axis=1)
    r2 = _bump(u, a) / z
    return r0, r1, r2


def smooth_step(u, a: float):
    """(S, S', S'') of the normalized cumulative bump: 0 below -1, 1 above 1."""
    u = np.asarray(u, dtype=float)
    x, w = _gl()
    z = _bump_norm(a)
    s0 = np.where(u >= 1, 1.0, 0.0)
    mid = (u > -1) & (u < 1)
    if mid.any():
        um = u[mid]
        half = (um + 1) / 2
        v = half[:, None] * (x[None, :] + 1) - 1
        s0[mid] = (_bump(v, a) * half[:, None] * w[None, :]).sum(axis=1) / z
    return s0, _bump(u, a) / z, _bump_d(u, a) / z


@dataclass
class VJet:
    """Batched value / gradient / Hessian."""
    val: np.ndarray
    grad: np.ndarray
    hess: np.ndarray

    @staticmethod
    def seeds(x: np.ndarray, order: int = 2) -> list["VJet"]:
        """One jet per column of x.  order=0 carries values only, order=1
        skips the Hessian (kept as an empty array)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        N, n = x.shape
        k = n if order >= 1 else 0
        kh = n if order >= 2 else 0
        out = []
        for j in range(n):
            g = np.zeros((N, k))
            if k:
                g[:, j] = 1.0
            out.append(VJet(x[:, j].copy(), g, np.zeros((N, kh, kh))))
        return out

    def const(self, c) -> "VJet":
        c = np.broadcast_to(np.asarray(c, dtype=float), self.val.shape).copy()
        return VJet(c, np.zeros_like(self.grad), np.zeros_like(self.hess))

    def chain(self, f0, f1, f2) -> "VJet":
        g = self.grad
        if self.hess.shape[1] == 0:
            return VJet(f0, f1[:, None] * g, self.hess)
        return VJet(f0, f1[:, None] * g,
                    f2[:, None, None] * g[:, :, None] * g[:, None, :] + f1[:, None, None] * self.hess)

    def _lift(self, o) -> "VJet":
        return o if isinstance(o, VJet) else self.const(o)

    def __add__(self, o):
        o = self._lift(o)
        return VJet(self.val + o.val, self.grad + o.grad, self.hess + o.hess)

    __radd__ = __add__

    def __sub__(self, o):
        o = self._lift(o)
        return VJet(self.val - o.val, self.grad - o.grad, self.hess - o.hess)

    def __rsub__(self, o):
        return self._lift(o) - self

    def __neg__(self):
        return VJet(-self.val, -self.grad, -self.hess)

    def __mul__(self, o):
        o = self._lift(o)
        a, b = self.val, o.val
        grad = a[:, None] * o.grad + b[:, None] * self.grad
        if self.hess.shape[1] == 0:
            return VJet(a * b, grad, self.hess)
        cross = self.grad[:, :, None] * o.grad[:, None, :]
        return VJet(a * b, grad,
                    a[:, None, None] * o.hess + b[:, None, None] * self.hess
                    + cross + np.swapaxes(cross, 1, 2))

    __rmul__ = __mul__

    def absolute(self) -> "VJet":
        s = np.sign(self.val)
        return self.chain(np.abs(self.val), s, np.zeros_like(s))

    @staticmethod
    def select(masks, jets, fill=np.nan) -> "VJet":
        """Per-row choice: the first mask that is true picks its jet."""
        ref = jets[0]
        val = np.full(ref.val.shape, fill)
        grad = np.full(ref.grad.shape, fill)
        hess = np.full(ref.hess.shape, fill)
        taken = np.zeros(ref.val.shape, dtype=bool)
        for m, j in zip(masks, jets):
            pick = m & ~taken
            val[pick], grad[pick], hess[pick] = j.val[pick], j.grad[pick], j.hess[pick]
            taken |= pick
        return VJet(val, grad, hess)


@dataclass(frozen=True)
class DiceConfig:
    """n: ambient dimension, rho > 5.  eps defaults to (rho-2)/4.  The aux
    profile and the cutoff chi are built from bumps exp(-a/(1-v^2)) with
    sharpness aux_sharpness and chi_sharpness.  c_const defaults to
    c_safety times the largest admissible C."""
    n: int
    rho: float
    eps: float | None = None
    aux_sharpness: float = 1.0
    chi_sharpness: float = 0.15
    c_safety: float = 0.9
    c_const: float | None = field(default=None)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if not self.rho > 5:
            raise ValueError(f"rho must exceed 5, got {self.rho}")
        if self.eps is None:
            object.__setattr__(self, "eps", (self.rho - 2) / 4)
        if not 0 < self.eps < (self.rho - 2) / 2:
            raise ValueError("eps must lie in (0, (rho-2)/2)")
        bound = self.c_bound()
        if self.c_const is None:
            object.__setattr__(self, "c_const", self.c_safety * bound)
        if not 0 < self.c_const < bound:
            raise ValueError(f"C must lie in (0, {bound})")
        if self.chi_slope_max() > 1.2:
            raise ValueError("chi sharpness gives a cutoff slope above 1.2")

    def c_bound(self) -> float:
        m = max(self.n - 1, 1)
        return (self.rho - 3) / (m * (self.rho - 2) ** 2)

    def chi_slope_max(self) -> float:
        # chi(s) = S(2(s - (rho - 2.5))), peak slope at the bump centre
        return 2 * float(np.exp(-self.chi_sharpness)) / _bump_norm(self.chi_sharpness)


def _arr(s):
    return np.atleast_1d(np.asarray(s, dtype=float))


def aux_values(rho: float, s, sharpness: float = 1.0):
    """(aux, aux', aux'') at s."""
    return smooth_ramp(_arr(s) - (rho - 1), sharpness)


def aux(rho: float, s, sharpness: float = 1.0):
    """Smooth convex ramp: 0 on s <= rho-2, s-(rho-1) on s >= rho."""
    if rho <= 2:
        raise ValueError("aux needs rho > 2")
    v = aux_values(rho, s, sharpness)[0]
    return float(v[0]) if np.ndim(s) == 0 else v


def _aux_jet(rho, u: VJet, sharpness) -> VJet:
    return u.chain(*aux_values(rho, u.val, sharpness))


def _dice_jet(rho, coords: list[VJet], sharpness) -> VJet:
    out = coords[0].const(0.0)
    for c in coords:
        out = out + _aux_jet(rho, c.absolute(), sharpness)
    return out


def dice_jet(cfg: DiceConfig, x, rho: float | None = None, order: int = 2) -> VJet:
    """dice_{n,rho} on an (N, n) batch."""
    r = cfg.rho if rho is None else rho
    return _dice_jet(r, VJet.seeds(x, order), cfg.aux_sharpness)


def dice(n: int, rho: float, x, cfg: DiceConfig | None = None):
    cfg = cfg or DiceConfig(max(n, 1), rho)
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != n:
        raise ValueError(f"expected points in R^{n}")
    v = dice_jet(cfg, x.reshape(-1, n), order=0).val
    return float(v[0]) if x.ndim == 1 else v


# --- the planar function d_rho ---------------------------------------------

BRANCHES = ("o", "u", "l", "lin")


DOMAIN_SLACK = 1e-9


def branch_masks(cfg: DiceConfig, x1, x2):
    """Membership in Q1, Q2, {x1 < eps} and the linear strip, in that order.
    Closed boundaries are widened by DOMAIN_SLACK to absorb rounding."""
    r, e, z = cfg.rho, cfg.eps, DOMAIN_SLACK

    def box(a, lo, hi):
        return (lo - z <= a) & (a <= hi + z)

    q1 = ((box(x1, -e, r) & box(x2, r, r + 1))
          | (box(x1, r - 2, r + 1) & box(x2, r, r + 4)))
    q2 = ((box(x1, -e, r) & box(x2, -(r + 1), -r))
          | (box(x1, r - 2, r + 1) & box(x2, -(r + 4), -r)))
    left = x1 < e
    lin = box(x1, r, r + 1) & (np.abs(x2) > r + 3)
    return q1, q2, left, lin


def _branch_jets(cfg: DiceConfig, x1: VJet, x2: VJet) -> dict[str, VJet]:
    r, a = cfg.rho, cfg.aux_sharpness
    ax1 = _aux_jet(r, x1.absolute(), a)
    shift = 2 * r + 1
    return {
        "l": ax1 + _aux_jet(r, x2.absolute(), a),
        "o": 3.0 - ax1 - _aux_jet(r, (x2 - shift).absolute(), a),
        "u": 3.0 - ax1 - _aux_jet(r, (x2 + shift).absolute(), a),
        "lin": 2.0 - (x1 - r),
    }


def dfun_jet(cfg: DiceConfig, x1: VJet, x2: VJet) -> VJet:
    """Merged d_rho; rows outside all branches become nan."""
    masks = branch_masks(cfg, x1.val, x2.val)
    b = _branch_jets(cfg, x1, x2)
    return VJet.select(masks, [b["o"], b["u"], b["l"], b["lin"]])


def dfun(rho: float, x1: float, x2: float, cfg: DiceConfig | None = None) -> float:
    cfg = cfg or DiceConfig(2, rho)
    s1, s2 = VJet.seeds(np.array([[x1, x2]]), 0)
    v = float(dfun_jet(cfg, s1, s2).val[0])
    if np.isnan(v):
        raise OutsideDomain(f"({x1}, {x2}) lies outside every branch of d_rho")
    return v


def branch_of(cfg: DiceConfig, x1: float, x2: float) -> str | None:
    for name, m in zip(BRANCHES, branch_masks(cfg, np.array([x1]), np.array([x2]))):
        if m[0]:
            return name
    return None


def branch_value(cfg: DiceConfig, name: str, x1, x2):
    """Evaluate one named branch formula without domain checks."""
    x = np.column_stack([_arr(x1), _arr(x2)])
    s1, s2 = VJet.seeds(x, 0)
    return _branch_jets(cfg, s1, s2)[name].val


# --- extension and the final function ---------------------------------------

def _chi_jet(cfg: DiceConfig, s: VJet) -> VJet:
    u = 2 * (s.val - (cfg.rho - 2.5))
    s0, s1, s2 = smooth_step(u, cfg.chi_sharpness)
    return s.chain(s0, 2 * s1, 4 * s2)


def _tilde_jet(cfg: DiceConfig, coords: list[VJet]) -> VJet:
    phi = _dice_jet(cfg.rho - 2, coords, cfg.aux_sharpness) + (cfg.rho - 3)
    chi = _chi_jet(cfg, phi)
    sq = coords[0].const(0.0)
    for c in coords:
        sq = sq + c * c
    return phi * chi + cfg.c_const * (1.0 - chi) * sq


def tilde_dice_jet(cfg: DiceConfig, y, order: int = 2) -> VJet:
    """Extension of dice_{n-1,rho-2} + rho - 3 on an (N, n-1) batch."""
    return _tilde_jet(cfg, VJet.seeds(y, order))


def tilde_dice(m: int, rho: float, y, cfg: DiceConfig | None = None):
    cfg = cfg or DiceConfig(m + 1, rho)
    y = np.asarray(y, dtype=float)
    if y.shape[-1] != m:
        raise ValueError(f"expected points in R^{m}")
    v = tilde_dice_jet(cfg, y.reshape(-1, m), order=0).val
    return float(v[0]) if y.ndim == 1 else v


def frak_d_jet(cfg: DiceConfig, x, order: int = 2) -> VJet:
    """d_rho(x_1, tilde_dice(x_2..x_n)) on an (N, n) batch, nan off-domain."""
    coords = VJet.seeds(x, order)
    if len(coords) < 2:
        raise ValueError("the final dice function needs n >= 2")
    return dfun_jet(cfg, coords[0], _tilde_jet(cfg, coords[1:]))


def frak_d(n: int, rho: float, x, cfg: DiceConfig | None = None):
    cfg = cfg or DiceConfig(n, rho)
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != n:
        raise ValueError(f"expected points in R^{n}")
    v = frak_d_jet(cfg, x.reshape(-1, n), order=0).val
    if x.ndim == 1:
        if np.isnan(v[0]):
            raise OutsideDomain(f"{x.tolist()} lies outside the domain")
        return float(v[0])
    return v
