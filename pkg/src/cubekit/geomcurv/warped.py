"""Warped-product curvature h(t) + f^2 dt^2 from exact jets, and the FD oracle."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..exprparse import Expr, compile_float, jet
from .family import MetricFamily, NotPositiveDefinite
from .tensors import christoffel, curvature, fd_derivatives

VARIANTS = ("corrected", "stated")


@dataclass
class FamilyJet:
    """Value and first two derivatives over all chart coordinates (x, t)."""
    H: np.ndarray
    dH: np.ndarray
    ddH: np.ndarray
    F: float
    dF: np.ndarray
    ddF: np.ndarray


def family_jet(fam: MetricFamily, point) -> FamilyJet:
    env = fam.env(point)
    seeds = fam.coords
    m, d = len(seeds), fam.d
    H, dH, ddH = np.zeros((d, d)), np.zeros((m, d, d)), np.zeros((m, m, d, d))
    for (a, b), e in fam.entries.items():
        J = jet(e, env, seeds)
        for i, j in {(a - 1, b - 1), (b - 1, a - 1)}:
            H[i, j], dH[:, i, j], ddH[:, :, i, j] = J.val, J.grad, J.hess
    J = jet(fam.f, env, seeds)
    return FamilyJet(H, dH, ddH, J.val, J.grad, J.hess)


def _slice_checked(H):
    ev = np.linalg.eigvalsh(H)
    if ev.min() <= 0:
        raise NotPositiveDefinite(f"slice metric not positive definite (min eigenvalue {ev.min():.3g})")


def slice_curvature(J: FamilyJet, d: int):
    """Curvature of h(t) alone, from the x-block of the jet."""
    return curvature(J.H, J.dH[:d], J.ddH[:d, :d])


@dataclass
class WarpedTerms:
    scal_h: float
    tr_hdot_sq: float      # tr((hdot^op)^2)
    tr_hdot: float         # tr(hdot^op)
    tr_hddot: float        # tr(hddot^op)
    fdot: float
    f: float
    df_sq: float           # |df|^2 on the slice
    lap_f: float           # Laplace-Beltrami of f on the slice

    def scal(self, variant: str = "corrected") -> float:
        f = self.f
        core = self.scal_h + f ** -2 * (0.75 * self.tr_hdot_sq - 0.25 * self.tr_hdot ** 2 - self.tr_hddot
                                        + self.fdot / f * self.tr_hdot)
        if variant == "corrected":
            return core - 2 / f * self.lap_f
        if variant == "stated":
            return core - 4 * f ** -2 * self.df_sq + 2 / f * self.lap_f
        raise ValueError(f"unknown variant {variant!r}")

    def derivative_part(self) -> float:
        """The f^-2(...) bracket, i.e. scal(g) - scal(h) when f depends on t only."""
        f = self.f
        return f ** -2 * (0.75 * self.tr_hdot_sq - 0.25 * self.tr_hdot ** 2 - self.tr_hddot
                          + self.fdot / f * self.tr_hdot)


def warped_terms(fam: MetricFamily, point, tdir: int = 0) -> WarpedTerms:
    """Ingredients of the warped formula with t_{tdir+1} as the normal direction."""
    d = fam.d
    J = family_jet(fam, point)
    _slice_checked(J.H)
    if not J.F > 0:
        raise NotPositiveDefinite("warping function not positive")
    cur = slice_curvature(J, d)
    hinv = cur.ginv
    k = d + tdir
    hd = hinv @ J.dH[k]
    hdd = hinv @ J.ddH[k, k]
    dfx = J.dF[:d]
    hess = J.ddF[:d, :d] - np.einsum("cab,c->ab", cur.gamma, dfx)
    return WarpedTerms(scal_h=cur.scal, tr_hdot_sq=float(np.trace(hd @ hd)), tr_hdot=float(np.trace(hd)),
                       tr_hddot=float(np.trace(hdd)), fdot=float(J.dF[k]), f=float(J.F),
                       df_sq=float(dfx @ hinv @ dfx), lap_f=float(np.einsum("ab,ab->", hinv, hess)))


def scal_warped(fam: MetricFamily, point, variant: str = "corrected") -> float:
    if fam.n != 1:
        raise ValueError("the warped formula needs exactly one parameter t1")
    return warped_terms(fam, point).scal(variant)


# ---------------------------------------------------------------- FD oracle

def _metric_callable(metric, coords: Sequence[str] | None):
    if callable(metric):
        return metric
    rows = [[compile_float(e) for e in row] for row in metric]
    names = list(coords) if coords else [f"x{a}" for a in range(1, len(rows) + 1)]

    def G(x):
        env = dict(zip(names, map(float, x)))
        return np.array([[fn(env) for fn in row] for row in rows])
    return G


def scal_direct(metric: Callable | Sequence[Sequence[Expr]], point, h1: float = 1e-4, h2: float = 1e-3,
                coords: Sequence[str] | None = None) -> float:
    """Scalar curvature by Christoffel symbols from central finite differences.

    `metric` is a callable x -> matrix or a square table of expressions in
    x1..xm (or in `coords`)."""
    G = _metric_callable(metric, coords)
    x = np.asarray(point, dtype=float)
    for s in (-1, 1):
        for c in range(len(x)):
            e = np.zeros(len(x))
            e[c] = s * max(h1, h2) * 2
            if np.linalg.eigvalsh(G(x + e)).min() <= 0:
                raise NotPositiveDefinite("metric not positive definite on the stencil")
    return curvature(*fd_derivatives(G, x, h1, h2)).scal


def oracle_warped(fam: MetricFamily, point, h1=1e-4, h2=1e-3) -> float:
    return scal_direct(fam.warped_metric, np.asarray(point, dtype=float), h1, h2)


def oracle_suspension(fam: MetricFamily, point, h1=1e-4, h2=1e-3) -> float:
    return scal_direct(fam.suspension_metric, np.asarray(point, dtype=float), h1, h2)


# ---------------------------------------------------------------- components

def warped_components(fam: MetricFamily, point, X, Y, U, V, h1=1e-4, h2=1e-3) -> dict:
    """Weingarten map and the three curvature components of h + f^2 dt^2 on
    slice-tangent coordinate vectors, formula (jets) against the FD oracle."""
    d = fam.d
    X, Y, U, V = (np.asarray(v, dtype=float) for v in (X, Y, U, V))
    J = family_jet(fam, point)
    _slice_checked(J.H)
    cur = slice_curvature(J, d)
    f, fdot, dfx = J.F, J.dF[d], J.dF[:d]
    hdot, hddot = J.dH[d], J.ddH[d, d]
    gam = cur.gamma
    hess = J.ddF[:d, :d] - np.einsum("cab,c->ab", gam, dfx)
    hdot_op = cur.ginv @ hdot
    # (nabla_a hdot)_{bc}
    nab = J.ddH[:d, d] - np.einsum("eab,ec->abc", gam, hdot) - np.einsum("eac,be->abc", gam, hdot)
    bil = lambda B, v, w: float(v @ B @ w)

    formula = {
        "weingarten": -0.5 / f * bil(hdot, X, Y),
        "R_UVXY": float(np.einsum("abcd,a,b,c,d->", cur.riem, U, V, X, Y))
        + 0.25 / f ** 2 * (bil(hdot, U, X) * bil(hdot, V, Y) - bil(hdot, U, Y) * bil(hdot, V, X)),
        "R_XYUnu": -0.5 / f * (float(np.einsum("abc,a,b,c->", nab, X, Y, U))
                               - float(np.einsum("abc,a,b,c->", nab, Y, X, U)))
        + 0.5 / f ** 2 * ((X @ dfx) * bil(hdot, Y, U) - (Y @ dfx) * bil(hdot, X, U)),
    }
    base3 = 0.5 / f ** 2 * (fdot / f * bil(hdot, X, Y) - bil(hddot, X, Y) + 0.5 * float((hdot_op @ X) @ hdot @ Y)) \
        - 1 / f * bil(hess, X, Y)
    formula["R_XnunuY"] = base3
    formula["R_XnunuY_stated"] = base3 + (X @ dfx) * (Y @ dfx) / f ** 2

    x = np.asarray(point, dtype=float)
    full = curvature(*fd_derivatives(fam.warped_metric, x, h1, h2))
    ext = lambda v: np.append(v, 0.0)
    nu = np.zeros(d + 1)
    nu[d] = 1.0 / fam.fval(x)
    Xe, Ye, Ue, Ve = map(ext, (X, Y, U, V))
    R = full.riem
    # W(X) = -nabla_X nu; the X(1/f) d_t part is normal and drops out against Y
    nabla_X_nu = np.einsum("kij,i,j->k", full.gamma, Xe, nu)
    oracle = {
        "weingarten": -float(Ye @ full.g @ nabla_X_nu),
        "R_UVXY": float(np.einsum("abcd,a,b,c,d->", R, Ue, Ve, Xe, Ye)),
        "R_XYUnu": float(np.einsum("abcd,a,b,c,d->", R, Xe, Ye, Ue, nu)),
        "R_XnunuY": float(np.einsum("abcd,a,b,c,d->", R, Xe, nu, nu, Ye)),
    }
    oracle["R_XnunuY_stated"] = oracle["R_XnunuY"]
    out = {}
    for key in formula:
        a, b = formula[key], oracle[key]
        out[key] = {"formula": a, "oracle": b, "abs_err": abs(a - b), "rel_err": abs(a - b) / (1 + abs(b))}
    return out
