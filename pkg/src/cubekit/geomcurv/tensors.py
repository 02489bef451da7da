"""Coordinate curvature from a metric and its first two derivatives.

Index conventions: dg[c, a, b] = d_c g_ab, ddg[c, e, a, b] = d_c d_e g_ab.
Riem[a, b, c, d] = <R(d_a, d_b) d_c, d_d> with R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y],
so sectional curvature is Riem[a, b, b, a] / |d_a ^ d_b|^2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


class SingularMetric(ValueError):
    pass


@dataclass
class Curvature:
    g: np.ndarray
    ginv: np.ndarray
    gamma: np.ndarray      # gamma[k, i, j] = Gamma^k_ij
    riem: np.ndarray
    ric: np.ndarray
    scal: float


def christoffel(g: np.ndarray, dg: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(ginv, Gamma^k_ij) by 2 Gamma_ij^k = g^{kl}(d_j g_il + d_i g_lj - d_l g_ij)."""
    try:
        ginv = np.linalg.inv(g)
    except np.linalg.LinAlgError:
        raise SingularMetric("metric matrix is singular") from None
    low = 0.5 * (np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg)
    return ginv, np.einsum("kl,lij->kij", ginv, low)


def curvature(g: np.ndarray, dg: np.ndarray, ddg: np.ndarray) -> Curvature:
    ginv, gam = christoffel(g, dg)
    low = 0.5 * (np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg)
    dlow = 0.5 * (np.einsum("mijl->mlij", ddg) + np.einsum("mjil->mlij", ddg) - ddg)
    dginv = -np.einsum("ka,mab,bl->mkl", ginv, dg, ginv)
    # dgam[m, k, i, j] = d_m Gamma^k_ij
    dgam = np.einsum("mkl,lij->mkij", dginv, low) + np.einsum("kl,mlij->mkij", ginv, dlow)
    # (R(d_a, d_b) d_c)^l
    rup = (np.einsum("albc->labc", dgam) - np.einsum("blac->labc", dgam)
           + np.einsum("lam,mbc->labc", gam, gam) - np.einsum("lbm,mac->labc", gam, gam))
    riem = np.einsum("dl,labc->abcd", g, rup)
    ric = np.einsum("ad,abcd->bc", ginv, riem)
    scal = float(np.einsum("bc,bc->", ginv, ric))
    return Curvature(g, ginv, gam, riem, ric, scal)


def fd_derivatives(metric: Callable[[np.ndarray], np.ndarray], x: np.ndarray,
                   h1: float = 1e-4, h2: float = 1e-3):
    """g, dg by central differences of step h1 and ddg of step h2."""
    x = np.asarray(x, dtype=float)
    m = len(x)
    g = metric(x)
    k = g.shape[0]
    dg = np.zeros((m, k, k))
    ddg = np.zeros((m, m, k, k))
    E = np.eye(m)
    for c in range(m):
        dg[c] = (metric(x + h1 * E[c]) - metric(x - h1 * E[c])) / (2 * h1)
        ddg[c, c] = (metric(x + h2 * E[c]) - 2 * g + metric(x - h2 * E[c])) / h2 ** 2
        for e in range(c):
            v = (metric(x + h2 * (E[c] + E[e])) - metric(x + h2 * (E[c] - E[e]))
                 - metric(x - h2 * (E[c] - E[e])) + metric(x - h2 * (E[c] + E[e]))) / (4 * h2 ** 2)
            ddg[c, e] = ddg[e, c] = v
    return g, dg, ddg


def scal_fd(metric: Callable[[np.ndarray], np.ndarray], x, h1: float = 1e-4, h2: float = 1e-3) -> float:
    return curvature(*fd_derivatives(metric, x, h1, h2)).scal
