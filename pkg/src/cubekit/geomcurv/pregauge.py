"""Gram endomorphism and the pre-gauge map between two inner products."""

from __future__ import annotations

import mpmath
import numpy as np


class NotPD(ValueError):
    pass


def _check_pd(H, name):
    H = np.asarray(H, dtype=float)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise NotPD(f"{name} is not square")
    if not np.allclose(H, H.T, rtol=1e-12, atol=1e-12 * max(1.0, np.abs(H).max())):
        raise NotPD(f"{name} is not symmetric")
    ev = np.linalg.eigvalsh(H)
    if ev.min() <= 0:
        raise NotPD(f"{name} is not positive definite (min eigenvalue {ev.min():.3g})")
    return 0.5 * (H + H.T)


def _sym_sqrt(S):
    w, V = np.linalg.eigh(S)
    return (V * np.sqrt(w)) @ V.T, (V / np.sqrt(w)) @ V.T


def gram(H0, H) -> np.ndarray:
    """H0^{-1} H: the endomorphism G with H(v, w) = H0(G v, w)."""
    return np.linalg.solve(_check_pd(H0, "H0"), _check_pd(H, "H"))


def _pre_gauge_mp(H0, H, dps):
    with mpmath.workdps(dps):
        A, B = mpmath.matrix(H0.tolist()), mpmath.matrix(H.tolist())
        w, V = mpmath.eigsy(A)
        S = V * mpmath.diag([mpmath.sqrt(x) for x in w]) * V.T
        Si = V * mpmath.diag([1 / mpmath.sqrt(x) for x in w]) * V.T
        M = Si * B * Si
        w2, W = mpmath.eigsy((M + M.T) / 2)
        T = Si * W * mpmath.diag([mpmath.sqrt(x) for x in w2]) * W.T * S
        return np.array(T.tolist(), dtype=float)


def pre_gauge(H0, H, precision: str = "extended") -> np.ndarray:
    """Positive square root of the Gram endomorphism, self-adjoint for H0.
    It satisfies tau^T H0 tau = H, so tau is an isometry (V, H) -> (V, H0).

    Computed as H0^{-1/2} (H0^{-1/2} H H0^{-1/2})^{1/2} H0^{1/2}; "extended"
    runs the square roots at 40 digits, "double" in numpy."""
    H0, H = _check_pd(H0, "H0"), _check_pd(H, "H")
    if precision == "extended":
        return _pre_gauge_mp(H0, H, 40)
    if precision != "double":
        raise ValueError(f"unknown precision {precision!r}")
    S, Si = _sym_sqrt(H0)
    M = Si @ H @ Si
    root, _ = _sym_sqrt(0.5 * (M + M.T))
    return Si @ root @ S


def pre_gauge_report(H0, H, precision: str = "extended") -> dict:
    """Residuals of the defining properties of tau (relative to the input scale)."""
    H0, H = _check_pd(H0, "H0"), _check_pd(H, "H")
    tau = pre_gauge(H0, H, precision)
    back = pre_gauge(H, H0, precision)
    sc = max(np.abs(H).max(), np.abs(H0).max())

    def rel(A, B, s=1.0):
        return float(np.abs(A - B).max() / (s * max(1.0, np.abs(B).max())))

    ev = np.linalg.eigvals(tau)
    return {
        "isometry": rel(tau.T @ H0 @ tau, H),
        "H0_self_adjoint": rel(H0 @ tau, (H0 @ tau).T),
        "H_self_adjoint": rel(H @ tau, (H @ tau).T),
        "square_is_gram": rel(tau @ tau, gram(H0, H)),
        "inverse_law": rel(back @ tau, np.eye(len(H))),
        "min_eigenvalue": float(ev.real.min()),
        "max_imag_eigenvalue": float(np.abs(ev.imag).max()),
        "scale": float(sc),
    }


def random_pd(rng, n: int, cond: float = 1e4) -> np.ndarray:
    """Random SPD matrix with condition number at most `cond`."""
    Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    w = np.exp(rng.uniform(0, np.log(cond), size=n))
    w[0], w[-1] = 1.0, cond ** rng.uniform(0, 1)
    return (Q * w) @ Q.T
