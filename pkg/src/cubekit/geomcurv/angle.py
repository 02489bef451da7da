"""Pullback of the Euclidean plane under the normal-exponential chart of a
curve with prescribed curvature."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from ..exprparse import Expr, compile_float, parse


class DegenerateFrame(ValueError):
    pass


@dataclass
class AngleChart:
    """Xi_R(r, phi) = gamma_R(phi) + r v_R(phi), where gamma_R has unit speed,
    turning angle theta' = kappa_R and v = (sin theta, -cos theta)."""
    kappa: Expr
    R: float
    phi_lo: float
    phi_hi: float

    def __post_init__(self):
        k = compile_float(self.kappa)
        R = float(self.R)
        self.kappa_R = lambda phi: k({"t1": phi / R}) / R
        pad = 0.1 * (self.phi_hi - self.phi_lo) + 1e-3
        lo, hi = self.phi_lo - pad, self.phi_hi + pad

        def rhs(phi, y):
            th = y[0]
            return [self.kappa_R(phi), np.cos(th), np.sin(th)]

        sol = solve_ivp(rhs, (lo, hi), [0.0, 0.0, 0.0], method="DOP853",
                        rtol=1e-13, atol=1e-13, dense_output=True)
        if not sol.success:
            raise RuntimeError(sol.message)
        self._sol = sol.sol
        self._y0 = sol.y[:, 0]

    def frame(self, phi: float):
        th, gx, gy = self._sol(phi)
        return np.array([gx, gy]), np.array([np.sin(th), -np.cos(th)]), th

    def xi(self, r: float, phi: float) -> np.ndarray:
        g, v, _ = self.frame(phi)
        return g + r * v

    def pullback_fd(self, r: float, phi: float, h: float = 1e-5) -> np.ndarray:
        dr = (self.xi(r + h, phi) - self.xi(r - h, phi)) / (2 * h)
        dp = (self.xi(r, phi + h) - self.xi(r, phi - h)) / (2 * h)
        J = np.column_stack([dr, dp])
        return J.T @ J

    def pullback_closed(self, r: float, phi: float) -> np.ndarray:
        s = 1 + r * self.kappa_R(phi)
        return np.diag([1.0, s * s])


def angle_chart_check(kappa: Expr | str, R: float = 1.0, samples: int = 200, seed: int = 0,
                      r_max: float = 1.0, phi_range: tuple[float, float] = (0.0, 2 * np.pi),
                      tol: float = 1e-5, polar_radius: float | None = None) -> dict:
    """Compare the FD pullback with dr^2 + (1 + r kappa_R)^2 dphi^2 on a
    sampled strip. With polar_radius = rho (kappa = 1/rho), also compare the
    chart itself with polar coordinates around the circle's centre."""
    if isinstance(kappa, str):
        kappa = parse(kappa, allowed={"t1"})
    rng = np.random.default_rng(seed)
    lo, hi = phi_range
    chart = AngleChart(kappa, R, lo, hi)
    pts = np.column_stack([rng.uniform(0, r_max, samples), rng.uniform(lo, hi, samples)])
    for r, phi in pts:
        if 1 + r * chart.kappa_R(phi) <= 0:
            raise DegenerateFrame(f"1 + r kappa_R <= 0 at r={r}, phi={phi}")
    errs = [float(np.abs(chart.pullback_fd(r, p) - chart.pullback_closed(r, p)).max()) for r, p in pts]
    worst = int(np.argmax(errs))
    rep = {"ok": max(errs) < tol, "samples": samples, "R": R, "max_entry_error": max(errs),
           "worst_point": {"r": float(pts[worst, 0]), "phi": float(pts[worst, 1])}, "tol": tol}
    if polar_radius is not None:
        rho = float(polar_radius) * R
        g0, v0, th0 = chart.frame(0.0)
        centre = g0 - rho * v0
        perr = 0.0
        merr = 0.0
        for r, phi in pts:
            ang = th0 + phi / rho - np.pi / 2
            polar = centre + (rho + r) * np.array([np.cos(ang), np.sin(ang)])
            perr = max(perr, float(np.abs(chart.xi(r, phi) - polar).max()))
            exact = np.diag([1.0, (1 + r / rho) ** 2])
            merr = max(merr, float(np.abs(chart.pullback_fd(r, phi) - exact).max()))
        rep["polar_point_error"] = perr
        rep["polar_metric_error"] = merr
        rep["ok"] = rep["ok"] and perr < tol and merr < tol
    return rep
