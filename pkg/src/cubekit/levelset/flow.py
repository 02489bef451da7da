"""Normalized gradient flow of the final dice function and the pullback
decomposition of the Euclidean metric along it."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..parallel import pmap
from .functions import DiceConfig, frak_d_jet, tilde_dice_jet
from .scan import arm_starts, bisect_rays, level_points

T0 = 1.9
CHECKPOINTS = (1.0, 1.2, 1.4, 1.6, 1.8, 1.9, 2.0)
LEVEL_TOL = 1e-5
ORTHO_TOL = 1e-4
DT2_TOL = 1e-4
TRANSLATION_TOL = 1e-9


class FlowError(RuntimeError):
    def __init__(self, msg, point=None):
        super().__init__(msg)
        self.point = point


def velocity(cfg: DiceConfig, x: np.ndarray) -> np.ndarray:
    """grad / |grad|^2 on an (N, n) batch."""
    j = frak_d_jet(cfg, x, order=1)
    g = j.grad
    bad = ~np.all(np.isfinite(g), axis=1)
    if bad.any():
        raise FlowError("flow leaves the domain", x[np.flatnonzero(bad)[0]].tolist())
    sq = (g * g).sum(axis=1)
    if (sq < 1e-24).any():
        raise FlowError("step rejected: vanishing gradient", x[np.flatnonzero(sq < 1e-24)[0]].tolist())
    return g / sq[:, None]


def rk4(cfg: DiceConfig, x: np.ndarray, t_from: float, t_to: float, step: float) -> np.ndarray:
    """Fixed-step classical Runge-Kutta; the field is autonomous."""
    if t_to == t_from:
        return x.copy()
    k = max(1, int(np.ceil(abs(t_to - t_from) / step - 1e-12)))
    h = (t_to - t_from) / k
    y = x.copy()
    for _ in range(k):
        a = velocity(cfg, y)
        b = velocity(cfg, y + h / 2 * a)
        c = velocity(cfg, y + h / 2 * b)
        d = velocity(cfg, y + h * c)
        y = y + h / 6 * (a + 2 * b + 2 * c + d)
    return y


def flow_to(cfg: DiceConfig, x: np.ndarray, times=CHECKPOINTS, step: float = 0.01) -> dict:
    """States at each time, integrating outward from T0 in both directions."""
    out = {T0: x.copy()}
    for side in (sorted([t for t in times if t < T0], reverse=True), sorted([t for t in times if t > T0])):
        y, t = x, T0
        for s in side:
            y = rk4(cfg, y, t, s, step)
            t = s
            out[s] = y
    return {t: out[t] for t in times}


def project_to_level(cfg: DiceConfig, y: np.ndarray, level: float, iters: int = 6) -> np.ndarray:
    """Newton steps along the gradient onto a level set."""
    for _ in range(iters):
        j = frak_d_jet(cfg, y, order=1)
        sq = (j.grad ** 2).sum(axis=1)
        y = y - ((j.val - level) / sq)[:, None] * j.grad
    return y


def tangent_basis(g: np.ndarray) -> np.ndarray:
    """Orthonormal basis (n-1, n) of the complement of g."""
    n = len(g)
    q, _ = np.linalg.qr(np.column_stack([g, np.eye(n)]))
    return q[:, 1:n].T


@dataclass
class FlowReport:
    ok: bool
    trajectories: int
    far_field: int
    max_level_error: float
    max_ortho_residual: float
    max_dt2_error: float
    max_translation_error: float
    violations: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "trajectories": self.trajectories,
            "far_field": self.far_field,
            "max_level_error": self.max_level_error,
            "max_ortho_residual": self.max_ortho_residual,
            "max_dt2_error": self.max_dt2_error,
            "max_translation_error": self.max_translation_error,
            "violations": self.violations,
        }


def _one(args):
    """Checks for a single start point on the T0 level."""
    cfg, x, step, delta, eta, far = args
    n = cfg.n
    x = x[None, :]
    g0 = frak_d_jet(cfg, x, order=1).grad[0]
    taus = tangent_basis(g0)
    nb = [project_to_level(cfg, x + s * delta * t[None, :], T0) for t in taus for s in (1, -1)]
    batch = np.concatenate([x] + nb)
    states = flow_to(cfg, batch, step=step)
    res = {"level": 0.0, "ortho": 0.0, "dt2": 0.0, "trans": 0.0, "bad": []}
    for t, ys in states.items():
        y = ys[:1]
        lv = abs(float(frak_d_jet(cfg, y, order=0).val[0]) - t)
        v = velocity(cfg, y)[0]
        # second-order difference quotient in t of the flow itself
        if t - eta < 1.0:
            dphi = (-3 * y + 4 * rk4(cfg, y, t, t + eta, eta) - rk4(cfg, y, t, t + 2 * eta, eta))[0] / (2 * eta)
        elif t + eta > 2.0:
            dphi = (3 * y - 4 * rk4(cfg, y, t, t - eta, eta) + rk4(cfg, y, t, t - 2 * eta, eta))[0] / (2 * eta)
        else:
            dphi = (rk4(cfg, y, t, t + eta, eta) - rk4(cfg, y, t, t - eta, eta))[0] / (2 * eta)
        gsq = float((frak_d_jet(cfg, y, order=1).grad[0] ** 2).sum())
        dt2 = abs(float(dphi @ dphi) * gsq - 1.0)
        ortho = 0.0
        for i in range(n - 1):
            tang = (ys[1 + 2 * i] - ys[2 + 2 * i]) / (2 * delta)
            ortho = max(ortho, abs(float(v @ tang)) / float(np.linalg.norm(v) * np.linalg.norm(tang)))
        res["level"] = max(res["level"], lv)
        res["ortho"] = max(res["ortho"], ortho)
        res["dt2"] = max(res["dt2"], dt2)
        if far:
            expect = x[0].copy()
            expect[0] -= t - T0
            res["trans"] = max(res["trans"], float(np.abs(y[0] - expect).max()))
        w = [round(float(c), 12) for c in x[0]]
        if lv > LEVEL_TOL:
            res["bad"].append({"property": "level", "point": w, "t": t, "error": lv})
        if ortho > ORTHO_TOL:
            res["bad"].append({"property": "orthogonal", "point": w, "t": t, "residual": ortho})
        if dt2 > DT2_TOL:
            res["bad"].append({"property": "dt2", "point": w, "t": t, "error": dt2})
        if far and res["trans"] > TRANSLATION_TOL:
            res["bad"].append({"property": "translation", "point": w, "t": t, "error": res["trans"]})
    return res


def far_field_starts(cfg: DiceConfig, rng, N: int) -> np.ndarray:
    """Level-T0 points whose tail has tilde_dice > rho + 3 (outside the compact window)."""
    s = arm_starts(cfg, rng, N, far=(3.5, 15.0))
    e1 = np.zeros_like(s)
    e1[:, 0] = 1.0
    p, f = bisect_rays(cfg, s, e1, np.full(len(s), T0), r_max=3.5, step=0.25)
    return p[f]


def flow_decomposition_check(cfg: DiceConfig, samples: int = 50, ode_step: float = 0.01, seed: int = 0,
                             far_samples: int = 10, delta: float = 1e-3, eta: float = 1e-4,
                             parallel: bool = False) -> FlowReport:
    """Flow `samples` bisection-located points of the T0 level to the
    checkpoint levels in [1, 2] and check level tracking, orthogonality of
    the flow to the level sets, the dt^2 coefficient |grad|^-2 and, for
    far-field starts, the translation x - (t - T0) e1."""
    rng = np.random.default_rng(seed)
    starts, _ = level_points(cfg, samples, rng, levels=T0)
    far = far_field_starts(cfg, rng, far_samples) if far_samples else np.zeros((0, cfg.n))
    if far_samples:
        td = tilde_dice_jet(cfg, far[:, 1:], order=0).val
        if not (td > cfg.rho + 3).all():
            raise FlowError("far-field start inside the compact window")
    jobs = [(cfg, x, ode_step, delta, eta, False) for x in starts]
    jobs += [(cfg, x, ode_step, delta, eta, True) for x in far]
    results = pmap(_one, jobs, parallel, chunks=1)
    bad = [b for r in results for b in r["bad"]]
    return FlowReport(
        ok=not bad and len(starts) == samples and len(far) == far_samples,
        trajectories=len(starts),
        far_field=len(far),
        max_level_error=max((r["level"] for r in results), default=0.0),
        max_ortho_residual=max((r["ortho"] for r in results), default=0.0),
        max_dt2_error=max((r["dt2"] for r in results), default=0.0),
        max_translation_error=max((r["trans"] for r in results[len(starts):]), default=0.0),
        violations=bad[:20],
    )
