"""Sampled verification of the regular-value, derivative-support and
target-control properties of the dice functions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..parallel import pmap
from .functions import DiceConfig, dice_jet, frak_d_jet, tilde_dice_jet

GRAD_TOL = 1e-9
CHUNK = 1000


@dataclass
class ScanReport:
    ok: bool
    counts: dict
    violations: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"ok": self.ok, "counts": self.counts, "violations": self.violations}


def _value(cfg, x):
    return frak_d_jet(cfg, x, order=0).val


def bisect_rays(cfg: DiceConfig, starts, dirs, targets, r_max: float, step: float = 0.5,
                iters: int = 60):
    """First point along each ray start + r*dir (0 <= r <= r_max) where the
    final dice function crosses its target level.  Off-domain points stop the
    search.  Returns (points, found)."""
    starts = np.asarray(starts, float)
    dirs = np.asarray(dirs, float)
    N, n = starts.shape
    rs = np.arange(0.0, r_max + step / 2, step)
    lo = np.full(N, np.nan)
    hi = np.full(N, np.nan)
    sign0 = None
    alive = np.ones(N, bool)
    prev = None
    for r in rs:
        v = _value(cfg, starts + r * dirs) - targets
        if prev is None:
            sign0 = np.sign(v)
            alive &= np.isfinite(v) & (v != 0)
        else:
            alive &= np.isfinite(v)
            hit = alive & np.isnan(lo) & (np.sign(v) != sign0)
            lo[hit] = r - step
            hi[hit] = r
        if np.all(~np.isnan(lo) | ~alive):
            break
        prev = v
    found = ~np.isnan(lo)
    a, b = lo[found], hi[found]
    s0, d0, t0, sg = starts[found], dirs[found], targets[found], sign0[found]
    ok = np.ones(len(a), bool)
    for _ in range(iters):
        m = (a + b) / 2
        v = _value(cfg, s0 + m[:, None] * d0) - t0
        ok &= np.isfinite(v)
        same = np.sign(v) == sg
        a = np.where(same, m, a)
        b = np.where(same, b, m)
    pts = np.full((N, n), np.nan)
    sel = np.flatnonzero(found)
    good = sel[ok]
    pts[good] = s0[ok] + ((a + b) / 2)[ok][:, None] * d0[ok]
    found[sel[~ok]] = False
    return pts, found


def _unit(rng, N, n):
    v = rng.standard_normal((N, n))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def arm_starts(cfg: DiceConfig, rng, N: int, far: tuple[float, float] = (1.0, 15.0)):
    """Start points at x1 = rho-2 (or rho in the linear strip) whose
    tail coordinates have tilde_dice - rho in the interval `far`."""
    n, r = cfg.n, cfg.rho
    out = []
    lo, hi = r + far[0], r + far[1]
    while sum(len(o) for o in out) < N:
        y = rng.uniform(-hi, hi, (4 * N, n - 1))
        if n == 2:
            y = np.sign(y) * rng.uniform(lo, hi, (4 * N, 1))
        td = tilde_dice_jet(cfg, y, order=0).val
        keep = (td >= lo) & (td <= hi)
        x1 = np.where(td[keep] > r + 4, r, r - 2)
        out.append(np.column_stack([x1, y[keep]]))
    return np.concatenate(out)[:N]


def level_points(cfg: DiceConfig, N: int, rng, levels=(1.0, 2.0), arm_fraction: float = 0.3):
    """N points on level sets of the final dice function, targets uniform in
    `levels` (or fixed if levels is a number), found by bisection along rays
    from the origin and along +e1 from the arms."""
    n = cfg.n
    pts, tg = [], []
    n_arm = int(round(arm_fraction * N))
    need_origin = N - n_arm

    def targets(k):
        if np.isscalar(levels):
            return np.full(k, float(levels))
        return rng.uniform(levels[0], levels[1], k)

    got = 0
    while got < need_origin:
        k = 2 * (need_origin - got) + 16
        d = _unit(rng, k, n)
        t = targets(k)
        p, f = bisect_rays(cfg, np.zeros((k, n)), d, t, r_max=3 * cfg.rho + 10)
        p, t = p[f][: need_origin - got], t[f][: need_origin - got]
        pts.append(p)
        tg.append(t)
        got += len(p)
    if n_arm:
        s = arm_starts(cfg, rng, n_arm)
        e1 = np.zeros((n_arm, n))
        e1[:, 0] = 1.0
        t = targets(n_arm)
        p, f = bisect_rays(cfg, s, e1, t, r_max=3.5, step=0.25)
        pts.append(p[f])
        tg.append(t[f])
    return np.concatenate(pts), np.concatenate(tg)


def _check_level_chunk(args):
    cfg, pts, tg = args
    j = frak_d_jet(cfg, pts, order=1)
    out = []
    r4 = cfg.rho - 4
    for i in range(len(pts)):
        x, g = pts[i], j.grad[i]
        w = [round(float(v), 12) for v in x]
        if not np.all(np.isfinite(g)) or abs(j.val[i] - tg[i]) > 1e-8:
            out.append({"property": "located", "point": w, "value": float(j.val[i])})
            continue
        if np.linalg.norm(g) <= GRAD_TOL:
            out.append({"property": "regular", "point": w, "grad": g.tolist()})
        for k in range(len(x)):
            if abs(g[k]) > GRAD_TOL and not abs(x[k]) > r4:
                out.append({"property": "support", "point": w, "index": k + 1,
                            "partial": float(g[k])})
        if x[0] >= -r4 and np.all(np.abs(x[1:]) <= r4):
            out.append({"property": "target_control", "point": w})
    return out


def _check_cuboid_chunk(args):
    cfg, pts = args
    v = frak_d_jet(cfg, pts, order=0).val
    bad = np.isfinite(v) & (v >= 1) & (v <= 2)
    return [{"property": "cuboid", "point": [round(float(c), 12) for c in pts[i]], "value": float(v[i])}
            for i in np.flatnonzero(bad)]


def _check_dice_chunk(args):
    cfg, pts = args
    j = dice_jet(cfg, pts, order=1)
    crit = np.linalg.norm(j.grad, axis=1) <= GRAD_TOL
    # aux convex with aux(rho-2) = 0 gives aux <= 2 aux' on [rho-2, rho], so a
    # point with |grad| <= tol has value <= 2 n tol; above that it is positive
    bad = crit & (j.val > 2 * cfg.n * GRAD_TOL)
    viol = [{"property": "dice_critical", "point": [round(float(c), 12) for c in pts[i]],
             "value": float(j.val[i])} for i in np.flatnonzero(bad)]
    return viol, int(crit.sum())


def _chunks(arr, size=CHUNK):
    return [arr[i:i + size] for i in range(0, len(arr), size)]


def property_scan(cfg: DiceConfig, samples: int = 10_000, seed: int = 0, parallel: bool = False) -> ScanReport:
    """Check, at sampled points:
    level-set points of the final function are regular, nonzero partials
    sit at |x_j| > rho-4, level-set points avoid the half-cuboid, cuboid
    samples have values outside [1, 2], and critical points of dice have
    value 0."""
    if cfg.n < 2:
        raise ValueError("property_scan needs n >= 2")
    rng = np.random.default_rng(seed)
    n, r = cfg.n, cfg.rho
    pts, tg = level_points(cfg, samples, rng)
    cub = np.column_stack([rng.uniform(-(r - 4), 3 * r, samples),
                           rng.uniform(-(r - 4), r - 4, (samples, n - 1))])
    # dice samples: half in a box around the level sets, half near the axes
    box = rng.uniform(-(r + 2), r + 2, (samples, n))
    axes = box.copy()
    half = samples // 2
    zero = rng.random((half, n)) < 0.5
    axes[:half][zero] = rng.uniform(-(r - 2), r - 2, zero.sum())
    dpts = np.concatenate([box[: samples - half], axes[:half]])

    lv = pmap(_check_level_chunk, [(cfg, p, t) for p, t in zip(_chunks(pts), _chunks(tg))], parallel)
    cv = pmap(_check_cuboid_chunk, [(cfg, p) for p in _chunks(cub)], parallel)
    dv = pmap(_check_dice_chunk, [(cfg, p) for p in _chunks(dpts)], parallel)
    violations = [v for c in lv for v in c] + [v for c in cv for v in c] + [v for c, _ in dv for v in c]
    counts = {
        "level_points": int(len(pts)),
        "cuboid_points": int(len(cub)),
        "dice_points": int(len(dpts)),
        "dice_critical_points": int(sum(k for _, k in dv)),
        "violations": len(violations),
    }
    return ScanReport(ok=not violations and len(pts) == samples, counts=counts, violations=violations[:20])
