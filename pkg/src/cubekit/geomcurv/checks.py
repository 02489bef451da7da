"""Sampled verification of the warped, rescaling and suspension identities."""

from __future__ import annotations

from dataclasses import replace
from functools import partial

import numpy as np

from ..exprparse import Bin, DomainError, Num, Var, substitute
from ..parallel import pmap
from .family import MetricFamily, NotPositiveDefinite
from .tensors import SingularMetric, curvature
from .warped import family_jet, oracle_suspension, oracle_warped, warped_terms

SKIP = (NotPositiveDefinite, SingularMetric, DomainError, ArithmeticError)


class PreconditionError(ValueError):
    pass


def _rel(a, b):
    return abs(a - b) / (1 + abs(b))


def _pt(p):
    return [float(v) for v in p]


# ---------------------------------------------------------------- formula vs oracle

def _curv_sample(fam, variant, p):
    try:
        a = warped_terms(fam, p).scal(variant)
        b = oracle_warped(fam, p)
    except SKIP as e:
        return {"rejected": str(e), "point": _pt(p)}
    return {"formula": a, "oracle": b, "abs_err": abs(a - b), "rel_err": _rel(a, b), "point": _pt(p)}


def curvature_check(fam: MetricFamily, samples: int = 100, seed: int | None = None, tol: float = 1e-5,
                    variant: str = "corrected", parallel: bool = False) -> dict:
    """scal of h + f^2 dt^2 by the warped formula (exact jets) against the
    Christoffel finite-difference oracle."""
    if fam.n != 1:
        raise ValueError("curvature check needs a one-parameter family (n = 1)")
    pts = fam.samples(samples, seed)
    res = pmap(partial(_curv_sample, fam, variant), pts, parallel)
    good = [r for r in res if "rejected" not in r]
    rej = [r for r in res if "rejected" in r]
    rep = {"family": fam.name, "variant": variant, "samples": samples, "accepted": len(good),
           "rejected": len(rej), "tol": tol}
    if good:
        worst = max(good, key=lambda r: r["rel_err"])
        rep.update(max_abs_err=max(r["abs_err"] for r in good), max_rel_err=worst["rel_err"],
                   worst=worst, scal_range=[min(r["oracle"] for r in good), max(r["oracle"] for r in good)])
    rep["ok"] = bool(good) and not rej and rep["max_rel_err"] < tol
    if rej:
        rep["first_rejection"] = rej[0]
    return rep


# ---------------------------------------------------------------- rescaling

def rescaled(fam: MetricFamily, R: float, scale_h: bool = True) -> MetricFamily:
    """R^2 _R h + _R f^2 dt^2 (or _R h + ... with scale_h False), where
    _R u(x, t) = u(x, t / R)."""
    sub = {t: Bin("/", Var(t), Num(float(R))) for t in fam.tvars}
    fac = Num(float(R) ** 2)
    ents = {k: (Bin("*", fac, substitute(e, sub)) if scale_h else substitute(e, sub))
            for k, e in fam.entries.items()}
    dom = dict(fam.domain)
    for t in fam.tvars:
        if t in dom:
            dom[t] = (dom[t][0] * R, dom[t][1] * R)
    return replace(fam, entries=ents, f=substitute(fam.f, sub), domain=dom,
                   margin=fam.margin, name=f"{fam.name}@R={R:g}")


def _scaled_point(fam, p, R):
    q = np.array(p, dtype=float)
    q[fam.d:] *= R
    return q


def _rescale_sample(fam, fams, Rs, t_only, p):
    out = {"point": _pt(p)}
    try:
        base_o = oracle_warped(fam, p)
        base_terms = warped_terms(fam, p)
        base_f = base_terms.scal()
        per = []
        for R, (fR, fR2) in zip(Rs, fams):
            q = _scaled_point(fam, p, R)
            o, w = oracle_warped(fR, q), warped_terms(fR, q).scal()
            item = {"R": R, "oracle": o, "formula": w,
                    "id_err_oracle": _rel(o, base_o / R ** 2), "id_err_formula": _rel(w, base_f / R ** 2)}
            if t_only:
                # scal(_R h + _R f^2 dt^2) - _R scal(h), times R^2, against the bracket
                diff = warped_terms(fR2, q).scal() - base_terms.scal_h
                item["second_err"] = _rel(diff * R ** 2, base_terms.derivative_part())
                item["second_diff"] = diff
            per.append(item)
    except SKIP as e:
        return {"rejected": str(e), "point": _pt(p)}
    out["per_R"] = per
    return out


def rescaling_check(fam: MetricFamily, Rs=(1, 2, 4, 8), samples: int = 50, seed: int | None = None,
                    tol: float = 1e-5, parallel: bool = False) -> dict:
    if fam.n != 1:
        raise ValueError("rescaling check needs n = 1")
    Rs = [float(R) for R in Rs]
    t_only = fam.f.variables() <= set(fam.tvars)
    fams = [(rescaled(fam, R), rescaled(fam, R, scale_h=False)) for R in Rs]
    pts = fam.samples(samples, seed)
    res = pmap(partial(_rescale_sample, fam, fams, Rs, t_only), pts, parallel)
    good = [r for r in res if "rejected" not in r]
    rep = {"family": fam.name, "R": Rs, "samples": samples, "accepted": len(good),
           "rejected": len(res) - len(good), "tol": tol, "f_depends_on_t_only": t_only}
    if not good:
        rep["ok"] = False
        return rep
    id_err = max(max(i["id_err_oracle"], i["id_err_formula"]) for r in good for i in r["per_R"])
    maxabs = [max(abs(r["per_R"][k]["oracle"]) for r in good) for k in range(len(Rs))]
    rep["identity_max_rel_err"] = id_err
    rep["max_abs_scal"] = maxabs
    ok = id_err < tol and rep["rejected"] == 0
    if maxabs[0] > 1e-9:
        slope = float(np.polyfit(np.log(Rs), np.log(maxabs), 1)[0])
        rep["decay_exponent"] = slope
        ok = ok and -2.2 <= slope <= -1.8
        if 4.0 in Rs and 8.0 in Rs:
            ratio = maxabs[Rs.index(8.0)] / maxabs[Rs.index(4.0)]
            rep["ratio_8_4"] = ratio
            ok = ok and 0.24 <= ratio <= 0.26
    else:
        rep["decay_exponent"] = None
        ok = ok and max(maxabs) < 1e-6
    if t_only:
        err2 = max(i["second_err"] for r in good for i in r["per_R"])
        rep["second_statement_max_rel_err"] = err2
        rep["second_statement_max_abs_diff"] = [max(abs(r["per_R"][k]["second_diff"]) for r in good)
                                                for k in range(len(Rs))]
        ok = ok and err2 < tol
    rep["ok"] = bool(ok)
    return rep


# ---------------------------------------------------------------- suspension

def _susp_terms(fam: MetricFamily, p):
    J = family_jet(fam, p)
    d, n = fam.d, fam.n
    cur = curvature(J.H, J.dH[:d], J.ddH[:d, :d])
    if np.linalg.eigvalsh(J.H).min() <= 0:
        raise NotPositiveDefinite("slice metric not positive definite")
    A = [cur.ginv @ J.dH[d + j] for j in range(n)]
    B = [cur.ginv @ J.ddH[d + j, d + j] for j in range(n)]
    trA2 = [float(np.trace(a @ a)) for a in A]
    trA = [float(np.trace(a)) for a in A]
    trB = [float(np.trace(b)) for b in B]
    closed = cur.scal + sum(0.75 * x - 0.25 * y * y - z for x, y, z in zip(trA2, trA, trB))
    # scal of the full suspension metric from the same exact jets
    m = d + n
    G, dG, ddG = np.eye(m), np.zeros((m, m, m)), np.zeros((m, m, m, m))
    G[:d, :d], dG[:, :d, :d], ddG[:, :, :d, :d] = J.H, J.dH, J.ddH
    direct = curvature(G, dG, ddG).scal
    slow = sum(abs(x) + abs(z) + y * y for x, y, z in zip(trA2, trA, trB))
    err_sq = 2.0 / 16.0 * sum(y * y for y in trA)
    return {"scal_g": cur.scal, "closed": closed, "jet_direct": direct, "slowness": slow, "err_sq": err_sq}


def _susp_sample(fam, with_oracle, p):
    try:
        t = _susp_terms(fam, p)
        if with_oracle:
            t["oracle"] = oracle_suspension(fam, p)
    except SKIP as e:
        return {"rejected": str(e), "point": _pt(p)}
    t["point"] = _pt(p)
    return t


def predicate(mode: str, d: int, slowness: float, scal_g: float) -> bool:
    if mode == "eighth":
        return slowness < scal_g / 8
    if mode == "chapter7":
        return (1 + d) * slowness < scal_g
    raise ValueError(f"unknown mode {mode!r}")


def lower_factor(mode: str, d: int) -> float:
    """Guaranteed ratio scal(susp g) / scal(g) under the predicate."""
    return 7 / 8 if mode == "eighth" else d / (1 + d)


def _require_unit_warp(fam):
    if not (isinstance(fam.f, Num) and fam.f.value == 1.0):
        raise ValueError("suspension needs f = 1")


def suspension_check(fam: MetricFamily, samples: int = 100, seed: int | None = None, mode: str = "eighth",
                     tol: float = 1e-6, oracle_tol: float = 1e-5, parallel: bool = False) -> dict:
    _require_unit_warp(fam)
    pts = fam.samples(samples, seed)
    res = pmap(partial(_susp_sample, fam, True), pts, parallel)
    good = [r for r in res if "rejected" not in r]
    rep = {"family": fam.name, "mode": mode, "samples": samples, "accepted": len(good),
           "rejected": len(res) - len(good), "tol": tol}
    if not good:
        rep["ok"] = False
        return rep
    resid = max(abs(r["jet_direct"] - r["closed"]) for r in good)
    oerr = max(_rel(r["oracle"], r["closed"]) for r in good)
    nonpos = [r for r in good if r["scal_g"] <= 0]
    held = [r for r in good if r["scal_g"] > 0 and predicate(mode, fam.d, r["slowness"], r["scal_g"])]
    fac = lower_factor(mode, fam.d)
    fails = [r for r in held if not r["closed"] > fac * r["scal_g"]]
    rep.update(identity_residual=resid, oracle_max_rel_err=oerr, predicate_holds=len(held),
               predicate_fails=len(good) - len(held) - len(nonpos), nonpositive_slice_scal=len(nonpos),
               lower_factor=fac, scal_susp_range=[min(r["closed"] for r in good), max(r["closed"] for r in good)])
    if held:
        rep["min_margin"] = min(r["closed"] - fac * r["scal_g"] for r in held)
    if nonpos:
        rep["first_nonpositive_sample"] = nonpos[0]["point"]
    if fails:
        rep["counterexample"] = fails[0]
    rep["ok"] = resid < tol and oerr < oracle_tol and not fails and rep["rejected"] == 0
    return rep


def error_term_check(fam: MetricFamily, samples: int = 100, seed: int | None = None,
                     parallel: bool = False) -> dict:
    """||Err||^2_op = (2/16) sum_k tr(d_k g)^2 against scal(g)/64, only where
    the slowness predicate (1/8 form) holds at every sample."""
    _require_unit_warp(fam)
    pts = fam.samples(samples, seed)
    res = pmap(partial(_susp_sample, fam, False), pts, parallel)
    bad = [r for r in res if "rejected" in r or r["scal_g"] <= 0
           or not predicate("eighth", fam.d, r["slowness"], r["scal_g"])]
    if bad:
        raise PreconditionError(f"slowness predicate fails at {bad[0]['point']}")
    viol = [r for r in res if not r["err_sq"] < r["scal_g"] / 64]
    rep = {"family": fam.name, "samples": samples, "max_err_sq": max(r["err_sq"] for r in res),
           "min_margin": min(r["scal_g"] / 64 - r["err_sq"] for r in res),
           "ok": not viol}
    if viol:
        rep["counterexample"] = viol[0]
    return rep
