"""Command-line entry point.  Every subcommand writes one JSON report to
stdout (sorted keys, no timestamps) and a one-line summary to stderr.

Exit codes: 0 all checks pass, 1 a verified counterexample or violation,
2 input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import cubset as cs
from . import kan
from . import zlinalg as zl
from .exprparse import ParseError


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _digest(paths) -> dict:
    out = {}
    for p in paths:
        try:
            out[str(p)] = hashlib.sha256(Path(p).read_bytes()).hexdigest()
        except OSError as e:
            raise InputError(f"cannot read {p}: {e.strerror}") from None
    return out


def jsonable(obj):
    if isinstance(obj, dict):
        return {str(k) if not isinstance(k, tuple) else ",".join(map(str, k)): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (str, int)) or obj is None:
        return obj
    return str(obj)


def _one_input(a, flag="input"):
    v = getattr(a, flag)
    if isinstance(v, list):
        if len(v) != 1:
            raise InputError(f"expected exactly one --{flag}")
        v = v[0]
    if v is None:
        raise InputError(f"--{flag} is required")
    return v


# ---------------------------------------------------------------- cubical

def _load_set(path):
    return cs.load_cubical_set(path)


def cmd_validate(a):
    path = _one_input(a)
    if _is_map_file(path):
        f = cs.load_map(path)
        rep = cs.validate_map(f)
        res = {"kind": "map", "checked": rep.checked, "violations": rep.violations}
    else:
        X = _load_set(path)
        rep = cs.validate(X)
        res = {"kind": "cubical_set", "cells": X.cell_counts(), "trunc": X.trunc_dim,
               "checked": rep.checked, "violations": rep.violations}
    return rep.ok, res, f"{'valid' if rep.ok else 'invalid'}: {rep.checked} identities checked", [path]


def _is_map_file(path) -> bool:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    return any(ln.split("#", 1)[0].split()[:1] == ["source"] for ln in text.splitlines())


def _max_dim(a, X):
    n = a.max_dim if a.max_dim is not None else min(X.trunc_dim, 3)
    if n > X.trunc_dim:
        raise InputError(f"--max-dim {n} exceeds the truncation {X.trunc_dim}")
    return n


def _order(a):
    return "reversed" if a.order == "reversed" else "forward"


def cmd_kan(a):
    path = _one_input(a)
    X = _load_set(path)
    v = kan.is_kan(X, _max_dim(a, X), order=_order(a))
    return v.ok, v.to_json(), v.summary(), [path]


def cmd_contractible(a):
    path = _one_input(a)
    X = _load_set(path)
    v = kan.is_contractible(X, _max_dim(a, X), order=_order(a))
    res = v.to_json()
    if v.ok:
        kv = kan.is_kan(X, v.up_to, order=_order(a))
        res["implies_kan"] = kv.ok
        if not kv.ok:
            res["kan_counterexample"] = kv.counterexample
            return False, res, "contractible but not Kan", [path]
    return v.ok, res, v.summary(), [path]


def cmd_fibration(a):
    path = _one_input(a)
    f = cs.load_map(path)
    n = a.max_dim if a.max_dim is not None else min(f.source.trunc_dim, f.target.trunc_dim, 3)
    if n > min(f.source.trunc_dim, f.target.trunc_dim):
        raise InputError("--max-dim exceeds the truncation")
    vm = cs.validate_map(f)
    if not vm.ok:
        return False, {"map_violations": vm.violations}, "not a cubical map", [path]
    v = kan.is_kan_fibration(f, n, order=_order(a))
    return v.ok, v.to_json(), v.summary(), [path]


def cmd_pi0(a):
    path = _one_input(a)
    X = _load_set(path)
    comps = kan.pi0(X)
    return True, {"components": comps, "count": len(comps)}, f"{len(comps)} path components", [path]


def cmd_pi(a):
    path = _one_input(a)
    X = _load_set(path)
    n = a.n if a.n is not None else 1
    if n < 1:
        raise InputError("--n must be at least 1; use pi0")
    if n + 1 > X.trunc_dim:
        raise InputError(f"pi_{n} needs truncation at least {n + 1}")
    base = a.base if a.base is not None else X.gens(0)[0] if X.gens(0) else None
    if base not in X.dim_of or X.dim_of[base] != 0:
        raise InputError(f"basepoint {base!r} is not a vertex")
    v = kan.is_kan(X, n + 1, order=_order(a), memo=True)
    if not v.ok:
        return False, {"kan": v.to_json()}, f"not Kan up to {n + 1}: pi_{n} undefined", [path]
    try:
        G = kan.pi_n(X, base, n, v, order=_order(a))
    except kan.GroupAxiomError as e:
        return False, {"kan": v.to_json(), "group_axiom_failure": str(e)}, str(e), [path]
    res = G.to_json()
    res["group_axioms"] = kan.check_group_table(G.table) == G.identity
    return True, res, f"|pi_{n}| = {G.order}", [path]


def _homology_json(X):
    C = zl.cubical_chain_complex(X)
    bad = C.check()
    H = zl.homology_all(C) if not bad else []
    return {
        "cells": X.cell_counts(),
        "d_squared_zero": not bad,
        "euler_characteristic": X.euler_characteristic(),
        "homology": {str(k): h.as_dict() for k, h in enumerate(H)},
        "homology_euler": sum((-1) ** k * h.rank for k, h in enumerate(H)),
    }, bad


def cmd_homology(a):
    path = _one_input(a)
    X = _load_set(path)
    res, bad = _homology_json(X)
    ok = not bad and res["homology_euler"] == res["euler_characteristic"]
    text = ", ".join(f"H{k}={v['text']}" for k, v in res["homology"].items())
    return ok, res, text or "d o d != 0", [path]


def cmd_product(a):
    paths = a.input or []
    if len(paths) != 2:
        raise InputError("product needs two --input files")
    X, Y = (_load_set(p) for p in paths)
    P = cs.reduced_product(X, Y)
    rep = cs.validate(P)
    res, bad = _homology_json(P)
    res.update(trunc=P.trunc_dim, identities_checked=rep.checked, violations=rep.violations,
               cells_expected=[sum(x * y for i, x in enumerate(X.cell_counts()) for j, y in enumerate(Y.cell_counts())
                                   if i + j == k) for k in range(P.max_gen_dim() + 1)])
    ok = rep.ok and not bad and res["cells"] == res["cells_expected"]
    text = ", ".join(f"H{k}={v['text']}" for k, v in res["homology"].items())
    return ok, res, f"product cells {res['cells']}; {text}", paths


# ---------------------------------------------------------------- spectral sequence

def cmd_specseq(a):
    from . import specseq as ss
    path = _one_input(a, "couple")
    R = a.pages if a.pages is not None else 3
    C = ss.load_couple(path, R + 1)
    val = ss.validate_couple(C)
    res = {"engine": C.eng.name, "validate": val.to_json()}
    if not val.ok:
        return False, res, "couple fails exactness", [path]
    P = ss.Pages(C)
    res["pages"] = {str(r): P.page(r) for r in range(1, R + 2)}
    pc = ss.page_checks(C, R, P)
    hs = {str(r): ss.homology_step_check(C, r, P).to_json() for r in range(1, R + 1)}
    st = ss.stabilization(C, R + 1, P)
    cv = ss.convergence_check(C, R + 1, P)
    res.update(page_checks=pc.to_json(), homology_step=hs,
               stabilization={f"{p},{q}": v for (p, q), v in sorted(st.items())},
               convergence=cv.to_json())
    ok = pc.ok and all(v["ok"] for v in hs.values()) and cv.ok
    return ok, res, f"pages 1..{R + 1}: {'consistent' if ok else 'violations found'}", [path]


# ---------------------------------------------------------------- geometry

def _family(a):
    from .geomcurv import load_family
    path = _one_input(a, "family")
    return load_family(path), path


def cmd_curvature(a):
    from .geomcurv import curvature_check
    fam, path = _family(a)
    rep = curvature_check(fam, a.samples or 100, a.seed, a.tol or 1e-5, a.variant, a.parallel == "on")
    return rep["ok"], rep, f"max relative error {rep.get('max_rel_err')}", [path]


def cmd_rescale(a):
    from .geomcurv import rescaling_check
    fam, path = _family(a)
    rep = rescaling_check(fam, samples=a.samples or 50, seed=a.seed, tol=a.tol or 1e-5,
                          parallel=a.parallel == "on")
    return rep["ok"], rep, f"decay exponent {rep.get('decay_exponent')}", [path]


def cmd_suspension(a):
    from .geomcurv import PreconditionError, error_term_check, suspension_check
    fam, path = _family(a)
    k = a.samples or 100
    rep = suspension_check(fam, k, a.seed, a.mode, a.tol or 1e-6, parallel=a.parallel == "on")
    ok = rep["ok"]
    try:
        et = error_term_check(fam, k, a.seed, parallel=a.parallel == "on")
        rep["error_term"] = et
        ok = ok and et["ok"]
    except PreconditionError as e:
        rep["error_term"] = {"skipped": str(e)}
    return ok, rep, f"identity residual {rep.get('identity_residual')}", [path]


def cmd_pregauge(a):
    from .geomcurv import pre_gauge_report, random_pd
    tol = a.tol or 1e-9
    paths = []
    if a.input:
        path = _one_input(a)
        paths = [path]
        try:
            obj = json.loads(Path(path).read_text())
            pairs = [(np.array(obj["H0"], float), np.array(obj["H"], float))]
        except (OSError, json.JSONDecodeError, KeyError, ValueError) as e:
            raise InputError(f"{path}: expected JSON with matrices H0 and H ({e})") from None
    else:
        rng = np.random.default_rng(a.seed if a.seed is not None else 0)
        n = a.n or 4
        pairs = [(random_pd(rng, n), random_pd(rng, n)) for _ in range(a.samples or 200)]
    keys = ("isometry", "H0_self_adjoint", "H_self_adjoint", "square_is_gram", "inverse_law")
    worst = {k: 0.0 for k in keys}
    min_eig = math.inf
    for H0, H in pairs:
        r = pre_gauge_report(H0, H, a.precision)
        for k in keys:
            worst[k] = max(worst[k], r[k])
        min_eig = min(min_eig, r["min_eigenvalue"])
    ok = all(v < tol for v in worst.values()) and min_eig > 0
    res = {"pairs": len(pairs), "precision": a.precision, "tol": tol, "max_residuals": worst,
           "min_eigenvalue": min_eig}
    return ok, res, f"worst residual {max(worst.values()):.3g} over {len(pairs)} pairs", paths


def cmd_angle(a):
    from .geomcurv import angle_chart_check
    kappa = a.kappa if a.kappa is not None else "1"
    polar = a.polar_radius
    rep = angle_chart_check(kappa, R=a.R, samples=a.samples or 200, seed=a.seed or 0,
                            r_max=a.r_max, tol=a.tol or 1e-5, polar_radius=polar)
    rep["kappa"] = kappa
    return rep["ok"], rep, f"max pullback entry error {rep['max_entry_error']:.3g}", []


def _dice_cfg(a):
    from .levelset import DiceConfig
    try:
        return DiceConfig(a.n or 2, a.rho)
    except ValueError as e:
        raise InputError(str(e)) from None


def cmd_dice(a):
    from .levelset import property_scan
    cfg = _dice_cfg(a)
    rep = property_scan(cfg, a.samples or 10_000, a.seed or 0, a.parallel == "on").to_dict()
    rep.update(n=cfg.n, rho=cfg.rho, eps=cfg.eps, C=cfg.c_const)
    return rep["ok"], rep, f"{rep['counts']['violations']} violations", []


def cmd_flow(a):
    from .levelset import FlowError, flow_decomposition_check
    cfg = _dice_cfg(a)
    try:
        rep = flow_decomposition_check(cfg, a.samples or 50, a.step, a.seed or 0,
                                       parallel=a.parallel == "on").to_dict()
    except FlowError as e:
        return False, {"flow_error": str(e), "point": e.point}, str(e), []
    rep.update(n=cfg.n, rho=cfg.rho, ode_step=a.step)
    return rep["ok"], rep, f"level error {rep['max_level_error']:.3g}, ortho {rep['max_ortho_residual']:.3g}", []


COMMANDS = {
    "validate": cmd_validate, "kan": cmd_kan, "contractible": cmd_contractible, "fibration": cmd_fibration,
    "pi0": cmd_pi0, "pi": cmd_pi, "homology": cmd_homology, "product": cmd_product,
    "specseq": cmd_specseq, "curvature": cmd_curvature, "suspension": cmd_suspension,
    "rescale": cmd_rescale, "pregauge": cmd_pregauge, "angle": cmd_angle, "dice": cmd_dice, "flow": cmd_flow,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cubekit", description="Cubical, spectral-sequence and curvature checks.")
    p.add_argument("--version", action="version", version=f"cubekit {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--input", action="append", help="input file (repeat for product)")
        s.add_argument("--family")
        s.add_argument("--couple")
        s.add_argument("--max-dim", type=int)
        s.add_argument("--n", type=int)
        s.add_argument("--base")
        s.add_argument("--pages", type=int)
        s.add_argument("--samples", type=int)
        s.add_argument("--seed", type=int)
        s.add_argument("--tol", type=float)
        s.add_argument("--mode", choices=("eighth", "chapter7"), default="eighth")
        s.add_argument("--parallel", choices=("on", "off"), default="off")
        s.add_argument("--order", choices=("forward", "reversed"), default="forward")
        s.add_argument("--variant", choices=("corrected", "stated"), default="corrected")
        s.add_argument("--precision", choices=("extended", "double"), default="extended")
        s.add_argument("--rho", type=float, default=21.0)
        s.add_argument("--step", type=float, default=0.01)
        s.add_argument("--kappa")
        s.add_argument("--R", type=float, default=1.0)
        s.add_argument("--r-max", type=float, default=1.0)
        s.add_argument("--polar-radius", type=float)
    return p


def _input_errors():
    from .geomcurv import FamilyFormatError, NotPD, NotPositiveDefinite
    from .specseq import CoupleFormatError, WindowError
    return (InputError, cs.CubicalError, CoupleFormatError, WindowError, FamilyFormatError,
            NotPositiveDefinite, NotPD, ParseError, FileNotFoundError, IsADirectoryError)


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    errors = _input_errors()
    args = list(sys.argv[1:] if argv is None else argv)
    cmd = args[0] if args else None
    try:
        a = build_parser().parse_args(argv)
        ok, result, summary, paths = COMMANDS[a.command](a)
        report = {
            "command": a.command,
            "inputs": _digest(paths),
            "seed": a.seed,
            "version": __version__,
            "ok": bool(ok),
            "result": jsonable(result),
        }
        code = 0 if ok else 1
    except errors as e:
        report = {"command": cmd, "ok": False, "error": str(e), "version": __version__}
        summary, code = f"input error: {e}", 2
    except ValueError as e:
        # precondition failures on otherwise readable input
        report = {"command": cmd, "ok": False, "error": str(e), "version": __version__}
        summary, code = f"input error: {e}", 2
    stdout.write(json.dumps(jsonable(report), sort_keys=True, indent=1) + "\n")
    stderr.write(f"cubekit: {summary}\n")
    return code


def main(argv=None):
    sys.exit(run(argv))
