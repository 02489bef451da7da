"""JSON formats for couples and filtered complexes.

Couple:
    {"engine": "group" | "table",
     "window": [p_lo, p_hi, q_lo, q_hi],
     "D": [{"p": 0, "q": 1, <node>}, ...], "E": [...],
     "i": [{"p": 0, "q": 1, <map>}, ...], "j": [...], "k": [...]}

Group node: {"gens": n, "relations": [[...], ...]} (relations are columns).
Table node: {"kind": ..., "elements": [...], "table": [[name, ...], ...],
"base": name}; "table" may be omitted for pointed sets.
Group map: {"matrix": [[...], ...]} (target rows x source columns).
Table map: {"images": [name, ...]} in source element order.

Filtered complex:
    {"ranks": [...], "boundaries": {"1": [[...]], ...},
     "levels": {"0": [...], ...}, "modulus": 0}
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .. import zlinalg as zl
from .couple import ExactCouple, Window
from .filtration import FilteredComplex
from .nodes import FiniteNode, TableError


class CoupleFormatError(ValueError):
    pass


def _group_node(d) -> zl.FgAbelianGroup:
    n = int(d.get("gens", 0))
    rel = d.get("relations", [])
    R = zl.zeros(n, 0) if not rel else zl.imat(rel, (len(rel), n)).T.copy()
    return zl.FgAbelianGroup(n, R)


def _table_node(d) -> FiniteNode:
    els = tuple(str(e) for e in d["elements"])
    pos = {e: t for t, e in enumerate(els)}
    try:
        table = None
        if d.get("table") is not None:
            table = tuple(tuple(pos[str(v)] for v in row) for row in d["table"])
        base = pos[str(d.get("base", els[0]))]
    except KeyError as e:
        raise CoupleFormatError(f"unknown element {e}") from None
    return FiniteNode(d.get("kind", "pointed_set"), els, table, base)


def _coord(d):
    try:
        return int(d["p"]), int(d["q"])
    except (KeyError, TypeError, ValueError):
        raise CoupleFormatError(f"entry without integer p, q: {d!r}") from None


def couple_from_json(obj: dict, name: str = "") -> ExactCouple:
    engine = obj.get("engine", "group")
    if engine not in ("group", "table"):
        raise CoupleFormatError(f"unknown engine {engine!r}")
    try:
        w = Window(*[int(x) for x in obj["window"]])
    except (KeyError, TypeError, ValueError):
        raise CoupleFormatError("window must be [p_lo, p_hi, q_lo, q_hi]") from None
    mk = _group_node if engine == "group" else _table_node
    try:
        D = {_coord(e): mk(e) for e in obj.get("D", [])}
        E = {_coord(e): mk(e) for e in obj.get("E", [])}
    except (TableError, KeyError, ValueError) as e:
        raise CoupleFormatError(str(e)) from None
    C = ExactCouple(engine, w, D, E, name=name)
    shapes = {"i": lambda p, q: (C.D(p, q), C.D(p + 1, q - 1)),
              "j": lambda p, q: (C.D(p, q), C.E(p, q)),
              "k": lambda p, q: (C.E(p, q), C.D(p - 1, q))}
    for key, store in (("i", C._i), ("j", C._j), ("k", C._k)):
        for e in obj.get(key, []):
            p, q = _coord(e)
            src, dst = shapes[key](p, q)
            if engine == "group":
                M = zl.imat(e.get("matrix", []), (dst.n, src.n)) if dst.n and src.n else zl.zeros(dst.n, src.n)
                if M.shape != (dst.n, src.n):
                    raise CoupleFormatError(f"{key}_{p},{q}: matrix shape {M.shape} != {(dst.n, src.n)}")
                store[(p, q)] = M
            else:
                imgs = e.get("images", [])
                if len(imgs) != src.size:
                    raise CoupleFormatError(f"{key}_{p},{q}: {len(imgs)} images for {src.size} elements")
                try:
                    store[(p, q)] = tuple(dst.index(str(v)) for v in imgs)
                except TableError as err:
                    raise CoupleFormatError(f"{key}_{p},{q}: {err}") from None
    return C


def _node_json(engine, N):
    if engine == "group":
        return {"gens": N.n, "relations": [[int(x) for x in col] for col in N.R.T.tolist()]}
    out = {"kind": N.kind, "elements": list(N.elements), "base": N.elements[N.base]}
    if N.table is not None:
        out["table"] = [[N.elements[v] for v in row] for row in N.table]
    return out


def couple_to_json(C: ExactCouple) -> dict:
    eng = C.engine_name
    w = C.window
    out = {"engine": eng, "window": [w.p_lo, w.p_hi, w.q_lo, w.q_hi]}
    out["D"] = [{"p": p, "q": q, **_node_json(eng, N)} for (p, q), N in sorted(C._D.items())]
    out["E"] = [{"p": p, "q": q, **_node_json(eng, N)} for (p, q), N in sorted(C._E.items())]
    targets = {"i": lambda p, q: C.D(p + 1, q - 1), "j": lambda p, q: C.E(p, q),
               "k": lambda p, q: C.D(p - 1, q)}
    for key, store in (("i", C._i), ("j", C._j), ("k", C._k)):
        rows = []
        for (p, q), F in sorted(store.items()):
            if eng == "group":
                rows.append({"p": p, "q": q, "matrix": [[int(x) for x in r] for r in np.asarray(F).tolist()]})
            else:
                dst = targets[key](p, q)
                rows.append({"p": p, "q": q, "images": [dst.elements[v] for v in F]})
        out[key] = rows
    return out


def filtered_from_json(obj: dict) -> FilteredComplex:
    try:
        ranks = [int(r) for r in obj["ranks"]]
        bd = {}
        for n in range(1, len(ranks)):
            rows = obj.get("boundaries", {}).get(str(n))
            bd[n] = zl.zeros(ranks[n - 1], ranks[n]) if rows is None or not ranks[n - 1] or not ranks[n] \
                else zl.imat(rows, (ranks[n - 1], ranks[n]))
            if bd[n].shape != (ranks[n - 1], ranks[n]):
                raise CoupleFormatError(f"boundary {n} has shape {bd[n].shape}")
        levels = {n: [int(x) for x in obj.get("levels", {}).get(str(n), [])] for n in range(len(ranks))}
        return FilteredComplex(ranks, bd, levels, int(obj.get("modulus", 0)))
    except (KeyError, TypeError) as e:
        raise CoupleFormatError(f"malformed filtered complex: {e}") from None


def load_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise CoupleFormatError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None


def load_couple(path, r_max: int | None = None) -> ExactCouple:
    """A couple file, or a filtered complex file turned into its couple."""
    from .filtration import build_filtration_couple
    obj = load_json(path)
    if "ranks" in obj:
        return build_filtration_couple(filtered_from_json(obj), r_max)
    return couple_from_json(obj, name=Path(path).stem)
