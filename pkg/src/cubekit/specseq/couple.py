"""Bigraded exact couples over a finite window.

Bidegrees: i_{p,q}: D_{p,q} -> D_{p+1,q-1}, j_{p,q}: D_{p,q} -> E_{p,q},
k_{p,q}: E_{p,q} -> D_{p-1,q}.  D_{p,q} = 0 for p < 0 and E_{p,q} = 0 for
p < 0 or q < 0; anything else outside the window raises WindowError.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .engines import ENGINES
from .nodes import kind_satisfies, required_kind_D, required_kind_E


class WindowError(KeyError):
    pass


@dataclass(frozen=True)
class Window:
    p_lo: int
    p_hi: int
    q_lo: int
    q_hi: int

    def __contains__(self, pq) -> bool:
        p, q = pq
        return self.p_lo <= p <= self.p_hi and self.q_lo <= q <= self.q_hi

    def points(self):
        for p in range(self.p_lo, self.p_hi + 1):
            for q in range(self.q_lo, self.q_hi + 1):
                yield p, q


class ExactCouple:
    def __init__(self, engine: str, window: Window, D: dict, E: dict,
                 i: dict | None = None, j: dict | None = None, k: dict | None = None,
                 name: str = ""):
        if engine not in ENGINES:
            raise ValueError(f"unknown engine {engine!r}")
        self.engine_name = engine
        self.eng = ENGINES[engine]
        self.window = window
        self._D, self._E = dict(D), dict(E)
        self._i, self._j, self._k = dict(i or {}), dict(j or {}), dict(k or {})
        self.name = name
        self._pow: dict = {}

    # ----- nodes
    def has_D(self, p, q) -> bool:
        return p < 0 or (p, q) in self.window

    def has_E(self, p, q) -> bool:
        return p < 0 or q < 0 or (p, q) in self.window

    def D(self, p, q):
        if p < 0:
            return self.eng.zero_node
        if (p, q) not in self.window:
            raise WindowError(f"D_{p},{q} outside the window")
        return self._D.get((p, q), self.eng.zero_node)

    def E(self, p, q):
        if p < 0 or q < 0:
            return self.eng.zero_node
        if (p, q) not in self.window:
            raise WindowError(f"E_{p},{q} outside the window")
        return self._E.get((p, q), self.eng.zero_node)

    # ----- maps
    def _map(self, store, key, src, dst):
        if self.eng.is_zero(src) or self.eng.is_zero(dst):
            return self.eng.zero_map(src, dst)
        m = store.get(key)
        return self.eng.zero_map(src, dst) if m is None else m

    def i(self, p, q):
        return self._map(self._i, (p, q), self.D(p, q), self.D(p + 1, q - 1))

    def j(self, p, q):
        return self._map(self._j, (p, q), self.D(p, q), self.E(p, q))

    def k(self, p, q):
        return self._map(self._k, (p, q), self.E(p, q), self.D(p - 1, q))

    def i_power(self, p, q, s):
        """i^s: D_{p,q} -> D_{p+s,q-s}."""
        key = (p, q, s)
        if key not in self._pow:
            if s == 0:
                out = self.eng.identity(self.D(p, q))
            else:
                out = self.eng.compose(self.i(p + s - 1, q - s + 1), self.i_power(p, q, s - 1))
            self._pow[key] = out
        return self._pow[key]

    def support_E(self):
        """Window points with a nonzero E node, in coordinate order."""
        return [(p, q) for (p, q) in self.window.points()
                if p >= 0 and q >= 0 and not self.eng.is_zero(self.E(p, q))]


@dataclass
class Report:
    ok: bool = True
    violations: list = field(default_factory=list)
    checked: int = 0
    details: dict = field(default_factory=dict)

    def fail(self, **kw):
        self.ok = False
        self.violations.append(kw)

    def to_json(self):
        return {"ok": self.ok, "checked": self.checked, "violations": self.violations,
                **({"details": self.details} if self.details else {})}


def _node_kind(C: ExactCouple, N) -> str:
    return C.eng.actual_kind(N)


def validate_couple(C: ExactCouple) -> Report:
    rep = Report()
    eng = C.eng
    for (p, q) in C.window.points():
        for which, N, req in (("D", C.D(p, q), required_kind_D(p, q)),
                              ("E", C.E(p, q), required_kind_E(p, q))):
            rep.checked += 1
            actual = _node_kind(C, N)
            if not kind_satisfies(actual, req):
                rep.fail(type="kind", node=f"{which}_{p},{q}", required=req, actual=actual)
            declared = getattr(N, "kind", None)
            if declared is not None and not kind_satisfies(actual, declared):
                rep.fail(type="declared_kind", node=f"{which}_{p},{q}", declared=declared, actual=actual)
    # homomorphisms
    for (p, q) in C.window.points():
        maps = [("i", C.i, (p, q), C.D(p, q), (p + 1, q - 1), C.has_D),
                ("j", C.j, (p, q), C.D(p, q), (p, q), C.has_E),
                ("k", C.k, (p, q), C.E(p, q), (p - 1, q), C.has_D)]
        for name, getter, key, src, tgt, has in maps:
            if not has(*tgt):
                continue
            dst = C.D(*tgt) if name != "j" else C.E(*tgt)
            f = getter(*key)
            rep.checked += 1
            if not eng.is_hom(f, src, dst):
                rep.fail(type="not_a_homomorphism", map=f"{name}_{p},{q}")
    # exactness
    for (p, q) in C.window.points():
        D, E = C.D(p, q), C.E(p, q)
        if C.has_D(p - 1, q + 1):
            rep.checked += 1
            im = eng.image(C.i(p - 1, q + 1), C.D(p - 1, q + 1), D, eng.whole(C.D(p - 1, q + 1)))
            ker = eng.kernel(C.j(p, q), D, E)
            if not eng.equal(D, im, ker):
                rep.fail(type="exactness", node=f"D_{p},{q}", at="im i = ker j")
        if C.has_D(p - 1, q):
            rep.checked += 1
            im = eng.image(C.j(p, q), D, E, eng.whole(D))
            ker = eng.kernel(C.k(p, q), E, C.D(p - 1, q))
            if not eng.equal(E, im, ker):
                rep.fail(type="exactness", node=f"E_{p},{q}", at="im j = ker k")
        if C.has_E(p + 1, q) and C.has_D(p + 1, q - 1):
            rep.checked += 1
            E1 = C.E(p + 1, q)
            im = eng.image(C.k(p + 1, q), E1, D, eng.whole(E1))
            ker = eng.kernel(C.i(p, q), D, C.D(p + 1, q - 1))
            if not eng.equal(D, im, ker):
                rep.fail(type="exactness", node=f"D_{p},{q}", at="im k = ker i")
    return rep


def zero_couple(engine: str = "group", size: int = 3) -> ExactCouple:
    return ExactCouple(engine, Window(0, size, -size, size), {}, {}, name="zero")
