"""Chart-local metric families h_ab(x, t) with a warping function f(x, t).

Text format (one statement per line, '#' comments):

    d = 2
    n = 1
    h[1][1] = "exp(2*t1)"
    h[1][2] = "0"
    f = "1"
    domain x1 in [-1, 1]
    domain t1 in [0, 1]
    margin = 0.05
    seed = 3

Unlisted off-diagonal entries are 0; diagonal entries are required.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..exprparse import Expr, Num, ParseError, compile_float, parse, to_text


class FamilyFormatError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0, path: str = ""):
        where = f"{path}:" if path else ""
        super().__init__(f"{where}{line}:{col}: {msg}" if line else f"{where}{msg}")
        self.line, self.col, self.path = line, col, path


class NotPositiveDefinite(ValueError):
    pass


@dataclass
class MetricFamily:
    d: int
    n: int
    entries: dict                       # (a, b) with a <= b, 1-based -> Expr
    f: Expr = field(default_factory=lambda: Num(1.0))
    domain: dict = field(default_factory=dict)   # var -> (lo, hi)
    margin: float = 0.0
    seed: int = 0
    name: str = ""

    def __post_init__(self):
        if self.d < 1 or self.n < 0:
            raise ValueError("need d >= 1 and n >= 0")
        allowed = set(self.coords)
        for key, e in list(self.entries.items()):
            a, b = key
            if not (1 <= a <= self.d and 1 <= b <= self.d):
                raise ValueError(f"entry h[{a}][{b}] outside d = {self.d}")
            if a > b:
                del self.entries[key]
                if (b, a) in self.entries and self.entries[(b, a)] != e:
                    raise ValueError(f"h[{a}][{b}] and h[{b}][{a}] differ")
                self.entries[(b, a)] = e
        for a in range(1, self.d + 1):
            if (a, a) not in self.entries:
                raise ValueError(f"missing diagonal entry h[{a}][{a}]")
        for e in list(self.entries.values()) + [self.f]:
            bad = e.variables() - allowed
            if bad:
                raise ValueError(f"unknown variables {sorted(bad)}")
        self._h = {k: compile_float(e) for k, e in self.entries.items()}
        self._f = compile_float(self.f)

    def __getstate__(self):
        st = dict(self.__dict__)
        st.pop("_h", None)
        st.pop("_f", None)
        return st

    def __setstate__(self, st):
        self.__dict__.update(st)
        self._h = {k: compile_float(e) for k, e in self.entries.items()}
        self._f = compile_float(self.f)

    @property
    def xvars(self) -> list[str]:
        return [f"x{a}" for a in range(1, self.d + 1)]

    @property
    def tvars(self) -> list[str]:
        return [f"t{j}" for j in range(1, self.n + 1)]

    @property
    def coords(self) -> list[str]:
        return self.xvars + self.tvars

    def entry(self, a: int, b: int) -> Expr:
        """1-based entry, zero when unlisted."""
        return self.entries.get((min(a, b), max(a, b)), Num(0.0))

    def env(self, point) -> dict:
        if isinstance(point, dict):
            return point
        return dict(zip(self.coords, map(float, point)))

    def h(self, point) -> np.ndarray:
        env = self.env(point)
        H = np.zeros((self.d, self.d))
        for (a, b), fn in self._h.items():
            H[a - 1, b - 1] = H[b - 1, a - 1] = fn(env)
        return H

    def fval(self, point) -> float:
        return self._f(self.env(point))

    def warped_metric(self, point) -> np.ndarray:
        """h + f^2 dt^2 on (x, t1); requires n = 1."""
        G = np.zeros((self.d + 1, self.d + 1))
        G[:self.d, :self.d] = self.h(point)
        G[self.d, self.d] = self.fval(point) ** 2
        return G

    def suspension_metric(self, point) -> np.ndarray:
        """h + dt_1^2 + ... + dt_n^2."""
        G = np.eye(self.d + self.n)
        G[:self.d, :self.d] = self.h(point)
        return G

    def admissible(self, point) -> str | None:
        """None when h is positive definite and f > 0 at point, else a reason."""
        try:
            ev = np.linalg.eigvalsh(self.h(point))
            fv = self.fval(point)
        except (ArithmeticError, ValueError) as e:
            return f"evaluation failed: {e}"
        if not np.all(np.isfinite(ev)) or ev.min() <= 0:
            return "h not positive definite"
        if not fv > 0:
            return "f not positive"
        return None

    def samples(self, k: int, seed: int | None = None) -> np.ndarray:
        """k points in the margin-shrunk domain box, columns in coords order."""
        rng = np.random.default_rng(self.seed if seed is None else seed)
        lo, hi = [], []
        for v in self.coords:
            if v not in self.domain:
                raise ValueError(f"no domain declared for {v}")
            a, b = self.domain[v]
            a, b = a + self.margin, b - self.margin
            if a > b:
                raise ValueError(f"margin empties the domain of {v}")
            lo.append(a)
            hi.append(b)
        return rng.uniform(lo, hi, size=(k, len(lo)))

    def to_text(self) -> str:
        lines = [f"d = {self.d}", f"n = {self.n}"]
        for (a, b), e in sorted(self.entries.items()):
            lines.append(f'h[{a}][{b}] = "{to_text(e)}"')
        lines.append(f'f = "{to_text(self.f)}"')
        for v in self.coords:
            if v in self.domain:
                lo, hi = self.domain[v]
                lines.append(f"domain {v} in [{lo!r}, {hi!r}]")
        lines += [f"margin = {self.margin!r}", f"seed = {self.seed}"]
        return "\n".join(lines) + "\n"


_ASSIGN = re.compile(r'^(d|n|margin|seed)\s*=\s*(\S+)\s*$')
_ENTRY = re.compile(r'^h\[(\d+)\]\[(\d+)\]\s*=\s*"([^"]*)"\s*$')
_WARP = re.compile(r'^f\s*=\s*"([^"]*)"\s*$')
_DOMAIN = re.compile(r'^domain\s+([xt]\d+)\s+in\s+\[\s*([^,\]]+)\s*,\s*([^\]]+?)\s*\]\s*$')


def parse_family(text: str, path: str = "", name: str = "") -> MetricFamily:
    scal = {}
    entries, exprs, domain = {}, {}, {}
    fexpr = None

    def expr(src, lineno, line):
        col = line.index('"') + 1
        try:
            return parse(src)
        except ParseError as e:
            raise FamilyFormatError(e.msg, lineno, col + 1 + e.offset, path) from None

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        s = line.strip()
        if m := _ASSIGN.match(s):
            key, val = m.groups()
            try:
                scal[key] = float(val) if key == "margin" else int(val)
            except ValueError:
                raise FamilyFormatError(f"bad value for {key}: {val!r}", lineno, indent + s.index(val) + 1, path) from None
        elif m := _ENTRY.match(s):
            a, b = int(m.group(1)), int(m.group(2))
            entries[(a, b)] = expr(m.group(3), lineno, line)
        elif m := _WARP.match(s):
            fexpr = expr(m.group(1), lineno, line)
        elif m := _DOMAIN.match(s):
            try:
                lo, hi = float(m.group(2)), float(m.group(3))
            except ValueError:
                raise FamilyFormatError("domain bounds must be numbers", lineno, indent + 1, path) from None
            if not lo < hi:
                raise FamilyFormatError("empty domain interval", lineno, indent + 1, path)
            domain[m.group(1)] = (lo, hi)
        else:
            raise FamilyFormatError(f"unrecognized statement {s!r}", lineno, indent + 1, path)
    if "d" not in scal:
        raise FamilyFormatError("missing 'd = ...'", 0, 0, path)
    try:
        return MetricFamily(scal["d"], scal.get("n", 1), entries, fexpr or Num(1.0), domain,
                            scal.get("margin", 0.0), scal.get("seed", 0), name)
    except ValueError as e:
        raise FamilyFormatError(str(e), 0, 0, path) from None


def load_family(path) -> MetricFamily:
    p = Path(path)
    return parse_family(p.read_text(encoding="utf-8"), str(p), p.stem)
