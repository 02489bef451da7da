"""Second-order forward-mode jets and expression evaluation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .syntax import Bin, Call, Expr, Neg, Num, Var


class DomainError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Jet:
    """Value, gradient and Hessian with respect to a fixed list of seeds."""
    val: float
    grad: np.ndarray
    hess: np.ndarray

    @staticmethod
    def const(v: float, k: int) -> "Jet":
        return Jet(float(v), np.zeros(k), np.zeros((k, k)))

    @staticmethod
    def seed(v: float, idx: int, k: int) -> "Jet":
        g = np.zeros(k)
        g[idx] = 1.0
        return Jet(float(v), g, np.zeros((k, k)))

    def chain(self, f0: float, f1: float, f2: float) -> "Jet":
        """phi(self) given phi, phi', phi'' at self.val."""
        g = self.grad
        return Jet(f0, f1 * g, f2 * np.outer(g, g) + f1 * self.hess)

    def __add__(self, o: "Jet") -> "Jet":
        return Jet(self.val + o.val, self.grad + o.grad, self.hess + o.hess)

    def __sub__(self, o: "Jet") -> "Jet":
        return Jet(self.val - o.val, self.grad - o.grad, self.hess - o.hess)

    def __neg__(self) -> "Jet":
        return Jet(-self.val, -self.grad, -self.hess)

    def __mul__(self, o: "Jet") -> "Jet":
        cross = np.outer(self.grad, o.grad)
        return Jet(self.val * o.val, self.val * o.grad + o.val * self.grad,
                   self.val * o.hess + o.val * self.hess + cross + cross.T)

    def recip(self) -> "Jet":
        w = self.val
        if w == 0.0:
            raise DomainError("division by zero")
        return self.chain(1.0 / w, -1.0 / w ** 2, 2.0 / w ** 3)

    def __truediv__(self, o: "Jet") -> "Jet":
        return self * o.recip()

    def is_const(self) -> bool:
        return not self.grad.any() and not self.hess.any()


def _powc(u: Jet, c: float) -> Jet:
    x = u.val
    if x < 0 and not float(c).is_integer():
        raise DomainError(f"negative base {x} to non-integer power {c}")
    if x == 0:
        if c < 0:
            raise DomainError("zero to a negative power")
        # derivatives exist only for c in {0, 1} or c >= 2
        d1 = 0.0 if c != 1 else 1.0
        if 0 < c < 1 and u.grad.any():
            raise DomainError("non-differentiable power at zero")
        d2 = 2.0 if c == 2 else 0.0
        if 1 < c < 2 and u.grad.any():
            raise DomainError("power not twice differentiable at zero")
        return u.chain(0.0 if c > 0 else 1.0, d1, d2)
    return u.chain(x ** c, c * x ** (c - 1), c * (c - 1) * x ** (c - 2))


def _call(fn: str, u: Jet) -> Jet:
    x = u.val
    if fn == "sin":
        s, c = math.sin(x), math.cos(x)
        return u.chain(s, c, -s)
    if fn == "cos":
        s, c = math.sin(x), math.cos(x)
        return u.chain(c, -s, -c)
    if fn == "exp":
        try:
            e = math.exp(x)
        except OverflowError:
            raise DomainError(f"exp overflow at {x}") from None
        return u.chain(e, e, e)
    if fn == "log":
        if x <= 0:
            raise DomainError(f"log of nonpositive {x}")
        return u.chain(math.log(x), 1 / x, -1 / x ** 2)
    if fn == "sqrt":
        if x < 0 or (x == 0 and u.grad.any()):
            raise DomainError(f"sqrt at {x}")
        r = math.sqrt(x)
        return u.chain(r, 0.5 / r if r else 0.0, -0.25 / (r * x) if r else 0.0)
    if fn == "tanh":
        th = math.tanh(x)
        s = 1 - th * th
        return u.chain(th, s, -2 * th * s)
    raise ValueError(f"unknown function {fn!r}")


def jet(e: Expr, point: Mapping[str, float], seeds: Sequence[str] = ()) -> Jet:
    """Evaluate e as a jet in the variables `seeds` at `point`."""
    k = len(seeds)
    where = {v: t for t, v in enumerate(seeds)}
    memo: dict[int, Jet] = {}

    def go(n: Expr) -> Jet:
        key = id(n)
        if key in memo:
            return memo[key]
        if isinstance(n, Num):
            out = Jet.const(n.value, k)
        elif isinstance(n, Var):
            if n.name == "pi":
                out = Jet.const(math.pi, k)
            elif n.name not in point:
                raise KeyError(f"variable {n.name} is unbound")
            elif n.name in where:
                out = Jet.seed(point[n.name], where[n.name], k)
            else:
                out = Jet.const(point[n.name], k)
        elif isinstance(n, Neg):
            out = -go(n.arg)
        elif isinstance(n, Call):
            out = _call(n.fn, go(n.arg))
        elif isinstance(n, Bin):
            a, b = go(n.left), go(n.right)
            if n.op == "+":
                out = a + b
            elif n.op == "-":
                out = a - b
            elif n.op == "*":
                out = a * b
            elif n.op == "/":
                out = a / b
            elif b.is_const():
                out = _powc(a, b.val)
            else:
                if a.val <= 0:
                    raise DomainError(f"variable exponent needs a positive base, got {a.val}")
                out = _call("exp", b * _call("log", a))
        else:
            raise TypeError(f"not an expression: {n!r}")
        if not (math.isfinite(out.val) and np.isfinite(out.grad).all() and np.isfinite(out.hess).all()):
            raise DomainError(f"non-finite value in {n}")
        memo[key] = out
        return out

    return go(e)


def evaluate(e: Expr, point: Mapping[str, float]) -> float:
    return jet(e, point).val


def d1(e: Expr, var: str, point: Mapping[str, float]) -> float:
    return float(jet(e, point, (var,)).grad[0])


def d2(e: Expr, var1: str, var2: str, point: Mapping[str, float]) -> float:
    if var1 == var2:
        return float(jet(e, point, (var1,)).hess[0, 0])
    return float(jet(e, point, (var1, var2)).hess[0, 1])


def _safe(fn):
    def g(x):
        try:
            return fn(x)
        except (ValueError, OverflowError):
            raise DomainError(f"{fn.__name__} at {x}") from None
    g.__name__ = fn.__name__
    return g


_FLOAT_FNS = {"sin": math.sin, "cos": math.cos, "exp": _safe(math.exp), "log": _safe(math.log),
              "sqrt": _safe(math.sqrt), "tanh": math.tanh}


def compile_float(e: Expr):
    """Closure point -> float; much faster than jet() for plain values."""

    def build(n):
        if isinstance(n, Num):
            v = float(n.value)
            return lambda p: v
        if isinstance(n, Var):
            if n.name == "pi":
                return lambda p: math.pi
            name = n.name
            return lambda p: p[name]
        if isinstance(n, Neg):
            a = build(n.arg)
            return lambda p: -a(p)
        if isinstance(n, Call):
            a, f = build(n.arg), _FLOAT_FNS[n.fn]
            return lambda p: f(a(p))
        a, b = build(n.left), build(n.right)
        if n.op == "+":
            return lambda p: a(p) + b(p)
        if n.op == "-":
            return lambda p: a(p) - b(p)
        if n.op == "*":
            return lambda p: a(p) * b(p)
        if n.op == "/":
            def div(p):
                den = b(p)
                if den == 0:
                    raise DomainError("division by zero")
                return a(p) / den
            return div

        def pw(p):
            x, y = a(p), b(p)
            try:
                out = x ** y
            except (OverflowError, ZeroDivisionError):
                raise DomainError(f"{x}^{y}") from None
            if isinstance(out, complex):
                raise DomainError(f"negative base {x} to non-integer power {y}")
            return out
        return pw

    return build(e)
