import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from cubekit import exprparse as ep
from cubekit.exprparse import Bin, Call, Neg, Num, Var

VARS = ["x1", "x2", "t1"]

leaves = st.one_of(
    st.sampled_from(VARS + ["pi"]).map(Var),
    st.one_of(st.integers(0, 9).map(float), st.floats(0, 50, allow_nan=False).map(lambda v: round(v, 3))).map(Num),
)


def trees(children):
    return st.one_of(
        st.tuples(st.sampled_from("+-*/^"), children, children).map(lambda t: Bin(*t)),
        children.map(Neg),
        st.tuples(st.sampled_from(ep.FUNCTIONS), children).map(lambda t: Call(*t)),
    )


exprs = st.recursive(leaves, trees, max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(exprs)
def test_print_parse_round_trip(e):
    assert ep.parse(ep.to_text(e)) == e


def test_precedence_and_associativity():
    P = ep.parse
    assert P("1 - 2 - 3") == Bin("-", Bin("-", Num(1), Num(2)), Num(3))
    assert P("2^3^2") == Bin("^", Num(2), Bin("^", Num(3), Num(2)))
    assert P("-x1^2") == Neg(Bin("^", Var("x1"), Num(2)))
    assert P("2^-x1") == Bin("^", Num(2), Neg(Var("x1")))
    assert P("x1*x2/t1") == Bin("/", Bin("*", Var("x1"), Var("x2")), Var("t1"))
    assert P("1 + 2*3") == Bin("+", Num(1), Bin("*", Num(2), Num(3)))
    assert P("sin(x1)^2") == Bin("^", Call("sin", Var("x1")), Num(2))
    assert ep.evaluate(P("2^3^2"), {}) == 512.0
    assert ep.evaluate(P("1e2 + .5"), {}) == 100.5


@pytest.mark.parametrize("text,offset", [
    ("1 +", 3),
    ("x1 * (x2", 8),
    ("foo(x1)", 0),
    ("x0 + 1", 0),
    ("sin x1", 4),
    ("1 $ 2", 2),
    ("(1)) ", 3),
    ("é + x1 +", 0),
    ("x1 + é", 5),
])
def test_error_offsets(text, offset):
    with pytest.raises(ep.ParseError) as ei:
        ep.parse(text)
    assert ei.value.offset == offset


def test_unbound_variable_rejected():
    with pytest.raises(ep.ParseError) as ei:
        ep.parse("x1 + t2", allowed={"x1", "t1"})
    assert ei.value.offset == 5
    ep.parse("x1 + pi", allowed={"x1"})


def to_sympy(e):
    return sympy.sympify(ep.to_text(e).replace("^", "**"), locals={"pi": sympy.pi})


SMOOTH = [
    "sin(x1)*exp(x2) - x1^3/(1 + x2^2)",
    "log(1 + x1^2 + x2^2) * cos(t1)",
    "sqrt(2 + sin(x1*x2)) ^ 3",
    "tanh(x1 - 2*x2)^2 + x1^x2",
    "exp(-t1^2) * (x1 + x2)^-2",
    "x1^2.5 + pi*x2",
    "(x1*x2*t1)^2 - 7*x1/t1",
]


@pytest.mark.parametrize("text", SMOOTH)
def test_jets_match_symbolic_derivatives(text):
    e = ep.parse(text)
    s = to_sympy(e)
    syms = {v: sympy.Symbol(v) for v in VARS}
    rng = np.random.default_rng(len(text))
    for _ in range(10):
        pt = {v: float(rng.uniform(0.5, 2.0)) for v in VARS}
        subs = {syms[v]: pt[v] for v in VARS}
        J = ep.jet(e, pt, VARS)
        assert J.val == pytest.approx(float(s.subs(subs)), rel=1e-12)
        for a, va in enumerate(VARS):
            da = sympy.diff(s, syms[va])
            assert J.grad[a] == pytest.approx(float(da.subs(subs)), rel=1e-10, abs=1e-12)
            for b, vb in enumerate(VARS):
                ref = float(sympy.diff(da, syms[vb]).subs(subs))
                assert J.hess[a, b] == pytest.approx(ref, rel=1e-9, abs=1e-10)
        assert ep.d2(e, "x1", "x2", pt) == pytest.approx(J.hess[0, 1], rel=1e-14, abs=1e-14)
        assert ep.compile_float(e)(pt) == pytest.approx(J.val, rel=1e-14)


@settings(max_examples=200, deadline=None)
@given(exprs, st.tuples(*[st.floats(0.1, 3) for _ in VARS]))
def test_compiled_float_matches_jet_value(e, xs):
    pt = dict(zip(VARS, xs))
    try:
        v = ep.jet(e, pt, ()).val
    except (ep.DomainError, ZeroDivisionError):
        return
    try:
        w = ep.compile_float(e)(pt)
    except (ep.DomainError, ZeroDivisionError, OverflowError):
        return
    assert w == pytest.approx(v, rel=1e-12, abs=1e-300) or (math.isinf(w) and abs(v) > 1e300)


def test_domain_errors():
    for text, pt in [("log(x1)", {"x1": 0.0}), ("sqrt(x1)", {"x1": -1.0}), ("x1^0.5", {"x1": -2.0}),
                     ("x1^x2", {"x1": -1.0, "x2": 2.0}), ("exp(x1)", {"x1": 1e4})]:
        with pytest.raises(ep.DomainError):
            ep.jet(e := ep.parse(text), pt, sorted(e.variables()))


def test_substitute():
    e = ep.substitute(ep.parse("x1^2 + x2"), {"x1": ep.parse("sin(t1)")})
    assert ep.to_text(e) == "sin(t1)^2 + x2"
