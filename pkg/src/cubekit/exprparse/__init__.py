"""Arithmetic expressions with exact first and second derivatives."""

from .jet import DomainError, Jet, compile_float, d1, d2, evaluate, jet
from .syntax import (FUNCTIONS, Bin, Call, Expr, Neg, Num, ParseError, Var, parse,
                     substitute, to_text)

__all__ = ["DomainError", "Jet", "compile_float", "d1", "d2", "evaluate", "jet", "FUNCTIONS", "Bin", "Call",
           "Expr", "Neg", "Num", "ParseError", "Var", "parse", "substitute", "to_text"]
