"""Arithmetic expressions over the space-time coordinates.

Scenario files may define a potential as a string in t, q1, q2, q3.  This
is a deliberately small language: numbers, the four coordinates, pi, the
operators + - * / ^ with the usual precedence (^ binds tightest and
associates to the right), parentheses, and the unary functions sin, cos,
exp.  Parsed with a recursive-descent pass into a closure; no use of the
Python evaluator, so a config file cannot execute anything.
"""

from __future__ import annotations

import math
import re
from typing import Callable

__all__ = ["ExpressionError", "compile_expression"]

_TOKEN = re.compile(r"""
    \s*(?:
        (?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)
      | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
      | (?P<op>[-+*/^()])
    )""", re.VERBOSE)

_FUNCTIONS = {"sin": math.sin, "cos": math.cos, "exp": math.exp}
_VARIABLES = ("t", "q1", "q2", "q3")


class ExpressionError(ValueError):
    """Malformed or unsupported potential expression."""


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            # Only whitespace may remain unmatched.
            if text[pos:].strip():
                raise ExpressionError(
                    f"unexpected character {text[pos:].strip()[0]!r} "
                    f"at position {pos}")
            break
        tokens.append(match.group(match.lastgroup))
        pos = match.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ExpressionError("unexpected end of expression")
        self.pos += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.take()
        if got != tok:
            raise ExpressionError(f"expected {tok!r}, got {got!r}")

    # expr := term (('+'|'-') term)*
    def expr(self) -> Callable:
        node = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.term()
            lhs = node
            if op == "+":
                node = lambda env, a=lhs, b=rhs: a(env) + b(env)
            else:
                node = lambda env, a=lhs, b=rhs: a(env) - b(env)
        return node

    # term := unary (('*'|'/') unary)*
    def term(self) -> Callable:
        node = self.unary()
        while self.peek() in ("*", "/"):
            op = self.take()
            rhs = self.unary()
            lhs = node
            if op == "*":
                node = lambda env, a=lhs, b=rhs: a(env) * b(env)
            else:
                node = lambda env, a=lhs, b=rhs: a(env) / b(env)
        return node

    # unary := '-' unary | power     (so -x^2 parses as -(x^2))
    def unary(self) -> Callable:
        if self.peek() == "-":
            self.take()
            inner = self.unary()
            return lambda env, a=inner: -a(env)
        return self.power()

    # power := atom ('^' unary)?     (right-associative, 2^3^2 = 512)
    def power(self) -> Callable:
        base = self.atom()
        if self.peek() == "^":
            self.take()
            exponent = self.unary()
            return lambda env, a=base, b=exponent: a(env) ** b(env)
        return base

    def atom(self) -> Callable:
        tok = self.take()
        if tok == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        if re.fullmatch(r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?", tok):
            value = float(tok)
            return lambda env: value
        if tok == "pi":
            return lambda env: math.pi
        if tok in _VARIABLES:
            return lambda env, name=tok: env[name]
        if tok in _FUNCTIONS:
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            fn = _FUNCTIONS[tok]
            return lambda env, f=fn, a=arg: f(a(env))
        raise ExpressionError(f"unknown symbol {tok!r}")


def compile_expression(text: str) -> Callable[[float, float, float, float], float]:
    """Compile an expression string to a function of (t, q1, q2, q3).

    Raises ExpressionError on any syntax problem, including trailing
    tokens, so a config typo fails at load time rather than mid-run.
    """
    if not isinstance(text, str) or not text.strip():
        raise ExpressionError("expression must be a non-empty string")
    parser = _Parser(_tokenize(text))
    node = parser.expr()
    if parser.peek() is not None:
        raise ExpressionError(f"trailing input starting at {parser.peek()!r}")

    def evaluate(t: float, q1: float, q2: float, q3: float) -> float:
        return float(node({"t": t, "q1": q1, "q2": q2, "q3": q3}))

    return evaluate
