"""Arithmetic expression strings for flow/jump/output evaluators.

Grammar: ``+ - * /`` with unary minus, parentheses, numeric literals, the
functions pow, sqrt, cbrt, exp, abs, min, max, and whatever variable names
the caller declares (``x1..xn``, ``w1..wm``, ``t``, ``j`` depending on
context).  Parsed by recursive descent into a small tuple-shaped AST, then
compiled once into a plain Python callable for fast repeated evaluation.

Domain errors (sqrt of a negative, division by zero, non-finite results)
surface at evaluation time, never at parse time.
"""

from __future__ import annotations

import math
import re

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/(),]))"
)

#: function name -> (min arity, max arity)
FUNCTIONS = {
    "pow": (2, 2),
    "sqrt": (1, 1),
    "cbrt": (1, 1),
    "exp": (1, 1),
    "abs": (1, 1),
    "min": (2, None),
    "max": (2, None),
}


class ExpressionError(ValueError):
    """Parse or validation failure, with a column hint."""


class EvalDomainError(ArithmeticError):
    """Evaluation hit a domain error or a non-finite value."""


def _cbrt(v):
    # math.cbrt exists only on 3.11+; this is the real cube root for any sign
    return math.copysign(abs(v) ** (1.0 / 3.0), v)


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:].strip()
            if not rest:
                break
            raise ExpressionError(
                f"unexpected character {rest[0]!r} at column {pos + 1}"
            )
        if m.group("num") is not None:
            tokens.append(("num", float(m.group("num")), pos))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name"), pos))
        else:
            tokens.append(("op", m.group("op"), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, variables):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.variables = frozenset(variables)

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise ExpressionError(
                f"expected {op!r} at column {pos + 1} in {self.text!r}"
            )

    def parse(self):
        ast = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExpressionError(
                f"trailing input {val!r} at column {pos + 1} in {self.text!r}"
            )
        return ast

    def expr(self):
        node = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                node = ("bin", val, node, self.term())
            else:
                return node

    def term(self):
        node = self.unary()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                node = ("bin", val, node, self.unary())
            else:
                return node

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return ("neg", self.unary())
        return self.primary()

    def primary(self):
        kind, val, pos = self.take()
        if kind == "num":
            return ("num", val)
        if kind == "name":
            nxt_kind, nxt_val, _ = self.peek()
            if nxt_kind == "op" and nxt_val == "(":
                return self.call(val, pos)
            if val not in self.variables:
                raise ExpressionError(
                    f"unknown variable {val!r} at column {pos + 1} "
                    f"(declared: {sorted(self.variables)})"
                )
            return ("var", val)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ExpressionError(f"unexpected token {val!r} at column {pos + 1}")

    def call(self, fname, pos):
        if fname not in FUNCTIONS:
            raise ExpressionError(
                f"unknown function {fname!r} at column {pos + 1}"
            )
        self.expect_op("(")
        args = [self.expr()]
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == ",":
                self.take()
                args.append(self.expr())
            else:
                break
        self.expect_op(")")
        lo, hi = FUNCTIONS[fname]
        if len(args) < lo or (hi is not None and len(args) > hi):
            raise ExpressionError(
                f"{fname} takes {lo}{'' if hi == lo else '+'} arguments, "
                f"got {len(args)}"
            )
        return ("call", fname, tuple(args))


def parse_expression(text, variables):
    """Parse ``text`` into an AST closed over the declared ``variables``."""
    return _Parser(text, variables).parse()


def expression_variables(ast):
    """The set of variable names appearing in the AST."""
    kind = ast[0]
    if kind == "var":
        return {ast[1]}
    if kind == "num":
        return set()
    if kind == "neg":
        return expression_variables(ast[1])
    if kind == "bin":
        return expression_variables(ast[2]) | expression_variables(ast[3])
    return set().union(*(expression_variables(a) for a in ast[2])) if ast[2] else set()


def _emit(ast):
    kind = ast[0]
    if kind == "num":
        return repr(ast[1])
    if kind == "var":
        return ast[1]
    if kind == "neg":
        return f"(-{_emit(ast[1])})"
    if kind == "bin":
        return f"({_emit(ast[2])} {ast[1]} {_emit(ast[3])})"
    if kind == "call":
        args = ", ".join(_emit(a) for a in ast[2])
        return f"_f_{ast[1]}({args})"
    raise ExpressionError(f"malformed AST node {ast!r}")


_SAFE_ENV = {
    "_f_pow": math.pow,
    "_f_sqrt": math.sqrt,
    "_f_cbrt": _cbrt,
    "_f_exp": math.exp,
    "_f_abs": abs,
    "_f_min": min,
    "_f_max": max,
}


def compile_expression(ast, variables):
    """Compile an AST into ``f(*values)`` with ``values`` ordered like
    ``variables``.  Only whitelisted names appear in the generated code."""
    params = ", ".join(variables)
    src = f"lambda {params}: {_emit(ast)}"
    return eval(src, dict(_SAFE_ENV), {})  # noqa: S307 - closed vocabulary


def eval_expression(ast, bindings):
    """Evaluate with a name->value mapping; raises
    :class:`EvalDomainError` on domain errors or non-finite results."""
    names = sorted(expression_variables(ast))
    for name in names:
        if name not in bindings:
            raise EvalDomainError(f"unbound variable {name!r}")
    fn = compile_expression(ast, names)
    try:
        out = fn(*(bindings[name] for name in names))
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        raise EvalDomainError(str(exc)) from exc
    if not math.isfinite(out):
        raise EvalDomainError(f"non-finite result {out!r}")
    return out


def affine_coefficients(ast, variables):
    """``(constant, {var: coefficient})`` when the expression is affine in
    ``variables`` (with constant folding), else ``None``.

    Used by the exact interval-arithmetic paths, which only fire for affine
    dynamics.
    """

    def walk(node):
        kind = node[0]
        if kind == "num":
            return (node[1], {})
        if kind == "var":
            return (0.0, {node[1]: 1.0})
        if kind == "neg":
            sub = walk(node[1])
            if sub is None:
                return None
            c, coeffs = sub
            return (-c, {k: -v for k, v in coeffs.items()})
        if kind == "bin":
            op = node[1]
            left, right = walk(node[2]), walk(node[3])
            if left is None or right is None:
                return None
            (cl, dl), (cr, dr) = left, right
            if op == "+":
                merged = dict(dl)
                for k, v in dr.items():
                    merged[k] = merged.get(k, 0.0) + v
                return (cl + cr, merged)
            if op == "-":
                merged = dict(dl)
                for k, v in dr.items():
                    merged[k] = merged.get(k, 0.0) - v
                return (cl - cr, merged)
            if op == "*":
                if not dl:  # constant * affine
                    return (cl * cr, {k: cl * v for k, v in dr.items()})
                if not dr:  # affine * constant
                    return (cr * cl, {k: cr * v for k, v in dl.items()})
                return None
            if op == "/":
                if not dr and cr != 0.0:
                    return (cl / cr, {k: v / cr for k, v in dl.items()})
                return None
        if kind == "call":
            folded = []
            for a in node[2]:
                sub = walk(a)
                if sub is None or sub[1]:
                    return None
                folded.append(sub[0])
            try:
                val = eval_expression(
                    ("call", node[1], tuple(("num", v) for v in folded)), {}
                )
            except EvalDomainError:
                return None
            return (val, {})
        return None

    result = walk(ast)
    if result is None:
        return None
    const, coeffs = result
    full = {v: coeffs.get(v, 0.0) for v in variables}
    extra = set(coeffs) - set(variables)
    if extra:
        return None
    return const, full
