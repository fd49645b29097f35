"""A small expression language for smooth maps.

Grammar (whitespace is insignificant)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := ("-" | "+") unary | power
    power   := atom ("^" unary)?          # right associative
    atom    := NUMBER | NAME | FUNC "(" expr ")" | "(" expr ")"
    FUNC    := "exp" | "log" | "sqrt"

``pi`` is a constant unless declared as a variable.  ``-x^2`` parses as
``-(x^2)`` and ``2^-1`` is allowed.  :func:`to_text` prints the canonical
form with the fewest parentheses that re-parse to the same tree.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from numbers import Real

import numpy as np

from .series import DomainError, TruncatedSeries

FUNCTIONS = ("exp", "log", "sqrt")
CONSTANTS = {"pi": math.pi}


class ParseError(ValueError):
    """Malformed expression; ``line`` and ``col`` are 1-based."""

    def __init__(self, message, line=1, col=1):
        super().__init__(f"{message} (line {line}, column {col})")
        self.message = message
        self.line = line
        self.col = col


# -- syntax tree -------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class Bin:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    func: str
    arg: object


# -- parser ------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text, line, col0):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            bad = len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[pos + bad]!r}", line, col0 + pos + bad)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), col0 + start))
        pos = m.end()
    tokens.append(("end", "", col0 + len(text)))
    return tokens


class _Parser:
    def __init__(self, text, variables, line, col0):
        self.tokens = _tokenize(text, line, col0)
        self.i = 0
        self.line = line
        self.variables = set(variables) if variables is not None else None

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.line, tok[2])

    def expect(self, value):
        tok = self.take()
        if tok[1] != value:
            self.fail(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok)

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected {self.peek()[1]!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Bin(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Bin(op, node, self.unary())
        return node

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("-", "+"):
            self.take()
            arg = self.unary()
            return Neg(arg) if tok[1] == "-" else arg
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return Bin("^", base, self.unary())
        return base

    def atom(self):
        tok = self.take()
        kind, text, _ = tok
        if kind == "num":
            return Num(float(text))
        if kind == "name":
            if self.peek()[1] == "(" and self.peek()[0] == "op":
                if text not in FUNCTIONS:
                    self.fail(f"unknown function {text!r}", tok)
                self.take()
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            if text in FUNCTIONS:
                self.fail(f"function {text!r} needs an argument", tok)
            if self.variables is not None and text not in self.variables:
                if text in CONSTANTS:
                    return Num(CONSTANTS[text])
                self.fail(f"unknown variable {text!r}", tok)
            if self.variables is None and text in CONSTANTS:
                return Num(CONSTANTS[text])
            return Var(text)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        self.fail(f"unexpected {text or 'end of input'!r}", tok)


def parse(text: str, variables=None, line: int = 1, col: int = 1):
    """Parse ``text`` into a syntax tree; unknown names fail if ``variables`` is given."""
    return _Parser(text, variables, line, col).parse()


# -- canonical printer -------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(node):
    if isinstance(node, Bin):
        return 4 if node.op == "^" else _PREC[node.op]
    if isinstance(node, Neg):
        return 3
    if isinstance(node, Num) and (node.value < 0 or math.copysign(1.0, node.value) < 0):
        return 3
    return 5


def _num_text(v):
    if math.isfinite(v) and v.is_integer() and abs(v) < 1e15:
        return str(int(v)) if v != 0 or math.copysign(1, v) > 0 else "-0"
    return repr(v)


def to_text(node) -> str:
    if isinstance(node, Num):
        return _num_text(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    if isinstance(node, Neg):
        inner = to_text(node.arg)
        return f"-({inner})" if _prec(node.arg) < 3 else f"-{inner}"
    if isinstance(node, Bin):
        l, r = to_text(node.left), to_text(node.right)
        if node.op == "^":
            if _prec(node.left) <= 4:
                l = f"({l})"
            if _prec(node.right) < 3:
                r = f"({r})"
            return f"{l}^{r}"
        p = _PREC[node.op]
        if _prec(node.left) < p:
            l = f"({l})"
        if _prec(node.right) <= p:
            r = f"({r})"
        return f"{l} {node.op} {r}"
    raise TypeError(f"not an expression node: {node!r}")


def free_variables(node) -> set:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, (Neg, Call)):
        return free_variables(node.arg)
    if isinstance(node, Bin):
        return free_variables(node.left) | free_variables(node.right)
    return set()


# -- evaluation over reals, series and jets ----------------------------------


def _is_plain(x):
    return isinstance(x, (Real, np.ndarray, np.generic))


def apply_function(name, x):
    if not _is_plain(x):
        return getattr(x, name)()
    x = np.asarray(x, dtype=float)
    if name == "exp":
        out = np.exp(x)
    elif name == "log":
        if np.any(~(x > 0)):
            raise DomainError("log of a non-positive number", x[~(x > 0)] if x.ndim else x)
        out = np.log(x)
    elif name == "sqrt":
        if np.any(x < 0):
            raise DomainError("sqrt of a negative number", x[x < 0] if x.ndim else x)
        out = np.sqrt(x)
    else:
        raise ValueError(f"unknown function {name!r}")
    return float(out) if out.ndim == 0 else out


def _power(base, exponent):
    if _is_plain(exponent):
        e = float(exponent) if np.ndim(exponent) == 0 else None
        if _is_plain(base):
            b = np.asarray(base, dtype=float)
            ex = np.asarray(exponent, dtype=float)
            if np.any((b < 0) & (ex != np.round(ex))):
                raise DomainError("non-integer power of a negative number", b)
            if np.any((b == 0) & (ex < 0)):
                raise DomainError("negative power of zero", b)
            out = b**ex
            return float(out) if out.ndim == 0 else out
        if e is None:
            raise TypeError("array exponents are not supported for series arguments")
        return base**e
    if _is_plain(base):
        b = np.asarray(base, dtype=float)
        if np.any(b <= 0):
            raise DomainError("base of a variable power must be positive", b)
        logb = np.log(b)
        out = apply_function("exp", exponent * (float(logb) if logb.ndim == 0 else logb))
        return _pin_constant(out, b, _constant(exponent))
    out = apply_function("exp", exponent * apply_function("log", base))
    return _pin_constant(out, _constant(base), _constant(exponent))


def _constant(x):
    if isinstance(x, TruncatedSeries):
        return x.coeffs[0]
    return x.c[..., 0]


def _pin_constant(out, b, e):
    # exp(e log b) can differ from b**e in the last bit; keep the real power exact
    v = np.asarray(b, dtype=float) ** np.asarray(e, dtype=float)
    if isinstance(out, TruncatedSeries):
        c = out.coeffs.copy()
        c[0] = v
        return TruncatedSeries(c)
    c = out.c.copy()
    c[..., 0] = v
    return type(out)(out.alg, c)


def _divide(a, b):
    if _is_plain(b):
        bb = np.asarray(b, dtype=float)
        if np.any(bb == 0):
            raise DomainError("division by zero", bb)
        if _is_plain(a):
            out = np.asarray(a, dtype=float) / bb
            return float(out) if out.ndim == 0 else out
        return a / (float(bb) if bb.ndim == 0 else bb)
    return a / b


def _compile(node, index):
    if isinstance(node, Num):
        v = node.value
        return lambda args: v
    if isinstance(node, Var):
        i = index[node.name]
        return lambda args: args[i]
    if isinstance(node, Neg):
        f = _compile(node.arg, index)
        return lambda args: -f(args)
    if isinstance(node, Call):
        f = _compile(node.arg, index)
        name = node.func
        return lambda args: apply_function(name, f(args))
    if isinstance(node, Bin):
        f, g = _compile(node.left, index), _compile(node.right, index)
        op = node.op
        if op == "+":
            return lambda args: f(args) + g(args)
        if op == "-":
            return lambda args: f(args) - g(args)
        if op == "*":
            return lambda args: f(args) * g(args)
        if op == "/":
            return lambda args: _divide(f(args), g(args))
        if op == "^":
            return lambda args: _power(f(args), g(args))
    raise TypeError(f"not an expression node: {node!r}")


@dataclass(frozen=True)
class SmoothMap:
    """A smooth function of ``len(variables)`` real arguments given by an expression.

    Calling it evaluates the body on floats, numpy arrays,
    :class:`~statlift.series.TruncatedSeries` or :class:`~statlift.jet.Jet`
    arguments, always with the same arithmetic.
    """

    variables: tuple
    body: object
    _fn: object = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("variable names must be distinct")
        unknown = free_variables(self.body) - set(self.variables)
        if unknown:
            raise ValueError(f"undeclared variables {sorted(unknown)}")
        index = {name: i for i, name in enumerate(self.variables)}
        object.__setattr__(self, "_fn", _compile(self.body, index))

    @classmethod
    def parse(cls, text: str, variables, line: int = 1, col: int = 1) -> "SmoothMap":
        variables = tuple(variables)
        return cls(variables, parse(text, variables, line, col))

    @property
    def arity(self) -> int:
        return len(self.variables)

    def __call__(self, *args):
        if len(args) != self.arity:
            raise ValueError(f"expected {self.arity} arguments, got {len(args)}")
        return self._fn(args)

    def __str__(self):
        return to_text(self.body)

    def is_constant(self) -> bool:
        return not free_variables(self.body)


def jet_evaluate(f: SmoothMap, args):
    """Evaluate ``f`` on truncated series; coefficient ``k`` of the result is
    the ``k``-th Taylor coefficient of ``f`` along the curve given by ``args``."""
    from .series import TruncatedSeries

    args = [a if isinstance(a, TruncatedSeries) else TruncatedSeries(a) for a in args]
    if len(args) != f.arity:
        raise ValueError(f"expected {f.arity} arguments, got {len(args)}")
    orders = {a.order for a in args}
    if len(orders) > 1:
        raise ValueError(f"series orders differ: {sorted(orders)}")
    order = orders.pop() if orders else 0
    out = f(*args)
    if isinstance(out, TruncatedSeries):
        return out
    return TruncatedSeries.constant(float(out), order)
