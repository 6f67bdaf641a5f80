"""Polynomial difference-equation models: parsing, printing and evaluation.

A model is written ``y(k) = <expr>`` where ``<expr>`` combines decimal
constants, lagged signals ``y(k-i)``, ``u(k-j)``, ``e(k-l)``, the operators
``+ - * / ^`` and parentheses. Trees keep the parsed association order, so
``2.6868*y(k-1) - 0.2462*y(k-1)^3`` and
``2.6868*y(k-1) - (0.2462*y(k-1))*y(k-1)^2`` are different models that
evaluate differently in floating point.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterator, Mapping, Union

from . import interval as iv
from .interval import DecimalLiteral, EnclosureMode, Interval

__all__ = [
    "SIGNALS",
    "Const",
    "Signal",
    "Neg",
    "Add",
    "Sub",
    "Mul",
    "Div",
    "Pow",
    "Expression",
    "Model",
    "ModelError",
    "ModelSyntaxError",
    "ModelSemanticError",
    "EvaluationError",
    "parse_model",
    "parse_expression",
    "load_model",
    "format_expression",
    "eval_point",
    "eval_interval",
]

SIGNALS = ("y", "u", "e")


class ModelError(ValueError):
    pass


class ModelSyntaxError(ModelError):
    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} at position {position}")
        self.position = position


class ModelSemanticError(ModelError):
    pass


class EvaluationError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Const:
    value: DecimalLiteral


@dataclass(frozen=True)
class Signal:
    signal: str
    lag: int

    def __post_init__(self) -> None:
        if self.signal not in SIGNALS:
            raise ModelSemanticError(f"unknown signal {self.signal!r}")
        if self.lag < 1:
            raise ModelSemanticError(
                f"lag of {self.signal}(k-{self.lag}) must be >= 1"
            )


@dataclass(frozen=True)
class Neg:
    child: Expression


@dataclass(frozen=True)
class Add:
    left: Expression
    right: Expression


@dataclass(frozen=True)
class Sub:
    left: Expression
    right: Expression


@dataclass(frozen=True)
class Mul:
    left: Expression
    right: Expression


@dataclass(frozen=True)
class Div:
    left: Expression
    right: Expression


@dataclass(frozen=True)
class Pow:
    base: Expression
    exponent: int

    def __post_init__(self) -> None:
        if self.exponent < 1:
            raise ModelSemanticError(f"exponent must be >= 1, got {self.exponent}")


Expression = Union[Const, Signal, Neg, Add, Sub, Mul, Div, Pow]
_BINARY = (Add, Sub, Mul, Div)


def iter_nodes(expr: Expression) -> Iterator[Expression]:
    yield expr
    if isinstance(expr, Neg):
        yield from iter_nodes(expr.child)
    elif isinstance(expr, Pow):
        yield from iter_nodes(expr.base)
    elif isinstance(expr, _BINARY):
        yield from iter_nodes(expr.left)
        yield from iter_nodes(expr.right)


def degree(expr: Expression) -> int:
    """Total power of signal factors along the heaviest product chain."""
    if isinstance(expr, Const):
        return 0
    if isinstance(expr, Signal):
        return 1
    if isinstance(expr, Neg):
        return degree(expr.child)
    if isinstance(expr, Pow):
        return degree(expr.base) * expr.exponent
    if isinstance(expr, (Add, Sub)):
        return max(degree(expr.left), degree(expr.right))
    return degree(expr.left) + degree(expr.right)


@dataclass(frozen=True)
class Model:
    expression: Expression
    name: str = ""
    max_lag_y: int = field(init=False)
    max_lag_u: int = field(init=False)
    max_lag_e: int = field(init=False)

    def __post_init__(self) -> None:
        lags = {s: 0 for s in SIGNALS}
        for node in iter_nodes(self.expression):
            if isinstance(node, Signal):
                lags[node.signal] = max(lags[node.signal], node.lag)
        object.__setattr__(self, "max_lag_y", lags["y"])
        object.__setattr__(self, "max_lag_u", lags["u"])
        object.__setattr__(self, "max_lag_e", lags["e"])

    @property
    def max_lag(self) -> int:
        return max(self.max_lag_y, self.max_lag_u, self.max_lag_e)

    def lag_of(self, signal: str) -> int:
        return {"y": self.max_lag_y, "u": self.max_lag_u, "e": self.max_lag_e}[signal]

    @property
    def degree(self) -> int:
        return degree(self.expression)

    @property
    def signal_refs(self) -> tuple[Signal, ...]:
        """Distinct lagged signals referenced, sorted by signal then lag."""
        refs = {n for n in iter_nodes(self.expression) if isinstance(n, Signal)}
        return tuple(sorted(refs, key=lambda r: (SIGNALS.index(r.signal), r.lag)))

    def __str__(self) -> str:
        return "y(k) = " + format_expression(self.expression)


# --------------------------------------------------------------------------
# Parsing
# --------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_]\w*)
  | (?P<op>[-+*/^()=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    pos: int


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ModelSyntaxError(f"unexpected character {source[pos]!r}", pos)
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("eof", "", len(source)))
    return tokens


class _Parser:
    """Recursive descent; precedence ``^`` > unary ``-`` > ``* /`` > ``+ -``."""

    def __init__(self, source: str) -> None:
        self.tokens = _tokenize(source)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> _Token:
        t = self.tok
        if t.text != text:
            found = repr(t.text) if t.kind != "eof" else "end of input"
            raise ModelSyntaxError(f"expected {text!r}, found {found}", t.pos)
        return self.advance()

    def model(self) -> Expression:
        t = self.tok
        if t.text != "y":
            raise ModelSyntaxError("model must start with 'y(k) ='", t.pos)
        self.advance()
        self.expect("(")
        self.expect("k")
        self.expect(")")
        self.expect("=")
        expr = self.expr()
        self.end()
        return expr

    def end(self) -> None:
        if self.tok.kind != "eof":
            raise ModelSyntaxError(f"unexpected token {self.tok.text!r}", self.tok.pos)

    def expr(self) -> Expression:
        node = self.term()
        while self.tok.text in ("+", "-"):
            op = self.advance().text
            right = self.term()
            node = Add(node, right) if op == "+" else Sub(node, right)
        return node

    def term(self) -> Expression:
        node = self.unary()
        while self.tok.text in ("*", "/"):
            op = self.advance().text
            right = self.unary()
            node = Mul(node, right) if op == "*" else Div(node, right)
        return node

    def unary(self) -> Expression:
        if self.tok.text == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expression:
        base = self.atom()
        if self.tok.text != "^":
            return base
        self.advance()
        t = self.tok
        if t.kind != "number" or not t.text.isdigit() or int(t.text) < 1:
            raise ModelSemanticError(
                f"exponent at position {t.pos} must be a positive integer literal"
            )
        self.advance()
        if self.tok.text == "^":
            raise ModelSemanticError(
                f"chained exponent at position {self.tok.pos} is not supported"
            )
        return Pow(base, int(t.text))

    def atom(self) -> Expression:
        t = self.tok
        if t.kind == "number":
            self.advance()
            return Const(DecimalLiteral(t.text))
        if t.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        if t.kind == "name":
            return self.signal()
        found = repr(t.text) if t.kind != "eof" else "end of input"
        raise ModelSyntaxError(f"expected operand, found {found}", t.pos)

    def signal(self) -> Signal:
        t = self.advance()
        if t.text not in SIGNALS:
            raise ModelSyntaxError(f"unknown signal {t.text!r}", t.pos)
        self.expect("(")
        self.expect("k")
        sign_tok = self.tok
        if sign_tok.text == ")":
            raise ModelSemanticError(
                f"{t.text}(k) at position {t.pos}: lag must be >= 1"
            )
        if sign_tok.text not in ("-", "+"):
            raise ModelSyntaxError("expected '-' in signal lag", sign_tok.pos)
        self.advance()
        n = self.tok
        if n.kind != "number" or not n.text.isdigit():
            raise ModelSyntaxError("lag must be an integer", n.pos)
        self.advance()
        self.expect(")")
        lag = int(n.text) * (1 if sign_tok.text == "-" else -1)
        if lag < 1:
            raise ModelSemanticError(
                f"{t.text}(k{sign_tok.text}{n.text}) at position {t.pos}: lag must be >= 1"
            )
        return Signal(t.text, lag)


def parse_expression(source: str) -> Expression:
    p = _Parser(source)
    expr = p.expr()
    p.end()
    return expr


def parse_model(source: str, name: str = "") -> Model:
    """Parse ``"y(k) = <expr>"`` into a :class:`Model`."""
    return Model(_Parser(source).model(), name=name)


def load_model(path: Union[str, Path]) -> Model:
    """Read a model file: the first non-comment line holds the equation."""
    path = Path(path)
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            return parse_model(line, name=path.stem)
    raise ModelSyntaxError(f"no model equation in {path}", 0)


# --------------------------------------------------------------------------
# Printing
# --------------------------------------------------------------------------

_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, Pow: 4, Const: 5, Signal: 5}
_SYMBOL = {Add: " + ", Sub: " - ", Mul: "*", Div: "/"}


def format_expression(expr: Expression) -> str:
    """Render with the minimum parentheses that reparse to the same tree."""
    prec = _PREC[type(expr)]
    if isinstance(expr, Const):
        return str(expr.value)
    if isinstance(expr, Signal):
        return f"{expr.signal}(k-{expr.lag})"
    if isinstance(expr, Neg):
        return "-" + _wrap(expr.child, _PREC[type(expr.child)] < prec)
    if isinstance(expr, Pow):
        return _wrap(expr.base, _PREC[type(expr.base)] < 5) + f"^{expr.exponent}"
    left = _wrap(expr.left, _PREC[type(expr.left)] < prec)
    right = _wrap(expr.right, _PREC[type(expr.right)] <= prec)
    return left + _SYMBOL[type(expr)] + right


def _wrap(expr: Expression, parens: bool) -> str:
    s = format_expression(expr)
    return f"({s})" if parens else s


# --------------------------------------------------------------------------
# Evaluation
# --------------------------------------------------------------------------

History = Mapping[str, Mapping[int, object]]


def _lookup(history: History, node: Signal):
    try:
        return history[node.signal][node.lag]
    except KeyError:
        raise EvaluationError(
            f"history has no value for {node.signal}(k-{node.lag})"
        ) from None


def _point_pow(x: float, p: int) -> float:
    # Left-to-right repeated multiplication for bit-exact reproducibility.
    r = x
    for _ in range(p - 1):
        r = r * x
    return r


def eval_point(m: Union[Model, Expression], history: History) -> float:
    """Evaluate once in round-to-nearest binary64, honouring the tree order."""
    expr = m.expression if isinstance(m, Model) else m

    def ev(node: Expression) -> float:
        if isinstance(node, Const):
            return node.value.nearest
        if isinstance(node, Signal):
            return float(_lookup(history, node))
        if isinstance(node, Neg):
            return -ev(node.child)
        if isinstance(node, Pow):
            return _point_pow(ev(node.base), node.exponent)
        a, b = ev(node.left), ev(node.right)
        if isinstance(node, Add):
            return a + b
        if isinstance(node, Sub):
            return a - b
        if isinstance(node, Mul):
            return a * b
        if b == 0.0:
            raise EvaluationError("division by zero")
        return a / b

    return ev(expr)


@lru_cache(maxsize=4096)
def _const_interval(text: str, mode: EnclosureMode) -> Interval:
    return iv.from_decimal(DecimalLiteral(text), mode)


_INTERVAL_OPS: dict[type, Callable[[Interval, Interval], Interval]] = {
    Add: iv.add,
    Sub: iv.sub,
    Mul: iv.mul,
    Div: iv.div,
}


def eval_interval(
    m: Union[Model, Expression],
    history: History,
    constants: EnclosureMode = "degenerate-nearest",
) -> Interval:
    """Natural interval extension of the model tree.

    Every operation is replaced by its outward-rounded interval counterpart
    (``^`` by the tight power). ``constants`` selects how decimal
    coefficients are enclosed.
    """
    expr = m.expression if isinstance(m, Model) else m

    def ev(node: Expression) -> Interval:
        if isinstance(node, Const):
            return _const_interval(node.value.text, constants)
        if isinstance(node, Signal):
            v = _lookup(history, node)
            return v if isinstance(v, Interval) else Interval.point(float(v))
        if isinstance(node, Neg):
            return iv.neg(ev(node.child))
        if isinstance(node, Pow):
            return iv.pow_int(ev(node.base), node.exponent)
        a, b = ev(node.left), ev(node.right)
        try:
            return _INTERVAL_OPS[type(node)](a, b)
        except iv.ZeroDivisionIntervalError as exc:
            raise EvaluationError(str(exc)) from exc

    return ev(expr)
