"""Closed intervals with binary64 endpoints and outward-rounded arithmetic.

Directed rounding is emulated without touching the FPU rounding mode: each
endpoint is computed in round-to-nearest, the rounding error is recovered
with an error-free transformation, and the endpoint is moved one ulp
outward only when the nearest result lies on the wrong side of the exact
value. The endpoints are therefore the correctly rounded directed results,
and exact operations are never widened.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Union

__all__ = [
    "Interval",
    "DecimalLiteral",
    "EnclosureMode",
    "IntervalError",
    "ZeroDivisionIntervalError",
    "UnboundedIntervalError",
    "DecimalParseError",
    "from_decimal",
    "add",
    "sub",
    "mul",
    "div",
    "neg",
    "reciprocal",
    "pow_int",
    "width",
    "midpoint",
    "contains",
    "subset",
    "round_down",
    "round_up",
    "add_rounded",
    "mul_rounded",
]

EnclosureMode = Literal["tight-enclosure", "degenerate-nearest"]

INF = math.inf
_MAX = 1.7976931348623157e308

# Veltkamp splitting constant 2^27 + 1 and the magnitude window in which
# Dekker's product is exact (no overflow in the split, no underflow in the
# error term). Outside the window we fall back to exact rationals.
_SPLITTER = 134217729.0
_SPLIT_LIMIT = 2.0**995
_PRODUCT_FLOOR = 2.0**-960


class IntervalError(ValueError):
    pass


class ZeroDivisionIntervalError(IntervalError, ZeroDivisionError):
    """Divisor interval contains zero, so the quotient is unbounded."""


class UnboundedIntervalError(IntervalError):
    pass


class DecimalParseError(IntervalError):
    pass


def round_down(x: float) -> float:
    return math.nextafter(x, -INF)


def round_up(x: float) -> float:
    return math.nextafter(x, INF)


def _directed_from_error(s: float, err: float | Fraction) -> tuple[float, float]:
    """Turn a nearest result and the sign of (exact - s) into (down, up)."""
    if err > 0:
        return s, round_up(s)
    if err < 0:
        return round_down(s), s
    return s, s


def _overflowed(s: float) -> tuple[float, float]:
    # Finite operands whose exact result is beyond the finite range.
    if s > 0:
        return _MAX, INF
    return -INF, -_MAX


def add_rounded(a: float, b: float) -> tuple[float, float]:
    """Return ``(a + b)`` rounded toward -inf and toward +inf."""
    s = a + b
    if math.isinf(s):
        if math.isinf(a) or math.isinf(b):
            return s, s
        return _overflowed(s)
    # Knuth TwoSum: err is exactly (a + b) - s.
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return _directed_from_error(s, err)


def _split(a: float) -> tuple[float, float]:
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def mul_rounded(a: float, b: float) -> tuple[float, float]:
    """Return ``(a * b)`` rounded toward -inf and toward +inf.

    The interval convention 0 * inf = 0 applies.
    """
    if a == 0.0 or b == 0.0:
        return 0.0, 0.0
    p = a * b
    if math.isinf(p):
        if math.isinf(a) or math.isinf(b):
            return p, p
        return _overflowed(p)
    ap, bp = abs(a), abs(b)
    if ap < _SPLIT_LIMIT and bp < _SPLIT_LIMIT and abs(p) > _PRODUCT_FLOOR:
        a_hi, a_lo = _split(a)
        b_hi, b_lo = _split(b)
        err = ((a_hi * b_hi - p) + a_hi * b_lo + a_lo * b_hi) + a_lo * b_lo
        return _directed_from_error(p, err)
    return _directed_from_error(p, Fraction(a) * Fraction(b) - Fraction(p))


def div_rounded(a: float, b: float) -> tuple[float, float]:
    """Return ``(a / b)`` rounded toward -inf and toward +inf, for b != 0."""
    if a == 0.0:
        return 0.0, 0.0
    if math.isinf(b):
        if math.isinf(a):
            # Only reachable through unbounded/unbounded; the quotient set is
            # then unbounded as well.
            return -INF, INF
        return 0.0, 0.0
    q = a / b
    if math.isinf(q):
        if math.isinf(a):
            return q, q
        return _overflowed(q)
    return _directed_from_error(q, Fraction(a) / Fraction(b) - Fraction(q))


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]``; ``lo == hi`` stands for a real number."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi):
            raise IntervalError(f"NaN endpoint in [{lo!r}, {hi!r}]")
        if lo > hi:
            raise IntervalError(f"lower endpoint exceeds upper: [{lo!r}, {hi!r}]")
        if lo == INF or hi == -INF:
            raise IntervalError(f"empty unbounded interval [{lo!r}, {hi!r}]")
        # -0.0 + 0.0 == +0.0
        object.__setattr__(self, "lo", lo + 0.0)
        object.__setattr__(self, "hi", hi + 0.0)

    @classmethod
    def point(cls, x: float) -> Interval:
        return cls(x, x)

    @property
    def is_degenerate(self) -> bool:
        return self.lo == self.hi

    @property
    def is_bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    def __add__(self, other: Interval) -> Interval:
        return add(self, _coerce(other))

    def __radd__(self, other: float) -> Interval:
        return add(_coerce(other), self)

    def __sub__(self, other: Interval) -> Interval:
        return sub(self, _coerce(other))

    def __rsub__(self, other: float) -> Interval:
        return sub(_coerce(other), self)

    def __mul__(self, other: Interval) -> Interval:
        return mul(self, _coerce(other))

    def __rmul__(self, other: float) -> Interval:
        return mul(_coerce(other), self)

    def __truediv__(self, other: Interval) -> Interval:
        return div(self, _coerce(other))

    def __rtruediv__(self, other: float) -> Interval:
        return div(_coerce(other), self)

    def __neg__(self) -> Interval:
        return neg(self)

    def __pow__(self, p: int) -> Interval:
        return pow_int(self, p)

    def __contains__(self, x: float) -> bool:
        return contains(self, x)

    def __repr__(self) -> str:
        return f"Interval({self.lo!r}, {self.hi!r})"

    def to_json(self, hex_floats: bool = False) -> dict[str, Union[float, str]]:
        if hex_floats:
            return {"lo": self.lo.hex(), "hi": self.hi.hex()}
        return {"lo": self.lo, "hi": self.hi}

    @classmethod
    def from_json(cls, obj: dict) -> Interval:
        return cls(_json_float(obj["lo"]), _json_float(obj["hi"]))


def _json_float(v: Union[float, int, str]) -> float:
    if isinstance(v, str):
        try:
            return float.fromhex(v)
        except ValueError:
            return float(v)
    return float(v)


def _coerce(x: Union[Interval, float, int]) -> Interval:
    if isinstance(x, Interval):
        return x
    if isinstance(x, (int, float)):
        return Interval.point(float(x))
    return NotImplemented  # type: ignore[return-value]


_DECIMAL_RE = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


@dataclass(frozen=True)
class DecimalLiteral:
    """Exact decimal text, kept unrounded until an enclosure is requested."""

    text: str

    def __post_init__(self) -> None:
        text = self.text.strip()
        if not _DECIMAL_RE.fullmatch(text):
            raise DecimalParseError(f"malformed decimal literal {self.text!r}")
        object.__setattr__(self, "text", text)

    @property
    def exact(self) -> Fraction:
        return Fraction(self.text)

    @property
    def nearest(self) -> float:
        return float(self.text)

    def __str__(self) -> str:
        return self.text


def from_decimal(
    d: Union[DecimalLiteral, str], mode: EnclosureMode = "tight-enclosure"
) -> Interval:
    """Enclose a decimal literal.

    ``tight-enclosure`` gives the two binary64 neighbours bracketing the exact
    value (a single point when it is representable); ``degenerate-nearest``
    gives the round-to-nearest point.
    """
    if not isinstance(d, DecimalLiteral):
        d = DecimalLiteral(d)
    x = d.nearest
    if mode == "degenerate-nearest":
        return Interval(x, x)
    if mode != "tight-enclosure":
        raise ValueError(f"unknown enclosure mode {mode!r}")
    if math.isinf(x):
        return Interval(*_overflowed(x))
    lo, hi = _directed_from_error(x, d.exact - Fraction(x))
    return Interval(lo, hi)


def add(x: Interval, y: Interval) -> Interval:
    return Interval(add_rounded(x.lo, y.lo)[0], add_rounded(x.hi, y.hi)[1])


def sub(x: Interval, y: Interval) -> Interval:
    return Interval(add_rounded(x.lo, -y.hi)[0], add_rounded(x.hi, -y.lo)[1])


def neg(x: Interval) -> Interval:
    return Interval(-x.hi, -x.lo)


def mul(x: Interval, y: Interval) -> Interval:
    prods = [
        mul_rounded(x.lo, y.lo),
        mul_rounded(x.lo, y.hi),
        mul_rounded(x.hi, y.lo),
        mul_rounded(x.hi, y.hi),
    ]
    return Interval(min(p[0] for p in prods), max(p[1] for p in prods))


def reciprocal(y: Interval) -> Interval:
    if y.lo <= 0.0 <= y.hi:
        raise ZeroDivisionIntervalError(f"divisor {y!r} contains zero")
    return Interval(div_rounded(1.0, y.hi)[0], div_rounded(1.0, y.lo)[1])


def div(x: Interval, y: Interval) -> Interval:
    """Quotient ``x / y`` for a divisor that excludes zero.

    Endpoint quotients are rounded directly rather than through a rounded
    reciprocal, which keeps exact quotients such as 6/3 degenerate.
    """
    if y.lo <= 0.0 <= y.hi:
        raise ZeroDivisionIntervalError(f"divisor {y!r} contains zero")
    quots = [
        div_rounded(x.lo, y.lo),
        div_rounded(x.lo, y.hi),
        div_rounded(x.hi, y.lo),
        div_rounded(x.hi, y.hi),
    ]
    return Interval(min(q[0] for q in quots), max(q[1] for q in quots))


def _pow_magnitude(a: float, p: int, upward: bool) -> float:
    # a >= 0; each partial product is nonnegative, so chaining one-sided
    # roundings stays one-sided.
    side = 1 if upward else 0
    r = a
    for _ in range(p - 1):
        r = mul_rounded(r, a)[side]
    return r


def pow_int(x: Interval, p: int) -> Interval:
    """Tight integer power (not repeated interval multiplication).

    Odd powers are monotone, so the endpoints are raised directly; even
    powers use the smallest and largest magnitudes in ``x``.
    """
    if isinstance(p, bool) or not isinstance(p, int):
        raise TypeError("exponent must be an int")
    if p < 1:
        raise ValueError(f"exponent must be >= 1, got {p}")
    if p == 1:
        return x
    if p % 2:
        if x.lo >= 0.0:
            lo = _pow_magnitude(x.lo, p, upward=False)
        else:
            lo = -_pow_magnitude(-x.lo, p, upward=True)
        if x.hi >= 0.0:
            hi = _pow_magnitude(x.hi, p, upward=True)
        else:
            hi = -_pow_magnitude(-x.hi, p, upward=False)
        return Interval(lo, hi)
    if x.lo <= 0.0 <= x.hi:
        small = 0.0
    else:
        small = min(abs(x.lo), abs(x.hi))
    big = max(abs(x.lo), abs(x.hi))
    return Interval(_pow_magnitude(small, p, False), _pow_magnitude(big, p, True))


def width(x: Interval) -> float:
    """``hi - lo`` rounded upward; infinite for unbounded intervals."""
    if x.is_degenerate:
        return 0.0
    return add_rounded(x.hi, -x.lo)[1]


def midpoint(x: Interval) -> float:
    if not x.is_bounded:
        raise UnboundedIntervalError(f"midpoint of unbounded interval {x!r}")
    m = (x.lo + x.hi) / 2.0
    if math.isinf(m):
        m = x.lo / 2.0 + x.hi / 2.0
    # Guard against rounding pushing the centre outside very narrow intervals.
    return min(max(m, x.lo), x.hi)


def contains(x: Interval, v: float) -> bool:
    return x.lo <= v <= x.hi


def subset(x: Interval, y: Interval) -> bool:
    """True when ``x`` lies inside ``y``."""
    return y.lo <= x.lo and x.hi <= y.hi
