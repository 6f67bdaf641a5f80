"""Reference oracles, independent of the code under test.

Exact rational arithmetic (``fractions.Fraction``) and, where exact orbits
grow too large, mpmath's arbitrary-precision interval arithmetic.
"""

from __future__ import annotations

import math
import random
import struct
from fractions import Fraction

from mpmath import iv

from narmax_interval.model import Add, Const, Div, Mul, Neg, Pow, Signal, Sub

MAX = 1.7976931348623157e308


def rd(q: Fraction) -> float:
    """Largest binary64 <= q, by exact comparison."""
    f = float(q)
    if math.isinf(f):
        return MAX if f > 0 else -math.inf
    while Fraction(f) > q:
        f = math.nextafter(f, -math.inf)
    while True:
        g = math.nextafter(f, math.inf)
        if Fraction(g) <= q:
            f = g
        else:
            return f


def ru(q: Fraction) -> float:
    return -rd(-q)


def encloses(lo: float, hi: float, q: Fraction) -> bool:
    return Fraction(lo) <= q <= Fraction(hi)


def ulps_between(a: float, b: float) -> int:
    """Number of binary64 steps from a to b (same sign, finite)."""

    def key(x: float) -> int:
        i = struct.unpack("<q", struct.pack("<d", x))[0]
        return i if i >= 0 else -(i & 0x7FFFFFFFFFFFFFFF)

    return abs(key(a) - key(b))


def random_float(rng: random.Random) -> float:
    kind = rng.random()
    if kind < 0.15:
        return float(rng.randint(-20, 20))
    if kind < 0.25:
        return rng.randint(-1000, 1000) / 2 ** rng.randint(0, 12)
    if kind < 0.6:
        return rng.uniform(-10, 10)
    sign = rng.choice((-1.0, 1.0))
    return sign * math.ldexp(rng.random() + 0.5, rng.randint(-60, 60))


def random_pair(rng: random.Random) -> tuple[float, float]:
    a, b = random_float(rng), random_float(rng)
    return (a, b) if a <= b else (b, a)


def samples(lo: float, hi: float) -> list[Fraction]:
    """Endpoints and exact midpoint as rationals."""
    flo, fhi = Fraction(lo), Fraction(hi)
    return [flo, (flo + fhi) / 2, fhi]


def exact_eval(expr, history, const=lambda text: Fraction(float(text))):
    """Exact rational value of a model tree.

    ``const`` maps a decimal literal to its rational value; the default uses
    the binary64-nearest coefficient, matching degenerate-nearest enclosures.
    """

    def ev(node):
        if isinstance(node, Const):
            return const(node.value.text)
        if isinstance(node, Signal):
            return history[node.signal][node.lag]
        if isinstance(node, Neg):
            return -ev(node.child)
        if isinstance(node, Pow):
            return ev(node.base) ** node.exponent
        a, b = ev(node.left), ev(node.right)
        if isinstance(node, Add):
            return a + b
        if isinstance(node, Sub):
            return a - b
        if isinstance(node, Mul):
            return a * b
        if isinstance(node, Div):
            return a / b
        raise TypeError(node)

    return ev(expr)


def mp_eval(expr, history, prec: int = 512):
    """Rigorous high-precision interval value of a model tree."""
    iv.prec = prec

    def ev(node):
        if isinstance(node, Const):
            return iv.mpf(float(node.value.text))
        if isinstance(node, Signal):
            return history[node.signal][node.lag]
        if isinstance(node, Neg):
            return -ev(node.child)
        if isinstance(node, Pow):
            return ev(node.base) ** node.exponent
        a, b = ev(node.left), ev(node.right)
        if isinstance(node, Add):
            return a + b
        if isinstance(node, Sub):
            return a - b
        if isinstance(node, Mul):
            return a * b
        return a / b

    return ev(expr)


def mp_bounds(x) -> tuple[Fraction, Fraction]:
    """Exact rational endpoints of an mpmath interval."""

    def frac(raw):
        sign, man, exp, _ = raw
        man = -int(man) if sign else int(man)
        return Fraction(man * 2**exp) if exp >= 0 else Fraction(man, 2**-exp)

    a, b = x._mpi_
    return frac(a), frac(b)


def exact_orbit(model, x0: float, horizon: int, input_values=lambda k: 0.0):
    """Exact rational orbit from binary64 initial/input values."""
    slots = max(model.max_lag, 1)
    ys = [Fraction(x0)] * slots
    for k in range(slots + 1, horizon + 1):
        hist = _history(model, ys, k, lambda v: Fraction(v), input_values)
        ys.append(exact_eval(model.expression, hist))
    return ys


def mp_orbit(model, x0: float, horizon: int, input_values=lambda k: 0.0, prec=512):
    """High-precision rigorous interval orbit from binary64 initial values."""
    iv.prec = prec
    slots = max(model.max_lag, 1)
    ys = [iv.mpf(x0)] * slots
    for k in range(slots + 1, horizon + 1):
        hist = _history(model, ys, k, lambda v: iv.mpf(v), input_values)
        ys.append(mp_eval(model.expression, hist, prec))
    return ys


def _history(model, ys, k, lift, input_values):
    hist = {"y": {}, "u": {}, "e": {}}
    for lag in range(1, model.max_lag_y + 1):
        hist["y"][lag] = ys[k - lag - 1]
    for lag in range(1, model.max_lag_u + 1):
        hist["u"][lag] = lift(input_values(k - lag))
    for lag in range(1, model.max_lag_e + 1):
        hist["e"][lag] = lift(0.0)
    return hist
