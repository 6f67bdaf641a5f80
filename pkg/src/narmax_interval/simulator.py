"""Forward simulation of difference-equation models.

Indexing follows the reference tables: ``n = 1 .. L`` (``L`` the largest lag
of the model, at least 1) are initial-condition slots holding ``x0``, and
the first computed value lands at ``n = L + 1``. Signals are indexed the
same way, so ``u(k-3)`` at ``k = 5`` reads ``input_at(u, 2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

from . import interval as iv
from .interval import DecimalLiteral, EnclosureMode, Interval
from .model import EvaluationError, Model, eval_interval, eval_point

__all__ = [
    "InputSignal",
    "SimulationConfig",
    "OrbitPoint",
    "SimulationError",
    "input_at",
    "parse_input_spec",
    "run_interval",
    "run_point",
    "divergence_index",
]

_ZERO = DecimalLiteral("0")


class SimulationError(RuntimeError):
    def __init__(self, message: str, n: int) -> None:
        super().__init__(f"n={n}: {message}")
        self.n = n


@dataclass(frozen=True)
class InputSignal:
    """Exogenous signal: ``zero``, ``constant``, ``step`` or ``sequence``."""

    kind: str = "zero"
    value: DecimalLiteral = _ZERO
    start: int = 1
    values: tuple[DecimalLiteral, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in ("zero", "constant", "step", "sequence"):
            raise ValueError(f"unknown input kind {self.kind!r}")

    @classmethod
    def zero(cls) -> InputSignal:
        return cls()

    @classmethod
    def constant(cls, value: Union[str, DecimalLiteral]) -> InputSignal:
        return cls("constant", value=_lit(value))

    @classmethod
    def step(cls, amplitude: Union[str, DecimalLiteral], start: int = 1) -> InputSignal:
        return cls("step", value=_lit(amplitude), start=start)

    @classmethod
    def sequence(cls, values: Sequence[Union[str, DecimalLiteral]]) -> InputSignal:
        return cls("sequence", values=tuple(_lit(v) for v in values))


def _lit(v: Union[str, DecimalLiteral]) -> DecimalLiteral:
    return v if isinstance(v, DecimalLiteral) else DecimalLiteral(str(v))


def input_at(s: InputSignal, k: int) -> DecimalLiteral:
    if k < 1:
        raise IndexError(f"signal index must be >= 1, got {k}")
    if s.kind == "zero":
        return _ZERO
    if s.kind == "constant":
        return s.value
    if s.kind == "step":
        return s.value if k >= s.start else _ZERO
    if k > len(s.values):
        raise IndexError(f"input sequence has {len(s.values)} values, index {k} requested")
    return s.values[k - 1]


def parse_input_spec(spec: str) -> InputSignal:
    """Parse ``zero``, ``const:<v>``, ``step:<amp>:<start>`` or ``file:<path>``."""
    kind, _, rest = spec.partition(":")
    try:
        if kind == "zero" and not rest:
            return InputSignal.zero()
        if kind == "const":
            return InputSignal.constant(rest)
        if kind == "step":
            amp, _, start = rest.partition(":")
            return InputSignal.step(amp, int(start) if start else 1)
        if kind == "file":
            lines = Path(rest).read_text(encoding="utf-8").split()
            return InputSignal.sequence(lines)
    except (ValueError, iv.DecimalParseError) as exc:
        raise ValueError(f"bad input spec {spec!r}: {exc}") from exc
    raise ValueError(f"bad input spec {spec!r}")


@dataclass(frozen=True)
class SimulationConfig:
    model: Model
    horizon: int
    x0: DecimalLiteral
    input: InputSignal = field(default_factory=InputSignal)
    noise: InputSignal = field(default_factory=InputSignal)
    interval_mode: EnclosureMode = "tight-enclosure"

    def __post_init__(self) -> None:
        object.__setattr__(self, "x0", _lit(self.x0))
        if self.horizon < 1:
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        if self.horizon < self.model.max_lag:
            raise ValueError(
                f"horizon {self.horizon} shorter than model lag {self.model.max_lag}"
            )
        if self.interval_mode not in ("tight-enclosure", "degenerate-nearest"):
            raise ValueError(f"unknown interval mode {self.interval_mode!r}")

    @property
    def initial_slots(self) -> int:
        return max(self.model.max_lag, 1)


@dataclass(frozen=True)
class OrbitPoint:
    n: int
    enclosure: Interval
    width: float
    midpoint: float

    @classmethod
    def of(cls, n: int, enclosure: Interval) -> OrbitPoint:
        return cls(n, enclosure, iv.width(enclosure), iv.midpoint(enclosure))


def _history(cfg: SimulationConfig, outputs: list, k: int, convert) -> dict:
    hist: dict[str, dict[int, object]] = {"y": {}, "u": {}, "e": {}}
    for ref in cfg.model.signal_refs:
        if ref.signal == "y":
            value = outputs[k - ref.lag - 1]
        else:
            source = cfg.input if ref.signal == "u" else cfg.noise
            value = convert(input_at(source, k - ref.lag))
        hist[ref.signal][ref.lag] = value
    return hist


def run_interval(cfg: SimulationConfig) -> list[OrbitPoint]:
    """Guaranteed enclosures of the orbit, one :class:`OrbitPoint` per n."""
    mode = cfg.interval_mode

    def convert(d: DecimalLiteral) -> Interval:
        return iv.from_decimal(d, mode)

    x0 = convert(cfg.x0)
    outputs: list[Interval] = [x0] * cfg.initial_slots
    for k in range(cfg.initial_slots + 1, cfg.horizon + 1):
        try:
            hist = _history(cfg, outputs, k, convert)
            outputs.append(eval_interval(cfg.model, hist, constants=mode))
        except (EvaluationError, IndexError) as exc:
            raise SimulationError(str(exc), k) from exc
    points = []
    for n, x in enumerate(outputs[: cfg.horizon], start=1):
        try:
            points.append(OrbitPoint.of(n, x))
        except iv.UnboundedIntervalError as exc:
            raise SimulationError(str(exc), n) from exc
    return points


def run_point(cfg: SimulationConfig) -> list[float]:
    """Plain round-to-nearest binary64 orbit."""

    def convert(d: DecimalLiteral) -> float:
        return d.nearest

    outputs: list[float] = [cfg.x0.nearest] * cfg.initial_slots
    for k in range(cfg.initial_slots + 1, cfg.horizon + 1):
        try:
            hist = _history(cfg, outputs, k, convert)
            outputs.append(eval_point(cfg.model, hist))
        except (EvaluationError, IndexError) as exc:
            raise SimulationError(str(exc), k) from exc
    return outputs[: cfg.horizon]


def divergence_index(
    a: Sequence[float], b: Sequence[float], threshold: float
) -> Optional[int]:
    """First 1-based n with ``|a_n - b_n| > threshold``, or ``None``."""
    if len(a) != len(b):
        raise ValueError(f"orbit lengths differ: {len(a)} != {len(b)}")
    if not threshold >= 0:
        raise ValueError(f"threshold must be non-negative, got {threshold}")
    for n, (x, y) in enumerate(zip(a, b), start=1):
        d = abs(x - y)
        if d > threshold or math.isnan(d):
            return n
    return None
