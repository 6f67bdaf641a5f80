"""Interval simulation of polynomial NARMAX models with outward rounding."""

from .interval import (
    DecimalLiteral,
    Interval,
    add,
    contains,
    div,
    from_decimal,
    midpoint,
    mul,
    pow_int,
    sub,
    subset,
    width,
)
from .model import Model, eval_interval, eval_point, parse_model
from .simulator import (
    InputSignal,
    OrbitPoint,
    SimulationConfig,
    divergence_index,
    run_interval,
    run_point,
)

__version__ = "0.1.0"
