"""The three published case studies and their reference tables.

Reference values are kept as the literal decimal strings of the published
tables so the comparison knows how many digits each value carries.
"""

from __future__ import annotations

import hashlib
import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import Decimal
from typing import Iterable, Optional

from .interval import DecimalLiteral
from .model import Model, parse_model
from .simulator import InputSignal, OrbitPoint, SimulationConfig, run_interval

__all__ = [
    "CaseDescriptor",
    "CaseInstance",
    "ReferenceRow",
    "RowComparison",
    "CaseReport",
    "UnknownCaseError",
    "CASES",
    "REFERENCE_ROWS",
    "TABULATED_N",
    "PUBLISHED_MEAN_MIDPOINT_DIFF",
    "list_cases",
    "get_case",
    "reference_rows",
    "reference_checksum",
    "compare_row",
    "run_case",
    "run_all",
    "mean_midpoint_differences",
]

TABULATED_N = (1, 5, 10, 20)
HORIZON = 20

# Mean |midpoint difference| per system quoted alongside the tables.
PUBLISHED_MEAN_MIDPOINT_DIFF = {
    "logistic": 6.028e-12,
    "sine": 9.8825e-6,
    "flexible": 6.25e-13,
}


class UnknownCaseError(KeyError):
    pass


@dataclass(frozen=True)
class CaseDescriptor:
    case_id: str
    title: str
    model_source: str
    initial_conditions: tuple[str, ...]
    parameters: tuple[tuple[str, str], ...] = ()
    input_spec: str = "zero"

    @property
    def model(self) -> Model:
        return parse_model(self.model_source, name=self.case_id)

    @property
    def input(self) -> InputSignal:
        if self.input_spec == "zero":
            return InputSignal.zero()
        kind, amp, start = self.input_spec.split(":")
        assert kind == "step"
        return InputSignal.step(amp, int(start))


@dataclass(frozen=True)
class CaseInstance:
    case_id: str
    index: int
    x0: str
    descriptor: CaseDescriptor

    def config(self) -> SimulationConfig:
        return SimulationConfig(
            model=self.descriptor.model,
            horizon=HORIZON,
            x0=DecimalLiteral(self.x0),
            input=self.descriptor.input,
            interval_mode="degenerate-nearest",
        )


CASES: tuple[CaseDescriptor, ...] = (
    CaseDescriptor(
        "logistic",
        "Logistic map",
        "y(k) = 3.99*y(k-1)*(1 - y(k-1))",
        ("0.2", "0.4", "0.6", "0.8"),
        parameters=(("r", "3.99"),),
    ),
    CaseDescriptor(
        "sine",
        "Sine map, polynomial NAR",
        "y(k) = 2.6868*y(k-1) - 0.2462*y(k-1)^3",
        ("0.1", "0.2", "0.5", "0.8"),
    ),
    CaseDescriptor(
        "flexible",
        "Flexible transmission, ARX",
        "y(k) = 1.41833*y(k-1) - 1.58939*y(k-2) + 1.31608*y(k-3)"
        " - 0.88642*y(k-4) + 0.28261*u(k-3) + 0.50666*u(k-4)",
        ("0.1", "0.2", "0.6", "0.8"),
        input_spec="step:1:1",
    ),
)

# case, x0, n, proposed width, proposed midpoint, intlab width, intlab midpoint
_TABLES = """
logistic 0.2  1 0          0.2                0          0.2
logistic 0.2  5 9.7700e-15 0.821645072786575  2.0095e-14 0.821645072786575
logistic 0.2 10 9.8366e-12 0.973482128268848  2.0389e-11 0.973482128268850
logistic 0.2 20 1.0059e-05 0.013337715656825  2.0851e-05 0.013337715672009
logistic 0.4  1 0          0.4                0          0.4
logistic 0.4  5 1.3212e-14 0.990570357273853  1.5876e-14 0.990570357273853
logistic 0.4 10 1.3349e-11 0.011714690634153  1.6068e-11 0.011714690634153
logistic 0.4 20 1.3652e-05 0.751597796573294  1.6432e-05 0.751597796578654
logistic 0.6  1 0          0.6                0          0.6
logistic 0.6  5 1.2768e-14 0.990570357273852  1.6320e-14 0.990570357273852
logistic 0.6 10 1.2898e-11 0.011714690634148  1.6517e-11 0.011714690634148
logistic 0.6 20 1.3190e-05 0.751597796556068  1.6892e-05 0.751597796562074
logistic 0.8  1 0          0.8                0          0.8
logistic 0.8  5 9.5479e-15 0.821645072786574  2.0206e-14 0.821645072786574
logistic 0.8 10 9.6391e-12 0.973482128268856  2.0502e-11 0.973482128268857
logistic 0.8 20 9.8575e-06 0.013337715653912  2.0967e-05 0.013337715669766
sine     0.1  1 0          0.1                0          0.1
sine     0.1  5 1.2879e-14 3.408933569627769  1.3323e-14 3.408933569627769
sine     0.1 10 5.5898e-11 -0.847910701541987 5.9273e-11 -0.847910701542015
sine     0.1 20 1.3298e-04 2.811807282224221  1.4101e-04 2.811807282254640
sine     0.2  1 0          0.2                0          0.2
sine     0.2  5 4.9738e-14 1.052283645351666  5.7732e-14 1.052283645351667
sine     0.2 10 7.3143e-10 -0.135225347633812 8.5036e-10 -0.135225347633797
sine     0.2 20 1.5060e-02 0.407773577433717  1.7509e-02 0.407773930714991
sine     0.5  1 0          0.5                0          0.5
sine     0.5  5 9.5035e-14 3.229051816564168  1.0347e-13 3.229051816564168
sine     0.5 10 6.1926e-10 1.811036103169470  6.7462e-10 1.811036103169525
sine     0.5 20 9.7948e-03 3.162513358524606  1.0670e-02 3.162513081155066
sine     0.8  1 0          0.8                0          0.8
sine     0.8  5 2.2116e-13 -1.371443155591735 2.6712e-13 -1.371443155591733
sine     0.8 10 1.6245e-09 -3.378411778526505 1.9624e-09 -3.378411778526536
sine     0.8 20 2.6918e-01 0.207611416301658  3.2517e-01 0.207453930188374
flexible 0.1  1 0          0.1                0          0.1
flexible 0.1  5 1.1102e-16 0.815130000000000  3.3307e-16 0.815130000000000
flexible 0.1 10 5.4623e-14 1.475024309409214  7.5939e-14 1.475024309409214
flexible 0.1 20 3.2540e-10 -0.385319792715174 4.4843e-10 -0.385319792715172
flexible 0.2  1 0          0.2                0          0.2
flexible 0.2  5 3.3307e-16 0.840990000000000  4.4409e-16 0.840990000000000
flexible 0.2 10 6.1062e-14 1.432470784456269  8.1712e-14 1.432470784456269
flexible 0.2 20 3.6389e-10 -0.406693858836176 4.8523e-10 -0.406693858836177
flexible 0.6  1 0          0.6                0          0.6
flexible 0.6  5 5.5511e-16 0.944430000000000  1.1102e-15 0.944430000000000
flexible 0.6 10 6.5281e-14 1.262256684644492  1.0791e-13 1.262256684644491
flexible 0.6 20 3.8598e-10 -0.492190123320189 6.3973e-10 -0.492190123320189
flexible 0.8  1 0          0.8                0          0.8
flexible 0.8  5 8.8818e-16 0.996150000000000  1.4433e-15 0.996150000000000
flexible 0.8 10 8.3933e-14 1.177149634738603  1.1702e-13 1.177149634738603
flexible 0.8 20 4.9464e-10 -0.534938255562194 6.9073e-10 -0.534938255562196
"""


def round_to_printed(value: float, printed: str) -> float:
    """Round ``value`` to the number of significant digits in ``printed``.

    A zero reference keeps ``value`` unchanged.
    """
    d = Decimal(printed)
    if d == 0 or not math.isfinite(value):
        return value
    quantum = Decimal(1).scaleb(d.as_tuple().exponent)
    return float(Decimal(value).quantize(quantum))


@dataclass(frozen=True)
class ReferenceRow:
    case_id: str
    x0: str
    n: int
    proposed_width_text: str
    proposed_midpoint_text: str
    intlab_width_text: str
    intlab_midpoint_text: str

    @property
    def key(self) -> tuple[str, str, int]:
        return (self.case_id, self.x0, self.n)

    @property
    def proposed_width(self) -> float:
        return float(self.proposed_width_text)

    @property
    def proposed_midpoint(self) -> float:
        return float(self.proposed_midpoint_text)

    @property
    def intlab_width(self) -> float:
        return float(self.intlab_width_text)

    @property
    def intlab_midpoint(self) -> float:
        return float(self.intlab_midpoint_text)

    def fields(self) -> tuple[str, ...]:
        return (
            self.case_id,
            self.x0,
            str(self.n),
            self.proposed_width_text,
            self.proposed_midpoint_text,
            self.intlab_width_text,
            self.intlab_midpoint_text,
        )


def _load_rows() -> tuple[ReferenceRow, ...]:
    rows = []
    for line in _TABLES.strip().splitlines():
        case_id, x0, n, pw, pm, iw, im = line.split()
        rows.append(ReferenceRow(case_id, x0, int(n), pw, pm, iw, im))
    return tuple(rows)


REFERENCE_ROWS: tuple[ReferenceRow, ...] = _load_rows()
_ROW_INDEX = {row.key: row for row in REFERENCE_ROWS}


def reference_rows(case_id: Optional[str] = None) -> list[ReferenceRow]:
    return [r for r in REFERENCE_ROWS if case_id is None or r.case_id == case_id]


def reference_checksum() -> str:
    """SHA-256 over the embedded reference rows in table order."""
    h = hashlib.sha256()
    for row in REFERENCE_ROWS:
        h.update((",".join(row.fields()) + "\n").encode("ascii"))
    return h.hexdigest()


def get_case(case_id: str) -> CaseDescriptor:
    for case in CASES:
        if case.case_id == case_id:
            return case
    raise UnknownCaseError(case_id)


def list_cases() -> list[CaseInstance]:
    return [
        CaseInstance(case.case_id, i, x0, case)
        for case in CASES
        for i, x0 in enumerate(case.initial_conditions, start=1)
    ]


@dataclass(frozen=True)
class RowComparison:
    reference: ReferenceRow
    width: float
    midpoint: float
    width_vs_intlab: float
    midpoint_abs_diff: float
    narrower_than_intlab: bool
    same_order_as_proposed: bool
    midpoint_agrees: bool

    @property
    def passed(self) -> bool:
        return (
            self.narrower_than_intlab
            and self.same_order_as_proposed
            and self.midpoint_agrees
        )

    @property
    def failures(self) -> list[str]:
        out = []
        if not self.narrower_than_intlab:
            out.append("width exceeds Intlab width")
        if not self.same_order_as_proposed:
            out.append("width above 10x published width")
        if not self.midpoint_agrees:
            out.append("midpoint disagrees")
        return out


def compare_row(computed: OrbitPoint, ref: ReferenceRow) -> RowComparison:
    """Check one orbit point against a published row.

    Passing needs (a) width no larger than the Intlab width, compared at
    the digits the table prints; (b) width within 10x the published
    proposed-method width; (c) midpoint within
    ``max(width, published width, 1e-12)`` of the published midpoint.
    """
    if computed.n != ref.n:
        raise ValueError(f"row mismatch: computed n={computed.n}, reference n={ref.n}")
    w, m = computed.width, computed.midpoint
    iw, pw = ref.intlab_width, ref.proposed_width
    printed_w = round_to_printed(w, ref.intlab_width_text)
    diff = abs(m - ref.proposed_midpoint)
    return RowComparison(
        reference=ref,
        width=w,
        midpoint=m,
        width_vs_intlab=(w / iw) if iw else (0.0 if w == 0 else float("inf")),
        midpoint_abs_diff=diff,
        narrower_than_intlab=printed_w <= iw,
        same_order_as_proposed=w <= 10.0 * pw,
        midpoint_agrees=diff <= max(w, pw, 1e-12),
    )


@dataclass(frozen=True)
class CaseReport:
    case_id: str
    x0: str
    rows: tuple[RowComparison, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)


def run_case(case_id: str, x0: str) -> CaseReport:
    case = get_case(case_id)
    if x0 not in case.initial_conditions:
        raise UnknownCaseError(f"{case_id} has no tabulated x0={x0}")
    inst = CaseInstance(case_id, case.initial_conditions.index(x0) + 1, x0, case)
    orbit = run_interval(inst.config())
    rows = tuple(
        compare_row(orbit[n - 1], _ROW_INDEX[(case_id, x0, n)]) for n in TABULATED_N
    )
    return CaseReport(case_id, x0, rows)


def run_all(
    instances: Optional[Iterable[CaseInstance]] = None, jobs: int = 1
) -> list[CaseReport]:
    """Run case instances, returning reports in (case, x0) table order."""
    todo = list(instances) if instances is not None else list_cases()
    args = [(i.case_id, i.x0) for i in todo]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(lambda a: run_case(*a), args))
    else:
        reports = [run_case(*a) for a in args]
    order = {(i.case_id, i.x0): k for k, i in enumerate(list_cases())}
    return sorted(reports, key=lambda r: order[(r.case_id, r.x0)])


def mean_midpoint_differences(reports: Iterable[CaseReport]) -> dict[str, float]:
    """Mean ``|computed - published|`` midpoint difference per system."""
    by_case: dict[str, list[float]] = {}
    for rep in reports:
        by_case.setdefault(rep.case_id, []).extend(r.midpoint_abs_diff for r in rep.rows)
    return {k: statistics.fmean(v) for k, v in by_case.items()}
