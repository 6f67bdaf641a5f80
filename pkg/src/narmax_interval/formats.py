"""CSV/JSON writers for orbits, divergence series and case reports."""

from __future__ import annotations

import csv
import io
import json
from typing import Iterable, Optional, Sequence

from .casebook import CaseReport
from .simulator import OrbitPoint

ORBIT_HEADER = ("n", "lo", "hi", "width", "midpoint")
POINT_HEADER = ("n", "value")
SERIES_HEADER = ("n", "a", "b", "absdiff")
REPORT_HEADER = (
    "case",
    "x0",
    "n",
    "width",
    "midpoint",
    "ref_width",
    "ref_midpoint",
    "intlab_width",
    "intlab_midpoint",
    "pass",
)


def fmt_float(x: float, hex_floats: bool = False) -> str:
    """17 significant digits (round-trippable) or a hex float."""
    if hex_floats:
        return x.hex()
    return format(x, ".17g")


def _csv(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def orbit_csv(points: Sequence[OrbitPoint], hex_floats: bool = False) -> str:
    f = lambda x: fmt_float(x, hex_floats)  # noqa: E731
    return _csv(
        ORBIT_HEADER,
        (
            (p.n, f(p.enclosure.lo), f(p.enclosure.hi), f(p.width), f(p.midpoint))
            for p in points
        ),
    )


def orbit_json(points: Sequence[OrbitPoint], hex_floats: bool = False) -> str:
    f = (lambda x: x.hex()) if hex_floats else (lambda x: x)
    doc = [
        {
            "n": p.n,
            "enclosure": p.enclosure.to_json(hex_floats),
            "width": f(p.width),
            "midpoint": f(p.midpoint),
        }
        for p in points
    ]
    return json.dumps(doc, indent=2) + "\n"


def point_orbit_csv(values: Sequence[float], hex_floats: bool = False) -> str:
    return _csv(
        POINT_HEADER, ((n, fmt_float(v, hex_floats)) for n, v in enumerate(values, 1))
    )


def point_orbit_json(values: Sequence[float], hex_floats: bool = False) -> str:
    doc = [
        {"n": n, "value": v.hex() if hex_floats else v}
        for n, v in enumerate(values, 1)
    ]
    return json.dumps(doc, indent=2) + "\n"


def series_csv(a: Sequence[float], b: Sequence[float], hex_floats: bool = False) -> str:
    f = lambda x: fmt_float(x, hex_floats)  # noqa: E731
    return _csv(
        SERIES_HEADER,
        ((n, f(x), f(y), f(abs(x - y))) for n, (x, y) in enumerate(zip(a, b), 1)),
    )


def _report_rows(reports: Iterable[CaseReport], hex_floats: bool):
    f = lambda x: fmt_float(x, hex_floats)  # noqa: E731
    for rep in reports:
        for row in rep.rows:
            ref = row.reference
            yield (
                rep.case_id,
                rep.x0,
                ref.n,
                f(row.width),
                f(row.midpoint),
                ref.proposed_width_text,
                ref.proposed_midpoint_text,
                ref.intlab_width_text,
                ref.intlab_midpoint_text,
                "true" if row.passed else "false",
            )


def report_csv(reports: Iterable[CaseReport], hex_floats: bool = False) -> str:
    return _csv(REPORT_HEADER, _report_rows(reports, hex_floats))


def report_json(
    reports: Iterable[CaseReport],
    hex_floats: bool = False,
    summary: Optional[dict] = None,
) -> str:
    rows = []
    for rep in reports:
        for row in rep.rows:
            rows.append(
                {
                    "case": rep.case_id,
                    "x0": rep.x0,
                    "n": row.reference.n,
                    "width": row.width.hex() if hex_floats else row.width,
                    "midpoint": row.midpoint.hex() if hex_floats else row.midpoint,
                    "ref_width": row.reference.proposed_width_text,
                    "ref_midpoint": row.reference.proposed_midpoint_text,
                    "intlab_width": row.reference.intlab_width_text,
                    "intlab_midpoint": row.reference.intlab_midpoint_text,
                    "width_vs_intlab": row.width_vs_intlab,
                    "midpoint_abs_diff": row.midpoint_abs_diff,
                    "pass": row.passed,
                    "failures": row.failures,
                }
            )
    doc = {"rows": rows}
    if summary is not None:
        doc["summary"] = summary
    return json.dumps(doc, indent=2) + "\n"
