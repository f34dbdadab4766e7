# -*- coding: utf-8 -*-
#
# Copyright (c) 2022 CSIRO Space and Astronomy.
#
# Distributed under the terms of the CSIRO Open Source Software Licence
# Agreement. See LICENSE for more info.
""" Text Tables for Results and Suite Reports """

import typing

from rich.box import SQUARE
from rich.console import Console
from rich.table import Table
from rich.text import Text

from minkowski_coapprox.analysis import SuiteReport
from minkowski_coapprox.coapprox import CoapproxResult, CoapproxStatus
from minkowski_coapprox.gauge import EquivalenceConstants
from minkowski_coapprox.witness import (
    ChordWitness,
    SeparationWitness,
    WitnessVerification,
)

TEXT_WIDTH = 100
"""fixed so that text output does not depend on the terminal"""

STATUS_STYLES = {
    CoapproxStatus.NON_EMPTY: "green",
    CoapproxStatus.EMPTY: "red",
    CoapproxStatus.UNDECIDED: "yellow",
}

MAX_ROWS = 20
"""rows of a suite's row table shown before eliding the rest"""


def _number(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, (list, tuple)):
        return "(" + ", ".join(_number(v) for v in value) + ")"
    return f"{value}"


def _key_value_table(title: str, items: typing.Iterable) -> Table:
    table = Table(
        "Parameter", "Value", title=title, show_header=False, box=SQUARE
    )
    for name, value in items:
        if not isinstance(value, Text):
            value = Text(_number(value))
        table.add_row(name, value)
    return table


def generate_value_table(value: float) -> Table:
    """Create gauge value table."""
    return _key_value_table("Gauge", [("γ(x)", value)])


def generate_coapprox_table(result: CoapproxResult) -> Table:
    """Create coapproximation result table."""
    status = Text(result.status.value, style=STATUS_STYLES[result.status])
    witness = None if result.witness is None else result.witness.tolist()
    return _key_value_table(
        "Best Coapproximation",
        [
            ("Status", status),
            ("Witness", witness),
            ("Violation", result.violation_at_witness),
            ("Lower bound", result.emptiness_lower_bound),
            ("Rounds", result.iterations),
            ("Cuts", len(result.active_z)),
        ],
    )


def generate_best_approx_table(point, distance: float) -> Table:
    """Create best approximation table."""
    return _key_value_table(
        "Best Approximation",
        [("Point", list(point)), ("Distance", distance)],
    )


def generate_witness_table(witness: ChordWitness) -> Table:
    """Create chord witness table."""
    return _key_value_table(
        "Chord Witness",
        [
            ("x0", witness.x0.tolist()),
            ("x1", witness.x1.tolist()),
            ("y0", witness.y0.tolist()),
            ("y1", witness.y1.tolist()),
            ("λ", witness.lam),
            ("Target", witness.target.tolist()),
            ("Approximate", witness.approximate),
        ],
    )


def generate_no_witness_table(reason: str) -> Table:
    """Create table for a gauge without a chord witness."""
    return _key_value_table(
        "Chord Witness",
        [("Found", Text("False", style="red")), ("Reason", reason)],
    )


def generate_verification_table(verification: WitnessVerification) -> Table:
    """Create witness verification table, failed steps in red."""
    table = Table("Check", "Passed", "Detail", title="Checks", box=SQUARE)
    for name, passed, detail in verification.steps:
        style = None if passed else "red"
        table.add_row(name, Text(f"{passed}", style=style), detail)
    return table


def generate_separation_table(separation: SeparationWitness) -> Table:
    """Create hyperplane extension table."""
    status = separation.hyperplane_status
    return _key_value_table(
        "Hyperplane",
        [
            ("h", separation.functional.coeffs.tolist()),
            ("n0", separation.n0),
            ("Margin", separation.margin),
            ("Samples", len(separation.samples)),
            ("Status", Text(status.value, style=STATUS_STYLES[status])),
        ],
    )


def generate_bisector_table(summary: dict) -> Table:
    """Create bisector summary table."""
    items = [
        ("Window", summary["window"]),
        ("Resolution", summary["resolution"]),
        ("Band", summary["band_tol"]),
        ("Reversed", summary["reverse"]),
    ]
    items += [
        (f"Cells {label}", count)
        for label, count in summary["labels"].items()
    ]
    items += [
        ("Contours", summary["contours"]),
        ("Contour vertices", summary["contour_vertices"]),
    ]
    return _key_value_table("Bisector", items)


def generate_constants_table(constants: EquivalenceConstants) -> Table:
    """Create equivalence constants table."""
    return _key_value_table(
        "Equivalence",
        [
            ("c0", constants.c0),
            ("c1", constants.c1),
            ("Approximate", constants.approximate),
        ],
    )


def generate_suite_table(report: SuiteReport) -> Table:
    """Create one row per suite: cases, failures and worst margins."""
    table = Table(
        "Suite", "Cases", "Failures", "Margins", title="Suites", box=SQUARE
    )
    for suite in report.suites or [report]:
        failures = len(suite.failures) + sum(
            len(s.failures) for s in suite.suites
        )
        cases = suite.cases + sum(s.cases for s in suite.suites)
        if failures:
            outcome = Text(f"{failures}", style="red")
        elif suite.inconclusive:
            outcome = Text("inconclusive", style="yellow")
        else:
            outcome = Text("0", style="green")
        margins = ", ".join(
            f"{name} {value:.3g}" for name, value in suite.margins.items()
        )
        table.add_row(suite.name, f"{cases}", outcome, margins)
    return table


def generate_rows_table(report: SuiteReport) -> typing.Optional[Table]:
    """Create a table of a suite's rows, or None if it has none."""
    if not report.rows:
        return None
    columns = list(report.rows[0])
    table = Table(*columns, title=report.name, box=SQUARE)
    for row in report.rows[:MAX_ROWS]:
        table.add_row(*(_number(row.get(c)) for c in columns))
    if len(report.rows) > MAX_ROWS:
        table.caption = f"{len(report.rows) - MAX_ROWS} more rows"
    return table


def suite_renderables(report: SuiteReport) -> list:
    """Summary table, row tables and notes of a (nested) report"""
    renderables = [generate_suite_table(report)]
    for suite in report.suites or [report]:
        rows = generate_rows_table(suite)
        if rows is not None:
            renderables.append(rows)
        renderables += [Text(f"{suite.name}: {n}") for n in suite.notes]
    renderables += [Text(note) for note in report.notes]
    return renderables


def render_text(renderables: typing.Iterable, stream: typing.TextIO):
    """Print tables and text to a stream, without colour codes"""
    console = Console(
        file=stream, width=TEXT_WIDTH, no_color=True, highlight=False
    )
    for renderable in renderables:
        console.print(renderable)
