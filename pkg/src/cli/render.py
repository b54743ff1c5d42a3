"""
Rendering of reports, dimension tables and structure constants as table, json or csv
"""

import csv
import io
import json
from typing import Any, Mapping, Optional, Sequence

from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.text import Text
from tabulate import tabulate

from src.models.complexes import CalculusTable
from src.models.enums import CheckStatus, OutputFormat
from src.models.field import Field
from src.models.homology import HomologySpace
from src.models.schemas import Report

CHECK_COLUMNS = ["id", "status", "detail", "witness"]

STATUS_STYLES = {
    CheckStatus.PASS: "green",
    CheckStatus.FAIL: "bold red",
    CheckStatus.INCONCLUSIVE: "yellow",
    CheckStatus.INFO: "cyan",
}


def to_json(payload: Any) -> str:
    """Deterministic JSON: sorted keys, two-space indent"""
    return json.dumps(payload, indent=2, sort_keys=True)


def report_payload(report: Report) -> dict:
    return report.model_dump(mode="json")


def _csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def check_rows(report: Report) -> list[list[str]]:
    return [[c.id, c.status.value, c.detail, c.witness or ""] for c in report.checks]


def render_report(report: Report, fmt: OutputFormat) -> str:
    if fmt == OutputFormat.JSON:
        return to_json(report_payload(report))
    if fmt == OutputFormat.CSV:
        return _csv(CHECK_COLUMNS, check_rows(report))
    return tabulate(check_rows(report), headers=CHECK_COLUMNS, tablefmt="grid")


def render_dims(columns: Mapping[str, Sequence[int]], fmt: OutputFormat,
                extra: Optional[Mapping[str, Any]] = None) -> str:
    """One row per degree, one column per named dimension list"""
    names = list(columns)
    depth = max((len(v) for v in columns.values()), default=0)
    rows = [[n] + [columns[k][n] if n < len(columns[k]) else "" for k in names] for n in range(depth)]
    if fmt == OutputFormat.JSON:
        payload = {k: list(v) for k, v in columns.items()}
        payload.update(extra or {})
        return to_json(payload)
    if fmt == OutputFormat.CSV:
        return _csv(["degree"] + names, rows)
    return tabulate(rows, headers=["n"] + names, tablefmt="grid")


def format_terms(field: Field, labels: Sequence[str], terms: Mapping[tuple[int, ...], Any]) -> list[str]:
    """Sparse tensor terms as 'c*(a|b|..)' in word order"""
    out = []
    for word in sorted(terms):
        coeff = field.to_string(terms[word])
        tensor = "|".join(labels[u] for u in word)
        out.append(f"{coeff}*({tensor})")
    return out


def format_vector(field: Field, v: Mapping[int, Any]) -> str:
    return ", ".join(f"[{i}]={field.to_string(v[i])}" for i in sorted(v))


def representative_strings(space: HomologySpace, render_class) -> list[str]:
    return [render_class(space.representative(i)) for i in range(space.dim)]


def calculus_payload(table: CalculusTable) -> dict:
    """Structure constants keyed by degree strings such as 'm,n'"""
    return {
        "algebra": table.algebra_name,
        "top_degree": table.top_degree,
        "hh_dims": table.hh_dims,
        "hh_cohomology_dims": table.coh_dims,
        "cup": {f"{m},{n}": t.to_strings() for (m, n), t in sorted(table.cup.items())},
        "bracket": {f"{m},{n}": t.to_strings() for (m, n), t in sorted(table.bracket.items())},
        "cap": {f"{m},{i},{n}": t.to_strings() for (m, i, n), t in sorted(table.contraction.items())},
        "connes": {str(n): t.to_strings() for n, t in sorted(table.connes.items())},
    }


def render_calculus(table: CalculusTable, fmt: OutputFormat) -> str:
    payload = calculus_payload(table)
    if fmt == OutputFormat.JSON:
        return to_json(payload)
    rows = []
    for name in ("cup", "bracket", "cap", "connes"):
        for key, matrix in payload[name].items():
            nonzero = sum(1 for row in matrix for x in row if x != "0")
            shape = f"{len(matrix)}x{len(matrix[0]) if matrix else 0}"
            rows.append([name, key, shape, nonzero, "; ".join(" ".join(row) for row in matrix)])
    header = ["operation", "degrees", "shape", "nonzero", "rows"]
    if fmt == OutputFormat.CSV:
        return _csv(header, rows)
    return tabulate(rows, headers=header, tablefmt="grid")


def print_summary(report: Report, console: Optional[Console] = None) -> None:
    """Rich panel with the per-status counts of a report"""
    console = console or Console()
    counts = {status: 0 for status in CheckStatus}
    for c in report.checks:
        counts[c.status] += 1
    text = Text()
    for status, n in counts.items():
        if n:
            text.append(f"{status.value}: {n}  ", style=STATUS_STYLES[status])
    verdict = "OK" if report.ok else "FAILED"
    console.print(Panel(text, title=report.title, subtitle=verdict, box=box.ROUNDED,
                        border_style="green" if report.ok else "red"))
