#!/usr/bin/env python3
"""
ttcalc CLI - Hochschild, cyclic and calculus computations from JSON documents
"""

import logging
from typing import Any, Callable, Optional

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler
from tabulate import tabulate

from src.cli.render import (calculus_payload, format_terms, format_vector, print_summary, render_calculus,
                            render_dims, render_report, report_payload, representative_strings, to_json)
from src.config import get_log_level, get_max_chain_dim, get_max_degree
from src.models.enums import CyclicModel, OutputFormat
from src.models.exceptions import CalcError, DocumentParseError
from src.models.field import Field
from src.models.schemas import Report, RunConfig
from src.services.algebra_service import require_valid, validate_algebra
from src.services.bimodule_service import validate_bimodule, validate_derived_equivalence
from src.services.calculus_service import induced_tables, verify_calculus
from src.services.cyclic_service import cyclic_homology, mixed_complex, verify_sbi
from src.services.hochschild_service import hochschild_report
from src.services.transport_service import transport_cohomology_solve, transport_report
from src.utils.io import BIMODULES, detect_kind, list_fixtures, load_algebra, load_bimodule, write_json_atomic

app = typer.Typer(help="ttcalc - exact Hochschild and cyclic calculus of finite-dimensional algebras",
                  no_args_is_help=True)

logger = logging.getLogger(__name__)

DEGREE_OPTION = typer.Option(None, "-D", "--degree", help="Top degree D (default TTCALC_MAX_DEGREE)")
FORMAT_OPTION = typer.Option(OutputFormat.TABLE, "--format", help="Output format")
FIELD_OPTION = typer.Option(None, "--field", help="Override the ground field: Q or Fp:<p>")
CAP_OPTION = typer.Option(None, "--max-chain-dim", help="Largest chain space to materialize")
OUTPUT_OPTION = typer.Option(None, "--output", help="Also write the JSON report to this path")
VERBOSE_OPTION = typer.Option(False, "--verbose", "-v", help="Debug logging on stderr")


def setup_logging(verbose: bool) -> None:
    level = "DEBUG" if verbose else get_log_level()
    logging.basicConfig(level=level, format="%(message)s", force=True,
                        handlers=[RichHandler(console=Console(stderr=True), show_path=False)])


def build_config(command: str, paths: list[str], degree: Optional[int] = None, **options: Any) -> RunConfig:
    """Validate CLI options; flags override the environment defaults"""
    values = {k: v for k, v in options.items() if v is not None}
    values.setdefault("max_chain_dim", get_max_chain_dim())
    try:
        return RunConfig(command=command, paths=paths,
                         max_degree=get_max_degree() if degree is None else degree, **values)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(part) for part in first.get("loc", ()))
        raise DocumentParseError(f"Invalid option '{where}': {first.get('msg')}") from e


def parse_field(config: RunConfig) -> Optional[Field]:
    if config.field is None:
        return None
    try:
        return Field.parse(config.field)
    except ValueError as e:
        raise DocumentParseError(str(e)) from e


def run(action: Callable[[], int]) -> None:
    """Run a command body, mapping CalcError to its exit code"""
    try:
        code = action()
    except CalcError as e:
        logger.debug(f"{type(e).__name__}: {e}")
        typer.echo(f"Error: {e}", err=True)
        raise typer.Exit(e.exit_code)
    raise typer.Exit(code)


def emit(config: RunConfig, text: str, payload: Any) -> None:
    typer.echo(text)
    if config.output:
        write_json_atomic(config.output, payload)
        logger.info(f"Wrote JSON report to {config.output}")


def emit_report(config: RunConfig, report: Report) -> int:
    emit(config, render_report(report, config.output_format), report_payload(report))
    if config.output_format == OutputFormat.TABLE:
        print_summary(report)
    return 0 if report.ok else 1


@app.command()
def validate(
    path: str = typer.Argument(..., help="Algebra or bimodule document (path or fixture name)"),
    output_format: OutputFormat = FORMAT_OPTION,
    field: Optional[str] = FIELD_OPTION,
    output: Optional[str] = OUTPUT_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Check the axioms of an algebra or a dg bimodule"""
    setup_logging(verbose)

    def action() -> int:
        config = build_config("validate", [path], output_format=output_format, field=field, output=output)
        override = parse_field(config)
        if detect_kind(path) == BIMODULES:
            report = validate_bimodule(load_bimodule(path, override))
        else:
            report = validate_algebra(load_algebra(path, override))
        return emit_report(config, report)

    run(action)


@app.command()
def hh(
    path: str = typer.Argument(..., help="Algebra document (path or fixture name)"),
    degree: Optional[int] = DEGREE_OPTION,
    normalized: bool = typer.Option(False, "--normalized", help="Use the normalized complex"),
    output_format: OutputFormat = FORMAT_OPTION,
    representatives: bool = typer.Option(False, "--representatives", help="Print class representatives"),
    max_chain_dim: Optional[int] = CAP_OPTION,
    field: Optional[str] = FIELD_OPTION,
    output: Optional[str] = OUTPUT_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Hochschild homology dimensions HH_0..HH_D"""
    setup_logging(verbose)

    def action() -> int:
        config = build_config("hh", [path], degree, normalized=normalized, output_format=output_format,
                              representatives=representatives, max_chain_dim=max_chain_dim,
                              field=field, output=output)
        a = load_algebra(path, parse_field(config))
        require_valid(a)
        model, spaces, report = hochschild_report(a, config.max_degree, config.normalized, config.max_chain_dim)
        dims = {"HH": report.data["hh_dims"]}
        if config.representatives:
            labels = model.algebra.basis
            report.data["representatives"] = {
                str(n): representative_strings(
                    space, lambda v, n=n: " + ".join(format_terms(a.field, labels, model.chain_terms(n, v))))
                for n, space in enumerate(spaces)}
        payload = report_payload(report)
        if config.output_format == OutputFormat.JSON:
            text = to_json(payload)
        else:
            text = render_dims(dims, config.output_format)
            if config.output_format == OutputFormat.TABLE:
                text += "\n" + render_report(report, config.output_format)
                for n, reps in report.data.get("representatives", {}).items():
                    text += "\n" + "\n".join(f"HH_{n}[{i}] = {r}" for i, r in enumerate(reps))
        emit(config, text, payload)
        return 0 if report.ok else 1

    run(action)


@app.command()
def hc(
    path: str = typer.Argument(..., help="Algebra document (path or fixture name)"),
    degree: Optional[int] = DEGREE_OPTION,
    normalized: bool = typer.Option(False, "--normalized", help="Use the normalized (b, B) mixed complex"),
    output_format: OutputFormat = FORMAT_OPTION,
    representatives: bool = typer.Option(False, "--representatives", help="Print class representatives"),
    max_chain_dim: Optional[int] = CAP_OPTION,
    field: Optional[str] = FIELD_OPTION,
    output: Optional[str] = OUTPUT_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Cyclic homology dimensions HC_0..HC_D (cone model unless --normalized)"""
    setup_logging(verbose)

    def action() -> int:
        config = build_config("hc", [path], degree, normalized=normalized, output_format=output_format,
                              representatives=representatives, max_chain_dim=max_chain_dim,
                              field=field, output=output)
        a = load_algebra(path, parse_field(config))
        require_valid(a)
        model = CyclicModel.NORMALIZED if config.normalized else CyclicModel.CONE
        mc = mixed_complex(a, config.max_degree, model, config.max_chain_dim)
        spaces = cyclic_homology(mc, config.max_degree)
        payload: dict[str, Any] = {"algebra": a.name, "model": model.value, "hc_dims": [h.dim for h in spaces]}
        if config.representatives:
            payload["representatives"] = {
                str(n): representative_strings(space, lambda v: format_vector(a.field, v))
                for n, space in enumerate(spaces)}
        if config.output_format == OutputFormat.JSON:
            text = to_json(payload)
        else:
            text = render_dims({"HC": payload["hc_dims"]}, config.output_format)
            if config.output_format == OutputFormat.TABLE:
                for n, reps in payload.get("representatives", {}).items():
                    text += "\n" + "\n".join(f"HC_{n}[{i}] = {r}" for i, r in enumerate(reps))
        emit(config, text, payload)
        return 0

    run(action)


@app.command()
def calculus(
    path: str = typer.Argument(..., help="Algebra document (path or fixture name)"),
    degree: Optional[int] = DEGREE_OPTION,
    output_format: OutputFormat = FORMAT_OPTION,
    max_chain_dim: Optional[int] = CAP_OPTION,
    field: Optional[str] = FIELD_OPTION,
    output: Optional[str] = OUTPUT_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Structure constants of cup, bracket, cap and B in class bases"""
    setup_logging(verbose)

    def action() -> int:
        config = build_config("calculus", [path], degree, output_format=output_format,
                              max_chain_dim=max_chain_dim, field=field, output=output)
        a = load_algebra(path, parse_field(config))
        require_valid(a)
        table = induced_tables(a, config.max_degree, config.max_chain_dim)
        emit(config, render_calculus(table, config.output_format), calculus_payload(table))
        return 0

    run(action)


@app.command()
def verify(
    path: str = typer.Argument(..., help="Algebra document (path or fixture name)"),
    degree: Optional[int] = DEGREE_OPTION,
    output_format: OutputFormat = FORMAT_OPTION,
    max_chain_dim: Optional[int] = CAP_OPTION,
    field: Optional[str] = FIELD_OPTION,
    output: Optional[str] = OUTPUT_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Verify the calculus identities and the SBI sequence; exit 0 iff all pass"""
    setup_logging(verbose)

    def action() -> int:
        config = build_config("verify", [path], degree, output_format=output_format,
                              max_chain_dim=max_chain_dim, field=field, output=output)
        a = load_algebra(path, parse_field(config))
        report = Report(title=f"verify {a.name} through degree {config.max_degree}")
        if report.extend(validate_algebra(a)).ok:
            report.extend(verify_calculus(a, config.max_degree, config.max_chain_dim))
            report.extend(verify_sbi(a, config.max_degree, max_chain_dim=config.max_chain_dim))
        return emit_report(config, report)

    run(action)


@app.command()
def transport(
    source: str = typer.Argument(..., help="Source algebra A"),
    target: str = typer.Argument(..., help="Target algebra B"),
    bimodule: str = typer.Argument(..., help="Dg bimodule X from A to B"),
    degree: Optional[int] = DEGREE_OPTION,
    output_format: OutputFormat = FORMAT_OPTION,
    max_chain_dim: Optional[int] = CAP_OPTION,
    field: Optional[str] = FIELD_OPTION,
    output: Optional[str] = OUTPUT_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Derived-invariance report for the transport along X"""
    setup_logging(verbose)

    def action() -> int:
        config = build_config("transport", [source, target, bimodule], degree, output_format=output_format,
                              max_chain_dim=max_chain_dim, field=field, output=output)
        override = parse_field(config)
        a, b = load_algebra(source, override), load_algebra(target, override)
        x = load_bimodule(bimodule, override)
        D = config.max_degree
        report = Report(title=f"transport {a.name} -> {b.name} along {x.name} through degree {D}")
        if report.extend(validate_derived_equivalence(x)).ok:
            report.extend(transport_report(a, b, x, D, config.max_chain_dim))
        if report.ok:
            _, solved = transport_cohomology_solve(a, b, x, D, config.max_chain_dim)
            report.extend(solved)
        report.data["inconclusive"] = report.inconclusive
        if report.inconclusive:
            logger.warning("Cohomology transport is not uniquely determined in some degree")
        return emit_report(config, report)

    run(action)


@app.command()
def fixtures(
    output_format: OutputFormat = FORMAT_OPTION,
):
    """List the bundled algebra and bimodule fixtures"""
    listing = list_fixtures()
    if output_format == OutputFormat.JSON:
        typer.echo(to_json(listing))
        return
    rows = [[kind, name] for kind, names in listing.items() for name in names]
    if output_format == OutputFormat.CSV:
        typer.echo("kind,name\n" + "\n".join(f"{k},{n}" for k, n in rows))
        return
    typer.echo(tabulate(rows, headers=["kind", "name"], tablefmt="grid"))


def main():
    """Main entry point for the ttcalc command"""
    app()


if __name__ == "__main__":
    main()
