import logging
import sys
import traceback
from typing import List, Optional

import click
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from ..core.definite_sum_solver import DefiniteSumSolver
from ..core.errors import DefiniteSumError
from ..core.exact_arith import to_rational
from ..core.models import BasisSpec, ReductionResult, VerificationReport
from ..core.ore import OreOp, ore_gcrd, primitive_form
from ..utils.logger import logger
from .json_output import (dump_document, expansion_document, gcrd_document,
                          reduction_document, verification_document)
from .operator_syntax import parse_operator

console = Console()
err_console = Console(stderr=True)

EXIT_VERIFICATION_FAILED = 1
EXIT_USAGE = 2


def _fail(error: Exception) -> None:
    # the console handler shows warnings and up; keep this in the log file only
    logger.info(f"Usage error {type(error).__name__}: {error}")
    logger.debug(f"Full traceback: {traceback.format_exc()}")
    err_console.print(f"Error: {error}", style="bold red", markup=False, highlight=False)
    sys.exit(EXIT_USAGE)


def _basis(a_list: str, b_list: str) -> BasisSpec:
    return BasisSpec(a=a_list, b=b_list)


def _initial(text: str) -> List:
    return [to_rational(part) for part in text.replace(" ", "").split(",") if part]


def _emit(text: str) -> None:
    console.print(text, markup=False, highlight=False, soft_wrap=True)


basis_options = [
    click.option("--a", "a_list", required=True, help="Comma-separated positive integers a_1..a_m"),
    click.option("--b", "b_list", required=True, help="Comma-separated rationals b_1..b_m"),
]


def with_basis(command):
    for option in reversed(basis_options):
        command = option(command)
    return command


@click.group()
@click.option("--log-level", default=None,
              type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
              help="Override the configured log level")
def cli(log_level: Optional[str]):
    """Definite-sum solutions of linear recurrences with polynomial coefficients."""
    if log_level:
        logger.setLevel(getattr(logging, log_level.upper()))


@cli.command()
@click.option("--operator", "operator_text", required=True, help='Recurrence operator, e.g. "(n+1)*E - 2*(2*n+1)"')
@with_basis
@click.option("--format", "output_format", type=click.Choice(["text", "json"]), default="text")
@click.option("--column", is_flag=True, help="Also show the first column of the reduced matrix")
@click.option("--matrix", is_flag=True, help="Also compute and show the full reduced matrix")
@click.option("--variable", default=None, help="Name of the output variable (default k)")
def reduce(operator_text: str, a_list: str, b_list: str, output_format: str,
           column: bool, matrix: bool, variable: Optional[str]):
    """Reduce L to the operator L' for the coefficients h_k."""
    try:
        spec = _basis(a_list, b_list)
        operator = parse_operator(operator_text)
        solver = DefiniteSumSolver(spec, variable=variable)
        result = solver.reduce(operator, full_matrix=matrix)
    except (DefiniteSumError, ValueError) as e:
        _fail(e)

    if output_format == "json":
        click.echo(dump_document(reduction_document(result, column, matrix)))
        return
    _display_reduction(result, column, matrix)


def _display_reduction(result: ReductionResult, column: bool, matrix: bool) -> None:
    console.print(f"\n[bold blue]Basis {result.spec.label()}[/bold blue]")
    _emit(f"L  = {result.operator.render()}")
    _emit(f"L' = {result.lprime.render()}")
    _emit(f"primitive: {result.primitive_lprime().render()}")
    for message in result.diagnostics:
        console.print(f"[yellow]{message}[/yellow]")

    if column:
        table = Table(title="First column")
        table.add_column("r", style="cyan")
        table.add_column("L_{r,0}", style="white")
        table.add_column("E-power cleared", style="yellow")
        for r, (entry, power) in enumerate(zip(result.column, result.normalization)):
            table.add_row(str(r), entry.render(), str(power))
        console.print(table)

    if matrix and result.matrix is not None:
        table = Table(title="Reduced matrix")
        table.add_column("r\\j", style="cyan")
        for j in range(result.matrix.m):
            table.add_column(str(j), style="white")
        for r, row in enumerate(result.matrix.render_rows()):
            table.add_row(str(r), *row)
        console.print(table)


@cli.command()
@with_basis
@click.option("--format", "output_format", type=click.Choice(["text", "json"]), default="text")
@click.option("--check", "kmax", type=int, default=None,
              help="Check compatibility of the basis for indices up to KMAX")
def expand(a_list: str, b_list: str, output_format: str, kmax: Optional[int]):
    """Show how E and x act on the basis."""
    try:
        spec = _basis(a_list, b_list)
        solver = DefiniteSumSolver(spec)
        table = solver.expansion_table()
        report = solver.check_compatibility(kmax) if kmax is not None else None
    except (DefiniteSumError, ValueError) as e:
        _fail(e)

    if output_format == "json":
        click.echo(dump_document(expansion_document(table, report)))
    else:
        console.print(f"\n[bold blue]Basis {spec.label()}[/bold blue]")
        for j, row in enumerate(table.shift):
            grid = Table(title=f"P_(mk+{j})(x+1)")
            grid.add_column("P_index", style="cyan")
            grid.add_column("coefficient", style="white")
            for i, alpha in enumerate(row):
                grid.add_row(f"mk+{j}-{i}" if i else f"mk+{j}", alpha.render())
            console.print(grid)
        grid = Table(title="x·P_(mk+j)")
        grid.add_column("j", style="cyan")
        grid.add_column("P_(mk+j)", style="white")
        grid.add_column("P_(mk+j+1)", style="white")
        for j, (stay, up) in enumerate(table.x):
            grid.add_row(str(j), stay.render(), up.render())
        console.print(grid)
        if report is not None:
            status = "[green]passed[/green]" if report.passed else "[red]failed[/red]"
            console.print(Panel(f"Compatibility up to n={report.kmax}: {status}",
                                title="Compatibility"))

    if report is not None and not report.passed:
        sys.exit(EXIT_VERIFICATION_FAILED)


@cli.command()
@click.option("--operator", "operator_text", required=True, help="Recurrence operator L in n")
@with_basis
@click.option("--initial", required=True, help="Comma-separated initial values h_0, h_1, ...")
@click.option("--lprime", "lprime_text", default=None,
              help="Use this operator for h instead of reducing L")
@click.option("--nmax", type=int, default=None, help="Check (L y)_n = 0 for n = 0..NMAX")
@click.option("--truncate", type=int, default=None,
              help="Truncate sums at k = T (needed for non-terminating kernels)")
@click.option("--format", "output_format", type=click.Choice(["text", "json"]), default="text")
@click.option("--variable", default=None, help="Variable of --lprime (default k)")
def verify(operator_text: str, a_list: str, b_list: str, initial: str,
           lprime_text: Optional[str], nmax: Optional[int], truncate: Optional[int],
           output_format: str, variable: Optional[str]):
    """Unroll h and check that the definite sums satisfy L."""
    try:
        spec = _basis(a_list, b_list)
        operator = parse_operator(operator_text)
        solver = DefiniteSumSolver(spec, variable=variable)
        nmax = solver.default_nmax if nmax is None else nmax
        if lprime_text is not None:
            lprime = parse_operator(lprime_text, variable=solver.variable,
                                    allow_rational=True, allow_negative=True)
            upto = solver.oracle.required_terms(operator, nmax, truncate) - 1
            h = solver.unroll(lprime, _initial(initial), upto)
            report = solver.verify(operator, h, nmax, truncate)
        else:
            result, h, report = solver.solve_and_verify(operator, _initial(initial), nmax, truncate)
            lprime = result.lprime
    except (DefiniteSumError, ValueError) as e:
        _fail(e)

    if output_format == "json":
        click.echo(dump_document(verification_document(spec, operator, report, h, lprime)))
    else:
        _display_verification(lprime, h, report)

    if not report.passed:
        sys.exit(EXIT_VERIFICATION_FAILED)


def _display_verification(lprime: OreOp, h, report: VerificationReport) -> None:
    _emit(f"L' = {lprime.render()}")
    _emit("h  = " + ", ".join(str(v) for v in list(h)[:10]) + (", ..." if len(h) > 10 else ""))
    if report.truncated:
        console.print("[yellow]Sums were truncated; the kernel does not terminate[/yellow]")
    if report.passed:
        console.print(f"[green]✓ Verified for n = 0..{report.nmax}[/green]")
    else:
        console.print(f"[bold red]✗ Fails at n = {report.first_failure} "
                      f"(residual {report.residual})[/bold red]")


@cli.command()
@click.argument("operators", nargs=-1, required=True)
@click.option("--variable", default="k", help="Variable of the operators")
@click.option("--format", "output_format", type=click.Choice(["text", "json"]), default="text")
def gcrd(operators: List[str], variable: str, output_format: str):
    """Greatest common right divisor of OPERATORS."""
    try:
        parsed = [parse_operator(text, variable=variable, allow_rational=True, allow_negative=True)
                  for text in operators]
        result = ore_gcrd(parsed)
    except (DefiniteSumError, ValueError) as e:
        _fail(e)

    if output_format == "json":
        click.echo(dump_document(gcrd_document(parsed, result, primitive_form(result))))
        return
    _emit(result.render())
    if not result.is_zero and result != primitive_form(result):
        _emit(f"primitive: {primitive_form(result).render()}")
