"""Command line front end."""
from __future__ import annotations

__all__ = [
    "cli",
    "run",
    "EXIT_PASS",
    "EXIT_FAIL",
    "EXIT_INPUT",
    "EXIT_ALARM",
    "EXIT_UNDETERMINED",
]

from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional

import numpy as np
import typer
from rich.console import Console
from rich.table import Table

from pychoquet.axioms import AxiomChecker
from pychoquet.capacity import capacity_of, choquet_mobius, choquet_sorted, format_partition, mobius_of
from pychoquet.logging_utils import configure_logging, get_logger
from pychoquet.product import MODEL_FAMILIES, induced_order
from pychoquet.representation import RepresentationEngine
from pychoquet.serialization import dump_json, load_capacity, load_model, load_preferences, load_transform
from pychoquet.suite import roundtrip_trials

# Exceptions
from pychoquet.exceptions import (
    CliqueIncompatibility,
    CollapsedLevels,
    CriterionLimitExceeded,
    GridCapExceeded,
    IncompleteOrdering,
    LemmaPreconditionError,
    MissingValueFunctions,
    RelationIncomplete,
    RelationUndetermined,
    SolverError,
    StructuralError,
)

# Models
from pychoquet.models.capacity_model import Capacity, MobiusRep
from pychoquet.models.command_model import CommandConfig, OutputFormat
from pychoquet.models.fit_model import FitProblem
from pychoquet.models.options_model import DEFAULT_BUDGET, DEFAULT_TOLERANCE, CheckerOptions, EngineOptions
from pychoquet.models.product_model import ProductModel
from pychoquet.models.report_model import AxiomReport, AxiomStatus, aggregate_status

EXIT_PASS: int = 0
EXIT_FAIL: int = 1
EXIT_INPUT: int = 2
EXIT_ALARM: int = 3
EXIT_UNDETERMINED: int = 4

_INPUT_ERRORS = (
    StructuralError,
    MissingValueFunctions,
    CollapsedLevels,
    CriterionLimitExceeded,
    GridCapExceeded,
    IncompleteOrdering,
    ValueError,
)
_ALARMS = (SolverError, LemmaPreconditionError, RelationIncomplete)

# Init cli
cli = typer.Typer(no_args_is_help=True, add_completion=False)

# Init console
console = Console()

logger = get_logger("cli")


@cli.callback()
def main(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="DEBUG logging."),
    log_level: Optional[str] = typer.Option(None, "--log-level", help="Explicit logging level."),
) -> None:
    """Choquet integral models, axiom audits and capacity fits."""
    if log_level or verbose:
        configure_logging(log_level or "DEBUG")


@contextmanager
def _exit_on_error() -> Iterator[None]:
    try:
        yield
    except typer.Exit:
        raise
    except _ALARMS as exc:
        console.print(f"[bold red]consistency alarm:[/bold red] {exc}")
        raise typer.Exit(EXIT_ALARM) from exc
    except _INPUT_ERRORS as exc:
        console.print(f"[bold red]input error:[/bold red] {exc}")
        raise typer.Exit(EXIT_INPUT) from exc


def _emit(config: CommandConfig, payload: object, text: str | Table) -> None:
    if config.out is not None:
        dump_json(payload, config.out)
    if config.format is OutputFormat.JSON:
        typer.echo(dump_json(payload))
    else:
        console.print(text)


def _exit_for(status: AxiomStatus) -> int:
    if status is AxiomStatus.FAIL:
        return EXIT_FAIL
    if status is AxiomStatus.UNDETERMINED:
        return EXIT_UNDETERMINED
    return EXIT_PASS


def _report_table(reports: list[AxiomReport], seed: int) -> Table:
    table = Table(title=f"axioms (seed={seed})")
    for column in ("axiom", "status", "checked", "violated", "coverage", "first witness"):
        table.add_column(column)
    for report in reports:
        witness = str(report.witnesses[0]) if report.witnesses else ""
        table.add_row(
            report.axiom,
            report.status.value,
            str(report.checked),
            str(report.violated),
            f"{report.coverage:.3f}",
            witness,
        )
    return table


def _capacity_for(model: ProductModel, model_path: Path, capacity_path: Path | None) -> MobiusRep:
    if capacity_path is None:
        if model.capacity is None:
            raise MissingValueFunctions(f"{model_path} has no capacity")
        return model.capacity

    loaded = load_capacity(capacity_path)
    m = mobius_of(loaded) if isinstance(loaded, Capacity) else loaded
    if m.n != model.n:
        raise StructuralError(f"{capacity_path} is on {m.n} criteria, {model_path} has {model.n}")
    return m


def _parse_alternative(raw: str) -> list[int]:
    try:
        return [int(part) for part in raw.replace(" ", "").split(",") if part != ""]
    except ValueError as exc:
        raise StructuralError(f"alternative {raw!r} is not a comma separated list of level indices") from exc


@cli.command()
def integrate(
    model_path: Path = typer.Option(..., "--model", help="Model file with values and capacity."),
    alternative: str = typer.Option(..., "--alternative", "-x", help="Level indices, e.g. 0,2,1."),
    capacity_path: Optional[Path] = typer.Option(None, "--capacity", help="Capacity file replacing the model's capacity."),
    tolerance: float = typer.Option(DEFAULT_TOLERANCE, "--tolerance"),
    format: OutputFormat = typer.Option(OutputFormat.TEXT, "--format"),
) -> None:
    """Integral of one alternative in both forms, with the coordinate order used."""
    inputs = [model_path] if capacity_path is None else [model_path, capacity_path]
    config = CommandConfig("integrate", inputs, tolerance=tolerance, format=format)
    with _exit_on_error():
        config.validate()
        model = load_model(model_path)
        m = _capacity_for(model, model_path, capacity_path)
        point = model.check_alternative(_parse_alternative(alternative))
        scores = model.value_matrix([point])[0]
        sorted_form = choquet_sorted(capacity_of(m), scores)
        mobius_form = choquet_mobius(m, scores)
        order = np.lexsort((np.arange(model.n), scores))
        payload = {
            "alternative": list(point),
            "scores": scores.tolist(),
            "sorted_form": sorted_form,
            "mobius_form": mobius_form,
            "permutation": [int(i) + 1 for i in order],
        }
        _emit(
            config,
            payload,
            f"C = {sorted_form:.10g} (sorted) | {mobius_form:.10g} (Möbius) | order {payload['permutation']}",
        )
        if abs(sorted_form - mobius_form) > tolerance:
            console.print(f"[bold red]the two forms differ by {abs(sorted_form - mobius_form):.3g}")
            raise typer.Exit(EXIT_ALARM)


@cli.command()
def check(
    prefs_path: Path = typer.Option(..., "--prefs", help="Preference file."),
    model_path: Optional[Path] = typer.Option(None, "--model", help="Model file; the grid is inferred otherwise."),
    axioms: Optional[str] = typer.Option(None, "--axioms", help="Comma separated axiom ids, all by default."),
    budget: int = typer.Option(DEFAULT_BUDGET, "--budget"),
    seed: int = typer.Option(0, "--seed"),
    tolerance: float = typer.Option(DEFAULT_TOLERANCE, "--tolerance"),
    out: Optional[Path] = typer.Option(None, "--out"),
    format: OutputFormat = typer.Option(OutputFormat.TEXT, "--format"),
) -> None:
    """Audit the axioms; exit 1 on any FAIL, 4 on UNDETERMINED without FAIL."""
    inputs = [prefs_path] + ([model_path] if model_path else [])
    config = CommandConfig("check", inputs, out, seed, budget, tolerance=tolerance, format=format)
    with _exit_on_error():
        config.validate()
        model = load_model(model_path) if model_path else None
        prefs = load_preferences(prefs_path, model)
        selected = [axiom.strip() for axiom in axioms.split(",")] if axioms else None
        checker = AxiomChecker(CheckerOptions(budget=budget, seed=seed, tolerance=tolerance))
        reports = checker.run(prefs, selected)

    _emit(config, reports, _report_table(reports, seed))
    raise typer.Exit(_exit_for(aggregate_status(reports)))


@cli.command()
def partition(
    prefs_path: Path = typer.Option(..., "--prefs"),
    model_path: Optional[Path] = typer.Option(None, "--model"),
    budget: int = typer.Option(DEFAULT_BUDGET, "--budget"),
    seed: int = typer.Option(0, "--seed"),
    out: Optional[Path] = typer.Option(None, "--out"),
    format: OutputFormat = typer.Option(OutputFormat.TEXT, "--format"),
) -> None:
    """Cells of the coordinate orders and the interaction cliques."""
    inputs = [prefs_path] + ([model_path] if model_path else [])
    config = CommandConfig("partition", inputs, out, seed, budget, format=format)
    with _exit_on_error():
        config.validate()
        model = load_model(model_path) if model_path else None
        prefs = load_preferences(prefs_path, model)
        checker = AxiomChecker(CheckerOptions(budget=budget, seed=seed))
        try:
            table = checker.build_relation_table(prefs)
        except RelationUndetermined as exc:
            console.print(f"[bold yellow]undetermined:[/bold yellow] {exc}")
            raise typer.Exit(EXIT_UNDETERMINED) from exc

        a3 = checker.check_A3(table)
        if a3.status is not AxiomStatus.PASS:
            _emit(config, [a3], _report_table([a3], seed))
            raise typer.Exit(_exit_for(a3.status))

        cells = checker.partition_cells(table, prefs)
        cliques = checker.interaction_cliques_from_prefs(table)

    payload = {"seed": seed, **cells.to_dict(), "cliques": [sorted(i + 1 for i in clique) for clique in cliques]}
    text = Table(title=f"cells (seed={seed}), cliques {format_partition(cliques)}")
    for column in ("order", "size", "essential"):
        text.add_column(column)
    for cell in cells:
        text.add_row(cell.order_id, str(cell.size), str(sorted(i + 1 for i in cell.essential or ())))
    _emit(config, payload, text)
    raise typer.Exit(EXIT_PASS if cells.covers_grid else EXIT_FAIL)


@cli.command()
def fit(
    prefs_path: Path = typer.Option(..., "--prefs"),
    values_path: Path = typer.Option(..., "--values", help="Model file whose scales carry values."),
    epsilon: Optional[float] = typer.Option(None, "--epsilon"),
    tolerance: float = typer.Option(1e-9, "--tolerance", help="Solver feasibility tolerance."),
    out: Optional[Path] = typer.Option(None, "--out"),
    format: OutputFormat = typer.Option(OutputFormat.TEXT, "--format"),
) -> None:
    """Fit a capacity; exit 1 when no capacity reproduces the preferences."""
    config = CommandConfig("fit", [prefs_path, values_path], out, epsilon=epsilon, tolerance=tolerance, format=format)
    with _exit_on_error():
        config.validate()
        model = load_model(values_path)
        prefs = load_preferences(prefs_path, model)
        options = EngineOptions(epsilon=epsilon, solver_tolerance=tolerance)
        result = RepresentationEngine(options).fit_capacity(FitProblem(model, prefs, epsilon, options))

    payload = result.to_dict()
    if result.feasible:
        payload["capacity"] = capacity_of(result.mobius).to_dict()
        _emit(config, payload, f"FEASIBLE min_slack={result.min_slack:.6g} active={result.active_constraints}")
        raise typer.Exit(EXIT_PASS)
    _emit(config, payload, f"INFEASIBLE max_violation={result.max_violation:.6g}")
    raise typer.Exit(EXIT_FAIL)


@cli.command()
def roundtrip(
    n: int = typer.Option(3, "--n"),
    levels: int = typer.Option(3, "--levels"),
    seed: int = typer.Option(0, "--seed"),
    trials: int = typer.Option(20, "--trials"),
    family: str = typer.Option("random", "--family", help=f"One of {', '.join(MODEL_FAMILIES)}."),
    duplicate_values: bool = typer.Option(False, "--duplicate-values", help="Give two levels the same value."),
    budget: int = typer.Option(DEFAULT_BUDGET, "--budget"),
    out: Optional[Path] = typer.Option(None, "--out"),
    format: OutputFormat = typer.Option(OutputFormat.TEXT, "--format"),
) -> None:
    """Generate models and run the full round trip on each; exit 0 iff every trial passes."""
    config = CommandConfig("roundtrip", [], out, seed, budget, format=format)
    with _exit_on_error():
        config.validate()
        if n < 1 or levels < 1 or trials < 1:
            raise ValueError("--n, --levels and --trials must be positive")
        results = roundtrip_trials(
            n,
            levels,
            trials,
            seed,
            family,
            duplicate_values,
            checker_options=CheckerOptions(budget=budget, seed=seed),
        )

    failed = [result for result in results if not result.passed]
    text = Table(title=f"round trip n={n} levels={levels} family={family} (seed={seed})")
    for column in ("seed", "passed", "failed stage"):
        text.add_column(column)
    for result in results:
        stage = result.failed_stage
        text.add_row(str(result.seed), str(result.passed), "" if stage is None else stage.value)
    _emit(config, results, text)
    raise typer.Exit(EXIT_FAIL if failed else EXIT_PASS)


@cli.command()
def generate(
    model_path: Path = typer.Option(..., "--model"),
    capacity_path: Optional[Path] = typer.Option(None, "--capacity", help="Capacity file replacing the model's capacity."),
    tolerance: float = typer.Option(DEFAULT_TOLERANCE, "--tolerance"),
    out: Optional[Path] = typer.Option(None, "--out"),
    format: OutputFormat = typer.Option(OutputFormat.JSON, "--format"),
) -> None:
    """Ranked preference file of the order a model induces on its grid."""
    inputs = [model_path] if capacity_path is None else [model_path, capacity_path]
    config = CommandConfig("generate", inputs, out, tolerance=tolerance, format=format)
    with _exit_on_error():
        config.validate()
        model = load_model(model_path)
        prefs = induced_order(_capacity_for(model, model_path, capacity_path), model, tolerance=tolerance)

    _emit(config, prefs, f"{len(prefs)} alternatives in {int(prefs.ranks.max(initial=0))} classes")


@cli.command()
def transform(
    model_path: Path = typer.Option(..., "--model"),
    transform_path: Path = typer.Option(..., "--transform", help="Cliques, scales and shifts."),
    out: Optional[Path] = typer.Option(None, "--out"),
    format: OutputFormat = typer.Option(OutputFormat.JSON, "--format"),
) -> None:
    """Apply a clique transform to a model; exit 1 when the cliques split a subset with mass."""
    config = CommandConfig("transform", [model_path, transform_path], out, format=format)
    with _exit_on_error():
        config.validate()
        model = load_model(model_path)
        if model.capacity is None:
            raise MissingValueFunctions(f"{model_path} has no capacity")
        change = load_transform(transform_path)
        try:
            _, moved = RepresentationEngine().apply_uniqueness_transform(model.capacity, model, change)
        except CliqueIncompatibility as exc:
            console.print(f"[bold red]incompatible cliques:[/bold red] {exc}")
            raise typer.Exit(EXIT_FAIL) from exc

    _emit(config, moved, f"transformed model {moved!r}")


def run() -> None: cli()
