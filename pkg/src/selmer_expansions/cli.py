"""CLI interface for Selmer expansions."""

import functools
import logging
import sys
from collections.abc import Callable
from fractions import Fraction
from pathlib import Path
from typing import Any

import click
import yaml
from click.core import ParameterSource

from selmer_expansions.core.converters.expression import parse_field, parse_point
from selmer_expansions.core.converters.helpers import digits_for
from selmer_expansions.core.data_types import Algorithm, PeriodReport, PointB, RunConfig
from selmer_expansions.core.numfield import parse_rational
from selmer_expansions.core.partition_plot import partition_rows, write_partition_svg
from selmer_expansions.core.periodic import (
    approximation_report,
    convergence_report,
    detect_period,
    error_ratio,
    expansion_digits,
)
from selmer_expansions.core.report_writer import FORMATS, ReportWriter
from selmer_expansions.core.selmer_maps import iterate_orbit
from selmer_expansions.core.verification import SUITES, SuiteResult
from selmer_expansions.exceptions import (
    DomainException,
    ExpressionParseException,
    NumberFieldException,
    OutputException,
    SelmerException,
)

# Exit codes
EXIT_SUCCESS = 0
EXIT_VERIFY_FAILURE = 1
EXIT_USAGE_ERROR = 2
EXIT_IO_ERROR = 3

# YAML config key -> RunConfig field
CONFIG_KEYS = {
    "algo": "algo",
    "field": "field_spec",
    "point": "point_spec",
    "steps": "steps",
    "max_steps": "max_steps",
    "format": "output_format",
    "precision": "precision",
    "column": "column",
    "out": "out",
    "restrict": "restrict",
    "epsilon": "epsilon",
}

logger = logging.getLogger(__name__)


def configure_logging(verbose: int) -> None:
    """Log to stderr: warnings by default, INFO with -v, DEBUG with -vv."""
    level = logging.WARNING
    if verbose == 1:
        level = logging.INFO
    elif verbose >= 2:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )


def load_config(
    config_path: str | None, options: dict[str, Any], explicit: set[str]
) -> RunConfig:
    """Merge a YAML run file with the command line; explicit options win.

    Raises:
        ExpressionParseException: If the YAML file or one of its values is invalid
    """
    values: dict[str, Any] = {}
    if config_path:
        try:
            with open(config_path, encoding="utf-8") as f:
                loaded = yaml.safe_load(f) or {}
        except (OSError, yaml.YAMLError) as e:
            raise ExpressionParseException("Cannot read config file", str(e)) from e
        if not isinstance(loaded, dict):
            raise ExpressionParseException("Config file must hold a mapping", config_path)
        unknown = set(loaded) - set(CONFIG_KEYS)
        if unknown:
            raise ExpressionParseException("Unknown config keys", ", ".join(sorted(unknown)))
        values = {CONFIG_KEYS[key]: value for key, value in loaded.items()}

    for key, target in CONFIG_KEYS.items():
        if key not in options:
            continue
        if key in explicit or target not in values:
            values[target] = options[key]

    try:
        if "algo" in values:
            values["algo"] = Algorithm(str(values["algo"]).lower())
        for key in ("precision", "epsilon"):
            if key in values and not isinstance(values[key], Fraction):
                values[key] = parse_rational(str(values[key]))
        config = RunConfig(**values)
    except (ValueError, NumberFieldException) as e:
        raise ExpressionParseException("Invalid configuration value", str(e)) from e
    if config.output_format not in FORMATS:
        raise ExpressionParseException("Unknown output format", config.output_format)
    if config.steps < 0 or config.max_steps < 0:
        raise ExpressionParseException("Step counts must be >= 0")
    if config.precision <= 0:
        raise ExpressionParseException("Precision must be positive")
    return config


def parse_range(text: str) -> list[int]:
    """Parse ``"2..6"``, ``"3"`` or ``"1,2,5"`` into a list of integers."""
    values: list[int] = []
    try:
        for part in text.split(","):
            if ".." in part:
                low, high = part.split("..")
                values.extend(range(int(low), int(high) + 1))
            else:
                values.append(int(part))
    except ValueError as e:
        raise click.BadParameter(f"not a range: {text}") from e
    return values


def run_options(command: Callable[..., None]) -> Callable[..., None]:
    """Options shared by the expansion commands."""
    options = [
        click.option(
            "--algo",
            type=click.Choice([a.value for a in Algorithm], case_sensitive=False),
            default=Algorithm.MSA.value,
            help="Expansion algorithm (default: msa)",
        ),
        click.option("--field", default=None, help="Number field, e.g. 'x^3-2:(1,2)' (default: Q)"),
        click.option("--point", default="", help="Coordinates in 'a', e.g. 'a^2-1,a-1'"),
        click.option("--steps", type=int, default=10, help="Number of steps (default: 10)"),
        click.option(
            "--max-steps", type=int, default=10_000, help="Period search budget (default: 10000)"
        ),
        click.option(
            "--precision", default="1e-30", help="Decimal precision target (default: 1e-30)"
        ),
        click.option(
            "--format",
            "format_",
            type=click.Choice(list(FORMATS)),
            default="text",
            help="Output format (default: text)",
        ),
        click.option("--out", "-o", type=click.Path(dir_okay=False), default=None),
        click.option("--column", type=int, default=None, help="Convergent column (default: all)"),
        click.option("--restrict", is_flag=True, help="Continue MSA in lower dimension on x_n = 0"),
        click.option("--epsilon", default="0", help="Envelope slack for approximation bounds"),
        click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None),
        click.option("--verbose", "-v", count=True, help="-v for INFO, -vv for DEBUG logging"),
    ]
    for option in reversed(options):
        command = option(command)

    @functools.wraps(command)
    def wrapper(**kwargs: Any) -> None:
        ctx = click.get_current_context()
        configure_logging(kwargs.pop("verbose"))
        config_path = kwargs.pop("config_path")
        explicit = {
            name.rstrip("_")
            for name in kwargs
            if ctx.get_parameter_source(name) is not ParameterSource.DEFAULT
        }
        kwargs["format"] = kwargs.pop("format_")
        try:
            config = load_config(config_path, kwargs, explicit)
            command(config)
        except (ExpressionParseException, DomainException, NumberFieldException) as e:
            click.secho(f"Input error: {e}", fg="red", err=True)
            sys.exit(EXIT_USAGE_ERROR)
        except OutputException as e:
            click.secho(f"Output error: {e}", fg="red", err=True)
            sys.exit(EXIT_IO_ERROR)
        except SelmerException as e:
            click.secho(f"Error: {e}", fg="red", err=True)
            sys.exit(EXIT_VERIFY_FAILURE)
        sys.exit(EXIT_SUCCESS)

    return wrapper


def _read_point(config: RunConfig) -> PointB:
    if not config.point_spec:
        raise ExpressionParseException("--point is required")
    return parse_point(config.point_spec, parse_field(config.field_spec))


def _emit(writer: ReportWriter, content: str, out: str | None) -> None:
    if out:
        writer.write(content, out)
        click.secho(f"Wrote {out}", fg="green", err=True)
    else:
        click.echo(content, nl=False)


@click.group()
def main() -> None:
    """Selmer subtractive and multiplicative continued fraction expansions."""


@main.command()
@run_options
def expand(config: RunConfig) -> None:
    """Run an expansion and print every step."""
    x = _read_point(config)
    trace = iterate_orbit(x, config.algo, config.steps, restrict=config.restrict)
    writer = ReportWriter(config.output_format, digits_for(config.precision))
    _emit(writer, writer.trace(trace), config.out)
    if trace.terminated:
        click.secho(f"Terminated after {len(trace.digits)} steps", fg="yellow", err=True)


@main.command("detect-period")
@run_options
def detect_period_command(config: RunConfig) -> None:
    """Search the orbit for an exact repeat T^(m+p) x = T^m x."""
    x = _read_point(config)
    report = detect_period(x, config.algo, config.max_steps)
    writer = ReportWriter(config.output_format, digits_for(config.precision))
    _emit(writer, writer.period(report, config.max_steps), config.out)
    if not isinstance(report, PeriodReport):
        click.secho(f"Status: {report.value}", fg="yellow", err=True)
        return
    for diagnostic in report.diagnostics:
        click.secho(f"Warning: {diagnostic}", fg="yellow", err=True)


def _section_path(out: str, section: str, extension: str) -> str:
    path = Path(out)
    return str(path.with_name(f"{path.stem}_{section}.{extension}"))


@main.command()
@run_options
def analyze(config: RunConfig) -> None:
    """Convergence and approximation tables of a periodic MSA expansion.

    --steps is the largest convergent index s.
    """
    if config.algo is not Algorithm.MSA:
        raise ExpressionParseException("analyze needs --algo msa")
    x = _read_point(config)
    report = detect_period(x, Algorithm.MSA, config.max_steps)
    writer = ReportWriter(config.output_format, digits_for(config.precision))
    if not isinstance(report, PeriodReport):
        _emit(writer, writer.period(report, config.max_steps), config.out)
        click.secho(f"Status: {report.value}", fg="yellow", err=True)
        return

    digits = expansion_digits(report, config.steps)
    columns = range(x.dim + 1) if config.column is None else [config.column]
    convergence = [
        convergence_report(x, digits, config.steps, column, config.precision)
        for column in columns
    ]
    window = (config.steps // 2, config.steps)
    for table in convergence:
        try:
            error_ratio(table, *window)
        except DomainException as e:
            logger.info("No ratio for column %d: %s", table.column, e)

    cycle_start = iterate_orbit(x, Algorithm.MSA, report.preperiod).states[-1]
    approximation = approximation_report(
        cycle_start,
        report.cycle_digits,
        max(config.steps // report.period, 0),
        epsilon=config.epsilon,
        precision=config.precision,
    )

    extension = "txt" if config.output_format == "text" else config.output_format
    sections = [
        ("period", writer.period(report, config.max_steps)),
        ("convergence", writer.convergence(convergence)),
        ("approximation", writer.approximation(approximation)),
    ]
    if config.out:
        for name, content in sections:
            _emit(writer, content, _section_path(config.out, name, extension))
    else:
        click.echo("\n".join(content for _, content in sections), nl=False)
    for diagnostic in report.diagnostics:
        click.secho(f"Warning: {diagnostic}", fg="yellow", err=True)


@main.command()
@click.option("--k-max", type=int, default=5, help="Number of cells (default: 5)")
@click.option(
    "--out", "-o", type=click.Path(dir_okay=False), default="partition.svg", help="SVG output path"
)
@click.option("--no-images", is_flag=True, help="Draw the cells only, without S B(k)")
@click.option("--verbose", "-v", count=True)
def partition(k_max: int, out: str, no_images: bool, verbose: int) -> None:
    """Draw the partition of B^2 into B(1), ..., B(k_max) with exact vertex CSV.

    The CSV is written next to the SVG with a .csv suffix.
    """
    configure_logging(verbose)
    if k_max < 1:
        click.secho("Input error: --k-max must be >= 1", fg="red", err=True)
        sys.exit(EXIT_USAGE_ERROR)
    writer = ReportWriter("csv")
    csv_path = str(Path(out).with_suffix(".csv"))
    try:
        write_partition_svg(k_max, out, show_images=not no_images)
        header = ["polygon", "k", "vertex", "x_1", "x_2"]
        writer.write(writer.to_csv(header, partition_rows(k_max)), csv_path)
    except OutputException as e:
        click.secho(f"Output error: {e}", fg="red", err=True)
        sys.exit(EXIT_IO_ERROR)
    click.secho(f"Wrote {out} and {csv_path}", fg="green", err=True)
    sys.exit(EXIT_SUCCESS)


@main.command()
@click.argument("suite", type=click.Choice(sorted(SUITES) + ["all"]), default="all")
@click.option("--n", "n_range", default=None, help="Dimensions, e.g. '2..6'")
@click.option("--k", "k_range", default=None, help="Digits, e.g. '1..10'")
@click.option("--trials", type=int, default=None, help="Random samples per suite")
@click.option("--seed", type=int, default=0, help="Random seed (default: 0)")
@click.option("--verbose", "-v", count=True)
def verify(
    suite: str,
    n_range: str | None,
    k_range: str | None,
    trials: int | None,
    seed: int,
    verbose: int,
) -> None:
    """Run invariant suites; exits 1 if any check fails."""
    configure_logging(verbose)
    names = sorted(SUITES) if suite == "all" else [suite]
    results: list[SuiteResult] = []
    for name in names:
        results.append(_run_suite(name, n_range, k_range, trials, seed))

    failed = False
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        colour = "green" if result.passed else "red"
        click.secho(f"{result.suite}: {status} ({len(result.checks)} checks)", fg=colour)
        for key, value in result.statistics.items():
            click.echo(f"  {key}: {value}")
        for check in result.failures:
            click.secho(f"  - {check.name}: {check.detail}", fg="red")
        failed = failed or not result.passed
    sys.exit(EXIT_VERIFY_FAILURE if failed else EXIT_SUCCESS)


def _run_suite(
    name: str, n_range: str | None, k_range: str | None, trials: int | None, seed: int
) -> SuiteResult:
    kwargs: dict[str, Any] = {}
    if name == "det":
        kwargs["ns"] = parse_range(n_range or "1..6")
        kwargs["ks"] = parse_range(k_range or "1..10")
    elif name == "positivity":
        kwargs["ns"] = parse_range(n_range or "2..4")
        kwargs["ks"] = parse_range(k_range or "1..3")
    elif name == "cylinders":
        if k_range:
            kwargs["k_max"] = max(parse_range(k_range))
    else:
        if name != "absorbing" and n_range:
            kwargs["ns"] = parse_range(n_range)
        if trials is not None:
            kwargs["trials"] = trials
        kwargs["seed"] = seed
    return SUITES[name](**kwargs)


if __name__ == "__main__":
    main()
