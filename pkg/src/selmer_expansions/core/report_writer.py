"""Text, JSON, CSV and YAML rendering of traces and reports.

JSON trace schema::

    {
      "algo": "ssa" | "msa",
      "field": {"min_poly": [c_0, ..., c_d], "root": [lo, hi]},
      "start": [[coefficients of x_1], ..., [coefficients of x_n]],
      "steps": [{"index": s, "digit": k, "point": [...], "decimal": [...],
                 "convergent": [B_0, ..., B_n]}],
      "terminated": bool,
      "restrictions": [state indices]
    }

Rationals are ``"p"`` or ``"p/q"`` strings; element coefficients are listed
lowest power first. ``convergent`` (MSA only) is the column B^(s).
"""

import csv
import io
import json
from fractions import Fraction
from pathlib import Path
from typing import Any

import yaml

from selmer_expansions.core.converters.helpers import (
    certified_decimal,
    decimal_bound,
    decimal_point,
)
from selmer_expansions.core.convergents import convergent_states
from selmer_expansions.core.data_types import (
    Algorithm,
    ApproximationReport,
    ConvergenceReport,
    Digit,
    OrbitTrace,
    Outcome,
    PeriodReport,
    PointB,
)
from selmer_expansions.core.numfield import (
    IsolatingInterval,
    NumberField,
    NumberFieldElement,
    Polynomial,
    format_rational,
    parse_rational,
)
from selmer_expansions.exceptions import ExpressionParseException, OutputException

FORMATS = ("text", "json", "csv", "yaml")


def field_to_json(field_: NumberField) -> dict[str, list[str]]:
    return {
        "min_poly": [format_rational(c) for c in field_.min_poly.coeffs],
        "root": [format_rational(field_.root.lo), format_rational(field_.root.hi)],
    }


def field_from_json(data: dict[str, list[str]]) -> NumberField:
    poly = Polynomial(tuple(parse_rational(c) for c in data["min_poly"]))
    lo, hi = (parse_rational(v) for v in data["root"])
    return NumberField(poly, IsolatingInterval(lo, hi))


def element_from_json(field_: NumberField, coeffs: list[str]) -> NumberFieldElement:
    if len(coeffs) != field_.degree:
        raise ExpressionParseException("Coefficient count differs from field degree", str(coeffs))
    return field_.from_coeffs([parse_rational(c) for c in coeffs])


def point_from_json(field_: NumberField, coords: list[list[str]]) -> PointB:
    return PointB(tuple(element_from_json(field_, c) for c in coords))


def trace_from_json(text: str) -> OrbitTrace:
    """Rebuild an OrbitTrace with exact states from its JSON rendering.

    Args:
        text: Output of ReportWriter("json").trace

    Returns:
        Trace with exact states, digits and restriction indices

    Raises:
        ExpressionParseException: If the document is malformed
    """
    try:
        data = json.loads(text)
        algo = Algorithm(data["algo"])
        field_ = field_from_json(data["field"])
        start = point_from_json(field_, data["start"])
        trace = OrbitTrace(algo=algo, start=start, states=[start])
        for entry in data["steps"]:
            trace.states.append(point_from_json(field_, entry["point"]))
            if entry["digit"] is not None:
                trace.digits.append(Digit(algo, int(entry["digit"])))
        trace.terminated = bool(data["terminated"])
        trace.restrictions = [int(i) for i in data["restrictions"]]
    except (KeyError, TypeError, ValueError) as e:
        raise ExpressionParseException("Malformed JSON trace", str(e)) from e
    return trace


class ReportWriter:
    """Render expansion traces and reports in one output format."""

    def __init__(self, output_format: str = "text", digits: int = 30) -> None:
        """Initialize writer.

        Args:
            output_format: One of text, json, csv or yaml
            digits: Decimal places of certified decimals

        Raises:
            OutputException: If the format is unknown
        """
        if output_format not in FORMATS:
            raise OutputException("Unknown output format", output_format)
        self.output_format = output_format
        self.digits = digits

    def write(self, content: str, output_path: str) -> None:
        """Write rendered content to a file.

        Args:
            content: Rendered report
            output_path: Path to output file

        Raises:
            OutputException: If writing fails
        """
        try:
            Path(output_path).write_text(content, encoding="utf-8")
        except OSError as e:
            raise OutputException("Failed to write output file", str(e)) from e

    def trace(self, trace: OrbitTrace) -> str:
        """Render an expansion trace.

        Args:
            trace: States and digits of an orbit

        Returns:
            Exact and decimal states per step; MSA traces add the newest
            convergent column
        """
        data = self._trace_dict(trace)
        if self.output_format == "text":
            return self._trace_text(trace, data)
        if self.output_format == "csv":
            header = ["index", "digit"] + [f"x_{i}" for i in range(1, trace.start.dim + 1)]
            rows = [
                [step["index"], "" if step["digit"] is None else step["digit"]]
                + list(step["exact"])
                for step in data["steps"]
            ]
            return self.to_csv(header, rows)
        for step in data["steps"]:
            del step["exact"]
        return self._serialize(data)

    def period(self, report: "PeriodReport | Outcome", max_steps: int) -> str:
        """Render a period report.

        Args:
            report: PeriodReport, or TERMINATED / NOT_FOUND
            max_steps: Search budget, reported for outcomes

        Returns:
            Period, digits and spectral data in the writer's format
        """
        data = self._period_dict(report, max_steps)
        if self.output_format == "text":
            return self._period_text(data)
        if self.output_format == "csv":
            return self.to_csv(list(data), [[self._cell(v) for v in data.values()]])
        return self._serialize(data)

    def convergence(self, reports: list[ConvergenceReport]) -> str:
        """Table s, error bound per column.

        Args:
            reports: One convergence report per column

        Returns:
            Rows keyed by s with one upper error bound per column
        """
        by_s: dict[int, dict[int, Fraction]] = {}
        for report in reports:
            for row in report.rows:
                by_s.setdefault(row.s, {})[report.column] = row.error_hi
        columns = [report.column for report in reports]
        header = ["s"] + [f"error_g{c}" for c in columns]
        rows = [
            [s] + [decimal_bound(by_s[s][c]) if c in by_s[s] else "" for c in columns]
            for s in sorted(by_s)
        ]
        if self.output_format == "csv":
            return self.to_csv(header, rows)
        if self.output_format == "text":
            lines = ["  ".join(f"{h:>10}" for h in header)]
            lines += ["  ".join(f"{str(v):>10}" for v in row) for row in rows]
            for report in reports:
                status = "decreasing" if report.eventually_decreasing else "not decreasing"
                line = f"column {report.column}: {status}"
                if report.ratio is not None:
                    lo, hi = report.ratio
                    line += f", ratio in [{float(lo):.6f}, {float(hi):.6f}]"
                lines.append(line)
            return "\n".join(lines) + "\n"
        return self._serialize(
            {
                "columns": [
                    {
                        "column": report.column,
                        "eventually_decreasing": report.eventually_decreasing,
                        "ratio": None
                        if report.ratio is None
                        else [format_rational(v) for v in report.ratio],
                        "rows": [
                            {"s": row.s, "error": decimal_bound(row.error_hi)}
                            for row in report.rows
                        ],
                    }
                    for report in reports
                ]
            }
        )

    def approximation(self, report: ApproximationReport) -> str:
        """Table g, j, i, e_i(g, j), envelope.

        Args:
            report: Approximation report of a purely periodic point

        Returns:
            Rows plus the fitted constant, lower evidence and band summary
        """
        header = ["g", "j", "i", "error", "envelope"]
        rows = [
            [row.g, row.j, row.i, decimal_bound(row.error_hi), decimal_bound(row.envelope)]
            for row in report.rows
        ]
        summary: dict[str, Any] = {
            "rho1_modulus": [decimal_bound(v) for v in report.rho1_modulus],
            "epsilon": format_rational(report.epsilon),
            "constant": decimal_bound(report.constant),
            "lower_evidence": decimal_bound(report.lower_evidence),
            "band": None if report.band is None else [decimal_bound(v) for v in report.band],
            "band_violations": report.band_violations,
        }
        if self.output_format == "csv":
            return self.to_csv(header, rows)
        if self.output_format == "text":
            lines = ["  ".join(f"{h:>10}" for h in header)]
            lines += ["  ".join(f"{str(v):>10}" for v in row) for row in rows]
            lines += [f"{key}: {self._cell(value)}" for key, value in summary.items()]
            return "\n".join(lines) + "\n"
        summary["rows"] = [dict(zip(header, row)) for row in rows]
        return self._serialize(summary)

    def to_csv(self, header: list[str], rows: list[list[Any]]) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buffer.getvalue()

    def _serialize(self, data: dict[str, Any]) -> str:
        if self.output_format == "yaml":
            return yaml.dump(
                data,
                default_flow_style=False,
                sort_keys=False,
                allow_unicode=True,
                width=100,
                Dumper=self._get_custom_dumper(),
            )
        return json.dumps(data, indent=2) + "\n"

    def _cell(self, value: Any) -> str:
        if isinstance(value, list):
            return " ".join(self._cell(v) for v in value)
        if value is None:
            return ""
        return str(value)

    def _trace_dict(self, trace: OrbitTrace) -> dict[str, Any]:
        msa_columns: list[tuple[int, ...]] = []
        if trace.algo is Algorithm.MSA and not trace.restrictions:
            msa_columns = [
                state.labelled_column(state.s)
                for state in convergent_states(trace.digits, trace.start.dim)
            ]
        steps: list[dict[str, Any]] = []
        digit_index = 0
        for index, state in enumerate(trace.states[1:], start=1):
            digit = None
            if index not in trace.restrictions:
                digit = trace.digits[digit_index].value
                digit_index += 1
            step: dict[str, Any] = {
                "index": index,
                "digit": digit,
                "point": state.to_json(),
                "exact": [c.to_text() for c in state.coords],
                "decimal": [certified_decimal(c, self.digits) for c in state.coords],
            }
            if msa_columns:
                step["convergent"] = [str(v) for v in msa_columns[index]]
            steps.append(step)
        return {
            "algo": trace.algo.value,
            "field": field_to_json(trace.start.field),
            "start": trace.start.to_json(),
            "steps": steps,
            "terminated": trace.terminated,
            "restrictions": trace.restrictions,
        }

    def _trace_text(self, trace: OrbitTrace, data: dict[str, Any]) -> str:
        symbol = "T" if trace.algo is Algorithm.SSA else "S"
        lines = [f"x = {trace.start.to_text()}", f"  ~ {decimal_point(trace.start, self.digits)}"]
        for step in data["steps"]:
            head = f"{symbol}^{step['index']}x"
            if step["digit"] is None:
                lines.append(f"{head}: restricted to dimension {len(step['exact'])}")
            else:
                lines.append(f"{head}: digit {step['digit']}")
            lines.append(f"  = ({', '.join(step['exact'])})")
            lines.append(f"  ~ ({', '.join(step['decimal'])})")
            if "convergent" in step:
                lines.append(f"  B^({step['index']}) = ({', '.join(step['convergent'])})")
        if trace.terminated:
            lines.append(f"Terminated after {len(trace.digits)} steps")
        last = len(trace.states) - 1
        earlier = next(
            (i for i in range(last) if trace.states[i] == trace.states[last]), None
        )
        if earlier is not None and last > 0:
            lines.append(f"{symbol}^{last}x = {symbol}^{earlier}x")
        return "\n".join(lines) + "\n"

    def _period_dict(self, report: "PeriodReport | Outcome", max_steps: int) -> dict[str, Any]:
        if isinstance(report, Outcome):
            return {"status": report.value, "max_steps": max_steps}
        data: dict[str, Any] = {
            "status": "periodic",
            "algo": report.algo.value,
            "preperiod": report.preperiod,
            "period": report.period,
            "preperiod_digits": [d.value for d in report.preperiod_digits],
            "cycle_digits": [d.value for d in report.cycle_digits],
        }
        if report.matrix is not None:
            data["matrix"] = report.matrix.to_json()  # type: ignore[attr-defined]
        if report.charpoly is not None:
            data["charpoly"] = report.charpoly.to_text()
        if report.rho0 is not None and report.rho0_interval is not None:
            data["rho0"] = {
                "min_poly": report.rho0.field.min_poly.to_text(),
                "interval": [
                    format_rational(report.rho0_interval.lo),
                    format_rational(report.rho0_interval.hi),
                ],
                "decimal": certified_decimal(report.rho0, self.digits),
            }
        if report.eigen_point is not None:
            data["eigen_point"] = {
                "exact": [c.to_text() for c in report.eigen_point.coords],
                "coefficients": report.eigen_point.to_json(),
                "field": field_to_json(report.eigen_point.field),
                "decimal": [certified_decimal(c, self.digits) for c in report.eigen_point.coords],
            }
        if report.positivity_exponent is not None:
            data["positivity_exponent"] = report.positivity_exponent
        data["diagnostics"] = report.diagnostics
        return data

    def _period_text(self, data: dict[str, Any]) -> str:
        if data["status"] != "periodic":
            return f"status: {data['status']} (max_steps={data['max_steps']})\n"
        lines = [
            "status: periodic",
            f"algo: {data['algo']}",
            f"preperiod: {data['preperiod']}",
            f"period: {data['period']}",
            f"preperiod digits: {' '.join(map(str, data['preperiod_digits']))}",
            f"cycle digits: {' '.join(map(str, data['cycle_digits']))}",
        ]
        if "matrix" in data:
            width = max(len(v) for row in data["matrix"] for v in row)
            lines.append("M =")
            lines += ["  " + " ".join(v.rjust(width) for v in row) for row in data["matrix"]]
        if "charpoly" in data:
            lines.append(f"chi_M(t) = {data['charpoly']}")
        if "rho0" in data:
            rho = data["rho0"]
            lines.append(
                f"rho_0: root of {rho['min_poly']} in ({rho['interval'][0]}, {rho['interval'][1]})"
            )
            lines.append(f"  ~ {rho['decimal']}")
        if "eigen_point" in data:
            lines.append(f"eigen point (a = rho_0): ({', '.join(data['eigen_point']['exact'])})")
            lines.append(f"  ~ ({', '.join(data['eigen_point']['decimal'])})")
        if "positivity_exponent" in data:
            lines.append(f"M^{data['positivity_exponent']} is positive")
        lines += [f"diagnostic: {d}" for d in data["diagnostics"]]
        return "\n".join(lines) + "\n"

    def _get_custom_dumper(self) -> type:
        """Get custom YAML dumper with proper formatting.

        Returns:
            Custom Dumper class
        """

        class CustomDumper(yaml.SafeDumper):
            pass

        def represent_none(dumper: yaml.Dumper, data: None) -> yaml.ScalarNode:
            return dumper.represent_scalar("tag:yaml.org,2002:null", "")

        CustomDumper.add_representer(type(None), represent_none)

        # Keep "1/2" and "-3" as quoted strings so they re-read as text
        def represent_str(dumper: yaml.Dumper, data: str) -> yaml.ScalarNode:
            return dumper.represent_scalar("tag:yaml.org,2002:str", data, style="'")

        CustomDumper.add_representer(str, represent_str)

        return CustomDumper
