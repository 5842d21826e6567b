"""Tests for report rendering."""

import json
from pathlib import Path

import pytest
import yaml

from selmer_expansions.core.data_types import NOT_FOUND, Algorithm, PeriodReport, PointB
from selmer_expansions.core.periodic import approximation_report, convergence_report, detect_period
from selmer_expansions.core.report_writer import ReportWriter, trace_from_json
from selmer_expansions.core.selmer_maps import iterate_orbit
from selmer_expansions.exceptions import ExpressionParseException, OutputException


@pytest.fixture
def golden_period(golden_point: PointB) -> PeriodReport:
    """Return the period report of the MSA fixed point."""
    report = detect_period(golden_point, Algorithm.MSA, 10)
    assert isinstance(report, PeriodReport)
    return report


class TestTrace:
    """Tests for expansion traces."""

    def test_text_trace(self, golden_point: PointB) -> None:
        """Test exact, decimal and convergent lines of an MSA trace."""
        trace = iterate_orbit(golden_point, Algorithm.MSA, 2)
        output = ReportWriter("text", digits=10).trace(trace)
        lines = output.splitlines()
        assert lines[0] == "x = (-1/2 + 1/2*a, 3/2 - 1/2*a)"
        assert lines[1] == "  ~ (0.6180339887, 0.3819660113)"
        assert lines[2] == "S^1x: digit 2"
        assert "  B^(1) = (2, 0, 1)" in lines
        assert lines[-1] == "S^2x = S^0x"

    def test_terminated_trace(self, rational_point: PointB) -> None:
        """Test a terminated expansion is reported."""
        trace = iterate_orbit(rational_point, Algorithm.MSA, 5)
        output = ReportWriter("text", digits=4).trace(trace)
        assert "  = (3/4, 0)" in output
        assert "  ~ (0.7500, 0.0000)" in output
        assert output.endswith("Terminated after 1 steps\n")

    def test_restricted_trace(self, rational_point: PointB) -> None:
        """Test restriction steps carry no digit."""
        trace = iterate_orbit(rational_point, Algorithm.MSA, 3, restrict=True)
        output = ReportWriter("text", digits=3).trace(trace)
        assert "S^2x: restricted to dimension 1" in output
        assert "S^4x: digit 3" in output
        assert "B^(" not in output

    def test_ssa_uses_t(self, cube_point: PointB) -> None:
        """Test SSA traces are labelled T."""
        trace = iterate_orbit(cube_point, Algorithm.SSA, 1)
        output = ReportWriter("text", digits=5).trace(trace)
        assert "T^1x: digit 0" in output

    def test_json_trace(self, golden_point: PointB) -> None:
        """Test the JSON trace schema."""
        trace = iterate_orbit(golden_point, Algorithm.MSA, 2)
        data = json.loads(ReportWriter("json", digits=5).trace(trace))
        assert data["algo"] == "msa"
        assert data["field"] == {"min_poly": ["-5", "0", "1"], "root": ["2", "3"]}
        assert data["start"] == [["-1/2", "1/2"], ["3/2", "-1/2"]]
        first = data["steps"][0]
        assert first["digit"] == 2
        assert first["decimal"] == ["0.61803", "0.38197"]
        assert first["convergent"] == ["2", "0", "1"]
        assert "exact" not in first
        assert data["terminated"] is False

    def test_json_trace_reloads_exactly(self, cube_point: PointB) -> None:
        """Test a JSON trace rebuilds the exact states."""
        trace = iterate_orbit(cube_point, Algorithm.SSA, 4)
        restored = trace_from_json(ReportWriter("json", digits=5).trace(trace))
        assert restored.states == trace.states
        assert restored.digits == trace.digits

    def test_malformed_json_trace(self) -> None:
        """Test missing keys raise a parse error."""
        with pytest.raises(ExpressionParseException):
            trace_from_json('{"algo": "msa"}')

    def test_csv_trace(self, rational_point: PointB) -> None:
        """Test the CSV trace uses exact coordinates."""
        trace = iterate_orbit(rational_point, Algorithm.MSA, 5)
        output = ReportWriter("csv").trace(trace)
        assert output == "index,digit,x_1,x_2\n1,2,3/4,0\n"


class TestPeriod:
    """Tests for period reports."""

    def test_text_period(self, golden_period: PeriodReport) -> None:
        """Test the text report of the fixed point."""
        output = ReportWriter("text", digits=6).period(golden_period, 10)
        assert "status: periodic" in output
        assert "preperiod: 0" in output
        assert "cycle digits: 2" in output
        assert "chi_M(t) = t^3 - 2*t - 1" in output
        assert "rho_0: root of t^2 - t - 1 in (" in output
        assert "  ~ 1.618034" in output
        assert "M^5 is positive" in output

    def test_yaml_period(self, golden_period: PeriodReport) -> None:
        """Test the YAML report re-reads with string rationals."""
        data = yaml.safe_load(ReportWriter("yaml", digits=6).period(golden_period, 10))
        assert data["status"] == "periodic"
        assert data["period"] == 1
        assert data["charpoly"] == "t^3 - 2*t - 1"
        assert data["matrix"] == [["0", "2", "1"], ["1", "0", "0"], ["0", "1", "0"]]
        assert data["eigen_point"]["decimal"] == ["0.618034", "0.381966"]

    def test_json_eigen_point_coefficients(self, golden_period: PeriodReport) -> None:
        """Test the eigen point is emitted as coefficients over Q(rho_0)."""
        data = json.loads(ReportWriter("json", digits=6).period(golden_period, 10))
        eigen = data["eigen_point"]
        assert eigen["coefficients"] == [["-1", "1"], ["2", "-1"]]
        assert eigen["field"]["min_poly"] == ["-1", "-1", "1"]
        assert eigen["exact"] == ["-1 + a", "2 - a"]

    def test_not_found(self) -> None:
        """Test the NOT_FOUND rendering."""
        output = ReportWriter("text").period(NOT_FOUND, 40)
        assert output == "status: not_found (max_steps=40)\n"
        data = json.loads(ReportWriter("json").period(NOT_FOUND, 40))
        assert data == {"status": "not_found", "max_steps": 40}


class TestTables:
    """Tests for convergence and approximation tables."""

    def test_convergence_csv(self, golden_point: PointB) -> None:
        """Test one column per convergence report."""
        reports = [convergence_report(golden_point, [2] * 5, 5, column=c) for c in (0, 1)]
        output = ReportWriter("csv").convergence(reports)
        lines = output.splitlines()
        assert lines[0] == "s,error_g0,error_g1"
        assert len(lines) == 6

    def test_approximation_text(self, golden_point: PointB) -> None:
        """Test the summary lines of the approximation table."""
        report = approximation_report(golden_point, [2], 12)
        output = ReportWriter("text").approximation(report)
        assert "band_violations: " in output
        assert "constant: " in output


class TestWriter:
    """Tests for writer construction and file output."""

    def test_unknown_format(self) -> None:
        """Test an unknown format is rejected."""
        with pytest.raises(OutputException):
            ReportWriter("xml")

    def test_write(self, tmp_path: Path) -> None:
        """Test content is written to disk."""
        target = tmp_path / "report.txt"
        ReportWriter().write("status: periodic\n", str(target))
        assert target.read_text() == "status: periodic\n"

    def test_write_failure(self, tmp_path: Path) -> None:
        """Test writing to a directory raises."""
        with pytest.raises(OutputException):
            ReportWriter().write("x", str(tmp_path))
