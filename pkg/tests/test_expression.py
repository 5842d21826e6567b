"""Tests for field spec parsing, point parsing and decimal rendering."""

from fractions import Fraction

import pytest

from selmer_expansions.core.converters import (
    certified_decimal,
    decimal_bound,
    decimal_point,
    digits_for,
    parse_element,
    parse_field,
    parse_point,
    round_fraction,
    split_coordinates,
)
from selmer_expansions.core.data_types import PointB
from selmer_expansions.core.numfield import NumberField
from selmer_expansions.exceptions import ExpressionParseException


class TestParseField:
    """Tests for ``poly:(lo,hi)`` field specs."""

    def test_cube_root_field(self, cbrt2_field: NumberField) -> None:
        """Test parsing Q(cbrt 2)."""
        assert parse_field("x^3-2:(1,2)") == cbrt2_field

    def test_decimal_interval(self, sqrt5_field: NumberField) -> None:
        """Test decimal endpoints are read exactly."""
        field_ = parse_field("x**2 - 5 : (2.2, 2.3)")
        assert field_.min_poly == sqrt5_field.min_poly
        assert field_.root.lo == Fraction(11, 5)

    def test_missing_spec_is_rationals(self) -> None:
        """Test a missing field means Q."""
        assert parse_field(None).is_rational
        assert parse_field("  ").is_rational

    @pytest.mark.parametrize(
        "spec",
        [
            "x^2-5",
            "x^2-5:(0,1)",
            "x^2-5:(-3,3)",
            "y^2-5:(2,3)",
            "__import__('os'):(1,2)",
            "x^2-5:(2,two)",
        ],
    )
    def test_invalid_specs(self, spec: str) -> None:
        """Test malformed or invalid specs raise."""
        with pytest.raises(ExpressionParseException):
            parse_field(spec)


class TestParsePoint:
    """Tests for coordinate expressions."""

    def test_cube_point(self, cbrt2_field: NumberField, cube_point: PointB) -> None:
        """Test parsing (a^2 - 1, a - 1)."""
        assert parse_point("a^2-1, a-1", cbrt2_field) == cube_point

    def test_golden_point(self, sqrt5_field: NumberField, golden_point: PointB) -> None:
        """Test parsing coordinates with parentheses."""
        assert parse_point("(a-1)/2,(3-a)/2", sqrt5_field) == golden_point

    def test_rational_point(self, rationals: NumberField, rational_point: PointB) -> None:
        """Test parsing rationals and decimals."""
        assert parse_point("2/3, 0.5", rationals) == rational_point

    def test_rational_function(self, cbrt2_field: NumberField) -> None:
        """Test denominators in a are inverted in the field."""
        a = cbrt2_field.generator()
        assert parse_element("(a-1)/(2-a)", cbrt2_field) == (a - 1) / (2 - a)

    def test_generator_needs_a_field(self, rationals: NumberField) -> None:
        """Test 'a' is rejected over Q."""
        with pytest.raises(ExpressionParseException):
            parse_element("a/2", rationals)

    def test_point_outside_b(self, rationals: NumberField) -> None:
        """Test increasing coordinates are rejected."""
        with pytest.raises(ExpressionParseException):
            parse_point("1/2, 2/3", rationals)

    @pytest.mark.parametrize("text", ["", "a +", "exp(a)", "a; 1"])
    def test_malformed(self, text: str, cbrt2_field: NumberField) -> None:
        """Test malformed coordinates raise."""
        with pytest.raises(ExpressionParseException):
            parse_element(text, cbrt2_field)

    def test_split_coordinates(self) -> None:
        """Test commas inside parentheses do not split."""
        assert split_coordinates("(1+a), 2 ,3") == ["(1+a)", "2", "3"]
        with pytest.raises(ExpressionParseException):
            split_coordinates("(1, 2")


class TestDecimals:
    """Tests for certified decimal rendering."""

    def test_digits_for(self) -> None:
        """Test the decimal count of a precision."""
        assert digits_for(Fraction(1, 10**30)) == 30
        assert digits_for(Fraction(1, 3)) == 1

    def test_round_half_away_from_zero(self) -> None:
        """Test ties round away from zero."""
        assert round_fraction(Fraction(1, 8), 2) == "0.13"
        assert round_fraction(Fraction(-1, 8), 2) == "-0.13"
        assert round_fraction(Fraction(-1, 1000), 2) == "0.00"
        assert round_fraction(Fraction(5, 2), 0) == "3"

    def test_certified_decimal(self, sqrt5_field: NumberField) -> None:
        """Test sqrt 5 to ten decimals."""
        assert certified_decimal(sqrt5_field.generator(), 10) == "2.2360679775"

    def test_decimal_point(self, golden_point: PointB) -> None:
        """Test a point rendered to five decimals."""
        assert decimal_point(golden_point, 5) == "(0.61803, 0.38197)"

    def test_decimal_bound(self) -> None:
        """Test upward scientific rendering."""
        assert decimal_bound(Fraction(159, 10**10)) == "1.59e-08"
        assert decimal_bound(Fraction(1, 3)) == "3.34e-01"
        assert decimal_bound(Fraction(9999, 1000)) == "1.00e+01"
        assert decimal_bound(Fraction(0)) == "0"
