"""Test fixtures for selmer_expansions tests."""

from fractions import Fraction

import pytest

from selmer_expansions.core.data_types import PointB
from selmer_expansions.core.numfield import IsolatingInterval, NumberField, Polynomial


@pytest.fixture
def rationals() -> NumberField:
    """Return the field Q."""
    return NumberField.rationals()


@pytest.fixture
def cbrt2_field() -> NumberField:
    """Return Q(cbrt 2) with the real root in (1, 2)."""
    return NumberField(
        Polynomial((Fraction(-2), Fraction(0), Fraction(0), Fraction(1))),
        IsolatingInterval(Fraction(1), Fraction(2)),
    )


@pytest.fixture
def sqrt5_field() -> NumberField:
    """Return Q(sqrt 5) with the positive root."""
    return NumberField(
        Polynomial((Fraction(-5), Fraction(0), Fraction(1))),
        IsolatingInterval(Fraction(2), Fraction(3)),
    )


@pytest.fixture
def cube_point(cbrt2_field: NumberField) -> PointB:
    """Return (cbrt 4 - 1, cbrt 2 - 1), purely periodic after one SSA step."""
    a = cbrt2_field.generator()
    return PointB((a * a - 1, a - 1))


@pytest.fixture
def golden_point(sqrt5_field: NumberField) -> PointB:
    """Return ((sqrt 5 - 1)/2, (3 - sqrt 5)/2), the MSA fixed point with digit 2."""
    a = sqrt5_field.generator()
    return PointB(((a - 1) / 2, (3 - a) / 2))


@pytest.fixture
def rational_point(rationals: NumberField) -> PointB:
    """Return (2/3, 1/2), whose MSA expansion terminates after one step."""
    return PointB.of(rationals, [Fraction(2, 3), Fraction(1, 2)])


@pytest.fixture
def plastic_field() -> NumberField:
    """Return Q(rho) for the real root rho of x^3 - x - 1."""
    return NumberField(
        Polynomial((Fraction(-1), Fraction(-1), Fraction(0), Fraction(1))),
        IsolatingInterval(Fraction(1), Fraction(2)),
    )


@pytest.fixture
def plastic_point(plastic_field: NumberField) -> PointB:
    """Return (1/rho, 1/rho^2), the MSA fixed point with digit 1."""
    rho = plastic_field.generator()
    return PointB((rho.inverse(), rho.inverse() ** 2))
