"""Certified decimal rendering of field elements."""

import math
from fractions import Fraction

from selmer_expansions.core.data_types import PointB
from selmer_expansions.core.numfield import NumberFieldElement, nf_interval
from selmer_expansions.exceptions import RefinementException

# Tightening rounds before a rounding decision gives up
MAX_ROUNDING_ROUNDS = 64


def digits_for(precision: Fraction) -> int:
    """Smallest d with 10^-d <= precision."""
    if precision <= 0:
        raise ValueError("Precision must be positive")
    digits = 0
    while Fraction(1, 10**digits) > precision:
        digits += 1
    return digits


def round_fraction(value: Fraction, digits: int) -> str:
    """Round half away from zero to ``digits`` decimals."""
    scaled = abs(value) * 10**digits
    units = math.floor(scaled + Fraction(1, 2))
    sign = "-" if value < 0 and units != 0 else ""
    text = str(units).rjust(digits + 1, "0")
    if digits == 0:
        return sign + text
    return f"{sign}{text[:-digits]}.{text[-digits:]}"


def certified_decimal(a: NumberFieldElement, digits: int) -> str:
    """Correctly rounded decimal of ``a``.

    The enclosure is tightened until both ends round to the same string.

    Raises:
        RefinementException: If the ends never agree within the round budget
    """
    if a.is_rational:
        return round_fraction(a.rational_value(), digits)
    width = Fraction(1, 10 ** (digits + 2))
    for _ in range(MAX_ROUNDING_ROUNDS):
        lo, hi = nf_interval(a, width)
        low_text = round_fraction(lo, digits)
        if low_text == round_fraction(hi, digits):
            return low_text
        width /= 1024
    raise RefinementException("Rounding not certified", a.to_text())


def decimal_point(x: PointB, digits: int) -> str:
    return "(" + ", ".join(certified_decimal(c, digits) for c in x.coords) + ")"


def decimal_bound(value: Fraction, digits: int = 3) -> str:
    """Upward-rounded scientific rendering of an error bound, e.g. ``1.59e-08``."""
    if value == 0:
        return "0"
    exponent = len(str(value.numerator)) - len(str(value.denominator))
    while Fraction(10) ** exponent > value:
        exponent -= 1
    while Fraction(10) ** (exponent + 1) <= value:
        exponent += 1
    mantissa = value / Fraction(10) ** exponent
    units = math.ceil(mantissa * 10 ** (digits - 1))
    if units == 10**digits:
        units //= 10
        exponent += 1
    text = str(units)
    return f"{text[0]}.{text[1:]}e{exponent:+03d}"
