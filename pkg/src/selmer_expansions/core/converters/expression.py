"""Field spec and point expression parsing.

A field spec reads ``"x^3-2:(1,2)"``: a polynomial in ``x`` and an interval
isolating the chosen real root. Point coordinates are arithmetic expressions in
``a`` (that root) and rationals, separated by commas, e.g. ``"(a-1)/2,(3-a)/2"``.
"""

import re
from tokenize import TokenError

from sympy import Poly, Symbol, fraction, together
from sympy.core.sympify import SympifyError
from sympy.parsing.sympy_parser import (
    convert_xor,
    parse_expr,
    rationalize,
    standard_transformations,
)
from sympy.polys.domains import QQ
from sympy.polys.polyerrors import PolynomialError

from selmer_expansions.core.data_types import PointB
from selmer_expansions.core.numfield import (
    IsolatingInterval,
    NumberField,
    NumberFieldElement,
    Polynomial,
    parse_rational,
)
from selmer_expansions.exceptions import (
    DomainException,
    ExpressionParseException,
    NumberFieldException,
)

_TRANSFORMATIONS = standard_transformations + (convert_xor, rationalize)

_POLY_CHARS = re.compile(r"^[0-9x\s+\-*/^().]+$")
_EXPR_CHARS = re.compile(r"^[0-9a\s+\-*/^().]+$")
_FIELD_SPEC = re.compile(r"^\s*(?P<poly>[^:]+):\s*\(\s*(?P<lo>[^,()]+),\s*(?P<hi>[^,()]+)\)\s*$")

_X = Symbol("x")
_A = Symbol("a")


def _parse(text: str, symbol: Symbol, allowed: re.Pattern[str]) -> object:
    if not text.strip() or not allowed.match(text):
        raise ExpressionParseException("Unsupported characters in expression", text)
    try:
        return parse_expr(
            text, local_dict={symbol.name: symbol}, transformations=_TRANSFORMATIONS
        )
    except (SyntaxError, TypeError, SympifyError, TokenError) as e:
        raise ExpressionParseException("Malformed expression", text) from e


def parse_field(spec: str | None) -> NumberField:
    """Build the field of a ``"poly:(lo,hi)"`` spec; no field means Q.

    Args:
        spec: Polynomial in ``x`` and an isolating interval, or None

    Returns:
        NumberField with the root in (lo, hi) as generator

    Raises:
        ExpressionParseException: If the text is malformed or the interval does
            not isolate exactly one root
    """
    if spec is None or not spec.strip():
        return NumberField.rationals()
    match = _FIELD_SPEC.match(spec)
    if not match:
        raise ExpressionParseException("Field spec must look like 'x^3-2:(1,2)'", spec)

    expr = _parse(match.group("poly"), _X, _POLY_CHARS)
    try:
        poly = Poly(expr, _X, domain=QQ)
    except PolynomialError as e:
        raise ExpressionParseException("Not a polynomial in x", match.group("poly")) from e
    try:
        lo = parse_rational(match.group("lo"))
        hi = parse_rational(match.group("hi"))
        return NumberField(Polynomial.from_sympy(poly), IsolatingInterval(lo, hi))
    except NumberFieldException as e:
        raise ExpressionParseException("Invalid field", str(e)) from e


def split_coordinates(text: str) -> list[str]:
    """Split on commas outside parentheses."""
    parts: list[str] = []
    depth = 0
    current: list[str] = []
    for char in text:
        if char == "(":
            depth += 1
        elif char == ")":
            depth -= 1
            if depth < 0:
                raise ExpressionParseException("Unbalanced parentheses", text)
        if char == "," and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(char)
    if depth != 0:
        raise ExpressionParseException("Unbalanced parentheses", text)
    parts.append("".join(current))
    return [p.strip() for p in parts]


def parse_element(text: str, field_: NumberField) -> NumberFieldElement:
    """Evaluate an expression in ``a`` exactly in ``field_``.

    Args:
        text: Rational function of the generator ``a``
        field_: Field the value lives in

    Returns:
        The element in canonical form

    Raises:
        ExpressionParseException: If the text is not a rational function of ``a``,
            uses ``a`` in the rational field, or divides by zero in the field
    """
    expr = _parse(text, _A, _EXPR_CHARS)
    if field_.is_rational and _A in expr.free_symbols:  # type: ignore[attr-defined]
        raise ExpressionParseException("The rational field has no generator 'a'", text)
    numerator, denominator = fraction(together(expr))
    try:
        top = Polynomial.from_sympy(Poly(numerator, _A, domain=QQ))
        bottom = Polynomial.from_sympy(Poly(denominator, _A, domain=QQ))
    except PolynomialError as e:
        raise ExpressionParseException("Not a rational function of a", text) from e

    generator = field_.generator()
    try:
        value = _evaluate(top, generator) / _evaluate(bottom, generator)
    except NumberFieldException as e:
        raise ExpressionParseException("Division by zero in the field", text) from e
    return value


def _evaluate(poly: Polynomial, generator: NumberFieldElement) -> NumberFieldElement:
    result = generator.field.zero()
    for c in reversed(poly.coeffs):
        result = result * generator + c
    return result


def parse_point(text: str, field_: NumberField) -> PointB:
    """Parse comma-separated coordinates into a point of B^n.

    Args:
        text: Coordinates such as ``"a^2-1, a-1"``
        field_: Field of the coordinates

    Returns:
        PointB with exact coordinates

    Raises:
        ExpressionParseException: If a coordinate does not parse or the point
            violates 1 >= x_1 >= ... >= x_n >= 0
    """
    coords = tuple(parse_element(part, field_) for part in split_coordinates(text))
    try:
        return PointB(coords)
    except DomainException as e:
        raise ExpressionParseException("Point is not in B^n", str(e)) from e
