"""Converters between user input, exact values and printable text."""

from selmer_expansions.core.converters.expression import (
    parse_element,
    parse_field,
    parse_point,
    split_coordinates,
)
from selmer_expansions.core.converters.helpers import (
    certified_decimal,
    decimal_bound,
    decimal_point,
    digits_for,
    round_fraction,
)

__all__ = [
    "parse_element",
    "parse_field",
    "parse_point",
    "split_coordinates",
    "certified_decimal",
    "decimal_bound",
    "decimal_point",
    "digits_for",
    "round_fraction",
]
