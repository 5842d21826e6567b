"""Exact Selmer continued fraction expansions.

Subtractive and multiplicative Selmer algorithms over real number fields, with
periodicity detection, convergent matrices and spectral analysis of periods.
"""

__version__ = "1.0.0"

from selmer_expansions.cli import main
from selmer_expansions.core.data_types import Algorithm, PointB
from selmer_expansions.core.numfield import NumberField
from selmer_expansions.core.periodic import detect_period
from selmer_expansions.core.report_writer import ReportWriter
from selmer_expansions.exceptions import (
    DomainException,
    ExpressionParseException,
    NumberFieldException,
    OutputException,
    SelmerException,
    SpectralException,
)

__all__ = [
    "main",
    "Algorithm",
    "PointB",
    "NumberField",
    "detect_period",
    "ReportWriter",
    "SelmerException",
    "NumberFieldException",
    "DomainException",
    "SpectralException",
    "ExpressionParseException",
    "OutputException",
]
