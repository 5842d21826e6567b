"""Data types shared by the Selmer expansion modules."""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from selmer_expansions.core.numfield import (
    IsolatingInterval,
    NumberField,
    NumberFieldElement,
    Ordering,
    Polynomial,
    check_same_field,
    nf_cmp,
)
from selmer_expansions.exceptions import DomainException


class Algorithm(str, Enum):
    """Which Selmer algorithm drives an expansion."""

    SSA = "ssa"
    MSA = "msa"


class Outcome(str, Enum):
    """Non-point results of steps and scans."""

    TERMINATED = "terminated"
    NOT_FOUND = "not_found"


TERMINATED = Outcome.TERMINATED
NOT_FOUND = Outcome.NOT_FOUND


@dataclass(frozen=True)
class Digit:
    """Branch index of one step: insertion index j for SSA, integer part k for MSA."""

    algo: Algorithm
    value: int

    def __post_init__(self) -> None:
        if self.algo is Algorithm.MSA and self.value < 1:
            raise DomainException("MSA digit must be >= 1", str(self.value))
        if self.algo is Algorithm.SSA and self.value < 0:
            raise DomainException("SSA digit must be >= 0", str(self.value))


@dataclass(frozen=True)
class PointB:
    """Point of B^n = {1 >= x_1 >= ... >= x_n >= 0} with exact coordinates."""

    coords: tuple[NumberFieldElement, ...]

    def __post_init__(self) -> None:
        if not self.coords:
            raise DomainException("Point needs at least one coordinate")
        first = self.coords[0]
        for c in self.coords[1:]:
            check_same_field(first, c)
        if not in_b(self.coords):
            raise DomainException(
                "Coordinates violate 1 >= x_1 >= ... >= x_n >= 0", self.to_text()
            )

    @classmethod
    def of(cls, field_: NumberField, values: "list[object] | tuple[object, ...]") -> "PointB":
        """Build a point from ints, rationals or elements of ``field_``."""
        return cls(tuple(field_.element(v) for v in values))  # type: ignore[arg-type]

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def field(self) -> NumberField:
        return self.coords[0].field

    def lift(self) -> tuple[NumberFieldElement, ...]:
        """Homogeneous vector (1, x_1, ..., x_n)."""
        return (self.field.one(),) + self.coords

    def to_text(self) -> str:
        return "(" + ", ".join(c.to_text() for c in self.coords) + ")"

    def to_json(self) -> list[list[str]]:
        return [c.to_json() for c in self.coords]


def in_b(coords: "tuple[NumberFieldElement, ...] | list[NumberFieldElement]") -> bool:
    """Whether 1 >= x_1 >= ... >= x_n >= 0 holds exactly."""
    field_ = coords[0].field
    chain = [field_.one(), *coords, field_.zero()]
    return all(nf_cmp(a, b) is not Ordering.LT for a, b in zip(chain, chain[1:]))


@dataclass(frozen=True)
class StepOutcome:
    """Result of one step: the image point or TERMINATED, and the digit used."""

    next: "PointB | Outcome"
    digit: Digit | None

    @property
    def terminated(self) -> bool:
        return self.next is TERMINATED


@dataclass
class OrbitTrace:
    """Orbit x, Tx, T^2x, ... with the digits that produced it.

    ``states[i + 1]`` is the image of ``states[i]`` under the digit ``digits[i]``.
    """

    algo: Algorithm
    start: PointB
    states: list[PointB] = field(default_factory=list)
    digits: list[Digit] = field(default_factory=list)
    terminated: bool = False
    restrictions: list[int] = field(default_factory=list)


@dataclass
class PeriodReport:
    """Preperiod, period and (for MSA) the spectral data of the cycle."""

    algo: Algorithm
    preperiod: int
    period: int
    cycle_digits: list[Digit]
    preperiod_digits: list[Digit] = field(default_factory=list)
    matrix: "object | None" = None
    charpoly: Polynomial | None = None
    rho0: NumberFieldElement | None = None
    rho0_interval: IsolatingInterval | None = None
    eigen_point: PointB | None = None
    positivity_exponent: int | None = None
    diagnostics: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class ConvergenceRow:
    """Certified max_i |B_i/B_0 - x_i| for one convergent matrix and column."""

    s: int
    column: int
    error_lo: Fraction
    error_hi: Fraction


@dataclass
class ConvergenceReport:
    """Convergence table for one column of the convergent matrices."""

    column: int
    rows: list[ConvergenceRow] = field(default_factory=list)
    eventually_decreasing: bool = False
    ratio: tuple[Fraction, Fraction] | None = None


@dataclass(frozen=True)
class ApproximationRow:
    """Certified e_i(g, j) = |B_0 x_i - B_i| for the column labelled B^(pg + j)."""

    g: int
    j: int
    i: int
    error_lo: Fraction
    error_hi: Fraction
    envelope: Fraction


@dataclass
class ApproximationReport:
    """Approximation quality of the columns B^(pg + j) against the expanded point."""

    rho1_modulus: tuple[Fraction, Fraction]
    epsilon: Fraction
    rows: list[ApproximationRow] = field(default_factory=list)
    constant: Fraction = Fraction(0)
    lower_evidence: Fraction = Fraction(0)
    band: tuple[Fraction, Fraction] | None = None
    band_violations: list[int] = field(default_factory=list)


@dataclass
class RunConfig:
    """Options for one CLI run."""

    algo: Algorithm = Algorithm.MSA
    field_spec: str | None = None
    point_spec: str = ""
    steps: int = 10
    max_steps: int = 10_000
    output_format: str = "text"
    precision: Fraction = Fraction(1, 10**30)
    column: int | None = None
    out: str | None = None
    restrict: bool = False
    epsilon: Fraction = Fraction(0)
