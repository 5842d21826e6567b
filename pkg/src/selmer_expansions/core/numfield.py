"""Exact arithmetic in a real number field Q(alpha).

Elements are coefficient vectors over Q modulo a monic minimal polynomial. The
real embedding is selected by an isolating interval of one real root; signs,
comparisons and floors are decided with exact rational interval arithmetic,
bisecting the root interval until the answer is certain.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from threading import Lock
from typing import Union

from sympy import Poly, Rational, Symbol
from sympy.polys.densearith import dup_mul, dup_rem
from sympy.polys.densebasic import dup_strip
from sympy.polys.domains import QQ
from sympy.polys.euclidtools import dup_invert
from sympy.polys.polyerrors import NotInvertible

from selmer_expansions.exceptions import (
    FieldMismatchException,
    NumberFieldException,
    RefinementException,
)

logger = logging.getLogger(__name__)

# Bisection budget for a single sign, floor or enclosure decision
MAX_BISECTIONS = 4000

_X = Symbol("x")

Scalar = Union[int, Fraction]


def _to_qq(value: Fraction) -> object:
    return QQ(value.numerator, value.denominator)


def _from_qq(value: object) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))  # type: ignore[attr-defined]


def format_rational(value: Fraction) -> str:
    """Render a rational as ``p`` or ``p/q``."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse ``p``, ``p/q`` or a decimal literal into an exact rational."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise NumberFieldException("Invalid rational", text) from e


class Ordering(Enum):
    """Result of an exact comparison."""

    LT = -1
    EQ = 0
    GT = 1


@dataclass(frozen=True)
class Polynomial:
    """Univariate polynomial with rational coefficients, lowest degree first.

    Trailing zeros are stripped, so the zero polynomial has empty ``coeffs``.
    """

    coeffs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        coeffs = [Fraction(c) for c in self.coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @classmethod
    def from_sympy(cls, poly: Poly) -> "Polynomial":
        """Build from a univariate sympy ``Poly``."""
        coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(poly.all_coeffs())]
        return cls(tuple(coeffs))

    def to_sympy(self, symbol: Symbol = _X) -> Poly:
        """Convert to a sympy ``Poly`` over QQ."""
        terms = [Rational(c.numerator, c.denominator) for c in reversed(self.coeffs)]
        return Poly(terms or [0], symbol, domain=QQ)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def monic(self) -> "Polynomial":
        if self.is_zero:
            raise NumberFieldException("Zero polynomial has no monic form")
        lead = self.coeffs[-1]
        return Polynomial(tuple(c / lead for c in self.coeffs))

    def evaluate(self, point: Fraction) -> Fraction:
        result = Fraction(0)
        for c in reversed(self.coeffs):
            result = result * point + c
        return result

    def to_text(self, var: str = "t") -> str:
        """Render as ``t^3 - 2*t - 1``, highest degree first."""
        if self.is_zero:
            return "0"
        parts: list[str] = []
        for power in range(self.degree, -1, -1):
            c = self.coeffs[power]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            magnitude = abs(c)
            if power == 0:
                body = format_rational(magnitude)
            else:
                monomial = var if power == 1 else f"{var}^{power}"
                body = monomial if magnitude == 1 else f"{format_rational(magnitude)}*{monomial}"
            if not parts:
                parts.append(body if sign == "+" else f"-{body}")
            else:
                parts.append(f"{sign} {body}")
        return " ".join(parts)


@dataclass(frozen=True)
class IsolatingInterval:
    """Open rational interval (lo, hi) holding exactly one real root."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if not self.lo < self.hi:
            raise NumberFieldException(
                "Isolating interval needs lo < hi", f"({self.lo}, {self.hi})"
            )

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def to_text(self) -> str:
        return f"({format_rational(self.lo)}, {format_rational(self.hi)})"


def _interval_mul(
    a: tuple[Fraction, Fraction], b: tuple[Fraction, Fraction]
) -> tuple[Fraction, Fraction]:
    products = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return min(products), max(products)


class NumberField:
    """Real number field Q[x]/(m(x)) with a designated real root alpha.

    The minimal polynomial is normalized to monic form. Irreducibility is the
    caller's responsibility; a reducible modulus surfaces as a zero divisor on
    inversion. The root interval only ever shrinks, so sharing a field between
    threads is safe.
    """

    def __init__(self, min_poly: Polynomial, root: IsolatingInterval) -> None:
        if min_poly.degree < 1:
            raise NumberFieldException("Minimal polynomial must have degree >= 1")
        self.min_poly = min_poly.monic()
        self.degree = self.min_poly.degree
        self.root = root
        self._validate_root()
        self._interval = root
        self._lock = Lock()
        self._modulus = [_to_qq(c) for c in reversed(self.min_poly.coeffs)]

    @classmethod
    def rationals(cls) -> "NumberField":
        """The field Q, presented as Q[x]/(x) with root 0."""
        return cls(
            Polynomial((Fraction(0), Fraction(1))), IsolatingInterval(Fraction(-1), Fraction(1))
        )

    def _validate_root(self) -> None:
        lo_value = self.min_poly.evaluate(self.root.lo)
        hi_value = self.min_poly.evaluate(self.root.hi)
        if lo_value == 0 or hi_value == 0:
            raise NumberFieldException(
                "Isolating interval endpoint is a root", self.root.to_text()
            )
        count = self.min_poly.to_sympy().count_roots(
            Rational(self.root.lo.numerator, self.root.lo.denominator),
            Rational(self.root.hi.numerator, self.root.hi.denominator),
        )
        if count != 1:
            raise NumberFieldException(
                f"Interval holds {count} real roots of {self.min_poly.to_text('x')}",
                self.root.to_text(),
            )

    @property
    def is_rational(self) -> bool:
        return self.degree == 1

    @property
    def interval(self) -> IsolatingInterval:
        """Current (possibly refined) isolating interval of alpha."""
        return self._interval

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NumberField):
            return NotImplemented
        return self.min_poly == other.min_poly and self.root == other.root

    def __hash__(self) -> int:
        return hash((self.min_poly, self.root))

    def __repr__(self) -> str:
        return f"NumberField({self.min_poly.to_text('x')}, {self.root.to_text()})"

    def element(self, value: "Scalar | NumberFieldElement") -> "NumberFieldElement":
        """Coerce an integer, rational or element of this field."""
        if isinstance(value, NumberFieldElement):
            check_same_field(value, self.zero())
            return value
        coeffs = [Fraction(0)] * self.degree
        coeffs[0] = Fraction(value)
        return NumberFieldElement(self, tuple(coeffs))

    def from_coeffs(self, coeffs: "list[Fraction] | tuple[Fraction, ...]") -> "NumberFieldElement":
        """Build the element sum(c_i alpha^i), reducing when longer than the degree."""
        coeffs = [Fraction(c) for c in coeffs]
        if len(coeffs) > self.degree:
            return NumberFieldElement(self, self._reduce(coeffs))
        coeffs += [Fraction(0)] * (self.degree - len(coeffs))
        return NumberFieldElement(self, tuple(coeffs))

    def zero(self) -> "NumberFieldElement":
        return self.element(0)

    def one(self) -> "NumberFieldElement":
        return self.element(1)

    def generator(self) -> "NumberFieldElement":
        """The designated root alpha."""
        if self.is_rational:
            return self.element(-self.min_poly.coeffs[0])
        return self.from_coeffs([Fraction(0), Fraction(1)])

    def _reduce(self, coeffs: list[Fraction]) -> tuple[Fraction, ...]:
        dense = dup_strip([_to_qq(c) for c in reversed(coeffs)])
        remainder = dup_rem(dense, self._modulus, QQ)
        return self._pad(remainder)

    def _pad(self, dense: list[object]) -> tuple[Fraction, ...]:
        values = [_from_qq(c) for c in reversed(dense)]
        values += [Fraction(0)] * (self.degree - len(values))
        return tuple(values)

    def _dense(self, element: "NumberFieldElement") -> list[object]:
        return dup_strip([_to_qq(c) for c in reversed(element.coeffs)])

    def multiply(self, a: "NumberFieldElement", b: "NumberFieldElement") -> tuple[Fraction, ...]:
        if self.is_rational:
            return (a.coeffs[0] * b.coeffs[0],)
        product = dup_mul(self._dense(a), self._dense(b), QQ)
        return self._pad(dup_rem(product, self._modulus, QQ))

    def invert(self, a: "NumberFieldElement") -> tuple[Fraction, ...]:
        if a.is_zero:
            raise NumberFieldException("Division by zero", repr(self))
        if self.is_rational:
            return (1 / a.coeffs[0],)
        try:
            inverse = dup_invert(self._dense(a), self._modulus, QQ)
        except NotInvertible as e:
            raise NumberFieldException(
                "Element is a zero divisor; minimal polynomial is reducible",
                self.min_poly.to_text("x"),
            ) from e
        return self._pad(inverse)

    def bisect(self) -> IsolatingInterval:
        """Halve the root interval, keeping the half that holds alpha."""
        with self._lock:
            current = self._interval
            mid = current.midpoint
            mid_value = self.min_poly.evaluate(mid)
            if mid_value == 0:
                # Only reachable for reducible input; alpha would be rational.
                raise NumberFieldException("Root interval midpoint is a root", str(mid))
            lo_value = self.min_poly.evaluate(current.lo)
            if (lo_value < 0) == (mid_value < 0):
                refined = IsolatingInterval(mid, current.hi)
            else:
                refined = IsolatingInterval(current.lo, mid)
            self._interval = refined
            return refined

    def enclose(self, a: "NumberFieldElement") -> tuple[Fraction, Fraction]:
        """Closed rational interval containing the real value of ``a``."""
        if self.is_rational:
            return a.coeffs[0], a.coeffs[0]
        root = self._interval
        alpha = (root.lo, root.hi)
        lo = hi = a.coeffs[-1]
        for c in reversed(a.coeffs[:-1]):
            lo, hi = _interval_mul((lo, hi), alpha)
            lo, hi = lo + c, hi + c
        return lo, hi


@dataclass(frozen=True)
class NumberFieldElement:
    """Element c_0 + c_1 alpha + ... + c_(d-1) alpha^(d-1) of a number field.

    The coefficient vector is canonical, so structural equality is value equality.
    """

    field: NumberField
    coeffs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.coeffs) != self.field.degree:
            raise NumberFieldException(
                "Coefficient vector length differs from field degree",
                f"{len(self.coeffs)} != {self.field.degree}",
            )

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    @property
    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def rational_value(self) -> Fraction:
        """The value as a rational, for elements of Q embedded in the field."""
        if not self.is_rational:
            raise NumberFieldException("Element is irrational", self.to_text())
        return self.coeffs[0]

    def _coerce(self, other: "Scalar | NumberFieldElement") -> "NumberFieldElement":
        if isinstance(other, NumberFieldElement):
            check_same_field(self, other)
            return other
        return self.field.element(other)

    def __add__(self, other: "Scalar | NumberFieldElement") -> "NumberFieldElement":
        other = self._coerce(other)
        return NumberFieldElement(
            self.field, tuple(a + b for a, b in zip(self.coeffs, other.coeffs))
        )

    __radd__ = __add__

    def __neg__(self) -> "NumberFieldElement":
        return NumberFieldElement(self.field, tuple(-c for c in self.coeffs))

    def __sub__(self, other: "Scalar | NumberFieldElement") -> "NumberFieldElement":
        return self + (-self._coerce(other))

    def __rsub__(self, other: "Scalar | NumberFieldElement") -> "NumberFieldElement":
        return self._coerce(other) - self

    def __mul__(self, other: "Scalar | NumberFieldElement") -> "NumberFieldElement":
        if isinstance(other, (int, Fraction)):
            scale = Fraction(other)
            return NumberFieldElement(self.field, tuple(c * scale for c in self.coeffs))
        other = self._coerce(other)
        return NumberFieldElement(self.field, self.field.multiply(self, other))

    __rmul__ = __mul__

    def inverse(self) -> "NumberFieldElement":
        return NumberFieldElement(self.field, self.field.invert(self))

    def __truediv__(self, other: "Scalar | NumberFieldElement") -> "NumberFieldElement":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise NumberFieldException("Division by zero")
            return self * (1 / Fraction(other))
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other: "Scalar | NumberFieldElement") -> "NumberFieldElement":
        return self._coerce(other) * self.inverse()

    def __pow__(self, exponent: int) -> "NumberFieldElement":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = self.field.one()
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __lt__(self, other: "Scalar | NumberFieldElement") -> bool:
        return nf_cmp(self, self._coerce(other)) is Ordering.LT

    def __le__(self, other: "Scalar | NumberFieldElement") -> bool:
        return nf_cmp(self, self._coerce(other)) is not Ordering.GT

    def __gt__(self, other: "Scalar | NumberFieldElement") -> bool:
        return nf_cmp(self, self._coerce(other)) is Ordering.GT

    def __ge__(self, other: "Scalar | NumberFieldElement") -> bool:
        return nf_cmp(self, self._coerce(other)) is not Ordering.LT

    def to_text(self, var: str = "a") -> str:
        """Render as ``c0 + c1*a + c2*a^2`` with exact rationals."""
        terms: list[str] = []
        for power, c in enumerate(self.coeffs):
            if c == 0:
                continue
            magnitude = abs(c)
            if power == 0:
                body = format_rational(magnitude)
            else:
                monomial = var if power == 1 else f"{var}^{power}"
                body = monomial if magnitude == 1 else f"{format_rational(magnitude)}*{monomial}"
            if not terms:
                terms.append(f"-{body}" if c < 0 else body)
            else:
                terms.append(f"- {body}" if c < 0 else f"+ {body}")
        return " ".join(terms) if terms else "0"

    def to_json(self) -> list[str]:
        return [format_rational(c) for c in self.coeffs]

    def __repr__(self) -> str:
        return f"<{self.to_text()} in {self.field!r}>"


def check_same_field(a: NumberFieldElement, b: NumberFieldElement) -> None:
    """Raise unless both elements live in the same field."""
    if a.field is not b.field and a.field != b.field:
        raise FieldMismatchException(
            "Operands belong to different fields", f"{a.field} vs {b.field}"
        )


def nf_add(a: NumberFieldElement, b: NumberFieldElement) -> NumberFieldElement:
    """Add two elements of the same field.

    Args:
        a: First summand
        b: Second summand

    Returns:
        Canonical coefficient vector of a + b

    Raises:
        FieldMismatchException: If the operands live in different fields
    """
    check_same_field(a, b)
    return a + b


def nf_mul(a: NumberFieldElement, b: NumberFieldElement) -> NumberFieldElement:
    """Multiply two elements and reduce modulo the minimal polynomial.

    Args:
        a: First factor
        b: Second factor

    Returns:
        Canonical coefficient vector of a * b

    Raises:
        FieldMismatchException: If the operands live in different fields
    """
    check_same_field(a, b)
    return a * b


def nf_inv(a: NumberFieldElement) -> NumberFieldElement:
    """Invert a nonzero element with the extended Euclidean algorithm.

    Args:
        a: Element to invert

    Returns:
        The element b with a * b = 1

    Raises:
        NumberFieldException: If a is zero or a zero divisor
    """
    return a.inverse()


def nf_sign(a: NumberFieldElement) -> int:
    """Sign of the real embedding of ``a``.

    Zero is detected exactly from the canonical form; a nonzero value is
    separated from zero by bisecting the root interval.

    Args:
        a: Element whose sign is decided

    Returns:
        -1, 0 or 1

    Raises:
        RefinementException: If the bisection budget runs out
    """
    if a.is_zero:
        return 0
    if a.is_rational:
        return 1 if a.coeffs[0] > 0 else -1
    field = a.field
    for bisections in range(MAX_BISECTIONS + 1):
        lo, hi = field.enclose(a)
        if lo > 0 or hi < 0:
            if bisections:
                logger.debug("Sign of %s decided after %d bisections", a.to_text(), bisections)
            return 1 if lo > 0 else -1
        field.bisect()
    raise RefinementException("Sign not decided within bisection budget", a.to_text())


def nf_cmp(a: NumberFieldElement, b: NumberFieldElement) -> Ordering:
    """Compare the real values of two elements.

    Args:
        a: Left operand
        b: Right operand

    Returns:
        Ordering of a against b; EQ exactly when the coefficient vectors agree

    Raises:
        FieldMismatchException: If the operands live in different fields
    """
    check_same_field(a, b)
    if a.coeffs == b.coeffs:
        return Ordering.EQ
    return Ordering(nf_sign(a - b))


def nf_interval(a: NumberFieldElement, width: Fraction) -> tuple[Fraction, Fraction]:
    """Certified enclosure of ``a`` no wider than ``width``.

    Args:
        a: Element to enclose
        width: Largest accepted hi - lo

    Returns:
        Rational (lo, hi) with lo <= a <= hi

    Raises:
        RefinementException: If the bisection budget runs out
    """
    field = a.field
    for _ in range(MAX_BISECTIONS + 1):
        lo, hi = field.enclose(a)
        if hi - lo <= width:
            return lo, hi
        field.bisect()
    raise RefinementException("Enclosure not reached within bisection budget", a.to_text())


def nf_floor(a: NumberFieldElement) -> int:
    """Greatest integer m with a - m >= 0.

    Args:
        a: Element to round down

    Returns:
        floor(a) as an int
    """
    if a.is_rational:
        return math.floor(a.coeffs[0])
    lo, hi = nf_interval(a, Fraction(1, 2))
    if math.floor(lo) == math.floor(hi):
        return math.floor(lo)
    candidate = math.floor(hi)
    return candidate if nf_sign(a - candidate) >= 0 else candidate - 1
