"""Subtractive (SSA) and multiplicative (MSA) Selmer maps on B^n.

Both maps act on the homogeneous vector b = (1, x_1, ..., x_n): the SSA subtracts
the smallest entry from the largest and re-sorts, the MSA subtracts the largest
integer multiple k of the smallest entry and rotates. Projecting back by the
largest entry gives the step map on B^n.
"""

import logging

from selmer_expansions.core.data_types import (
    TERMINATED,
    Algorithm,
    Digit,
    OrbitTrace,
    Outcome,
    PointB,
    StepOutcome,
    in_b,
)
from selmer_expansions.core.numfield import NumberFieldElement, nf_floor
from selmer_expansions.exceptions import DomainException

logger = logging.getLogger(__name__)


def lift(x: PointB) -> tuple[NumberFieldElement, ...]:
    """Homogeneous representative (1, x_1, ..., x_n)."""
    return x.lift()


def project(b: "tuple[NumberFieldElement, ...] | list[NumberFieldElement]") -> PointB:
    """Projection p(b_0, ..., b_n) = (b_1/b_0, ..., b_n/b_0)."""
    if b[0].is_zero:
        raise DomainException("Cannot project a vector with b_0 = 0")
    inverse = b[0].inverse()
    return PointB(tuple(c * inverse for c in b[1:]))


def ssa_homogeneous(b: tuple[NumberFieldElement, ...]) -> tuple[NumberFieldElement, ...]:
    """pi sigma b: replace b_0 by b_0 - b_n and re-sort decreasingly."""
    difference = b[0] - b[-1]
    rest = list(b[1:])
    index = 0
    while index < len(rest) and rest[index] > difference:
        index += 1
    return tuple(rest[:index] + [difference] + rest[index:])


def msa_homogeneous(b: tuple[NumberFieldElement, ...]) -> tuple[NumberFieldElement, ...]:
    """pi delta b: replace b_0 by b_0 - k b_n with k = [b_0 / b_n] and rotate."""
    if b[-1].is_zero:
        raise DomainException("MSA needs b_n > 0")
    k = nf_floor(b[0] / b[-1])
    return tuple(b[1:]) + (b[0] - b[-1] * k,)


def ssa_digit(x: PointB) -> Digit:
    """Insertion index j of 1 - x_n among x_1 >= ... >= x_n.

    Ties insert at the smallest valid index, so j counts the coordinates
    strictly greater than 1 - x_n.
    """
    difference = 1 - x.coords[-1]
    j = 0
    while j < x.dim and x.coords[j] > difference:
        j += 1
    return Digit(Algorithm.SSA, j)


def ssa_step(x: PointB) -> StepOutcome:
    """One SSA step y = Tx together with its digit.

    Args:
        x: Point of B^n

    Returns:
        StepOutcome with Tx, or TERMINATED when x_1 = 0 after subtraction
    """
    digit = ssa_digit(x)
    j = digit.value
    coords = x.coords
    difference = 1 - coords[-1]

    if j == 0:
        inverse = difference.inverse()
        return StepOutcome(PointB(tuple(c * inverse for c in coords)), digit)

    if coords[0].is_zero:
        return StepOutcome(TERMINATED, digit)
    inverse = coords[0].inverse()
    reordered = list(coords[1:j]) + [difference] + list(coords[j:])
    return StepOutcome(PointB(tuple(c * inverse for c in reordered)), digit)


def ssa_inverse_branch(y: PointB, digit: "Digit | int") -> PointB:
    """Inverse branch V(j): the unique x in B(j) with Tx = y.

    Raises:
        DomainException: If the branch divisor vanishes or y is not in T B(j)
    """
    j = digit.value if isinstance(digit, Digit) else digit
    n = y.dim
    if not 0 <= j <= n:
        raise DomainException(f"SSA digit must lie in 0..{n}", str(j))
    lifted = y.lift()

    if j == 0:
        scale = (1 + lifted[n]).inverse()
        coords = [lifted[k] * scale for k in range(1, n + 1)]
    else:
        partner = lifted[n - 1] if j == n else lifted[j]
        divisor = partner + lifted[n]
        if divisor.is_zero:
            raise DomainException("Inverse branch divisor vanishes", f"j={j}")
        scale = divisor.inverse()
        coords = [scale]
        for k in range(2, n + 1):
            source = lifted[k - 1] if k <= j else lifted[k]
            coords.append(source * scale)

    if not in_b(coords):
        raise DomainException(f"Point is not in T B({j})", y.to_text())
    x = PointB(tuple(coords))
    if ssa_digit(x).value != j:
        raise DomainException(f"Preimage lies outside B({j})", x.to_text())
    return x


def in_absorbing_set(x: PointB) -> bool:
    """Membership in D = {x in B^n : x_(n-1) + x_n >= 1}."""
    if x.dim < 2:
        raise DomainException("Absorbing set needs n >= 2", str(x.dim))
    return x.coords[-2] + x.coords[-1] >= 1


def msa_digit(x: PointB) -> "Digit | Outcome":
    """Digit k with 1/(k+1) < x_n <= 1/k, or TERMINATED when x_n = 0."""
    smallest = x.coords[-1]
    if smallest.is_zero:
        return TERMINATED
    return Digit(Algorithm.MSA, nf_floor(smallest.inverse()))


def msa_branch(x: PointB, digit: "Digit | int") -> PointB:
    """Branch map S_k(x) = (x_2/x_1, ..., x_n/x_1, (1 - k x_n)/x_1) for a given k.

    The digit is taken as given, so the branch can be evaluated on the closure
    of its cell (the cylinder vertices).
    """
    k = digit.value if isinstance(digit, Digit) else digit
    if x.coords[0].is_zero:
        raise DomainException("MSA branch needs x_1 > 0")
    inverse = x.coords[0].inverse()
    coords = [c * inverse for c in x.coords[1:]]
    coords.append((1 - x.coords[-1] * k) * inverse)
    return PointB(tuple(coords))


def msa_step(x: PointB) -> StepOutcome:
    """One MSA step y = Sx together with its digit.

    Args:
        x: Point of B^n

    Returns:
        StepOutcome with Sx, or TERMINATED without a digit when x_n = 0
    """
    digit = msa_digit(x)
    if digit is TERMINATED:
        return StepOutcome(TERMINATED, None)
    return StepOutcome(msa_branch(x, digit), digit)  # type: ignore[arg-type]


def msa_inverse_branch(y: PointB, digit: "Digit | int") -> PointB:
    """Inverse branch: x_1 = 1/(k y_(n-1) + y_n), x_i = y_(i-1) x_1.

    Raises:
        DomainException: If the divisor vanishes, the result leaves B^n, or the
            result does not lie in the cell B(k)
    """
    k = digit.value if isinstance(digit, Digit) else digit
    if k < 1:
        raise DomainException("MSA digit must be >= 1", str(k))
    lifted = y.lift()
    n = y.dim
    divisor = lifted[n - 1] * k + lifted[n]
    if divisor.is_zero:
        raise DomainException("Inverse branch divisor vanishes", f"k={k}")
    scale = divisor.inverse()
    coords = [scale] + [c * scale for c in y.coords[:-1]]
    if not in_b(coords):
        raise DomainException(f"Point is not in S B({k})", y.to_text())
    x = PointB(tuple(coords))
    actual = msa_digit(x)
    if actual is TERMINATED or actual.value != k:  # type: ignore[union-attr]
        raise DomainException(f"Preimage lies outside B({k})", x.to_text())
    return x


def step(x: PointB, algo: Algorithm) -> StepOutcome:
    """Dispatch one step of the chosen algorithm."""
    if algo is Algorithm.SSA:
        return ssa_step(x)
    return msa_step(x)


def inverse_branch(y: PointB, digit: Digit) -> PointB:
    if digit.algo is Algorithm.SSA:
        return ssa_inverse_branch(y, digit)
    return msa_inverse_branch(y, digit)


def restrict_point(x: PointB) -> PointB:
    """Drop trailing zero coordinates, moving from B^n to B^(n-m)."""
    coords = list(x.coords)
    while coords and coords[-1].is_zero:
        coords.pop()
    if not coords:
        raise DomainException("Cannot restrict the zero point")
    return PointB(tuple(coords))


def iterate_orbit(
    x: PointB, algo: Algorithm, steps: int, restrict: bool = False
) -> OrbitTrace:
    """Run ``steps`` steps of an expansion.

    With ``restrict`` an MSA orbit that reaches x_n = 0 continues in the lower
    dimension; the state index of every restriction is recorded and carries no digit.

    Args:
        x: Starting point
        algo: SSA or MSA
        steps: Number of digits to produce
        restrict: Continue in B^(n-m) when the MSA reaches x_n = 0

    Returns:
        OrbitTrace with states, digits and restriction indices

    Raises:
        DomainException: If ``steps`` is negative
    """
    if steps < 0:
        raise DomainException("Step count must be >= 0", str(steps))
    trace = OrbitTrace(algo=algo, start=x, states=[x])
    current = x
    taken = 0
    while taken < steps:
        outcome = step(current, algo)
        if outcome.terminated:
            if restrict and current.dim > 1 and not all(c.is_zero for c in current.coords):
                current = restrict_point(current)
                trace.states.append(current)
                trace.restrictions.append(len(trace.states) - 1)
                logger.info("Restricted expansion to dimension %d", current.dim)
                continue
            trace.terminated = True
            logger.info("Expansion terminated after %d steps", taken)
            break
        current = outcome.next  # type: ignore[assignment]
        trace.states.append(current)
        trace.digits.append(outcome.digit)  # type: ignore[arg-type]
        taken += 1
    return trace


def cylinder_digits(x: PointB, algo: Algorithm, rank: int) -> list[Digit]:
    """Label of the rank-``rank`` cylinder holding x (shorter if the orbit stops)."""
    return iterate_orbit(x, algo, rank).digits
