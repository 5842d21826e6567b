"""Periodicity detection and spectral analysis of periodic MSA expansions.

A periodic expansion T^(m+p) x = T^m x is found by exact state hashing. For the
MSA the cycle product M = beta(k_1)...beta(k_p) is analysed: its characteristic
polynomial, the certified dominant eigenvalue rho_0 and the eigenvector
(1, x_1, ..., x_n) solved exactly over Q(rho_0).
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

from sympy import Rational, Symbol, integer_nthroot

from selmer_expansions.core.convergents import (
    ConvergentState,
    IntMatrix,
    beta_product,
    convergent_states,
)
from selmer_expansions.core.data_types import (
    NOT_FOUND,
    TERMINATED,
    Algorithm,
    ApproximationReport,
    ApproximationRow,
    ConvergenceReport,
    ConvergenceRow,
    Digit,
    Outcome,
    PeriodReport,
    PointB,
)
from selmer_expansions.core.numfield import (
    IsolatingInterval,
    NumberField,
    NumberFieldElement,
    Polynomial,
    nf_interval,
)
from selmer_expansions.core.selmer_maps import iterate_orbit, step
from selmer_expansions.exceptions import (
    DomainException,
    NumberFieldException,
    SpectralException,
)

logger = logging.getLogger(__name__)

DEFAULT_MAX_STEPS = 10_000
DEFAULT_PRECISION = Fraction(1, 10**30)

# Refinement rounds when certifying rho_0 > |rho_j|
DOMINANCE_ROUNDS = 12

_T = Symbol("t")

# Complex root rectangle (re_lo, im_lo, re_hi, im_hi)
Box = tuple[Fraction, Fraction, Fraction, Fraction]


@dataclass(frozen=True)
class DominantEigenvalue:
    """rho_0 as the generator of Q(rho_0), plus the modulus of the next root."""

    rho0: NumberFieldElement
    interval: IsolatingInterval
    factor: Polynomial
    rho1_modulus: tuple[Fraction, Fraction]


def detect_period(
    x: PointB, algo: Algorithm, max_steps: int = DEFAULT_MAX_STEPS
) -> "PeriodReport | Outcome":
    """Scan the orbit of x for the first exact repeat T^(m+p) x = T^m x.

    Args:
        x: Starting point
        algo: SSA or MSA; MSA reports also get the spectral analysis
        max_steps: Steps scanned before giving up

    Returns:
        PeriodReport with minimal (m, p), TERMINATED when the orbit stops,
        or NOT_FOUND when ``max_steps`` steps pass without a repeat
    """
    seen: dict[PointB, int] = {x: 0}
    digits: list[Digit] = []
    current = x
    for index in range(1, max_steps + 1):
        outcome = step(current, algo)
        if outcome.terminated:
            logger.info("Orbit terminated after %d steps", index - 1)
            return TERMINATED
        current = outcome.next  # type: ignore[assignment]
        digits.append(outcome.digit)  # type: ignore[arg-type]
        if current in seen:
            m = seen[current]
            p = index - m
            logger.info("Period found: preperiod %d, period %d", m, p)
            report = PeriodReport(
                algo=algo,
                preperiod=m,
                period=p,
                cycle_digits=digits[m:],
                preperiod_digits=digits[:m],
            )
            if algo is Algorithm.MSA:
                analyze_cycle(report, x.dim)
            return report
        seen[current] = index
    logger.warning(
        "No period within %d steps; the point may be aperiodic or need a larger budget",
        max_steps,
    )
    return NOT_FOUND


def analyze_cycle(report: PeriodReport, n: int) -> PeriodReport:
    """Fill the spectral fields of an MSA report; failures become diagnostics."""
    matrix = periodicity_matrix(report.cycle_digits, n)
    report.matrix = matrix
    report.charpoly = char_poly(matrix)
    try:
        report.positivity_exponent = positive_power_exponent(matrix)
    except SpectralException as e:
        report.diagnostics.append(str(e))
    try:
        dominant = dominant_eigenvalue(report.charpoly)
        report.rho0 = dominant.rho0
        report.rho0_interval = dominant.interval
        report.eigen_point = eigen_point(matrix, dominant)
        if not expansion_matches_cycle(report.eigen_point, report.cycle_digits):
            report.diagnostics.append("Eigen point does not reproduce the cycle digits")
    except SpectralException as e:
        report.diagnostics.append(str(e))
    return report


def periodicity_matrix(digits: Sequence["Digit | int"], n: int) -> IntMatrix:
    """M = beta(k_1)...beta(k_p) over one period."""
    return beta_product(list(digits), n).matrix  # type: ignore[arg-type]


def char_poly(matrix: IntMatrix) -> Polynomial:
    """det(tI - M), monic with integer coefficients."""
    return Polynomial.from_sympy(matrix.to_sympy().charpoly(_T))


def power_sums(charpoly: Polynomial, k_max: int) -> list[Fraction]:
    """Power sums p_1..p_k_max of the roots (with multiplicity) by Newton's identities."""
    m = charpoly.degree
    monic = charpoly.monic()
    # a[i] is the coefficient of t^(m - i)
    a = [monic.coeffs[m - i] for i in range(m + 1)]
    sums: list[Fraction] = []
    for k in range(1, k_max + 1):
        total = -sum((a[i] * sums[k - i - 1] for i in range(1, min(k - 1, m) + 1)), Fraction(0))
        if k <= m:
            total -= k * a[k]
        sums.append(total)
    return sums


def recurrence_violations(
    cycle_digits: Sequence["Digit | int"], n: int, k_max: int
) -> list[tuple[int, int]]:
    """(k, j) pairs where the Cayley-Hamilton recurrence on B^(kp+j) fails.

    The recurrence sum_i c_i B^((k+i)p+j) = 0 uses the coefficients c_i of chi_M.
    """
    cycle = [d.value if isinstance(d, Digit) else int(d) for d in cycle_digits]
    p = len(cycle)
    coeffs = char_poly(periodicity_matrix(cycle, n)).coeffs
    order = len(coeffs) - 1
    total = (k_max + order + 1) * p
    digits = (cycle * (total // p + 1))[:total]
    main = [state.labelled_column(state.s) for state in convergent_states(digits, n)]
    failures: list[tuple[int, int]] = []
    for k in range(k_max + 1):
        for j in range(p):
            combination = [
                sum(coeffs[i] * main[(k + i) * p + j][row] for i in range(order + 1))
                for row in range(n + 1)
            ]
            if any(v != 0 for v in combination):
                failures.append((k, j))
    return failures


def positive_power_exponent(matrix: IntMatrix) -> int:
    """Smallest e with M^e entrywise positive, searched up to 2(n^2 + 1).

    Raises:
        SpectralException: If M has a zero row or column or is not primitive
            within the search bound
    """
    n = matrix.order - 1
    if any(all(v == 0 for v in row) for row in matrix.rows) or any(
        all(v == 0 for v in column) for column in matrix.columns()
    ):
        raise SpectralException("Matrix has a zero row or column")
    if not matrix.is_nonnegative:
        raise SpectralException("Matrix has negative entries")
    limit = 2 * (n * n + 1)
    power = matrix
    for exponent in range(1, limit + 1):
        if power.is_positive:
            logger.debug("M^%d is positive", exponent)
            return exponent
        power = power @ matrix
    raise SpectralException(f"Matrix is not primitive within {limit} powers")


def _sqrt_bounds(square: Fraction, bits: int = 64) -> tuple[Fraction, Fraction]:
    scale = 1 << bits
    scaled = square * scale * scale
    floor_value = scaled.numerator // scaled.denominator
    root, exact = integer_nthroot(floor_value, 2)
    lo = Fraction(int(root), scale)
    if exact and floor_value * scaled.denominator == scaled.numerator:
        return lo, lo
    return lo, Fraction(int(root) + 1, scale)


def _nth_root_bounds(value: Fraction, degree: int, bits: int = 64) -> tuple[Fraction, Fraction]:
    scale = 1 << bits
    scaled = value * scale**degree
    floor_value = scaled.numerator // scaled.denominator
    root, _ = integer_nthroot(floor_value, degree)
    return Fraction(int(root), scale), Fraction(int(root) + 1, scale)


def _to_fraction(value: object) -> Fraction:
    rational = Rational(value)  # type: ignore[arg-type]
    return Fraction(int(rational.p), int(rational.q))


def _to_rational(value: Fraction) -> Rational:
    return Rational(value.numerator, value.denominator)


def _modulus_squares(
    real: list[tuple[Fraction, Fraction]],
    complex_: list[Box],
) -> list[tuple[Fraction, Fraction]]:
    """(min, max) squared modulus for every real interval and complex rectangle."""
    bounds: list[tuple[Fraction, Fraction]] = []
    for lo, hi in real:
        top = max(lo * lo, hi * hi)
        bottom = Fraction(0) if lo <= 0 <= hi else min(lo * lo, hi * hi)
        bounds.append((bottom, top))
    for u, v, s, t in complex_:
        top = max(x * x + y * y for x in (u, s) for y in (v, t))
        nearest_x = min(max(Fraction(0), u), s)
        nearest_y = min(max(Fraction(0), v), t)
        bounds.append((nearest_x * nearest_x + nearest_y * nearest_y, top))
    return bounds


def _isolate(
    poly: object, eps: Fraction
) -> tuple[list[tuple[Fraction, Fraction]], list[Box]]:
    """Isolating intervals and rectangles (re_lo, im_lo, re_hi, im_hi) of all roots.

    Complex rectangles come back as a pair of corners ``(u + v*I, s + t*I)``.
    """
    real_part, complex_part = poly.intervals(  # type: ignore[attr-defined]
        all=True, sqf=True, eps=Rational(eps.numerator, eps.denominator)
    )
    real = [(_to_fraction(s), _to_fraction(t)) for s, t in real_part]
    complex_: list[Box] = []
    for lower, upper in complex_part:
        u, v = lower.as_real_imag()
        s, t = upper.as_real_imag()
        complex_.append((_to_fraction(u), _to_fraction(v), _to_fraction(s), _to_fraction(t)))
    return real, complex_


def dominant_eigenvalue(charpoly: Polynomial) -> DominantEigenvalue:
    """Isolate rho_0, the largest real root, and certify rho_0 > 1 and rho_0 > |rho_j|.

    Real and complex roots are isolated exactly; rectangles are refined until
    the lower end of rho_0 clears every other root's modulus.

    Args:
        charpoly: Characteristic polynomial of a cycle matrix

    Returns:
        DominantEigenvalue with rho_0 as generator of Q(rho_0) and a certified
        bracket of |rho_1|

    Raises:
        SpectralException: If there is no real root, rho_0 is not simple,
            rho_0 <= 1, or dominance is not certified within the refinement budget
    """
    poly = charpoly.to_sympy(_T)
    multiplicities = poly.intervals()
    if not multiplicities:
        raise SpectralException("Characteristic polynomial has no real root")
    (top_lo, top_hi), multiplicity = max(multiplicities, key=lambda item: item[0][1])
    if _to_fraction(top_hi) <= 1:
        raise SpectralException("No eigenvalue exceeds 1", charpoly.to_text())
    if multiplicity != 1:
        raise SpectralException("Dominant eigenvalue is not simple", charpoly.to_text())

    squarefree = poly.sqf_part()
    eps = Fraction(1, 16)
    for attempt in range(DOMINANCE_ROUNDS):
        real, complex_ = _isolate(squarefree, eps)
        rho_lo, rho_hi = max(real, key=lambda interval: interval[1])
        others = [interval for interval in real if interval != (rho_lo, rho_hi)]
        bounds = _modulus_squares(others, complex_)
        highest = max((top for _, top in bounds), default=Fraction(0))
        if rho_lo > 1 and rho_lo * rho_lo > highest:
            logger.debug("Dominance certified after %d refinement rounds", attempt + 1)
            lowest = max((bottom for bottom, _ in bounds), default=Fraction(0))
            rho1 = (_sqrt_bounds(lowest)[0], _sqrt_bounds(highest)[1])
            return _build_dominant(poly, charpoly, (rho_lo, rho_hi), rho1)
        eps /= 16
    raise SpectralException(
        "Dominance of rho_0 not certified within refinement budget", charpoly.to_text()
    )


def _build_dominant(
    poly: object,
    charpoly: Polynomial,
    interval: tuple[Fraction, Fraction],
    rho1: tuple[Fraction, Fraction],
) -> DominantEigenvalue:
    lo, hi = interval
    _, factors = poly.factor_list()  # type: ignore[attr-defined]
    for factor, _ in factors:
        if factor.count_roots(_to_rational(lo), _to_rational(hi)):
            minimal = Polynomial.from_sympy(factor).monic()
            break
    else:  # pragma: no cover - rho_0 is a root of some factor
        raise SpectralException("No factor of the characteristic polynomial holds rho_0")

    if minimal.degree == 1:
        root = -minimal.coeffs[0]
        isolating = IsolatingInterval(root - 1, root + 1)
    else:
        isolating = IsolatingInterval(lo, hi)
    for _ in range(DOMINANCE_ROUNDS):
        try:
            field_ = NumberField(minimal, isolating)
            break
        except NumberFieldException:
            refined = minimal.to_sympy(_T).refine_root(
                _to_rational(lo),
                _to_rational(hi),
                eps=Rational(1, 2**20),
            )
            isolating = IsolatingInterval(_to_fraction(refined[0]), _to_fraction(refined[1]))
    else:
        raise SpectralException("Could not isolate rho_0 for its minimal polynomial")
    logger.info(
        "rho_0 is the root of %s in %s", minimal.to_text(), isolating.to_text()
    )
    return DominantEigenvalue(
        rho0=field_.generator(), interval=isolating, factor=minimal, rho1_modulus=rho1
    )


def eigen_point(matrix: IntMatrix, dominant: DominantEigenvalue) -> PointB:
    """Solve M (1, x_1, ..., x_n) = rho_0 (1, x_1, ..., x_n) exactly over Q(rho_0).

    Args:
        matrix: Cycle matrix M
        dominant: Its dominant eigenvalue

    Returns:
        The point (x_1, ..., x_n) with coordinates in Q(rho_0)

    Raises:
        SpectralException: If rho_0 is not simple, the eigenvector has v_0 = 0,
            or the solution is not a point of B^n
    """
    rho = dominant.rho0
    field_ = rho.field
    size = matrix.order
    # Rows of [A | b] with A = (M - rho I) restricted to unknowns v_1..v_n, b = -column 0
    system: list[list[NumberFieldElement]] = []
    for i in range(size):
        row = [field_.element(matrix.rows[i][j]) - (rho if i == j else 0) for j in range(size)]
        system.append(row[1:] + [-row[0]])

    unknowns = size - 1
    pivot_row = 0
    pivots: list[int] = []
    for col in range(unknowns):
        pivot = next((r for r in range(pivot_row, size) if not system[r][col].is_zero), None)
        if pivot is None:
            raise SpectralException("Eigenvalue is not simple")
        system[pivot_row], system[pivot] = system[pivot], system[pivot_row]
        inverse = system[pivot_row][col].inverse()
        system[pivot_row] = [v * inverse for v in system[pivot_row]]
        for r in range(size):
            if r != pivot_row and not system[r][col].is_zero:
                factor = system[r][col]
                system[r] = [a - factor * b for a, b in zip(system[r], system[pivot_row])]
        pivots.append(pivot_row)
        pivot_row += 1

    for r in range(pivot_row, size):
        if not system[r][-1].is_zero:
            raise SpectralException("Eigenvector cannot be normalized with v_0 = 1")

    solution = [system[pivots[c]][-1] for c in range(unknowns)]
    vector = [field_.one()] + solution
    for i in range(size):
        residual = sum(
            (field_.element(matrix.rows[i][j]) * vector[j] for j in range(size)), field_.zero()
        )
        if not (residual - rho * vector[i]).is_zero:
            raise SpectralException("Eigen residual does not vanish", f"row {i}")
    try:
        return PointB(tuple(solution))
    except DomainException as e:
        raise SpectralException("Eigenvector is not a point of B^n", str(e)) from e


def expansion_matches_cycle(x: PointB, cycle_digits: Sequence[Digit]) -> bool:
    """Whether x is purely periodic with exactly these MSA digits."""
    trace = iterate_orbit(x, Algorithm.MSA, len(cycle_digits))
    return trace.digits == list(cycle_digits) and trace.states[-1] == x


def expansion_digits(report: PeriodReport, length: int) -> list[int]:
    """The first ``length`` digits of a periodic expansion."""
    digits = [d.value for d in report.preperiod_digits]
    cycle = [d.value for d in report.cycle_digits]
    while len(digits) < length:
        digits.extend(cycle)
    return digits[:length]


def _abs_bounds(lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    if lo >= 0:
        return lo, hi
    if hi <= 0:
        return -hi, -lo
    return Fraction(0), max(-lo, hi)


def _max_error(
    x: PointB, state: ConvergentState, column: tuple[int, ...], precision: Fraction
) -> tuple[Fraction, Fraction]:
    worst_lo = worst_hi = Fraction(0)
    for i, coordinate in enumerate(x.coords, start=1):
        difference = coordinate - Fraction(column[i], column[0])
        lo, hi = _abs_bounds(*nf_interval(difference, precision))
        worst_lo = max(worst_lo, lo)
        worst_hi = max(worst_hi, hi)
    return worst_lo, worst_hi


def convergence_report(
    x: PointB,
    digits: Sequence["Digit | int"],
    s_max: int,
    column: int = 0,
    precision: Fraction = DEFAULT_PRECISION,
) -> ConvergenceReport:
    """Certified errors max_i |B_i^(s)/B_0^(s) - x_i| for s = 1..s_max.

    ``column`` is the matrix column position g, 0 <= g <= n. Rows whose column
    still has B_0 = 0 are skipped.

    Args:
        x: Point whose expansion the digits follow
        digits: MSA digits of x
        s_max: Last s reported
        column: Matrix column position
        precision: Width of the certified enclosures

    Returns:
        ConvergenceReport with certified (lo, hi) errors per s

    Raises:
        DomainException: If the column is outside 0..n
    """
    n = x.dim
    if not 0 <= column <= n:
        raise DomainException(f"Column must lie in 0..{n}", str(column))
    report = ConvergenceReport(column=column)
    values = list(digits)[:s_max]
    for state in convergent_states(values, n):
        if state.s == 0:
            continue
        entries = state.matrix.column(column)
        if entries[0] == 0:
            continue
        lo, hi = _max_error(x, state, entries, precision)
        report.rows.append(ConvergenceRow(s=state.s, column=column, error_lo=lo, error_hi=hi))

    if len(report.rows) >= 2:
        middle = report.rows[len(report.rows) // 2]
        report.eventually_decreasing = report.rows[-1].error_hi < middle.error_lo
    if not report.eventually_decreasing and report.rows:
        logger.warning("Column %d shows no eventual decrease up to s=%d", column, s_max)
    return report


def error_ratio(
    report: ConvergenceReport, s_from: int, s_to: int
) -> tuple[Fraction, Fraction]:
    """Certified geometric rate (e(s_to) / e(s_from))^(1 / (s_to - s_from))."""
    by_s = {row.s: row for row in report.rows}
    if s_from not in by_s or s_to not in by_s or s_to <= s_from:
        raise DomainException("Ratio window not covered by the report", f"{s_from}..{s_to}")
    first, last = by_s[s_from], by_s[s_to]
    if first.error_lo == 0:
        raise DomainException("Error at the window start is not bounded away from 0")
    span = s_to - s_from
    lo = _nth_root_bounds(last.error_lo / first.error_hi, span)[0]
    hi = _nth_root_bounds(last.error_hi / first.error_lo, span)[1]
    report.ratio = (lo, hi)
    return lo, hi


def fit_band(
    values: Sequence[tuple[Fraction, Fraction]], fit_count: int = 10, margin: int = 2
) -> tuple[tuple[Fraction, Fraction], list[int]]:
    """Band [min/margin, max*margin] fitted on the first ``fit_count`` (lo, hi) pairs.

    Returns the band and the indices of later values that leave it.
    """
    fitted = values[:fit_count]
    low = min(lo for lo, _ in fitted) / margin
    high = max(hi for _, hi in fitted) * margin
    violations = [
        index
        for index, (lo, hi) in enumerate(values)
        if index >= fit_count and (hi > high or lo < low)
    ]
    return (low, high), violations


def approximation_report(
    x: PointB,
    cycle_digits: Sequence["Digit | int"],
    g_max: int,
    epsilon: Fraction = Fraction(0),
    rho1_modulus: tuple[Fraction, Fraction] | None = None,
    offsets: Sequence[int] = (0,),
    precision: Fraction = DEFAULT_PRECISION,
) -> ApproximationReport:
    """Certified e_i(g, j) = |B_0^(pg+j) x_i - B_i^(pg+j)| for a purely periodic x.

    The fitted constant c is the least value with e_i(g, j) <= c (|rho_1| (1 + eps))^g
    on the computed range; ``lower_evidence`` is the largest e_i(g, j) / |rho_1|^g.
    The band of max_i e_i(g, 0) is fitted on the first ten g.
    """
    cycle = [d.value if isinstance(d, Digit) else int(d) for d in cycle_digits]
    p = len(cycle)
    n = x.dim
    if any(not 0 <= j < p for j in offsets):
        raise DomainException(f"Offsets must lie in 0..{p - 1}", str(list(offsets)))
    if rho1_modulus is None:
        rho1_modulus = dominant_eigenvalue(char_poly(periodicity_matrix(cycle, n))).rho1_modulus
    rho1_lo, rho1_hi = rho1_modulus
    base = rho1_hi * (1 + epsilon)
    report = ApproximationReport(rho1_modulus=rho1_modulus, epsilon=epsilon)

    total = p * (g_max + 1)
    states = list(convergent_states((cycle * (g_max + 1))[:total], n))
    per_g: list[tuple[Fraction, Fraction]] = []
    for g in range(g_max + 1):
        for j in offsets:
            state = states[p * g + j]
            column = state.labelled_column(state.s)
            scale = base**g
            for i, coordinate in enumerate(x.coords, start=1):
                value = coordinate * column[0] - column[i]
                lo, hi = _abs_bounds(*nf_interval(value, precision))
                report.constant = max(report.constant, hi / scale)
                if rho1_lo > 0:
                    report.lower_evidence = max(report.lower_evidence, lo / rho1_lo**g)
                report.rows.append(
                    ApproximationRow(g=g, j=j, i=i, error_lo=lo, error_hi=hi, envelope=scale)
                )
        zero_offset = [row for row in report.rows if row.g == g and row.j == offsets[0]]
        per_g.append(
            (max(row.error_lo for row in zero_offset), max(row.error_hi for row in zero_offset))
        )

    report.rows = [
        ApproximationRow(
            g=row.g,
            j=row.j,
            i=row.i,
            error_lo=row.error_lo,
            error_hi=row.error_hi,
            envelope=report.constant * row.envelope,
        )
        for row in report.rows
    ]
    if len(per_g) > 10:
        report.band, report.band_violations = fit_band(per_g)
    return report


def trace_identity(matrix: IntMatrix, k_max: int = 5) -> list[tuple[int, int, Fraction]]:
    """(k, trace(M^k), p_k) where p_k is the k-th power sum of the eigenvalues."""
    sums = power_sums(char_poly(matrix), k_max)
    return [(k, (matrix**k).trace(), sums[k - 1]) for k in range(1, k_max + 1)]
