"""Tests for period detection and the spectral analysis of MSA cycles."""

from fractions import Fraction

import pytest

from selmer_expansions.core.convergents import IntMatrix, beta_matrix
from selmer_expansions.core.data_types import (
    NOT_FOUND,
    TERMINATED,
    Algorithm,
    Digit,
    PeriodReport,
    PointB,
)
from selmer_expansions.core.numfield import (
    NumberField,
    NumberFieldElement,
    Polynomial,
    nf_interval,
)
from selmer_expansions.core.periodic import (
    approximation_report,
    char_poly,
    convergence_report,
    detect_period,
    dominant_eigenvalue,
    eigen_point,
    error_ratio,
    expansion_digits,
    expansion_matches_cycle,
    fit_band,
    positive_power_exponent,
    power_sums,
    recurrence_violations,
    trace_identity,
)
from selmer_expansions.core.selmer_maps import iterate_orbit
from selmer_expansions.exceptions import DomainException, SpectralException

F = Fraction
GOLDEN_DIGITS = [2] * 44
INVERSE_GOLDEN_RATIO = F("0.6180339887")


def embed(value: NumberFieldElement, image: NumberFieldElement) -> NumberFieldElement:
    """Map sum c_i rho^i to sum c_i image^i."""
    return sum((image**i * c for i, c in enumerate(value.coeffs)), image.field.zero())


def assert_same_value(first: PointB, second: PointB) -> None:
    """Assert certified enclosures of the coordinates overlap."""
    width = F(1, 10**20)
    for a, b in zip(first.coords, second.coords):
        a_lo, a_hi = nf_interval(a, width)
        b_lo, b_hi = nf_interval(b, width)
        assert a_lo <= b_hi and b_lo <= a_hi


@pytest.fixture
def golden_report(golden_point: PointB) -> PeriodReport:
    """Return the period report of the MSA fixed point."""
    report = detect_period(golden_point, Algorithm.MSA, 10)
    assert isinstance(report, PeriodReport)
    return report


@pytest.fixture
def plastic_report(plastic_point: PointB) -> PeriodReport:
    """Return the period report of the digit-1 fixed point."""
    report = detect_period(plastic_point, Algorithm.MSA, 10)
    assert isinstance(report, PeriodReport)
    return report


class TestDetectPeriod:
    """Tests for exact period detection."""

    def test_ssa_cube_point(self, cube_point: PointB) -> None:
        """Test T^31x = T^1x is the first repeat."""
        report = detect_period(cube_point, Algorithm.SSA, 100)
        assert isinstance(report, PeriodReport)
        assert report.preperiod == 1
        assert report.period == 30
        assert len(report.cycle_digits) == 30
        assert report.preperiod_digits == [Digit(Algorithm.SSA, 0)]
        assert report.matrix is None

    def test_golden_fixed_point(self, golden_report: PeriodReport) -> None:
        """Test the fixed point has period 1 and digit 2."""
        assert golden_report.preperiod == 0
        assert golden_report.period == 1
        assert golden_report.cycle_digits == [Digit(Algorithm.MSA, 2)]
        assert golden_report.diagnostics == []

    def test_terminated(self, rational_point: PointB) -> None:
        """Test a rational point reports termination."""
        assert detect_period(rational_point, Algorithm.MSA, 10) is TERMINATED

    def test_not_found(self, cube_point: PointB) -> None:
        """Test the MSA orbit of the cube point shows no period within 40 steps."""
        assert detect_period(cube_point, Algorithm.MSA, 40) is NOT_FOUND

    def test_expansion_digits(self, golden_report: PeriodReport) -> None:
        """Test the periodic digit stream."""
        assert expansion_digits(golden_report, 4) == [2, 2, 2, 2]

    def test_first_repeat_is_minimal(self, cube_point: PointB) -> None:
        """Test no earlier pair of equal iterates exists than T^1x = T^31x."""
        states = iterate_orbit(cube_point, Algorithm.SSA, 31).states
        repeats = [(i, j) for j in range(len(states)) for i in range(j) if states[i] == states[j]]
        assert repeats == [(1, 31)]

    def test_shifted_point_rotates_cycle(self, cube_point: PointB) -> None:
        """Test T^2x is purely periodic with the cycle digits rotated by one."""
        base = detect_period(cube_point, Algorithm.SSA, 100)
        start = iterate_orbit(cube_point, Algorithm.SSA, 2).states[2]
        shifted = detect_period(start, Algorithm.SSA, 100)
        assert isinstance(base, PeriodReport)
        assert isinstance(shifted, PeriodReport)
        assert shifted.preperiod == 0
        assert shifted.period == 30
        assert shifted.cycle_digits == base.cycle_digits[1:] + base.cycle_digits[:1]


class TestSpectralData:
    """Tests for the cycle matrix and its dominant eigenvalue."""

    def test_charpoly(self, golden_report: PeriodReport) -> None:
        """Test chi_M(t) = t^3 - 2t - 1."""
        assert golden_report.matrix == beta_matrix(2, 2)
        assert golden_report.charpoly is not None
        assert golden_report.charpoly.coeffs == (F(-1), F(-2), F(0), F(1))

    def test_dominant_root_field(self, golden_report: PeriodReport) -> None:
        """Test rho_0 generates Q(rho_0) with minimal polynomial t^2 - t - 1."""
        rho = golden_report.rho0
        assert rho is not None
        assert rho.field.min_poly.coeffs == (F(-1), F(-1), F(1))
        lo, hi = nf_interval(rho, F(1, 10**7))
        assert F(1618033, 10**6) < lo <= hi < F(1618035, 10**6)

    def test_eigen_point(self, golden_report: PeriodReport) -> None:
        """Test the eigen point is (rho - 1, 2 - rho)."""
        rho = golden_report.rho0
        assert rho is not None
        assert golden_report.eigen_point == PointB((rho - 1, 2 - rho))
        assert expansion_matches_cycle(golden_report.eigen_point, golden_report.cycle_digits)

    def test_eigen_point_is_the_input(
        self, golden_report: PeriodReport, golden_point: PointB, sqrt5_field: NumberField
    ) -> None:
        """Test rho -> (1 + sqrt 5)/2 maps the eigen point onto the input point."""
        eigen = golden_report.eigen_point
        assert eigen is not None
        phi = (sqrt5_field.generator() + 1) / 2
        assert PointB(tuple(embed(c, phi) for c in eigen.coords)) == golden_point
        assert_same_value(eigen, golden_point)

    def test_positivity_exponent(self, golden_report: PeriodReport) -> None:
        """Test M^5 is the first positive power."""
        assert golden_report.positivity_exponent == 5

    def test_second_root_modulus(self) -> None:
        """Test the certified |rho_1| interval contains 1."""
        dominant = dominant_eigenvalue(char_poly(beta_matrix(2, 2)))
        lo, hi = dominant.rho1_modulus
        assert lo <= 1 <= hi

    def test_no_eigenvalue_above_one(self) -> None:
        """Test a polynomial without a root above 1 is rejected."""
        with pytest.raises(SpectralException):
            dominant_eigenvalue(Polynomial((F(-1, 2), F(1))))

    def test_eigen_point_in_cubic_field(self) -> None:
        """Test beta(3) gives a cubic eigen point with MSA digit 3."""
        matrix = beta_matrix(3, 2)
        dominant = dominant_eigenvalue(char_poly(matrix))
        assert dominant.factor.coeffs == (F(-1), F(-3), F(0), F(1))
        x = eigen_point(matrix, dominant)
        rho = dominant.rho0
        assert x == PointB((rho.inverse(), rho.inverse() ** 2))
        assert expansion_matches_cycle(x, [Digit(Algorithm.MSA, 3)])

    def test_inadmissible_cycle(self) -> None:
        """Test digits 1, 3 repeated have no eigen point in B^2."""
        matrix = beta_matrix(1, 2) @ beta_matrix(3, 2)
        with pytest.raises(SpectralException):
            eigen_point(matrix, dominant_eigenvalue(char_poly(matrix)))


class TestComplexRoots:
    """Tests for cycle matrices whose characteristic polynomial has non-real roots."""

    def test_digit_one_fixed_point(self, plastic_report: PeriodReport) -> None:
        """Test period (0, 1) and chi_M(t) = t^3 - t - 1."""
        assert plastic_report.preperiod == 0
        assert plastic_report.period == 1
        assert plastic_report.cycle_digits == [Digit(Algorithm.MSA, 1)]
        assert plastic_report.charpoly is not None
        assert plastic_report.charpoly.coeffs == (F(-1), F(-1), F(0), F(1))
        assert plastic_report.positivity_exponent == 5
        assert plastic_report.diagnostics == []

    def test_dominant_root_is_cubic(self, plastic_report: PeriodReport) -> None:
        """Test rho_0 has minimal polynomial t^3 - t - 1 and lies near 1.3247."""
        rho = plastic_report.rho0
        assert rho is not None
        assert rho.field.min_poly.coeffs == (F(-1), F(-1), F(0), F(1))
        lo, hi = nf_interval(rho, F(1, 10**7))
        assert F(13247, 10**4) < lo <= hi < F(13248, 10**4)

    def test_complex_pair_modulus(self) -> None:
        """Test the certified |rho_1| brackets 0.86884 and stays below rho_0."""
        lo, hi = dominant_eigenvalue(char_poly(beta_matrix(1, 2))).rho1_modulus
        assert lo <= F(8688, 10**4)
        assert F(8689, 10**4) <= hi < F(4, 3)

    def test_eigen_point_is_the_fixed_point(
        self, plastic_report: PeriodReport, plastic_point: PointB, plastic_field: NumberField
    ) -> None:
        """Test the eigen point is (1/rho, 1/rho^2)."""
        eigen = plastic_report.eigen_point
        assert eigen is not None
        image = plastic_field.generator()
        assert PointB(tuple(embed(c, image) for c in eigen.coords)) == plastic_point
        assert_same_value(eigen, plastic_point)

    def test_convergents_approach_eigen_point(self, plastic_report: PeriodReport) -> None:
        """Test the newest convergent column tends to the eigen point."""
        eigen = plastic_report.eigen_point
        assert eigen is not None
        report = convergence_report(eigen, [1] * 40, 40, column=1)
        by_s = {row.s: row for row in report.rows}
        assert by_s[40].error_hi < F(1, 10**4)
        assert by_s[40].error_hi < by_s[20].error_lo
        assert report.eventually_decreasing


class TestIdentities:
    """Tests for power sums, recurrences and positivity."""

    def test_power_sums(self) -> None:
        """Test Newton's identities for t^3 - 2t - 1."""
        charpoly = Polynomial((F(-1), F(-2), F(0), F(1)))
        assert power_sums(charpoly, 3) == [F(0), F(4), F(3)]

    def test_trace_identity(self) -> None:
        """Test trace(M^k) equals the k-th power sum."""
        for k, trace, power_sum in trace_identity(beta_matrix(2, 2), 6):
            assert trace == power_sum, k

    def test_recurrence_holds(self) -> None:
        """Test the Cayley-Hamilton recurrence on the convergent columns."""
        assert recurrence_violations([2], 2, 5) == []
        assert recurrence_violations([1, 3], 2, 4) == []

    def test_identity_not_primitive(self) -> None:
        """Test the identity has no positive power."""
        with pytest.raises(SpectralException):
            positive_power_exponent(IntMatrix.identity(3))

    def test_zero_row_rejected(self) -> None:
        """Test a zero row is rejected."""
        with pytest.raises(SpectralException):
            positive_power_exponent(IntMatrix(((0, 0), (1, 1))))


class TestConvergence:
    """Tests for certified convergence and approximation reports."""

    @pytest.mark.parametrize("column", [0, 1, 2])
    def test_every_column_converges(self, golden_point: PointB, column: int) -> None:
        """Test the error of each convergent column falls below 1e-8 by s = 44."""
        report = convergence_report(golden_point, GOLDEN_DIGITS, 44, column=column)
        by_s = {row.s: row for row in report.rows}
        assert by_s[44].error_hi <= F(1, 10**8)
        assert report.eventually_decreasing

    def test_newest_column_not_yet_converged_at_thirty(self, golden_point: PointB) -> None:
        """Test the error of B^(s) is still above 1e-8 at s = 30."""
        report = convergence_report(golden_point, GOLDEN_DIGITS, 30, column=1)
        assert report.rows[-1].s == 30
        assert report.rows[-1].error_lo > F(1, 10**8)

    def test_error_ratio_near_inverse_golden_ratio(self, golden_point: PointB) -> None:
        """Test the geometric rate over s = 20..40 lies within 0.05 of 1/phi."""
        report = convergence_report(golden_point, GOLDEN_DIGITS, 40, column=1)
        lo, hi = error_ratio(report, 20, 40)
        assert INVERSE_GOLDEN_RATIO - F(5, 100) <= lo <= hi <= INVERSE_GOLDEN_RATIO + F(5, 100)
        assert report.ratio == (lo, hi)

    def test_ratio_window_must_be_covered(self, golden_point: PointB) -> None:
        """Test an uncovered window raises."""
        report = convergence_report(golden_point, GOLDEN_DIGITS, 10, column=1)
        with pytest.raises(DomainException):
            error_ratio(report, 5, 20)

    def test_column_out_of_range(self, golden_point: PointB) -> None:
        """Test column 3 is rejected for n = 2."""
        with pytest.raises(DomainException):
            convergence_report(golden_point, GOLDEN_DIGITS, 10, column=3)

    def test_approximation_stays_in_band(self, golden_point: PointB) -> None:
        """Test max_i e_i(g) stays in the band fitted on the first ten g."""
        report = approximation_report(golden_point, [2], 30)
        assert report.band is not None
        assert report.band_violations == []
        assert max(row.error_hi for row in report.rows) < 2
        assert report.rho1_modulus[0] <= 1 <= report.rho1_modulus[1]
        assert all(row.error_hi <= row.envelope for row in report.rows)

    def test_approximation_offsets(self, golden_point: PointB) -> None:
        """Test offsets must lie inside the period."""
        with pytest.raises(DomainException):
            approximation_report(golden_point, [2], 5, offsets=(1,))

    def test_fit_band(self) -> None:
        """Test a late outlier is reported."""
        values = [(F(1), F(1))] * 10 + [(F(5), F(5))]
        band, violations = fit_band(values)
        assert band == (F(1, 2), F(2))
        assert violations == [10]


def test_rational_ssa_orbit_is_finite(rationals: NumberField) -> None:
    """Test a rational SSA orbit terminates or repeats within the budget."""
    x = PointB.of(rationals, [F(1, 2), F(1, 3)])
    result = detect_period(x, Algorithm.SSA, 200)
    assert result is TERMINATED or isinstance(result, PeriodReport)
