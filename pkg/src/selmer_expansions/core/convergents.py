"""Convergent matrices of the MSA.

The inverse branch of digit k is the projective map of the integer matrix
beta(k). Products beta(k_1)...beta(k_s) carry the convergent columns, stored in
the cyclic layout (B^(s-n+1), ..., B^(s), B^(s-n)).
"""

from collections.abc import Iterator
from dataclasses import dataclass
from fractions import Fraction

from sympy import Matrix

from selmer_expansions.core.data_types import Digit, PointB
from selmer_expansions.core.selmer_maps import project
from selmer_expansions.exceptions import DomainException


@dataclass(frozen=True)
class IntMatrix:
    """Square matrix of arbitrary-precision integers, stored by rows."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(int(v) for v in row) for row in self.rows)
        if len(rows) < 2 or any(len(row) != len(rows) for row in rows):
            raise DomainException("Matrix must be square of order >= 2")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def identity(cls, order: int) -> "IntMatrix":
        """Identity matrix.

        Args:
            order: Number of rows and columns

        Returns:
            The identity of that order
        """
        return cls(tuple(tuple(int(i == j) for j in range(order)) for i in range(order)))

    @classmethod
    def from_columns(cls, columns: "list[tuple[int, ...]]") -> "IntMatrix":
        """Build a matrix from its columns.

        Args:
            columns: Column vectors, left to right

        Returns:
            Matrix whose column j is columns[j]
        """
        return cls(tuple(zip(*columns)))

    @property
    def order(self) -> int:
        return len(self.rows)

    def column(self, index: int) -> tuple[int, ...]:
        """Column at position ``index``, top to bottom."""
        return tuple(row[index] for row in self.rows)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.order)]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        """Exact matrix product.

        Raises:
            DomainException: If the orders differ
        """
        if self.order != other.order:
            raise DomainException("Matrix orders differ", f"{self.order} vs {other.order}")
        other_columns = other.columns()
        return IntMatrix(
            tuple(
                tuple(sum(a * b for a, b in zip(row, col)) for col in other_columns)
                for row in self.rows
            )
        )

    def __pow__(self, exponent: int) -> "IntMatrix":
        result = IntMatrix.identity(self.order)
        base = self
        while exponent:
            if exponent & 1:
                result = result @ base
            base = base @ base
            exponent >>= 1
        return result

    def to_sympy(self) -> Matrix:
        return Matrix([list(row) for row in self.rows])

    def det(self) -> int:
        """Exact determinant.

        Returns:
            det(M) by fraction-free Bareiss elimination
        """
        return int(self.to_sympy().det(method="bareiss"))

    def trace(self) -> int:
        return sum(self.rows[i][i] for i in range(self.order))

    @property
    def is_positive(self) -> bool:
        return all(v > 0 for row in self.rows for v in row)

    @property
    def is_nonnegative(self) -> bool:
        return all(v >= 0 for row in self.rows for v in row)

    def to_json(self) -> list[list[str]]:
        """Rows as decimal strings, safe for integers of any size."""
        return [[str(v) for v in row] for row in self.rows]

    def to_text(self) -> str:
        """Right-aligned columns, one row per line."""
        width = max(len(str(v)) for row in self.rows for v in row)
        return "\n".join(" ".join(str(v).rjust(width) for v in row) for row in self.rows)


def beta_matrix(k: int, n: int) -> IntMatrix:
    """beta(k): row 0 is (0, ..., 0, k, 1), rows 1..n carry the shifted identity.

    Args:
        k: MSA digit, k >= 1
        n: Dimension of B^n; the matrix has order n + 1

    Returns:
        The branch matrix with det = (-1)^n

    Raises:
        DomainException: If k < 1 or n < 1
    """
    if k < 1 or n < 1:
        raise DomainException("beta(k) needs k >= 1 and n >= 1", f"k={k}, n={n}")
    rows = [[0] * (n + 1) for _ in range(n + 1)]
    rows[0][n - 1] = k
    rows[0][n] = 1
    for i in range(1, n + 1):
        rows[i][i - 1] = 1
    return IntMatrix(tuple(tuple(row) for row in rows))


def _digit_values(digits: "list[Digit] | list[int] | tuple[int, ...]") -> tuple[int, ...]:
    return tuple(d.value if isinstance(d, Digit) else int(d) for d in digits)


@dataclass(frozen=True)
class ConvergentState:
    """beta(k_1)...beta(k_s) with its digit history and column labels.

    ``column_labels[c]`` is the superscript of the column at position c:
    (s-n+1, ..., s, s-n). For small s the labels go negative; those columns are
    the columns of the identity.
    """

    n: int
    digits: tuple[int, ...]
    matrix: IntMatrix

    @property
    def s(self) -> int:
        return len(self.digits)

    @property
    def column_labels(self) -> tuple[int, ...]:
        s, n = self.s, self.n
        return tuple(range(s - n + 1, s + 1)) + (s - n,)

    def labelled_column(self, label: int) -> tuple[int, ...]:
        """Column B^(label); label must lie in s-n..s."""
        labels = self.column_labels
        if label not in labels:
            raise DomainException(f"Label {label} not held at s={self.s}", str(labels))
        return self.matrix.column(labels.index(label))


def initial_state(n: int) -> ConvergentState:
    """beta^(0), the identity."""
    return ConvergentState(n=n, digits=(), matrix=IntMatrix.identity(n + 1))


def beta_product(digits: "list[Digit] | list[int] | tuple[int, ...]", n: int) -> ConvergentState:
    """Exact product beta(k_1)...beta(k_s) by full matrix multiplication.

    Args:
        digits: MSA digits k_1, ..., k_s
        n: Dimension of B^n

    Returns:
        ConvergentState holding the product and the digits
    """
    values = _digit_values(digits)
    matrix = IntMatrix.identity(n + 1)
    for k in values:
        matrix = matrix @ beta_matrix(k, n)
    return ConvergentState(n=n, digits=values, matrix=matrix)


def recursion_extend(state: ConvergentState, k_next: "Digit | int") -> ConvergentState:
    """Append one digit using B^(s+1) = k B^(s-n+1) + B^(s-n) only.

    Args:
        state: Convergent state at step s
        k_next: Digit k_(s+1)

    Returns:
        State at step s + 1 with the columns shifted cyclically

    Raises:
        DomainException: If the digit is below 1
    """
    k = k_next.value if isinstance(k_next, Digit) else int(k_next)
    if k < 1:
        raise DomainException("MSA digit must be >= 1", str(k))
    n = state.n
    columns = state.matrix.columns()
    newest = tuple(k * a + b for a, b in zip(columns[0], columns[n]))
    shifted = columns[1:n] + [newest, columns[0]]
    return ConvergentState(
        n=n, digits=state.digits + (k,), matrix=IntMatrix.from_columns(shifted)
    )


def convergent_states(
    digits: "list[Digit] | list[int] | tuple[int, ...]", n: int
) -> Iterator[ConvergentState]:
    """Yield beta^(0), beta^(1), ... along ``digits``."""
    state = initial_state(n)
    yield state
    for k in _digit_values(digits):
        state = recursion_extend(state, k)
        yield state


def reconstruct_point(state: ConvergentState, y: PointB) -> PointB:
    """The point x with S^s x = y: the projection of beta^(s) (1, y_1, ..., y_n).

    Args:
        state: Convergent state after s digits
        y: The iterate S^s x

    Returns:
        The reconstructed starting point

    Raises:
        DomainException: If the dimensions differ or the first entry vanishes
    """
    if y.dim != state.n:
        raise DomainException("Dimension mismatch", f"{y.dim} vs {state.n}")
    lifted = y.lift()
    zero = y.field.zero()
    vector = [sum((v * entry for v, entry in zip(lifted, row)), zero) for row in state.matrix.rows]
    if vector[0].is_zero:
        raise DomainException("Reconstruction denominator vanishes")
    return project(vector)


def convergent_point(state: ConvergentState, column: int = 0) -> tuple[Fraction, ...]:
    """Ratios (B_1/B_0, ..., B_n/B_0) of the matrix column at position ``column``."""
    if state.s == 0:
        raise DomainException("The identity state has no convergent column")
    if not 0 <= column <= state.n:
        raise DomainException(f"Column must lie in 0..{state.n}", str(column))
    entries = state.matrix.column(column)
    if entries[0] == 0:
        raise DomainException("Column has B_0 = 0", f"s={state.s}, column={column}")
    return tuple(Fraction(v, entries[0]) for v in entries[1:])
