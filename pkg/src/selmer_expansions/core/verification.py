"""Invariant suites run by the ``verify`` command.

Each suite returns a SuiteResult listing every individual check. Random samples
come from a seeded ``random.Random`` so runs are reproducible.
"""

import logging
import random
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from selmer_expansions.core.convergents import (
    beta_matrix,
    beta_product,
    convergent_states,
    reconstruct_point,
)
from selmer_expansions.core.cylinders import image_nesting, msa_nonfull_witness
from selmer_expansions.core.data_types import Algorithm, PointB
from selmer_expansions.core.numfield import NumberField
from selmer_expansions.core.periodic import positive_power_exponent
from selmer_expansions.core.selmer_maps import (
    in_absorbing_set,
    inverse_branch,
    iterate_orbit,
    ssa_step,
    step,
)
from selmer_expansions.exceptions import SelmerException, VerificationException

logger = logging.getLogger(__name__)

_RATIONALS = NumberField.rationals()


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteResult:
    """Outcome of one suite; ``statistics`` are reported but never fail the suite."""

    suite: str
    checks: list[CheckResult] = field(default_factory=list)
    statistics: dict[str, str] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> list[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(CheckResult(name, passed, detail))

    def raise_on_failure(self) -> None:
        if not self.passed:
            first = self.failures[0]
            raise VerificationException(
                f"Suite {self.suite} failed", f"{first.name}: {first.detail}"
            )


def random_rational_point(rng: random.Random, n: int, max_denominator: int = 50) -> PointB:
    """Random point of B^n with coordinates p/q, q <= ``max_denominator``."""
    values = []
    for _ in range(n):
        q = rng.randint(1, max_denominator)
        values.append(Fraction(rng.randint(0, q), q))
    return PointB.of(_RATIONALS, sorted(values, reverse=True))


def random_absorbing_point(rng: random.Random, max_denominator: int = 50) -> PointB:
    """Random rational point of D = {x in B^2 : x_1 + x_2 >= 1}."""
    q = rng.randint(1, max_denominator)
    first = Fraction(rng.randint(q, 2 * q), 2 * q)
    low = 1 - first
    second = low + (first - low) * Fraction(rng.randint(0, q), q)
    return PointB.of(_RATIONALS, [first, second])


def verify_det(ns: Sequence[int], ks: Sequence[int]) -> SuiteResult:
    """det beta(k) = (-1)^n.

    Args:
        ns: Dimensions to check
        ks: Digits to check

    Returns:
        One check per (n, k) pair
    """
    result = SuiteResult("det")
    for n in ns:
        for k in ks:
            det = beta_matrix(k, n).det()
            result.add(f"n={n} k={k}", det == (-1) ** n, f"det={det}")
    return result


def verify_recursion(
    trials: int = 50,
    seed: int = 0,
    ns: Sequence[int] = (2, 3),
    max_length: int = 60,
    k_max: int = 9,
) -> SuiteResult:
    """The column recursion reproduces the full matrix product.

    Args:
        trials: Number of random digit strings
        seed: Seed of the digit sampler
        ns: Dimensions drawn from
        max_length: Longest digit string
        k_max: Largest digit

    Returns:
        One check per trial
    """
    rng = random.Random(seed)
    result = SuiteResult("recursion")
    for trial in range(trials):
        n = rng.choice(list(ns))
        digits = [rng.randint(1, k_max) for _ in range(rng.randint(0, max_length))]
        *_, last = convergent_states(digits, n)
        expected = beta_product(digits, n)
        result.add(
            f"trial {trial} n={n} s={len(digits)}",
            last.matrix == expected.matrix,
            " ".join(map(str, digits)),
        )
    return result


def verify_reconstruct(
    trials: int = 50, seed: int = 0, ns: Sequence[int] = (2, 3), steps: int = 30
) -> SuiteResult:
    """x is the projection of beta^(s) (1, S^s x) for every s along the expansion.

    Args:
        trials: Number of random rational points
        seed: Seed of the point sampler
        ns: Dimensions, cycled through by trial
        steps: MSA steps per point

    Returns:
        One check per (trial, s) with s >= 1
    """
    rng = random.Random(seed)
    result = SuiteResult("reconstruct")
    for trial in range(trials):
        x = random_rational_point(rng, ns[trial % len(ns)])
        trace = iterate_orbit(x, Algorithm.MSA, steps)
        for s, state in enumerate(convergent_states(trace.digits, x.dim)):
            if s == 0:
                continue
            try:
                recovered = reconstruct_point(state, trace.states[s])
                ok = recovered == x
                detail = "" if ok else recovered.to_text()
            except SelmerException as e:
                ok, detail = False, str(e)
            result.add(f"trial {trial} s={s}", ok, detail or x.to_text())
    return result


def verify_positivity(
    ns: Sequence[int], ks: Sequence[int] = (1, 2, 3), extra: int = 6
) -> SuiteResult:
    """beta(k)^p is positive for n^2 + 1 <= p <= n^2 + extra; minimal exponent <= n^2 + 1.

    Args:
        ns: Dimensions to check
        ks: Digits to check
        extra: Powers checked past n^2 + 1

    Returns:
        Checks per (n, k, p); minimal exponents go to the statistics
    """
    result = SuiteResult("positivity")
    for n in ns:
        for k in ks:
            matrix = beta_matrix(k, n)
            bound = n * n + 1
            try:
                exponent = positive_power_exponent(matrix)
            except SelmerException as e:
                result.add(f"n={n} k={k} exponent", False, str(e))
                continue
            result.add(f"n={n} k={k} exponent", exponent <= bound, f"e={exponent}")
            result.statistics[f"n={n} k={k}"] = f"minimal exponent {exponent}"
            for p in range(bound, n * n + extra + 1):
                result.add(f"n={n} k={k} p={p}", (matrix**p).is_positive)
    return result


def verify_roundtrip(
    trials: int = 50, seed: int = 0, ns: Sequence[int] = (2, 3)
) -> SuiteResult:
    """The inverse branch of the digit used undoes one step of either algorithm."""
    rng = random.Random(seed)
    result = SuiteResult("roundtrip")
    for trial in range(trials):
        x = random_rational_point(rng, ns[trial % len(ns)])
        for algo in Algorithm:
            outcome = step(x, algo)
            if outcome.terminated:
                continue
            try:
                back = inverse_branch(outcome.next, outcome.digit)  # type: ignore[arg-type]
                ok, detail = back == x, back.to_text()
            except SelmerException as e:
                ok, detail = False, str(e)
            result.add(f"trial {trial} {algo.value}", ok, detail)
    return result


def verify_absorbing(trials: int = 1000, seed: int = 0, max_steps: int = 500) -> SuiteResult:
    """T D is inside D (hard checks); hitting D from B^2 is a statistic.

    Args:
        trials: Samples for each half of the suite
        seed: Seed of both samplers
        max_steps: SSA steps allowed before a start counts as missing D

    Returns:
        One stay check per sample of D, hitting statistics from B^2
    """
    rng = random.Random(seed)
    result = SuiteResult("absorbing")
    hit_times: list[int] = []
    missed = 0
    for _ in range(trials):
        x = random_rational_point(rng, 2)
        current = x
        for time in range(max_steps + 1):
            if in_absorbing_set(current):
                hit_times.append(time)
                break
            outcome = ssa_step(current)
            if outcome.terminated:
                missed += 1
                break
            current = outcome.next  # type: ignore[assignment]
        else:
            missed += 1
    if missed:
        logger.warning("%d of %d sampled points did not reach D", missed, trials)
    result.statistics["reached D"] = f"{len(hit_times)}/{trials}"
    if hit_times:
        result.statistics["max hitting time"] = str(max(hit_times))

    for trial in range(trials):
        x = random_absorbing_point(rng)
        outcome = ssa_step(x)
        if outcome.terminated:
            result.add(f"stay {trial}", False, f"terminated from {x.to_text()}")
            continue
        stays = in_absorbing_set(outcome.next)  # type: ignore[arg-type]
        result.add(f"stay {trial}", stays, x.to_text())
    return result


def verify_cylinders(k_max: int = 10) -> SuiteResult:
    """S B(k) inside S B(k + 1) with a witness of the difference; B(k) is not full."""
    result = SuiteResult("cylinders")
    for k in range(1, k_max + 1):
        check = image_nesting(k)
        result.add(f"k={k} nested", check.contained)
        result.add(f"k={k} witness", check.witness is not None, str(check.witness))
        try:
            result.add(f"k={k} not full", True, str(msa_nonfull_witness(k)))
        except SelmerException as e:
            result.add(f"k={k} not full", False, str(e))
    return result


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "det": verify_det,
    "recursion": verify_recursion,
    "reconstruct": verify_reconstruct,
    "positivity": verify_positivity,
    "roundtrip": verify_roundtrip,
    "absorbing": verify_absorbing,
    "cylinders": verify_cylinders,
}
