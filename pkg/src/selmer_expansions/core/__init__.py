"""Core modules for exact Selmer expansions."""

from selmer_expansions.core.convergents import (
    ConvergentState,
    IntMatrix,
    beta_matrix,
    beta_product,
    convergent_point,
    convergent_states,
    initial_state,
    reconstruct_point,
    recursion_extend,
)
from selmer_expansions.core.data_types import (
    NOT_FOUND,
    TERMINATED,
    Algorithm,
    ApproximationReport,
    ConvergenceReport,
    Digit,
    OrbitTrace,
    Outcome,
    PeriodReport,
    PointB,
    RunConfig,
    StepOutcome,
)
from selmer_expansions.core.numfield import (
    IsolatingInterval,
    NumberField,
    NumberFieldElement,
    Polynomial,
    nf_add,
    nf_cmp,
    nf_floor,
    nf_interval,
    nf_inv,
    nf_mul,
    nf_sign,
)
from selmer_expansions.core.periodic import (
    approximation_report,
    char_poly,
    convergence_report,
    detect_period,
    dominant_eigenvalue,
    eigen_point,
    periodicity_matrix,
    positive_power_exponent,
)
from selmer_expansions.core.report_writer import ReportWriter
from selmer_expansions.core.selmer_maps import (
    in_absorbing_set,
    iterate_orbit,
    msa_inverse_branch,
    msa_step,
    ssa_inverse_branch,
    ssa_step,
)

__all__ = [
    "NumberField",
    "NumberFieldElement",
    "Polynomial",
    "IsolatingInterval",
    "nf_add",
    "nf_mul",
    "nf_inv",
    "nf_sign",
    "nf_cmp",
    "nf_floor",
    "nf_interval",
    "Algorithm",
    "Digit",
    "PointB",
    "StepOutcome",
    "Outcome",
    "TERMINATED",
    "NOT_FOUND",
    "OrbitTrace",
    "PeriodReport",
    "ConvergenceReport",
    "ApproximationReport",
    "RunConfig",
    "ssa_step",
    "msa_step",
    "ssa_inverse_branch",
    "msa_inverse_branch",
    "in_absorbing_set",
    "iterate_orbit",
    "IntMatrix",
    "ConvergentState",
    "beta_matrix",
    "beta_product",
    "initial_state",
    "recursion_extend",
    "convergent_states",
    "reconstruct_point",
    "convergent_point",
    "detect_period",
    "periodicity_matrix",
    "char_poly",
    "dominant_eigenvalue",
    "positive_power_exponent",
    "eigen_point",
    "convergence_report",
    "approximation_report",
    "ReportWriter",
]
