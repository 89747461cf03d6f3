"""Simulation and analysis of Procrustean entanglement concentration.

A two-mode squeezed vacuum shares one mode with a coherent ancilla through a
cross-Kerr interaction; a homodyne measurement of the ancilla and a conditional
phase shift then reshape the Schmidt coefficients. Both the linearized closed
forms and exact truncated-Fock numerics are provided.
"""
from .analysis import (
    FeasibilityQuery,
    SuccessBounds,
    Variant,
    beta_for_ratio,
    resource_condition,
    success_criterion,
    success_probability,
    v_in,
    v_out,
    x_for_improvement,
    x_limit,
)
from .errors import (
    ContractError,
    DegenerateFitError,
    DomainError,
    GridError,
    ProcrusteanError,
    ProjectionError,
    TruncationError,
)
from .feedforward import CorrectionRecord, apply_feedforward, ideal_output_state
from .homodyne import (
    DensityVariant,
    HomodyneSetting,
    MeasurementOutcome,
    beta,
    coherent_quadrature_wavefunction,
    density_closed_form,
    density_exact,
    gamma,
    project,
    sample_outcome,
    sample_outcomes,
)
from .kerr import HybridState, apply_cross_kerr
from .pipeline import ProtocolParams, RunRecord, run_protocol
from .schmidt import (
    DuanParams,
    SchmidtDiagonalState,
    Truncation,
    duan_variance_sum,
    effective_lambda,
    entropy_of_entanglement,
    lambda_from_squeezing_db,
    squeezing_db_from_lambda,
    tmsv_from_lambda,
)

__version__ = "0.1.0"
