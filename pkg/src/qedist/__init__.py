"""Exact one-shot entanglement distillation beyond LOCC.

Fidelities, eps-error and zero-error rates, and entanglement monotones for
PPT, PPT-preserving, PPT+-preserving, Rains-preserving, and separability-
preserving operations, realised as explicit conic programs with closed-form
fast paths and cross-checked certificates.
"""

from .bipartite import (
    DensityOperator,
    HermitianOperator,
    PureState,
    SchmidtVector,
    density,
    fidelity as state_fidelity,
    hermitian,
    inner,
    isotropic_state,
    max_correlated_embed,
    max_correlated_restrict,
    max_entangled_projector,
    max_entangled_vector,
    partial_transpose,
    pure_from_schmidt,
    random_state,
    schmidt_decompose,
    schmidt_vector_from_squares,
    support_projector,
)
from .distill import (
    DistillationResult,
    OperationClass,
    assisted_fidelity,
    asymptotic_zero_error_rains,
    fidelity,
    rate_eps,
    rate_zero_error,
)
from .hyptest import SetHypothesisResult, d_h, d_h_min_over_set, d_h_min_witness
from .monotones import g_m, mod_trace_distance, negativity, robustness, t_m
from .sets import (
    IntractableSetError,
    OperatorSet,
    gauge_polar,
    gauge_polar_primal,
    membership,
    sample_member,
)
from .solver import ConicProgram, SolverError, SolverSettings
from .special import (
    IsotropicState,
    MaxCorrelatedState,
    MNormResult,
    isotropic_fidelity,
    isotropic_sep_lp,
    m_distillation_norm,
    maxcorr_fidelity,
    maxcorr_rate,
    maxcorr_zero_error,
    pure_fidelity,
    pure_rate,
    pure_zero_error,
)
from .stateio import StateFormatError, load_state, save_state
from .verify import ReproCase, ReproReport, run_repro_suite

__version__ = "0.1.0"

__all__ = [
    "ConicProgram",
    "DensityOperator",
    "DistillationResult",
    "HermitianOperator",
    "IntractableSetError",
    "IsotropicState",
    "MNormResult",
    "MaxCorrelatedState",
    "OperationClass",
    "OperatorSet",
    "PureState",
    "ReproCase",
    "ReproReport",
    "SchmidtVector",
    "SetHypothesisResult",
    "SolverError",
    "SolverSettings",
    "StateFormatError",
    "assisted_fidelity",
    "asymptotic_zero_error_rains",
    "d_h",
    "d_h_min_over_set",
    "d_h_min_witness",
    "density",
    "fidelity",
    "g_m",
    "gauge_polar",
    "gauge_polar_primal",
    "hermitian",
    "inner",
    "isotropic_fidelity",
    "isotropic_sep_lp",
    "isotropic_state",
    "load_state",
    "m_distillation_norm",
    "max_correlated_embed",
    "max_correlated_restrict",
    "max_entangled_projector",
    "max_entangled_vector",
    "maxcorr_fidelity",
    "maxcorr_rate",
    "maxcorr_zero_error",
    "membership",
    "mod_trace_distance",
    "negativity",
    "partial_transpose",
    "pure_fidelity",
    "pure_from_schmidt",
    "pure_rate",
    "pure_zero_error",
    "random_state",
    "rate_eps",
    "rate_zero_error",
    "robustness",
    "run_repro_suite",
    "sample_member",
    "save_state",
    "schmidt_decompose",
    "schmidt_vector_from_squares",
    "state_fidelity",
    "support_projector",
    "t_m",
]
