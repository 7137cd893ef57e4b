"""Distinguishability, Fisher information, error-correction checks, and
rotation-sensor state construction for spin-J systems."""

from .spin import (
    RotationAxis,
    SpinJ,
    SpinOperator,
    SpinOperatorSet,
    SpinState,
    apply,
    axis_generator,
    basis_state,
    build_spin_operators,
    expectation_and_variance,
    generator_unitary,
    overlap,
    rotation_unitary,
)
from .wigner import (
    ReducedElement,
    TensorOperator,
    ThreeJArgs,
    reduced_matrix_element,
    tensor_operator,
    three_j,
    we_expectation,
)
from .metrics import (
    Distribution,
    DistinguishabilityReport,
    ProjectorBasis,
    classical_fisher,
    distinguishability,
    measurement_distribution,
    qfi,
    qfi_finite_difference,
    statistical_distance,
)
from .codes import (
    CodeSpace,
    ConditionReport,
    ErrorSet,
    RecoverySet,
    ae_codewords,
    detection_check,
    dfs_check,
    error_of_state,
    error_small_theta,
    error_with_recovery,
    kl_check,
    max_error_over_code,
)
from .sensing import (
    AnticoherenceReport,
    FeasibilityError,
    FisherMatrix,
    SpacingError,
    SupportSpec,
    anticoherence_report,
    construct_anticoherent,
    fisher_matrix,
    min_shell_gap,
    noon_state,
    rotation_qfi,
)
from .estimation import (
    EstimationConfig,
    EstimationResult,
    crb_report,
    estimate_theta,
    simulate_trials,
    survival_probability,
)

__version__ = "0.1.0"
