"""posispec: spectral verification toolkit for positive operators.

Checks structural hypotheses (support expansion, irreducibility, identity
and power domination) on nonnegative matrices, computes spectra with
residual certificates, and verifies that the predicted spectral conclusions
(trivial unimodular point spectrum, trivial peripheral spectrum, strong
convergence of powers) actually hold.
"""

from .errors import (
    DimensionMismatchError,
    NegativeEntryError,
    PosispecError,
    PowerUnboundedError,
    ReducibleOperatorError,
    SemanticsMismatchError,
    SolverFailure,
    SoundnessViolationError,
    UnknownScenarioError,
)
from .lattice import (
    MaskSemantics,
    SupportMask,
    ideal_inclusion_by_mask,
    ideal_inclusion_by_truncation,
    ideal_inclusion_little_o,
    lattice_ops,
    mask_subseteq,
    support,
)
from .operators import (
    Functional,
    Operator,
    SpaceKind,
    SpaceSemantics,
    apply,
    cesaro_mean,
    ck_grid,
    finite_rank,
    from_dense,
    kernel_on_grid,
    lp_grid,
    matrix_power,
    partition_operator,
    power_bound_estimate,
    sequence_space,
    sinkhorn_balance,
)
from .spectral import (
    ConvergenceVerdict,
    PowerConvergence,
    Spectrum,
    classify_power_convergence,
    disk_inclusion,
    eigenvalues,
    is_cyclic,
    jdlg_projection,
    mean_ergodic_projection,
    peripheral_spectrum,
    unimodular_point_spectrum,
)
from .structure import (
    DominationResult,
    ExpansionResult,
    dominates_identity,
    expands_support,
    expands_support_everywhere,
    expands_support_on_band,
    is_irreducible,
    is_lattice_homomorphism,
    is_super_fixed,
    period,
    period_by_cycle_enumeration,
    power_domination,
    support_graph,
)
from .verdicts import (
    AnalysisOptions,
    Check,
    HypothesisReport,
    TheoremId,
    TheoremVerdict,
    analyze,
    engine_convergence,
    engine_dominates_identity,
    engine_lattice_homomorphism,
    engine_main_everywhere,
    engine_main_irreducible,
    engine_power_domination,
)

__version__ = "0.1.0"
