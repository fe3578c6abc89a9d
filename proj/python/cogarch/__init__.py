"""COGARCH(p,q) simulation, path-distance diagnostics, and PML estimation.

Thin wrapper over the compiled `_core` extension; all functionality lives in
the C++ library.
"""

from cogarch._core import (  # noqa: F401
    AuxDiagnostic,
    CogarchSpec,
    CompoundPoissonSpec,
    ConvergenceReport,
    EstimationResult,
    Grid,
    InitialStatePolicy,
    InnovationSeries,
    JumpPath,
    LevyMoments,
    Matrix,
    MeshSummary,
    NormalJumps,
    ObservedSeries,
    PathKind,
    SimulatedPath,
    StationarityReport,
    StudyCell,
    TimeChange,
    TwoPointJumps,
    Vector,
    __version__,
    aux_diagnostic,
    build_companion,
    cond_variance,
    convergence_study,
    estimate,
    expm,
    first_jump_innovations,
    induced_norm,
    initial_point,
    levy_moments,
    linear_recursion_closed_form,
    log_norm,
    pseudo_loglik,
    sample_jump_path,
    simulate_discrete,
    simulate_exact,
    skorokhod_distance,
    state_update,
    stationarity_check,
    stationary_mean,
    sup_distance,
    tail_mass,
    truncation_sequence,
)
