"""PT-symmetric discrete-time quantum walks under the metric-operator formalism.

Builds split-step non-unitary walk operators with real spectra, the metric
operators that render them unitary, and the reduced coin dynamics those
metrics induce, then quantifies how the metric choice shows up in
information backflow, CP indivisibility and coin-position entanglement.
"""

from .channel import (
    ChannelMatrix,
    CoinTrajectory,
    EuclideanWalk,
    build_euclidean_walk,
    channel_matrix,
    channel_matrix_series,
    choi_matrix,
    coin_trajectory,
    intermediate_map,
    reduced_coin_state,
)
from .errors import (
    BranchAmbiguity,
    BrokenRegime,
    ConfigInvalid,
    DegenerateAtK,
    DegeneratePairing,
    IncompatibleMetrics,
    LightConeViolation,
    MissingArtifacts,
    NoBreaking,
    NotPositive,
    PTWalkError,
    ShapeMismatch,
    SingularMetric,
    SpectrumNotReal,
)
from .experiments import ExperimentConfig, load_config, report, run, validate_config
from .linalg import (
    EigenSystem,
    devec,
    eig,
    herm_sqrt,
    partial_trace,
    trace_norm,
    unitary_log,
    vec,
)
from .measures import (
    AnnealSchedule,
    MeasureSeries,
    StatePair,
    blp_series,
    bloch_state,
    entanglement_series,
    maximize_blp,
    rhp_series,
    trace_distance,
    von_neumann_entropy,
)
from .metric import (
    LeftEigenPair,
    MetricSpec,
    MetricTransport,
    build_metric,
    eta,
    g_trace_norm,
    generalized_dagger,
    left_eigvecs,
    metric_transport,
    separability_defect,
    verify_metric_action,
)
from .toy import ToyConfig, ToyResult, product_defect, run_toy, toy_hamiltonians
from .walk import (
    BlockOperator,
    WalkParams,
    coin,
    gain_loss,
    gamma_pt,
    hamiltonian,
    is_unbroken,
    momentum_grid,
    shift_block,
    spectral_a,
    walk_block,
    walk_operator,
)

__version__ = "0.1.0"
