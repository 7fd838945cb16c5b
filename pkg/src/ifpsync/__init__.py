"""Synchronization of heterogeneous input-feedforward-passive agents over
weighted digraphs: passivity indices, weak-coupling certificates, delay-aware
network simulation, and prebuilt traffic/platoon/counterexample scenarios.
"""

from .errors import (
    BadDimensions,
    BOutOfRange,
    CertificateFailed,
    DimensionMismatch,
    EmptyTrajectory,
    HistoryUnderflow,
    IfpSyncError,
    MuTauViolation,
    NegativeWeight,
    NotCertifiable,
    NotSquare,
    NotStronglyConnected,
    NumericalBlowup,
    PoleOnAxis,
    SelfLoop,
    ZeroPolynomial,
)
from .graphnet import (
    ConnectivityReport,
    Digraph,
    PerronWeights,
    build_digraph,
    connectivity,
    degrees,
    laplacian,
    perron_weights,
)
from .passivity import (
    IfpCertificate,
    IfpShift,
    Polynomial,
    PrlReport,
    RationalTF,
    eval_freq,
    ifp_index,
    ifp_shift,
    ifp_shift_identity_check,
    prl_conditions,
    routh_hurwitz,
)
from .certify import (
    CaccGainSet,
    PlatoonGainVerdict,
    WeakCouplingVerdict,
    all_to_all_bound,
    check_platoon_gains,
    check_weak_coupling,
    check_weak_coupling_pinned,
    diffusive_power_identity,
    dissipation_margin,
)
from .netsim import (
    AgentModel,
    CustomAgent,
    DelayedIntegrator,
    InputHistory,
    LtiSiso,
    NetworkState,
    Plain,
    Reference,
    SimConfig,
    SimResult,
    SyncMetrics,
    Vehicle3rd,
    couple_plain,
    couple_reference,
    make_histories,
    simulate,
    step_network,
    sync_metrics,
)
from .scenarios import (
    AllToAllRun,
    HarmonicRun,
    PlatoonCertificate,
    PlatoonRun,
    PlatoonSpec,
    TrafficCertificate,
    TrafficRun,
    TrafficSpec,
    all_to_all_counterexample,
    build_platoon,
    build_traffic,
    harmonic_counterexample,
    run_platoon,
    run_platoon_transformed,
    run_scenario,
    run_traffic,
    scenario_from_dict,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "IfpSyncError", "NotSquare", "NegativeWeight", "SelfLoop",
    "NotStronglyConnected", "ZeroPolynomial", "PoleOnAxis", "NotCertifiable",
    "BOutOfRange", "DimensionMismatch", "BadDimensions", "CertificateFailed",
    "MuTauViolation", "NumericalBlowup", "HistoryUnderflow", "EmptyTrajectory",
    # graphs
    "Digraph", "ConnectivityReport", "PerronWeights", "build_digraph",
    "connectivity", "degrees", "laplacian", "perron_weights",
    # passivity
    "Polynomial", "RationalTF", "IfpCertificate", "PrlReport", "IfpShift",
    "eval_freq", "routh_hurwitz", "ifp_index", "prl_conditions", "ifp_shift",
    "ifp_shift_identity_check",
    # certificates
    "WeakCouplingVerdict", "check_weak_coupling", "check_weak_coupling_pinned",
    "CaccGainSet", "PlatoonGainVerdict", "check_platoon_gains",
    "all_to_all_bound", "diffusive_power_identity", "dissipation_margin",
    # simulation
    "AgentModel", "LtiSiso", "DelayedIntegrator", "Vehicle3rd", "CustomAgent",
    "Plain", "Reference", "couple_plain", "couple_reference", "InputHistory",
    "NetworkState", "make_histories", "step_network", "SimConfig", "SimResult",
    "SyncMetrics", "simulate", "sync_metrics",
    # scenarios
    "TrafficSpec", "TrafficCertificate", "TrafficRun", "build_traffic",
    "run_traffic", "PlatoonSpec", "PlatoonCertificate", "PlatoonRun",
    "build_platoon", "run_platoon", "run_platoon_transformed", "HarmonicRun",
    "harmonic_counterexample", "AllToAllRun", "all_to_all_counterexample",
    "scenario_from_dict", "run_scenario",
]
