"""Randomized gossip consensus over signed (attraction/repulsion) graphs:
exact spectral convergence criteria, phase-transition thresholds, and a
seeded Monte Carlo engine to validate them."""

from .backend import backend_name
from .errors import (
    DimensionError,
    EmptyRepulsiveError,
    GainRangeError,
    HypothesisError,
    InvalidPairError,
    NoConvergenceError,
    NotCompleteUniformError,
    NotRingEdgeError,
    NotSymmetricError,
    OverflowGuardError,
    OverlapError,
    SelfLoopError,
    SignedGossipError,
    StochasticityError,
)
from .expectation import (
    CONVERGES,
    CRITICAL,
    DIVERGES,
    ExpectationReport,
    classify_expectation,
    complete_graph_threshold,
    er_sweep,
    er_threshold,
    f_rho,
    mean_update,
    product_convergence_check,
    threshold_beta,
)
from .graphs import (
    ConnectivityReport,
    SignedGraph,
    build_partition,
    complete_uniform,
    connectivity,
    er_repulsive,
    graph_from_dict,
    graph_to_dict,
    load_graph,
    ring_uniform,
    save_graph,
)
from .meansquare import (
    CONVERGES_SUFFICIENT,
    DIVERGES_SUFFICIENT,
    INCONCLUSIVE,
    SecondMomentReport,
    ms_classify,
    second_moment_operator,
)
from .rng import RngStream
from .schedules import Schedule, gain_from_spec, power_rule
from .simulator import (
    ConditionReport,
    Ensemble,
    PhiSequence,
    QSequence,
    Trajectory,
    evaluate_conditions,
    monte_carlo,
    no_survivor_probe,
    phi_sequence,
    q_sequence,
    run,
    sample_arcs,
    select_arc,
    step,
)
from .spectral import (
    DEFAULT_TOLERANCES,
    SpectrumResult,
    Tolerances,
    commutator_norm,
    spectral_radius,
    sym_eigenvalues,
    weyl_bound,
)

__version__ = "0.1.0"

__all__ = [
    "backend_name",
    "SignedGossipError", "SelfLoopError", "OverlapError", "StochasticityError",
    "InvalidPairError", "NotRingEdgeError", "NotSymmetricError",
    "NoConvergenceError", "DimensionError", "GainRangeError", "HypothesisError",
    "EmptyRepulsiveError", "NotCompleteUniformError", "OverflowGuardError",
    "SignedGraph", "ConnectivityReport", "build_partition", "complete_uniform",
    "ring_uniform", "er_repulsive", "connectivity", "graph_to_dict",
    "graph_from_dict", "save_graph", "load_graph",
    "Tolerances", "DEFAULT_TOLERANCES", "SpectrumResult", "sym_eigenvalues",
    "spectral_radius", "commutator_norm", "weyl_bound",
    "Schedule", "gain_from_spec", "power_rule",
    "CONVERGES", "DIVERGES", "CRITICAL", "ExpectationReport", "mean_update",
    "f_rho", "classify_expectation", "threshold_beta",
    "complete_graph_threshold", "er_threshold", "er_sweep",
    "product_convergence_check",
    "CONVERGES_SUFFICIENT", "DIVERGES_SUFFICIENT", "INCONCLUSIVE",
    "SecondMomentReport", "second_moment_operator", "ms_classify",
    "RngStream", "Trajectory", "Ensemble", "PhiSequence", "QSequence",
    "ConditionReport", "select_arc", "sample_arcs", "step", "run",
    "monte_carlo", "phi_sequence", "q_sequence", "evaluate_conditions",
    "no_survivor_probe",
]
