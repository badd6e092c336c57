"""Neutrality and evolvability statistics for bit-string fitness landscapes."""

from .landscape import (
    BitString,
    ConstantLandscape,
    EvolvabilityKind,
    Landscape,
    PopcountLandscape,
    as_bitstring,
    evolvability,
    neighbors,
    neutral_degree,
    neutral_neighbors,
)
from .maxsat import (
    CnfFormula,
    DimacsError,
    IncrementalEvaluator,
    InstanceSpec,
    MaxSatLandscape,
    evaluate,
    evaluate_flip_delta,
    generate,
    parse_dimacs,
    write_dimacs,
)
from .stats import (
    AutocorrReport,
    DegenerateSeriesError,
    NetworkPartition,
    NoUsableSeriesError,
    UndefinedCorrelationLengthError,
    autocorrelation,
    average_autocorrelation,
    correlation_length,
    enumerate_networks,
    neutral_degree_stats,
)
from .walks import (
    WalkConfig,
    WalkTrace,
    evolvability_walk,
    evolvability_walks,
    neutral_random_walk,
    random_walk,
    sample_starts,
)

__version__ = "0.1.0"
