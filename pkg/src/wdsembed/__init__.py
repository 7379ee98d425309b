"""Stochastic-order checks, barrier construction, and Brownian embedding
for families of negative-mean probability measures."""

__version__ = "0.1.0"

from .measures import (  # noqa: F401
    EmptySampleError,
    InvalidMeasureError,
    Measure,
    MeasureError,
    MeasureFamily,
    Segment,
    validate,
)
from .orderings import (  # noqa: F401
    GridTooCoarseError,
    MeanSignViolationError,
    NonNegativeMeanError,
    NonPositiveMeanError,
    OrderVerdict,
    Relation,
    TP2Report,
    Witness,
    compare_family,
    compare_pair,
    comparison_grid,
    k_function,
    k_function_many,
    psi_mrl,
    psi_wds,
    psi_wds_many,
    psi_wis,
    tp2_check_grid,
)
from .cox_hobson import (  # noqa: F401
    Barrier,
    LEFT_RAY,
    ThetaOutOfRangeError,
    barrier,
    export_barrier,
    import_barrier,
    pi_function,
    tangent_construction,
)
from .mc_sim import (  # noqa: F401
    EmbeddingResult,
    HorizonTooSmallError,
    NotWdsOrderedError,
    PathConfig,
    check_monotone_t,
    check_supermartingale,
    embed_family,
    embed_measure,
    empirical_distance,
)
from .transforms import (  # noqa: F401
    ApproximateTransform,
    LogConcaveDensity,
    MixingKernel,
    censor,
    convex_combine_family,
    example_family,
    random_translate,
    scale_mix,
    subordinate,
)
