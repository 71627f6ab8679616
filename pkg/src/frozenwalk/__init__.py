"""Simulation and verification lab for a unidirectional walk in a frozen environment."""

from .environment import (
    Constant,
    Environment,
    FIGURE_MARKOV,
    FIGURE_SINUSOID,
    IidDiscrete,
    LimitParams,
    PrefixStats,
    Sinusoid,
    TableFile,
    TwoStateMarkov,
    diagnostics,
    generate,
    limit_params,
    phi_mixing_markov,
    prefix_stats,
    spec_from_dict,
    spec_to_dict,
)
from .walk import (
    HittingDist,
    PathSample,
    Pmf,
    delta0,
    hitting_dist,
    hitting_moments,
    sample_final,
    sample_positions,
    sample_trajectories,
    step_pmf,
    walk_pmf,
)
from .chaosmap import (
    CellLaw,
    IntervalMeasure,
    apply_map,
    cell_law,
    pushforward,
    sample_trajectory,
)
from .limits import (
    IncreasingSeq,
    LltPrediction,
    centering,
    clt_normal_cdf,
    f_density,
    g_density,
    gen_inverse,
    h_density,
    llt_prediction,
)
from .analysis import (
    ExperimentReport,
    FigureDataset,
    clt_error,
    figure2,
    hitting_llt_error,
    lln_check,
    llt_error,
    run_experiment,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
