"""Multi-objective statistical model checking of MDPs via lightweight
strategy sampling: simulate randomly sampled memoryless strategies, bound
each value vector with a simultaneous confidence box, and build statistically
sound approximations of the Pareto front."""

from .algorithms import (
    ALGORITHMS,
    PRESETS,
    ConfigError,
    ExperimentConfig,
    ExperimentReport,
    eval_phase,
    fib,
    fsb,
    inc_samp,
    run_algorithm,
    wvr,
)
from .benchmarks import (
    CLASSIC_GRID,
    CORRIDOR_TRACK,
    SHORTCUT_TRACK,
    TINY_GRID,
    TOY_GRID,
    DeepSeaGrid,
    ModelBundle,
    TrackMap,
    builtin_model,
    gen_deep_sea,
    gen_exponential,
    gen_racetrack_puddle,
    load_model,
    model_mr,
    save_model,
)
from .geometry import (
    FrontApproximation,
    build_front,
    hypervolume,
    max_gap_direction,
    normalize,
    optimistic_corner,
    pessimistic_corner,
    write_front_csv,
)
from .heuristics import Rule, excludes, select_candidates
from .lss import SeedContext, StrategySampler, lss_action
from .model import (
    Action,
    Direction,
    Dtmc,
    Kind,
    Mdp,
    Objective,
    RunOutcome,
    directions,
    induce_dtmc,
    simulate_run,
    validate_mdp,
)
from .oracle import (
    ExactFront,
    enumerate_strategies,
    exact_pareto_front,
    exact_value,
    exact_values,
)
from .runner import default_reference, hv_report, run_experiment, write_outputs
from .stats import (
    ConfidenceBox,
    SimulationTruncatedError,
    StrategyStats,
    batch_alpha,
    clopper_pearson,
    mean_ci,
    runs_for_precision,
    smc_evaluate,
)

__version__ = "0.1.0"
