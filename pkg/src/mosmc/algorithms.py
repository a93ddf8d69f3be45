"""The incremental sampling scheme and the three fixed-budget algorithms.

All fixed-budget algorithms share the same two-phase structure: a heuristic
phase that spends roughly iterations*m*n runs deciding which strategies look
promising, and an evaluation phase (eval_phase) that re-evaluates the chosen
candidates from scratch with another iterations*m*n runs. The fresh
evaluation keeps the selection statistically independent from the front
estimate; heuristic-phase and evaluation-phase run seeds are derived under
different phase tags, so no sample is ever shared.

Rounding left-overs inside a phase carry forward to the next iteration where
the algorithm divides a budget (FIB, eval_phase); steps with fixed
per-strategy run counts (WVR's halving passes, FSB's catch-up) spend what
their rule dictates and the residue is reported as unused.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

from . import geometry
from .heuristics import Rule, select_candidates
from .lss import PHASE_EVAL, PHASE_HEURISTIC, SeedContext, StrategySampler
from .model import directions, validate_mdp
from .stats import StrategyStats, _ChainCache, batch_alpha, runs_for_precision, smc_evaluate

ALGORITHMS = ("incremental", "wvr", "fib", "fsb")

# Table-style presets: same total budget, traded between strategy count and
# per-strategy runs.
PRESETS = {
    "c1": {"m": 100, "alpha": 0.1, "n": 1000, "iterations": 10},
    "c2": {"m": 1000, "alpha": 0.1, "n": 100, "iterations": 10},
    "c3": {"m": 3333, "alpha": 0.1, "n": 30, "iterations": 10},
}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    algorithm: str
    heuristic: Rule = Rule.SIMPLE
    m: int = 100
    n: int = 1000
    iterations: int = 10
    alpha: float = 0.1
    epsilon: float | None = None         # incremental: target CI half-width
    batch_factor: float | None = None    # incremental: f in (0,1)
    strategy_seed: int = 1
    simulation_seed: int = 0
    step_limit: int = 10_000
    reference_point: tuple | None = None
    timeout: float | None = None         # incremental stop conditions
    max_batches: int | None = None
    max_runs: int | None = None
    workers: int = 1

    def with_preset(self, preset: str) -> "ExperimentConfig":
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        return replace(self, **PRESETS[preset])

    def validate(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError("alpha must be in (0, 1)")
        if self.m < 1:
            raise ConfigError("m must be >= 1")
        if self.step_limit < 1:
            raise ConfigError("step limit must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.algorithm == "incremental":
            if self.epsilon is None or self.epsilon <= 0.0:
                raise ConfigError("the incremental scheme needs a positive epsilon")
            if self.batch_factor is None or not 0.0 < self.batch_factor < 1.0:
                raise ConfigError("the incremental scheme needs a batch factor in (0, 1)")
            if self.timeout is None and self.max_batches is None and self.max_runs is None:
                raise ConfigError(
                    "the incremental scheme needs a stop condition: timeout, "
                    "max batches, or max runs"
                )
        else:
            if self.n < 1 or self.iterations < 1:
                raise ConfigError("fixed-budget algorithms need n >= 1 and iterations >= 1")


@dataclass
class ExperimentReport:
    algorithm: str
    config: ExperimentConfig
    under_front: geometry.FrontApproximation
    over_front: geometry.FrontApproximation | None
    stats: StrategyStats                      # the statistics behind the fronts
    survivor_counts: list[int]
    final_candidates: list[int]
    heuristic_runs: int
    eval_runs: int
    unused_budget: int
    total_steps: int
    trajectory: list[tuple[int, int]] = field(default_factory=list)
    batches: int = 0
    warnings: list[str] = field(default_factory=list)
    wall_clock: float = 0.0
    hypervolume_under: float | None = None
    hypervolume_over: float | None = None
    reference_point: tuple | None = None
    heuristic_stats: StrategyStats | None = None

    @property
    def total_runs(self) -> int:
        return self.heuristic_runs + self.eval_runs

    def all_stats(self):
        maps = [self.stats]
        if self.heuristic_stats is not None:
            maps.append(self.heuristic_stats)
        return maps


def _collect_warnings(*stats_maps: StrategyStats) -> list[str]:
    out = []
    truncations = sum(s.truncation_warnings for s in stats_maps)
    if truncations:
        out.append(
            f"{truncations} run(s) hit the step limit before a "
            "reachability goal; their value was counted as 0"
        )
    if any(s.any_approximate for s in stats_maps):
        out.append(
            "expected-reward objective without declared bounds: Student-t "
            "intervals are only approximately sound"
        )
    return out


def eval_phase(model, query, candidates, run_budget: int, alpha: float,
               seed_ctx: SeedContext, step_limit: int = 10_000, workers: int = 1,
               chain_cache: _ChainCache | None = None):
    """Fresh evaluation of the candidate set: floor(budget/|candidates|) runs
    each at confidence 1 - alpha/|candidates|, on a new accumulator with
    evaluation-phase seeds. Returns (under front, stats, spent, unused)."""
    candidates = sorted(candidates)
    if not candidates:
        raise ValueError("evaluation phase needs a non-empty candidate set")
    per_strategy = run_budget // len(candidates)
    if per_strategy < 1:
        raise ValueError(
            f"run budget {run_budget} cannot give {len(candidates)} candidates a run each"
        )
    gamma = 1.0 - alpha / len(candidates)
    stats = StrategyStats(len(query))
    cache = chain_cache or _ChainCache(model, query)
    for sigma in candidates:
        smc_evaluate(model, sigma, query, gamma, stats, seed_ctx, PHASE_EVAL,
                     runs=per_strategy, step_limit=step_limit, workers=workers,
                     chain_cache=cache)
    front = geometry.build_front(stats, directions(query), "under")
    spent = per_strategy * len(candidates)
    return front, stats, spent, run_budget - spent


def _scalarized_top(sigmas, stats: StrategyStats, dirs, w, count: int) -> list[int]:
    """Best `count` strategies by the scalarised mean w . x̂ (ties: id asc)."""
    def score(sigma):
        nm = geometry.normalize(stats.entry(sigma).box.means, dirs)
        return w[0] * nm[0] + w[1] * nm[1]

    return sorted(sigmas, key=lambda s: (-score(s), s))[:count]


def _prepare(config: ExperimentConfig, model, query):
    config.validate()
    report = validate_mdp(model, query)
    if not report.ok:
        raise ValueError("invalid model: " + "; ".join(report.violations))
    seed_ctx = SeedContext(config.simulation_seed)
    sampler = StrategySampler(config.strategy_seed)
    stats = StrategyStats(len(query))
    cache = _ChainCache(model, query)
    return seed_ctx, sampler, stats, cache, directions(query)


def fib(config: ExperimentConfig, model, query) -> ExperimentReport:
    """Fixed iteration budget: every iteration spreads m*n runs (plus carried
    left-over) evenly over the surviving strategies, then prunes."""
    seed_ctx, sampler, stats, cache, dirs = _prepare(config, model, query)
    m, n, iters, rule = config.m, config.n, config.iterations, config.heuristic
    gamma = 1.0 - config.alpha / m
    sigma_set = sampler.sample(m)
    survivor_counts = []
    heuristic_runs = 0
    leftover = 0
    for _i in range(1, iters + 1):
        survivor_counts.append(len(sigma_set))
        budget = n * m + leftover
        per_strategy = budget // len(sigma_set)
        for sigma in sigma_set:
            smc_evaluate(model, sigma, query, gamma, stats, seed_ctx, PHASE_HEURISTIC,
                         runs=per_strategy, step_limit=config.step_limit,
                         workers=config.workers, chain_cache=cache)
        heuristic_runs += per_strategy * len(sigma_set)
        leftover = budget - per_strategy * len(sigma_set)
        sigma_set = select_candidates(rule, {s: stats.entry(s).box for s in sigma_set}, dirs)
    candidates = select_candidates(rule, {s: stats.entry(s).box for s in sigma_set}, dirs)
    front, eval_stats, eval_spent, eval_unused = eval_phase(
        model, query, candidates, iters * m * n, config.alpha, seed_ctx,
        config.step_limit, config.workers, cache)
    return ExperimentReport(
        "fib", config, front, None, eval_stats, survivor_counts, candidates,
        heuristic_runs, eval_spent, leftover + eval_unused,
        stats.total_steps + eval_stats.total_steps,
        warnings=_collect_warnings(stats, eval_stats),
        heuristic_stats=stats,
    )


def fsb(config: ExperimentConfig, model, query) -> ExperimentReport:
    """Fixed strategy budget: survivors get n more runs, newcomers catch up
    with i*n, and freed budget samples new strategies."""
    seed_ctx, sampler, stats, cache, dirs = _prepare(config, model, query)
    m, n, iters, rule = config.m, config.n, config.iterations, config.heuristic
    gamma = 1.0 - config.alpha / m
    survivors: list[int] = []
    newcomers = sampler.sample(m)
    survivor_counts = []
    heuristic_runs = 0
    leftover = 0
    for i in range(1, iters + 1):
        working = survivors + newcomers
        survivor_counts.append(len(working))
        for sigma in survivors:
            smc_evaluate(model, sigma, query, gamma, stats, seed_ctx, PHASE_HEURISTIC,
                         runs=n, step_limit=config.step_limit,
                         workers=config.workers, chain_cache=cache)
        for sigma in newcomers:
            smc_evaluate(model, sigma, query, gamma, stats, seed_ctx, PHASE_HEURISTIC,
                         runs=i * n, step_limit=config.step_limit,
                         workers=config.workers, chain_cache=cache)
        spent = len(survivors) * n + len(newcomers) * i * n
        heuristic_runs += spent
        leftover += n * m - spent
        survivors = select_candidates(rule, {s: stats.entry(s).box for s in working}, dirs)
        fresh = (m - len(survivors)) // (i + 1)
        newcomers = sampler.sample(fresh) if fresh > 0 else []
    candidates = select_candidates(rule, {s: stats.entry(s).box for s in survivors}, dirs)
    front, eval_stats, eval_spent, eval_unused = eval_phase(
        model, query, candidates, iters * m * n, config.alpha, seed_ctx,
        config.step_limit, config.workers, cache)
    return ExperimentReport(
        "fsb", config, front, None, eval_stats, survivor_counts, candidates,
        heuristic_runs, eval_spent, leftover + eval_unused,
        stats.total_steps + eval_stats.total_steps,
        warnings=_collect_warnings(stats, eval_stats),
        heuristic_stats=stats,
    )


def wvr(config: ExperimentConfig, model, query) -> ExperimentReport:
    """Weight vector refinement: scalarise along the direction of maximal
    distance between the current under- and over-approximation, then run
    halving passes that re-rank the global strategy set. Strategies are only
    dropped from the local working set, never from the global one."""
    seed_ctx, sampler, stats, cache, dirs = _prepare(config, model, query)
    m, n, iters, rule = config.m, config.n, config.iterations, config.heuristic
    gamma = 1.0 - config.alpha / m
    sigma_set = sampler.sample(m)
    heuristic_runs = 0
    for sigma in sigma_set:
        smc_evaluate(model, sigma, query, gamma, stats, seed_ctx, PHASE_HEURISTIC,
                     runs=n, step_limit=config.step_limit,
                     workers=config.workers, chain_cache=cache)
        heuristic_runs += n
    survivor_counts = [len(sigma_set)]
    for _i in range(2, iters + 1):
        under = geometry.build_front(stats, dirs, "under")
        over = geometry.build_front(stats, dirs, "over")
        w = geometry.max_gap_direction(under, over)
        local = _scalarized_top(sigma_set, stats, dirs, w, len(sigma_set) // 2)
        while True:
            for sigma in local:
                smc_evaluate(model, sigma, query, gamma, stats, seed_ctx, PHASE_HEURISTIC,
                             runs=n, step_limit=config.step_limit,
                             workers=config.workers, chain_cache=cache)
            heuristic_runs += n * len(local)
            local = _scalarized_top(sigma_set, stats, dirs, w, len(local) // 2)
            if not local:
                break
        survivor_counts.append(len(sigma_set))
    candidates = select_candidates(rule, {s: stats.entry(s).box for s in sigma_set}, dirs)
    front, eval_stats, eval_spent, eval_unused = eval_phase(
        model, query, candidates, iters * m * n, config.alpha, seed_ctx,
        config.step_limit, config.workers, cache)
    return ExperimentReport(
        "wvr", config, front, None, eval_stats, survivor_counts, candidates,
        heuristic_runs, eval_spent, iters * m * n - heuristic_runs + eval_unused,
        stats.total_steps + eval_stats.total_steps,
        warnings=_collect_warnings(stats, eval_stats),
        heuristic_stats=stats,
    )


def inc_samp(config: ExperimentConfig, model, query) -> ExperimentReport:
    """Incremental sampling: indefinitely evaluate batches of m fresh
    strategies at fixed precision epsilon, giving batch i the error budget
    (1-f)^(i-1) * f * alpha split equally over its strategies. Both fronts
    are rebuilt after every strategy; interruption (timeout, max batches, or
    max runs, checked between strategies) returns the current fronts."""
    seed_ctx, sampler, stats, cache, dirs = _prepare(config, model, query)
    m, eps, f = config.m, config.epsilon, config.batch_factor
    start = time.monotonic()
    under = geometry.FrontApproximation("under", dirs, (), ())
    over = geometry.FrontApproximation("over", dirs, (), ())
    trajectory: list[tuple[int, int]] = []
    batch_counts: list[int] = []
    total_runs = 0
    completed = 0
    batch = 0

    def interrupted():
        if config.timeout is not None and time.monotonic() - start >= config.timeout:
            return True
        if config.max_runs is not None and total_runs >= config.max_runs:
            return True
        return False

    stop = interrupted()
    while not stop:
        if config.max_batches is not None and batch >= config.max_batches:
            break
        batch += 1
        alpha_sigma = batch_alpha(config.alpha, f, batch) / m
        gamma = 1.0 - alpha_sigma
        runs = max(
            runs_for_precision(eps, alpha_sigma / len(query), obj.kind, obj.bounds)
            for obj in query
        )
        in_batch = 0
        for sigma in sampler.sample(m):
            if interrupted():
                stop = True
                break
            smc_evaluate(model, sigma, query, gamma, stats, seed_ctx, PHASE_HEURISTIC,
                         runs=runs, step_limit=config.step_limit,
                         workers=config.workers, chain_cache=cache)
            total_runs += runs
            completed += 1
            in_batch += 1
            trajectory.append((total_runs, completed))
            under = geometry.build_front(stats, dirs, "under")
            over = geometry.build_front(stats, dirs, "over")
        batch_counts.append(in_batch)
    return ExperimentReport(
        "incremental", config, under, over, stats, batch_counts,
        sorted(stats), total_runs, 0, 0, stats.total_steps,
        trajectory=trajectory, batches=batch,
        warnings=_collect_warnings(stats),
    )


def run_algorithm(config: ExperimentConfig, model, query) -> ExperimentReport:
    dispatch = {"incremental": inc_samp, "wvr": wvr, "fib": fib, "fsb": fsb}
    return dispatch[config.algorithm](config, model, query)
