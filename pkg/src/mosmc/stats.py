"""Confidence intervals, error-budget arithmetic, and the per-strategy SMC
evaluation primitive.

Interval soundness policy: reachability-probability dimensions use the exact
Clopper-Pearson interval; expected-reward dimensions use Hoeffding's
inequality when the objective declares per-run value bounds and otherwise a
Student-t interval, which is only approximately sound and is flagged as such
in every report. Error budgets are always split by the union bound: a
strategy evaluated at confidence gamma gets alpha_sigma = 1 - gamma, and each
of its d dimensions gets alpha_sigma / d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special, stats as sps

from . import engine, lss
from .model import Kind, Mdp

_BISECT_TOL = 1e-12


class SimulationTruncatedError(RuntimeError):
    """An expected-reward run hit the step limit before reaching its goal."""

    def __init__(self, sigma: int, seed: int, step_limit: int):
        super().__init__(
            f"strategy {sigma}: run with seed {seed} exceeded the step limit "
            f"of {step_limit} before resolving an expected-reward objective"
        )
        self.sigma = sigma
        self.seed = seed
        self.step_limit = step_limit


def _beta_quantile(target: float, a: float, b: float) -> float:
    """Quantile of Beta(a, b) by bisection on the regularised incomplete beta."""
    lo, hi = 0.0, 1.0
    while hi - lo > _BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if special.betainc(a, b, mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def clopper_pearson(successes: int, n: int, alpha: float) -> tuple[float, float]:
    """Exact two-sided binomial confidence interval."""
    if n < 1 or not 0 <= successes <= n:
        raise ValueError(f"invalid counts: {successes} successes in {n} trials")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    if successes == 0:
        lower = 0.0
    else:
        lower = _beta_quantile(alpha / 2.0, successes, n - successes + 1)
    if successes == n:
        upper = 1.0
    else:
        upper = _beta_quantile(1.0 - alpha / 2.0, successes + 1, n - successes)
    return lower, upper


def mean_ci(count: int, total: float, alpha: float, method: str,
            sum_sq: float | None = None, bounds: tuple[float, float] | None = None) -> tuple[float, float]:
    """Two-sided CI for a sample mean.

    method "student_t" needs count >= 2 and sum_sq; method "hoeffding" needs
    per-sample bounds and is distribution-free.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    mean = total / count
    if method == "student_t":
        if count < 2:
            raise ValueError("student_t needs at least 2 samples")
        if sum_sq is None:
            raise ValueError("student_t needs the sum of squares")
        var = max(sum_sq - count * mean * mean, 0.0) / (count - 1)
        half = float(sps.t.ppf(1.0 - alpha / 2.0, count - 1)) * math.sqrt(var / count)
        return mean - half, mean + half
    if method == "hoeffding":
        if bounds is None:
            raise ValueError("hoeffding needs per-sample bounds")
        lo, hi = bounds
        half = (hi - lo) * math.sqrt(math.log(2.0 / alpha) / (2.0 * count))
        return mean - half, mean + half
    raise ValueError(f"unknown CI method {method!r}")


def _cp_worst_half_width(n: int, alpha: float) -> float:
    worst = 0.0
    for x in {n // 2, (n + 1) // 2}:
        lo, hi = clopper_pearson(x, n, alpha)
        worst = max(worst, 0.5 * (hi - lo))
    return worst


def runs_for_precision(epsilon: float, alpha: float, kind: Kind,
                       bounds: tuple[float, float] | None = None) -> int:
    """Smallest run count guaranteeing CI half-width <= epsilon a priori.

    Prob-reach: monotone search on the worst-case Clopper-Pearson width
    (attained at success ratio 1/2). Expected reward: Hoeffding inversion,
    which requires declared bounds.
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    if kind is Kind.EXP_REWARD:
        if bounds is None:
            raise ValueError(
                "fixed-precision sampling of an expected reward needs declared "
                "value bounds; supply Objective.bounds or use a fixed run count"
            )
        lo, hi = bounds
        return max(1, math.ceil((hi - lo) ** 2 * math.log(2.0 / alpha) / (2.0 * epsilon ** 2)))
    hi = 1
    while _cp_worst_half_width(hi, alpha) > epsilon:
        hi *= 2
        if hi > 1 << 40:
            raise ValueError("precision target out of reach")
    lo = hi // 2
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if _cp_worst_half_width(mid, alpha) <= epsilon:
            hi = mid
        else:
            lo = mid
    return hi


def batch_alpha(alpha: float, f: float, batch_index: int) -> float:
    """Error budget of the i-th batch (i >= 1): (1-f)^(i-1) * f * alpha."""
    if not 0.0 < f < 1.0:
        raise ValueError("f must be in (0, 1)")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    return (1.0 - f) ** (batch_index - 1) * f * alpha


@dataclass
class ConfidenceBox:
    """Simultaneous per-dimension confidence intervals around the mean vector."""

    means: tuple[float, ...]
    lowers: tuple[float, ...]
    uppers: tuple[float, ...]
    confidence: float
    methods: tuple[str, ...]

    @property
    def half_widths(self) -> tuple[float, ...]:
        return tuple(0.5 * (u - l) for l, u in zip(self.lowers, self.uppers))

    @property
    def approximate(self) -> bool:
        return "student_t" in self.methods

    @property
    def dimensions(self) -> int:
        return len(self.means)


class StrategyEntry:
    """Per-strategy sample accumulator.

    Raw per-run value vectors are kept (in arrival order) so that derived
    sums do not depend on how runs were batched: statistics are always
    reduced over the full concatenated history.
    """

    def __init__(self, sigma: int, d: int):
        self.sigma = sigma
        self._chunks: list[np.ndarray] = []
        self.d = d
        self.runs_used = 0
        self.total_steps = 0
        self.truncation_warnings = 0
        self.box: ConfidenceBox | None = None

    def append(self, values: np.ndarray, steps: np.ndarray):
        self._chunks.append(np.asarray(values, dtype=np.float64))
        self.runs_used += values.shape[0]
        self.total_steps += int(steps.sum())

    def samples(self) -> np.ndarray:
        if not self._chunks:
            return np.zeros((0, self.d))
        if len(self._chunks) > 1:
            self._chunks = [np.concatenate(self._chunks, axis=0)]
        return self._chunks[0]

    @property
    def count(self) -> int:
        return self.runs_used

    def dim_sum(self, k: int) -> float:
        return float(np.add.reduce(self.samples()[:, k]))

    def dim_sum_sq(self, k: int) -> float:
        col = self.samples()[:, k]
        return float(np.add.reduce(col * col))

    def successes(self, k: int) -> int:
        return int(round(self.dim_sum(k)))


class StrategyStats:
    """Map from strategy id to its accumulated samples and confidence box."""

    def __init__(self, d: int):
        self.d = d
        self._entries: dict[int, StrategyEntry] = {}

    def entry(self, sigma: int) -> StrategyEntry:
        if sigma not in self._entries:
            self._entries[sigma] = StrategyEntry(sigma, self.d)
        return self._entries[sigma]

    def get(self, sigma: int) -> StrategyEntry | None:
        return self._entries.get(sigma)

    def __len__(self):
        return len(self._entries)

    def __contains__(self, sigma):
        return sigma in self._entries

    def __iter__(self):
        return iter(self._entries)

    def items(self):
        return self._entries.items()

    def boxes(self) -> dict[int, ConfidenceBox]:
        return {s: e.box for s, e in self._entries.items() if e.box is not None}

    @property
    def total_runs(self) -> int:
        return sum(e.runs_used for e in self._entries.values())

    @property
    def total_steps(self) -> int:
        return sum(e.total_steps for e in self._entries.values())

    @property
    def truncation_warnings(self) -> int:
        return sum(e.truncation_warnings for e in self._entries.values())

    @property
    def any_approximate(self) -> bool:
        return any(e.box is not None and e.box.approximate for e in self._entries.values())


def compute_box(entry: StrategyEntry, query, gamma: float) -> ConfidenceBox:
    """Recompute the simultaneous box of an entry at confidence gamma.

    The per-dimension budget is (1 - gamma) / d  (union bound over the d
    dimensions, which are estimated from the same runs).
    """
    d = len(query)
    alpha_dim = (1.0 - gamma) / d
    n = entry.count
    means, lowers, uppers, methods = [], [], [], []
    for k, obj in enumerate(query):
        mean = entry.dim_sum(k) / n
        if obj.kind is Kind.PROB_REACH:
            lo, hi = clopper_pearson(entry.successes(k), n, alpha_dim)
            method = "clopper_pearson"
            mean = min(max(mean, 0.0), 1.0)
        elif obj.bounds is not None:
            lo, hi = mean_ci(n, entry.dim_sum(k), alpha_dim, "hoeffding", bounds=obj.bounds)
            method = "hoeffding"
        else:
            lo, hi = mean_ci(n, entry.dim_sum(k), alpha_dim, "student_t", sum_sq=entry.dim_sum_sq(k))
            method = "student_t"
        means.append(mean)
        lowers.append(lo)
        uppers.append(hi)
        methods.append(method)
    return ConfidenceBox(tuple(means), tuple(lowers), tuple(uppers), gamma, tuple(methods))


class _ChainCache:
    """Induced-chain cache keyed by strategy id, scoped to one model+query."""

    def __init__(self, model: Mdp, query):
        self.model = model
        self.query = query
        self.counts = model.action_counts()
        self._chains: dict[int, engine.InducedChain] = {}

    def chain(self, sigma: int) -> engine.InducedChain:
        if sigma not in self._chains:
            amap = lss.action_map(sigma, self.counts)
            self._chains[sigma] = engine.build_chain(self.model, amap, self.query)
        return self._chains[sigma]


def smc_evaluate(model: Mdp, sigma: int, query, gamma: float, stats: StrategyStats,
                 seed_ctx: lss.SeedContext, phase: int, runs: int | None = None,
                 precision: float | None = None, step_limit: int = 10_000,
                 workers: int = 1, chain_cache: _ChainCache | None = None) -> StrategyEntry:
    """Evaluate strategy `sigma` on all objectives with a fresh slice of runs.

    Samples are appended to sigma's accumulator and the box is recomputed at
    confidence `gamma` with the per-dimension union-bound split. The budget
    is either a run count or a precision target (runs derived a priori via
    runs_for_precision, so there is no optional stopping). Per-run seeds are
    derived from (seed context, phase, sigma, cumulative run index): batching
    and parallelism cannot change any sample.
    """
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must be in (0, 1)")
    if (runs is None) == (precision is None):
        raise ValueError("specify exactly one of runs= or precision=")
    alpha_dim = (1.0 - gamma) / len(query)
    if precision is not None:
        n = max(
            runs_for_precision(precision, alpha_dim, obj.kind, obj.bounds) for obj in query
        )
    else:
        n = runs
    if n < 1:
        raise ValueError(f"strategy {sigma}: empty run budget")
    if chain_cache is not None:
        chain = chain_cache.chain(sigma)
    else:
        amap = lss.action_map(sigma, model.action_counts())
        chain = engine.build_chain(model, amap, query)
    entry = stats.entry(sigma)
    seeds = seed_ctx.seeds(phase, sigma, entry.runs_used, n)
    values, steps, truncated, resolved = engine.simulate_batch(chain, seeds, step_limit, workers)
    if truncated.any():
        exp_dims = np.array([obj.kind is Kind.EXP_REWARD for obj in query])
        fatal = truncated & (exp_dims & ~resolved).any(axis=1)
        if fatal.any():
            first = int(np.nonzero(fatal)[0][0])
            raise SimulationTruncatedError(sigma, int(seeds[first]), step_limit)
        entry.truncation_warnings += int(truncated.sum())
    entry.append(values, steps)
    entry.box = compute_box(entry, query, gamma)
    return entry
