"""Finite Markov decision processes with reward structures.

States are contiguous indices 0..n-1. Each state has an ordered list of
actions; each action an ordered list of (target, probability) branches. The
action order is fixed and serialisation-stable because strategy hashing
depends on it. Reward structures are sparse maps
(state, action index, target state) -> reward.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .lss import SplitMix64

PROB_SUM_TOL = 1e-9


class Kind(enum.Enum):
    PROB_REACH = "prob_reach"
    EXP_REWARD = "exp_reward"


class Direction(enum.Enum):
    MAX = "max"
    MIN = "min"


@dataclass(frozen=True)
class Action:
    name: str
    branches: tuple[tuple[int, float], ...]


@dataclass(frozen=True)
class Objective:
    """One reachability-probability or expected-reward objective.

    `bounds` declares a known [lo, hi] range of the per-run value; it is
    required for sound fixed-precision sampling of expected rewards.
    """

    kind: Kind
    direction: Direction
    goal: frozenset[int]
    reward: str | None = None
    bounds: tuple[float, float] | None = None


Query = tuple[Objective, ...]


@dataclass(frozen=True)
class RunOutcome:
    """Result of one simulation run.

    `steps` counts visited states including the initial one; goal membership
    is checked on entry, so a run that starts outside every goal and enters
    one on its first transition reports steps == 2. `truncated` is set when
    the step limit was hit with some objective still unresolved.
    """

    values: tuple[float, ...]
    steps: int
    truncated: bool
    resolved: tuple[bool, ...]
    path: tuple[tuple[int, int, int], ...] | None = None  # (state, action, target), debug only


@dataclass
class Mdp:
    initial_state: int
    actions: tuple[tuple[Action, ...], ...]
    rewards: dict[str, dict[tuple[int, int, int], float]] = field(default_factory=dict)
    state_labels: tuple[str, ...] | None = None
    name: str = "mdp"

    @property
    def n_states(self) -> int:
        return len(self.actions)

    def action_counts(self):
        import numpy as np

        return np.array([len(a) for a in self.actions], dtype=np.int64)

    def label(self, state: int) -> str:
        if self.state_labels is not None:
            return self.state_labels[state]
        return str(state)


@dataclass
class Dtmc:
    """Markov chain induced by fixing one action per state."""

    initial_state: int
    transitions: tuple[tuple[tuple[int, float], ...], ...]
    rewards: dict[str, dict[tuple[int, int], float]]
    state_labels: tuple[str, ...] | None = None

    @property
    def n_states(self) -> int:
        return len(self.transitions)


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def directions(query) -> tuple[Direction, ...]:
    return tuple(obj.direction for obj in query)


def validate_mdp(model: Mdp, query=()) -> ValidationReport:
    """Structural well-formedness report for a model and (optionally) a query.

    Report-returning: violations are hard errors, warnings flag likely
    ill-formed queries (goal unreachable from some reachable state, which
    makes an expected reward infinite under some strategies).
    """
    rep = ValidationReport()
    n = model.n_states
    if not 0 <= model.initial_state < n:
        rep.violations.append(f"initial state {model.initial_state} out of range")
        return rep
    for s, acts in enumerate(model.actions):
        if len(acts) == 0:
            rep.violations.append(f"state {model.label(s)} has no enabled action (deadlock)")
        for ai, act in enumerate(acts):
            if len(act.branches) == 0:
                rep.violations.append(f"action {act.name} of state {model.label(s)} has no branches")
                continue
            total = 0.0
            for bi, (t, p) in enumerate(act.branches):
                if not 0 <= t < n:
                    rep.violations.append(
                        f"branch {bi} of action {act.name} in state {model.label(s)} targets invalid state {t}"
                    )
                if not 0.0 < p <= 1.0:
                    rep.violations.append(
                        f"branch {bi} of action {act.name} in state {model.label(s)} has probability {p} outside (0,1]"
                    )
                total += p
            if abs(total - 1.0) > PROB_SUM_TOL:
                rep.violations.append(
                    f"branch probabilities of action {act.name} in state {model.label(s)} sum to {total!r}"
                )
    valid_triples = {
        (s, ai, t)
        for s, acts in enumerate(model.actions)
        for ai, act in enumerate(acts)
        for (t, _p) in act.branches
    }
    for name, entries in model.rewards.items():
        for key in entries:
            if key not in valid_triples:
                rep.violations.append(f"reward structure {name} references missing branch {key}")
    for i, obj in enumerate(query):
        if len(obj.goal) == 0:
            rep.violations.append(f"objective {i} has an empty goal set")
        if any(not 0 <= g < n for g in obj.goal):
            rep.violations.append(f"objective {i} has goal states out of range")
        if obj.kind is Kind.EXP_REWARD:
            if obj.reward is None or obj.reward not in model.rewards:
                rep.violations.append(f"objective {i} names unknown reward structure {obj.reward!r}")
        if obj.bounds is not None and obj.bounds[0] > obj.bounds[1]:
            rep.violations.append(f"objective {i} has bounds lo > hi")
    if rep.violations:
        return rep
    reachable = _reachable_states(model)
    for i, obj in enumerate(query):
        if obj.kind is not Kind.EXP_REWARD:
            continue
        can_reach = _states_reaching(model, obj.goal)
        stuck = sorted(reachable - can_reach)
        if stuck:
            names = ", ".join(model.label(s) for s in stuck[:5])
            rep.warnings.append(
                f"objective {i}: goal unreachable from reachable state(s) {names}"
                f"{'...' if len(stuck) > 5 else ''}; expected reward may be infinite"
            )
    return rep


def _reachable_states(model: Mdp) -> set[int]:
    seen = {model.initial_state}
    stack = [model.initial_state]
    while stack:
        s = stack.pop()
        for act in model.actions[s]:
            for t, _p in act.branches:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
    return seen


def _states_reaching(model: Mdp, goal) -> set[int]:
    # Backward closure over the underlying graph (any strategy).
    preds: dict[int, set[int]] = {s: set() for s in range(model.n_states)}
    for s, acts in enumerate(model.actions):
        for act in acts:
            for t, _p in act.branches:
                preds[t].add(s)
    seen = set(goal)
    stack = list(goal)
    while stack:
        s = stack.pop()
        for p in preds[s]:
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return seen


def simulate_run(model: Mdp, action_chooser, objectives, run_seed: int, step_limit: int,
                 record_path: bool = False) -> RunOutcome:
    """Reference single-run simulator, pure in (model, chooser, seed, limit).

    Walks from the initial state, applying `action_chooser(state)` and
    sampling one branch per transition by inverse CDF over the ordered branch
    list with one uniform draw from a SplitMix64 stream seeded by `run_seed`.
    Each objective resolves on first entry of its goal set (initial state
    included); expected-reward objectives accumulate branch rewards until
    they resolve. The run ends when every objective has resolved or the step
    limit is hit. With `record_path` the realised transitions are kept on the
    outcome for debugging.
    """
    if step_limit < 1:
        raise ValueError("step_limit must be >= 1")
    d = len(objectives)
    reward_maps = [
        model.rewards[obj.reward] if obj.kind is Kind.EXP_REWARD else None for obj in objectives
    ]
    values = [0.0] * d
    resolved = [False] * d
    rng = SplitMix64(run_seed)
    state = model.initial_state
    steps = 0
    truncated = False
    path: list[tuple[int, int, int]] | None = [] if record_path else None
    while True:
        steps += 1
        done = 0
        for k, obj in enumerate(objectives):
            if not resolved[k] and state in obj.goal:
                resolved[k] = True
                if obj.kind is Kind.PROB_REACH:
                    values[k] = 1.0
            if resolved[k]:
                done += 1
        if done == d:
            break
        if steps == step_limit:
            truncated = True
            break
        ai = action_chooser(state)
        branches = model.actions[state][ai].branches
        u = rng.next_float()
        cum = 0.0
        j = 0
        last = len(branches) - 1
        while j < last:
            cum += branches[j][1]
            if u < cum:
                break
            j += 1
        target = branches[j][0]
        for k in range(d):
            if reward_maps[k] is not None and not resolved[k]:
                values[k] += reward_maps[k].get((state, ai, target), 0.0)
        if path is not None:
            path.append((state, ai, target))
        state = target
    return RunOutcome(tuple(values), steps, truncated, tuple(resolved),
                      tuple(path) if path is not None else None)


def induce_dtmc(model: Mdp, choice) -> Dtmc:
    """Markov chain obtained by fixing `choice[s]` as the sole action of s."""
    grouped: dict[str, dict[tuple[int, int], list[tuple[int, float]]]] = {}
    for name, entries in model.rewards.items():
        by_sa: dict[tuple[int, int], list[tuple[int, float]]] = {}
        for (rs, rai, rt), val in entries.items():
            by_sa.setdefault((rs, rai), []).append((rt, val))
        grouped[name] = by_sa
    transitions = []
    rewards: dict[str, dict[tuple[int, int], float]] = {name: {} for name in model.rewards}
    for s in range(model.n_states):
        ai = choice[s]
        if not 0 <= ai < len(model.actions[s]):
            raise ValueError(f"state {model.label(s)}: action index {ai} out of range")
        merged: dict[int, float] = {}
        for t, p in model.actions[s][ai].branches:
            merged[t] = merged.get(t, 0.0) + p
        transitions.append(tuple(sorted(merged.items())))
        for name, by_sa in grouped.items():
            for rt, val in by_sa.get((s, ai), ()):
                rewards[name][(s, rt)] = val
    return Dtmc(model.initial_state, tuple(transitions), rewards, model.state_labels)
