"""Ground-truth multi-objective solver for small MDPs.

Enumerates deterministic memoryless strategies, evaluates each induced
Markov chain exactly (dense linear solve with partial pivoting and a
residual check), and keeps the Pareto-relevant convex hull of the value
vectors. Probabilistic strategies realise exactly the hull, so this is the
true achievable-set boundary.

`exact_pareto_front` enumerates reachable-support classes instead of the raw
product: strategies differing only in states they never visit induce the
same chain, so one representative per class covers the whole strategy space.
This keeps models with many unreachable (state, action) combinations inside
the enumeration cap; `enumerate_strategies` itself remains the plain
lexicographic product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import UnsupportedDimensionError, normalize, pareto_hull
from .model import Dtmc, Kind, Mdp, induce_dtmc

DEFAULT_ENUMERATION_CAP = 10 ** 6
_RESIDUAL_TOL = 1e-12


class EnumerationCapError(RuntimeError):
    pass


class IllFormedObjectiveError(RuntimeError):
    """Expected reward is infinite: the induced chain misses the goal."""


def enumerate_strategies(model: Mdp, cap: int = DEFAULT_ENUMERATION_CAP):
    """Lexicographic iterator over all per-state action maps."""
    counts = [len(a) for a in model.actions]
    total = math.prod(counts)
    if total > cap:
        raise EnumerationCapError(
            f"{total} deterministic strategies exceed the enumeration cap {cap}; "
            "use a smaller model or raise the cap"
        )
    n = model.n_states
    choice = [0] * n
    while True:
        yield tuple(choice)
        s = n - 1
        while s >= 0:
            choice[s] += 1
            if choice[s] < counts[s]:
                break
            choice[s] = 0
            s -= 1
        if s < 0:
            return


def strategy_rank(model: Mdp, choice) -> int:
    """Position of an action map in the lexicographic enumeration order."""
    rank = 0
    for s in range(model.n_states):
        rank = rank * len(model.actions[s]) + choice[s]
    return rank


def _chain_reachable(dtmc: Dtmc) -> list[int]:
    seen = {dtmc.initial_state}
    stack = [dtmc.initial_state]
    while stack:
        s = stack.pop()
        for t, _p in dtmc.transitions[s]:
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return sorted(seen)


def _support_values(model: Mdp, choice, reached, query, branch_cache=None) -> tuple[float, ...]:
    """Exact values of a policy class, solved on its reached states only.

    Objectives with the same kind and goal set share one linear system.
    """
    if branch_cache is None:
        branch_cache = {}
    transitions = {}
    for s in reached:
        key = (s, choice[s])
        merged = branch_cache.get(key)
        if merged is None:
            acc: dict[int, float] = {}
            for t, p in model.actions[s][choice[s]].branches:
                acc[t] = acc.get(t, 0.0) + p
            merged = list(acc.items())
            branch_cache[key] = merged
        transitions[s] = merged
    groups: dict = {}
    for j, obj in enumerate(query):
        groups.setdefault((obj.kind, obj.goal), []).append(j)
    values = [0.0] * len(query)
    for (kind, _goal), idxs in groups.items():
        objs = [query[j] for j in idxs]
        if kind is Kind.EXP_REWARD:
            fns = []
            for obj in objs:
                rew = model.rewards[obj.reward]
                fns.append(lambda s, t, rew=rew: rew.get((s, choice[s], t), 0.0))
        else:
            fns = [None] * len(objs)
        group_vals = _objective_group_values(model.initial_state, transitions, objs, fns)
        for j, v in zip(idxs, group_vals):
            values[j] = v
    return tuple(values)


def _solve_many(a_rows, b_cols):
    """Gaussian elimination with partial pivoting and a residual check,
    shared across multiple right-hand sides.

    Tiny systems are solved in pure Python (cheaper than LAPACK dispatch at
    oracle scale); larger ones go through numpy's identically-pivoted solver.
    Returns one solution vector per right-hand side.
    """
    n = len(a_rows)
    k = len(b_cols)
    if n == 0:
        return [[] for _ in range(k)]
    if n > 8:
        a = np.asarray(a_rows, dtype=np.float64)
        b = np.asarray(b_cols, dtype=np.float64).T
        x = np.linalg.solve(a, b)
        residual = np.abs(a @ x - b).max(initial=0.0)
        scale = max(1.0, np.abs(b).max(initial=0.0), np.abs(x).max(initial=0.0))
        if residual > _RESIDUAL_TOL * scale:
            raise RuntimeError(f"linear solve residual {residual:.3e} exceeds tolerance")
        return [x[:, j].tolist() for j in range(k)]
    a = [row[:] for row in a_rows]
    b = [list(col) for col in b_cols]
    for col in range(n):
        piv = col
        best = abs(a[col][col])
        for r in range(col + 1, n):
            mag = abs(a[r][col])
            if mag > best:
                best = mag
                piv = r
        if best == 0.0:
            raise RuntimeError("singular linear system")
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            for bc in b:
                bc[col], bc[piv] = bc[piv], bc[col]
        inv = 1.0 / a[col][col]
        arow_c = a[col]
        for r in range(col + 1, n):
            f = a[r][col] * inv
            if f != 0.0:
                arow = a[r]
                for c in range(col, n):
                    arow[c] -= f * arow_c[c]
                for bc in b:
                    bc[r] -= f * bc[col]
    xs = []
    for bc in b:
        x = [0.0] * n
        for r in range(n - 1, -1, -1):
            s = bc[r]
            arow = a[r]
            for c in range(r + 1, n):
                s -= arow[c] * x[c]
            x[r] = s / arow[r]
        xs.append(x)
    scale = 1.0
    residual = 0.0
    for x, orig_b in zip(xs, b_cols):
        for row, rhs in zip(a_rows, orig_b):
            s = 0.0
            for c, v in zip(row, x):
                s += c * v
            residual = max(residual, abs(s - rhs))
            scale = max(scale, abs(rhs))
        for v in x:
            scale = max(scale, abs(v))
    if residual > _RESIDUAL_TOL * scale:
        raise RuntimeError(f"linear solve residual {residual:.3e} exceeds tolerance")
    return xs


def _objective_group_values(initial, transitions, objectives, reward_fns) -> list[float]:
    """Exact values for objectives sharing one kind and goal set: the linear
    system matrix is shared, only the right-hand sides differ.

    `transitions` maps state -> [(target, prob)] for every state reachable
    from `initial`; `reward_fns[j](s, t)` gives objective j's branch reward
    (expected-reward groups only)."""
    kind = objectives[0].kind
    goal = objectives[0].goal
    if initial in goal:
        return [1.0 if kind is Kind.PROB_REACH else 0.0] * len(objectives)
    reachable = sorted(transitions)
    inside = set(reachable)
    preds: dict[int, list[int]] = {s: [] for s in reachable}
    for s in reachable:
        for t, _p in transitions[s]:
            if t in inside:
                preds[t].append(s)
    can_reach = set(g for g in goal if g in inside)
    stack = list(can_reach)
    while stack:
        s = stack.pop()
        for p in preds[s]:
            if p not in can_reach:
                can_reach.add(p)
                stack.append(p)
    if kind is Kind.EXP_REWARD:
        missing = [s for s in reachable if s not in can_reach]
        if missing:
            raise IllFormedObjectiveError(
                f"goal unreachable from chain state(s) {missing[:5]}; "
                "expected reward is infinite"
            )
        interior = [s for s in reachable if s not in goal]
    else:
        if initial not in can_reach:
            return [0.0] * len(objectives)
        interior = [s for s in can_reach if s not in goal]
    index = {s: i for i, s in enumerate(interior)}
    m = len(interior)
    a = [[1.0 if i == j else 0.0 for j in range(m)] for i in range(m)]
    b_cols = [[0.0] * m for _ in objectives]
    for s in interior:
        i = index[s]
        row = a[i]
        for t, p in transitions[s]:
            if kind is Kind.EXP_REWARD:
                for j, reward_of in enumerate(reward_fns):
                    b_cols[j][i] += p * reward_of(s, t)
            elif t in goal:
                for col in b_cols:
                    col[i] += p
            if t in index:
                row[index[t]] -= p
    xs = _solve_many(a, b_cols)
    return [float(x[index[initial]]) for x in xs]


def _objective_value(initial, transitions, reward_of, objective) -> float:
    fns = [reward_of] if objective.kind is Kind.EXP_REWARD else [None]
    return _objective_group_values(initial, transitions, [objective], fns)[0]


def exact_value_dtmc(dtmc: Dtmc, objective) -> float:
    """Exact reachability probability or expected reward on a Markov chain."""
    reachable = _chain_reachable(dtmc)
    transitions = {s: list(dtmc.transitions[s]) for s in reachable}
    if objective.kind is Kind.EXP_REWARD:
        rew = dtmc.rewards[objective.reward]
        reward_of = lambda s, t: rew.get((s, t), 0.0)
    else:
        reward_of = None
    return _objective_value(dtmc.initial_state, transitions, reward_of, objective)


def exact_value(model: Mdp, choice, objective) -> float:
    return exact_value_dtmc(induce_dtmc(model, choice), objective)


def exact_values(model: Mdp, choice, query) -> tuple[float, ...]:
    dtmc = induce_dtmc(model, choice)
    return tuple(exact_value_dtmc(dtmc, obj) for obj in query)


def _action_representatives(model: Mdp):
    """Per state, one action index per distinct (branches, rewards) behaviour.

    Actions with identical branch distributions and identical branch rewards
    induce identical chains, so enumerating one representative (the lowest
    index) per group covers every value vector.
    """
    names = sorted(model.rewards)
    reps = []
    for s, acts in enumerate(model.actions):
        groups: dict = {}
        for ai, act in enumerate(acts):
            sig = (
                act.branches,
                tuple(
                    tuple(model.rewards[name].get((s, ai, t), 0.0) for t, _p in act.branches)
                    for name in names
                ),
            )
            groups.setdefault(sig, ai)
        reps.append(sorted(groups.values()))
    return reps


def _policy_classes(model: Mdp, cap: int):
    """Yield (full action map, reached states) per reachable-support class."""
    reps = _action_representatives(model)
    choice: dict[int, int] = {}
    emitted = 0

    def frontier():
        seen = {model.initial_state}
        stack = [model.initial_state]
        pending = None
        while stack:
            s = stack.pop()
            if s not in choice:
                if pending is None or s < pending:
                    pending = s
                continue
            for t, _p in model.actions[s][choice[s]].branches:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return pending, seen

    frames: list[list[int]] = []  # [state, index into reps[state]]
    while True:
        pending, seen = frontier()
        if pending is None:
            emitted += 1
            if emitted > cap:
                raise EnumerationCapError(f"policy classes exceed the enumeration cap {cap}")
            yield tuple(choice.get(s, 0) for s in range(model.n_states)), seen
        else:
            frames.append([pending, 0])
            choice[pending] = reps[pending][0]
            continue
        # Backtrack to the deepest frame with an untried representative.
        while frames:
            s, r = frames[-1]
            if r + 1 < len(reps[s]):
                frames[-1][1] = r + 1
                choice[s] = reps[s][r + 1]
                break
            del choice[s]
            frames.pop()
        if not frames:
            return


@dataclass
class ExactFront:
    """True Pareto front: hull corners, their witnesses, and all evaluated
    deterministic value vectors."""

    dirs: tuple
    corners: tuple[tuple[float, ...], ...]
    witnesses: tuple[tuple[int, ...], ...]
    points: tuple[tuple[float, ...], ...]

    @property
    def corner_count(self) -> int:
        return len(self.corners)


def exact_pareto_front(model: Mdp, query, cap: int = DEFAULT_ENUMERATION_CAP) -> ExactFront:
    """Evaluate every deterministic strategy and keep the convex Pareto front."""
    dirs = tuple(obj.direction for obj in query)
    if len(dirs) != 2:
        raise UnsupportedDimensionError("the exact front is supported for 2 objectives only")
    points = []
    normalized = []
    witnesses = []
    branch_cache: dict = {}
    for full_choice, reached in _policy_classes(model, cap):
        vals = _support_values(model, full_choice, reached, query, branch_cache)
        points.append(vals)
        normalized.append(normalize(vals, dirs))
        witnesses.append(full_choice)
    order = sorted(range(len(points)), key=lambda i: strategy_rank(model, witnesses[i]))
    points = [points[i] for i in order]
    normalized = [normalized[i] for i in order]
    witnesses = [witnesses[i] for i in order]
    hull, hull_idx = pareto_hull(normalized, list(range(len(points))))
    corners = tuple(normalize(p, dirs) for p in hull)
    return ExactFront(
        dirs,
        corners,
        tuple(witnesses[i] for i in hull_idx),
        tuple(points),
    )
