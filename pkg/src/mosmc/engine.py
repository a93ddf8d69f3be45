"""Batched simulation of the Markov chain induced by one strategy.

The per-run semantics are exactly those of `model.simulate_run`; this module
flattens the induced chain into arrays and runs many seeds through a compiled
kernel. Results are bit-identical to the reference simulator because both
sides draw the same SplitMix64 stream per run and compare against the same
cumulative branch probabilities.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import lss
from .model import Kind, Mdp

try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False


@dataclass
class InducedChain:
    """CSR-style arrays for the chain induced by a fixed action map."""

    initial: int
    offsets: np.ndarray    # int64[n_states + 1]
    targets: np.ndarray    # int64[n_branches]
    cums: np.ndarray       # float64[n_branches], per-state inclusive cumsum
    rewards: np.ndarray    # float64[d, n_branches]; zero rows for prob-reach dims
    goals: np.ndarray      # bool[d, n_states]
    is_exp_reward: np.ndarray  # bool[d]


def build_chain(model: Mdp, action_map, objectives) -> InducedChain:
    n = model.n_states
    d = len(objectives)
    offsets = np.zeros(n + 1, dtype=np.int64)
    for s in range(n):
        offsets[s + 1] = offsets[s] + len(model.actions[s][action_map[s]].branches)
    nb = int(offsets[n])
    targets = np.zeros(nb, dtype=np.int64)
    cums = np.zeros(nb, dtype=np.float64)
    rewards = np.zeros((d, nb), dtype=np.float64)
    goals = np.zeros((d, n), dtype=bool)
    is_exp = np.zeros(d, dtype=bool)
    for k, obj in enumerate(objectives):
        for g in obj.goal:
            goals[k, g] = True
        is_exp[k] = obj.kind is Kind.EXP_REWARD
    for s in range(n):
        ai = int(action_map[s])
        branches = model.actions[s][ai].branches
        base = offsets[s]
        cum = 0.0
        for j, (t, p) in enumerate(branches):
            targets[base + j] = t
            cum += p
            cums[base + j] = cum
            for k, obj in enumerate(objectives):
                if obj.kind is Kind.EXP_REWARD:
                    rewards[k, base + j] = model.rewards[obj.reward].get((s, ai, t), 0.0)
    return InducedChain(model.initial_state, offsets, targets, cums, rewards, goals, is_exp)


def _run_batch_py(initial, offsets, targets, cums, rewards, goals, is_exp, seeds, step_limit,
                  values, steps, truncated, resolved):
    # Reference-equivalent fallback; same arithmetic as the numba kernel.
    mask = lss.MASK64
    n_runs = seeds.shape[0]
    d = goals.shape[0]
    for r in range(n_runs):
        state = initial
        seed = int(seeds[r])
        count = 0
        n_resolved = 0
        while True:
            count += 1
            for k in range(d):
                if not resolved[r, k] and goals[k, state]:
                    resolved[r, k] = True
                    if not is_exp[k]:
                        values[r, k] = 1.0
                    n_resolved += 1
            if n_resolved == d:
                break
            if count == step_limit:
                truncated[r] = True
                break
            seed = (seed + lss.SPLITMIX_GAMMA) & mask
            z = seed
            z = ((z ^ (z >> 30)) * lss.MIX_MUL_1) & mask
            z = ((z ^ (z >> 27)) * lss.MIX_MUL_2) & mask
            z = z ^ (z >> 31)
            u = (z >> 11) * 2.0 ** -53
            j = offsets[state]
            last = offsets[state + 1] - 1
            while j < last and u >= cums[j]:
                j += 1
            for k in range(d):
                if is_exp[k] and not resolved[r, k]:
                    values[r, k] += rewards[k, j]
            state = targets[j]
        steps[r] = count


if _HAVE_NUMBA:

    @numba.njit(cache=True, nogil=True)
    def _run_batch_nb(initial, offsets, targets, cums, rewards, goals, is_exp, seeds, step_limit,
                      values, steps, truncated, resolved):  # pragma: no cover - covered via wrapper
        gamma = np.uint64(0x9E3779B97F4A7C15)
        mul1 = np.uint64(0xBF58476D1CE4E5B9)
        mul2 = np.uint64(0x94D049BB133111EB)
        scale = 1.0 / 9007199254740992.0
        n_runs = seeds.shape[0]
        d = goals.shape[0]
        for r in range(n_runs):
            state = initial
            seed = seeds[r]
            count = 0
            n_resolved = 0
            while True:
                count += 1
                for k in range(d):
                    if not resolved[r, k] and goals[k, state]:
                        resolved[r, k] = True
                        if not is_exp[k]:
                            values[r, k] = 1.0
                        n_resolved += 1
                if n_resolved == d:
                    break
                if count == step_limit:
                    truncated[r] = True
                    break
                seed = seed + gamma
                z = seed
                z = (z ^ (z >> np.uint64(30))) * mul1
                z = (z ^ (z >> np.uint64(27))) * mul2
                z = z ^ (z >> np.uint64(31))
                u = (z >> np.uint64(11)) * scale
                j = offsets[state]
                last = offsets[state + 1] - 1
                while j < last and u >= cums[j]:
                    j += 1
                for k in range(d):
                    if is_exp[k] and not resolved[r, k]:
                        values[r, k] += rewards[k, j]
                state = targets[j]
            steps[r] = count


def simulate_batch(chain: InducedChain, seeds: np.ndarray, step_limit: int, workers: int = 1):
    """Run one simulation per seed; returns (values, steps, truncated, resolved).

    Output row r depends only on seeds[r], so splitting the batch across
    workers cannot change any result.
    """
    seeds = np.ascontiguousarray(seeds, dtype=np.uint64)
    n = seeds.shape[0]
    d = chain.goals.shape[0]
    values = np.zeros((n, d), dtype=np.float64)
    steps = np.zeros(n, dtype=np.int64)
    truncated = np.zeros(n, dtype=bool)
    resolved = np.zeros((n, d), dtype=bool)
    kernel = _run_batch_nb if _HAVE_NUMBA else _run_batch_py
    args = (chain.initial, chain.offsets, chain.targets, chain.cums, chain.rewards,
            chain.goals, chain.is_exp_reward)
    if workers <= 1 or n < 2 * workers or not _HAVE_NUMBA:
        kernel(*args, seeds, step_limit, values, steps, truncated, resolved)
    else:
        bounds = [(n * w) // workers for w in range(workers + 1)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(kernel, *args, seeds[lo:hi], step_limit,
                            values[lo:hi], steps[lo:hi], truncated[lo:hi], resolved[lo:hi])
                for lo, hi in zip(bounds, bounds[1:])
                if hi > lo
            ]
            for f in futures:
                f.result()
    return values, steps, truncated, resolved
