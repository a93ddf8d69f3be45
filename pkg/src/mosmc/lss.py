"""Lightweight strategy sampling: hashing 32-bit strategy identifiers into
deterministic memoryless strategies, plus seeded id and run-seed streams.

The action hash is FNV-1a (64 bit) over the little-endian 4-byte encodings of
the strategy id followed by the 4-byte state index, finished with the
SplitMix64 avalanche mix (constants 0xBF58476D1CE4E5B9 / 0x94D049BB133111EB,
shifts 30/27/31) to repair FNV's weak low bits before the modulo reduction.
All arithmetic is modulo 2**64, so the mapping is bit-exact across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MASK64 = (1 << 64) - 1
FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3

SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
MIX_MUL_1 = 0xBF58476D1CE4E5B9
MIX_MUL_2 = 0x94D049BB133111EB

# Phase tags keep heuristic-phase and evaluation-phase run seeds disjoint.
PHASE_HEURISTIC = 0
PHASE_EVAL = 1


def mix64(z: int) -> int:
    """SplitMix64 finaliser; full-avalanche permutation of 64-bit words."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX_MUL_1) & MASK64
    z = ((z ^ (z >> 27)) * MIX_MUL_2) & MASK64
    return z ^ (z >> 31)


def fnv1a64(data: bytes) -> int:
    h = FNV_OFFSET
    for b in data:
        h = ((h ^ b) * FNV_PRIME) & MASK64
    return h


def hash64(data: bytes) -> int:
    return mix64(fnv1a64(data))


def lss_action(sigma: int, state: int, k: int) -> int:
    """Action index in [0, k) chosen by strategy id `sigma` in `state`.

    Pure and total: repeated calls always agree, so for a fixed sigma the
    map state -> action is a deterministic memoryless strategy.
    """
    if k < 1:
        raise ValueError("need at least one enabled action")
    data = (sigma & 0xFFFFFFFF).to_bytes(4, "little") + (state & 0xFFFFFFFF).to_bytes(4, "little")
    return hash64(data) % k


def action_map(sigma: int, action_counts: np.ndarray) -> np.ndarray:
    """Vectorised lss_action over all states of a model.

    `action_counts[s]` is |A(s)|; the result is an int64 array of chosen
    action indices, identical to calling lss_action per state.
    """
    counts = np.asarray(action_counts, dtype=np.uint64)
    n = counts.shape[0]
    # FNV prefix over the 4 sigma bytes is state-independent.
    h0 = FNV_OFFSET
    for b in (sigma & 0xFFFFFFFF).to_bytes(4, "little"):
        h0 = ((h0 ^ b) * FNV_PRIME) & MASK64
    h = np.full(n, h0, dtype=np.uint64)
    states = np.arange(n, dtype=np.uint64)
    prime = np.uint64(FNV_PRIME)
    with np.errstate(over="ignore"):
        for shift in (0, 8, 16, 24):
            byte = (states >> np.uint64(shift)) & np.uint64(0xFF)
            h = (h ^ byte) * prime
        h = (h ^ (h >> np.uint64(30))) * np.uint64(MIX_MUL_1)
        h = (h ^ (h >> np.uint64(27))) * np.uint64(MIX_MUL_2)
        h = h ^ (h >> np.uint64(31))
        chosen = h % counts
    return chosen.astype(np.int64)


class SplitMix64:
    """Tiny deterministic PRNG; one 64-bit output per step."""

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + SPLITMIX_GAMMA) & MASK64
        return mix64(self._state)

    def next_u32(self) -> int:
        return self.next_u64() & 0xFFFFFFFF

    def next_float(self) -> float:
        # 53-bit mantissa in [0, 1); exact power-of-two scaling.
        return (self.next_u64() >> 11) * 2.0 ** -53


@dataclass
class StrategySampler:
    """Stream of strategy identifiers drawn from a seeded PRNG.

    With the same strategy seed the emitted id sequence is identical across
    runs. The duplicate filter (on by default) skips ids seen earlier in the
    stream so batches consist of distinct strategies.
    """

    seed: int
    skip_duplicates: bool = True
    _rng: SplitMix64 = field(init=False, repr=False)
    _seen: set = field(init=False, repr=False, default_factory=set)

    def __post_init__(self):
        self._rng = SplitMix64(self.seed)

    def sample(self, count: int) -> list[int]:
        if count < 1:
            raise ValueError("count must be >= 1")
        out = []
        while len(out) < count:
            sigma = self._rng.next_u32()
            if self.skip_duplicates:
                if sigma in self._seen:
                    continue
                self._seen.add(sigma)
            out.append(sigma)
        return out


def run_seed(simulation_seed: int, phase: int, sigma: int, index: int) -> int:
    """Per-run seed: hash of (global seed, phase tag, strategy id, run index)."""
    data = (
        (simulation_seed & MASK64).to_bytes(8, "little")
        + bytes([phase & 0xFF])
        + (sigma & 0xFFFFFFFF).to_bytes(4, "little")
        + (index & MASK64).to_bytes(8, "little")
    )
    return hash64(data)


def run_seeds(simulation_seed: int, phase: int, sigma: int, start: int, count: int) -> np.ndarray:
    """Vectorised run_seed for indices start .. start+count-1 (uint64 array)."""
    prefix = FNV_OFFSET
    data = (
        (simulation_seed & MASK64).to_bytes(8, "little")
        + bytes([phase & 0xFF])
        + (sigma & 0xFFFFFFFF).to_bytes(4, "little")
    )
    for b in data:
        prefix = ((prefix ^ b) * FNV_PRIME) & MASK64
    idx = np.arange(start, start + count, dtype=np.uint64)
    h = np.full(count, prefix, dtype=np.uint64)
    prime = np.uint64(FNV_PRIME)
    with np.errstate(over="ignore"):
        for shift in range(0, 64, 8):
            byte = (idx >> np.uint64(shift)) & np.uint64(0xFF)
            h = (h ^ byte) * prime
        h = (h ^ (h >> np.uint64(30))) * np.uint64(MIX_MUL_1)
        h = (h ^ (h >> np.uint64(27))) * np.uint64(MIX_MUL_2)
        h = h ^ (h >> np.uint64(31))
    return h


@dataclass(frozen=True)
class SeedContext:
    """Derives per-run simulation seeds from one global seed.

    The (phase, sigma, run index) triple is folded through the lss hash, so
    heuristic-phase and evaluation-phase sampling never share a seed and
    parallel execution can assign runs to workers in any order.
    """

    simulation_seed: int

    def seeds(self, phase: int, sigma: int, start: int, count: int) -> np.ndarray:
        return run_seeds(self.simulation_seed, phase, sigma, start, count)
