import itertools

import numpy as np
import pytest

import mosmc
from mosmc import Direction, Kind, Objective, benchmarks
from mosmc.geometry import normalize, pareto_hull
from mosmc.oracle import (
    EnumerationCapError,
    IllFormedObjectiveError,
    enumerate_strategies,
    exact_pareto_front,
    exact_value,
    exact_values,
    strategy_rank,
)


def test_enumerate_mr_strategies(mr):
    strategies = list(enumerate_strategies(mr.mdp))
    assert len(strategies) == 4  # 2 choices at init x 2 at paper
    assert strategies[0] == (0, 0, 0)
    assert strategies == sorted(strategies)


def test_enumerate_single_action_model():
    bundle = benchmarks.gen_exponential(1)
    single = mosmc.Mdp(0, ((mosmc.Action("a", ((0, 1.0),)),),), {})
    assert list(enumerate_strategies(single)) == [(0,)]
    assert len(list(enumerate_strategies(bundle.mdp))) == 2


def test_enumerate_exponential_depth_3():
    bundle = benchmarks.gen_exponential(3)
    assert len(list(enumerate_strategies(bundle.mdp))) == 128  # 2^7 internal states


def test_enumerate_cap():
    bundle = benchmarks.gen_exponential(3)
    with pytest.raises(EnumerationCapError):
        list(enumerate_strategies(bundle.mdp, cap=100))


def test_exact_values_mr(mr):
    assert exact_values(mr.mdp, (0, 0, 0), mr.query()) == pytest.approx((3.4, 112.0))
    assert exact_values(mr.mdp, (0, 1, 0), mr.query()) == pytest.approx((0.85, 10.0))
    assert exact_values(mr.mdp, (1, 0, 0), mr.query()) == pytest.approx((0.0, 0.0))


def test_exact_value_prob_reach(mr):
    reach_paper = Objective(Kind.PROB_REACH, Direction.MAX, frozenset({1}))
    assert exact_value(mr.mdp, (0, 0, 0), reach_paper) == pytest.approx(0.85)
    assert exact_value(mr.mdp, (1, 0, 0), reach_paper) == 0.0


def test_exact_value_rejects_unreachable_goal(mr):
    # Under 'stop' the paper state is never reached, so expected reward to it
    # is infinite.
    to_paper = Objective(Kind.EXP_REWARD, Direction.MAX, frozenset({1}), "rec")
    with pytest.raises(IllFormedObjectiveError):
        exact_value(mr.mdp, (1, 0, 0), to_paper)


def test_exact_front_mr(mr):
    front = exact_pareto_front(mr.mdp, mr.query())
    expected = ((0.0, 0.0), (0.85, 10.0), (3.4, 112.0))
    assert len(front.corners) == 3
    for corner, want in zip(front.corners, expected):
        assert corner == pytest.approx(want, abs=1e-9)
    # Witness of the best-recognition corner plays write + subm.
    assert front.witnesses[-1][0] == 0 and front.witnesses[-1][1] == 0


def test_exact_front_exponential_depth2_golden():
    bundle = benchmarks.gen_exponential(2)
    front = exact_pareto_front(bundle.mdp, bundle.query())
    golden = ((1.15, 0.5275), (1.29, 0.3525), (1.5175, -0.054375), (1.675, -0.40875))
    assert len(front.corners) == len(golden)
    for corner, want in zip(front.corners, golden):
        assert corner == pytest.approx(want, abs=1e-12)
    # The construction note promises 2^(depth-1) Pareto-optimal deterministic
    # strategies; with this state numbering the enumeration finds 4 hull
    # corners (8 non-dominated vectors) instead of 2: recorded, not patched.
    assert front.corner_count == 4


def test_exact_front_exponential_depth3_golden_file():
    # Frozen oracle output; also records the gap to the 2^(depth-1)
    # Pareto-optimal-strategies estimate under this state numbering (8 hull
    # corners, not 4).
    import json
    import pathlib

    golden = json.loads((pathlib.Path(__file__).parent / "data"
                         / "exponential_d3_front.json").read_text())
    bundle = benchmarks.gen_exponential(3)
    front = exact_pareto_front(bundle.mdp, bundle.query())
    assert len(front.corners) == len(golden["corners"]) == 8
    for corner, want in zip(front.corners, golden["corners"]):
        assert corner == pytest.approx(tuple(want), abs=1e-12)
    assert [list(w) for w in front.witnesses] == golden["witnesses"]


def test_exact_front_against_brute_force(mr):
    # Independent route: enumerate all action maps, evaluate via induce_dtmc,
    # hull over the normalized points.
    dirs = mosmc.directions(mr.query())
    pts = []
    for choice in itertools.product(range(2), range(2), range(1)):
        pts.append(normalize(exact_values(mr.mdp, choice, mr.query()), dirs))
    hull, _src = pareto_hull(pts)
    front = exact_pareto_front(mr.mdp, mr.query())
    got = [normalize(c, dirs) for c in front.corners]
    assert np.allclose(sorted(hull), sorted(got))


def test_all_points_dominated_by_front():
    bundle = benchmarks.gen_deep_sea("deterministic", benchmarks.TOY_GRID)
    front = exact_pareto_front(bundle.mdp, bundle.query())
    dirs = mosmc.directions(bundle.query())
    corners = [normalize(c, dirs) for c in front.corners]
    xs = [c[0] for c in corners]
    ys = [c[1] for c in corners]
    for p in front.points:
        x, y = normalize(p, dirs)
        assert x <= xs[-1] + 1e-9
        env = np.interp(x, xs, ys) if x >= xs[0] else ys[0]
        assert y <= env + 1e-9


def test_front_invariant_under_state_permutation(mr):
    # Swap states 0 and 1 everywhere; corners must be unchanged.
    perm = {0: 1, 1: 0, 2: 2}
    actions = [None, None, None]
    for s, acts in enumerate(mr.mdp.actions):
        actions[perm[s]] = tuple(
            mosmc.Action(a.name, tuple((perm[t], p) for t, p in a.branches)) for a in acts
        )
    rewards = {
        name: {(perm[s], ai, perm[t]): v for (s, ai, t), v in entries.items()}
        for name, entries in mr.mdp.rewards.items()
    }
    permuted = mosmc.Mdp(perm[mr.mdp.initial_state], tuple(actions), rewards)
    query = tuple(
        Objective(o.kind, o.direction, frozenset(perm[g] for g in o.goal), o.reward, o.bounds)
        for o in mr.query()
    )
    a = exact_pareto_front(mr.mdp, mr.query())
    b = exact_pareto_front(permuted, query)
    assert np.allclose(a.corners, b.corners)


def test_strategy_rank_roundtrip(mr):
    ranks = [strategy_rank(mr.mdp, c) for c in enumerate_strategies(mr.mdp)]
    assert ranks == [0, 1, 2, 3]


def test_deep_sea_toy_front_one_corner_per_treasure():
    bundle = benchmarks.gen_deep_sea("deterministic", benchmarks.TOY_GRID)
    front = exact_pareto_front(bundle.mdp, bundle.query())
    assert len(front.corners) == 3
    fuels = sorted(c[0] for c in front.corners)
    values = sorted(c[1] for c in front.corners)
    assert fuels == [1.0, 3.0, 5.0]     # column + depth moves
    assert values == [1.0, 3.0, 4.0]


def test_racetrack_corridor_single_corner():
    bundle = benchmarks.builtin_model("racetrack-corridor")
    front = exact_pareto_front(bundle.mdp, bundle.query())
    assert len(front.corners) == 1
    assert front.corners[0][1] == 0.0  # no puddles anywhere


def test_racetrack_shortcut_two_corners():
    bundle = benchmarks.builtin_model("racetrack-shortcut")
    front = exact_pareto_front(bundle.mdp, bundle.query())
    assert len(front.corners) >= 2
    by_fuel = sorted(front.corners)
    # Fast route: one slip-retry at the start then straight through the
    # puddle (fuel 1/0.9 + 1, penalty exactly 1); clean route pays more fuel.
    assert by_fuel[0] == pytest.approx((1 / 0.9 + 1.0, 1.0))
    assert by_fuel[-1][1] == 0.0
    assert by_fuel[-1][0] > by_fuel[0][0]
