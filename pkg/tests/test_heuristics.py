import numpy as np
import pytest

from mosmc import Direction
from mosmc.heuristics import Rule, excludes, pair_excludes, select_candidates
from mosmc.stats import ConfidenceBox

MAXMIN = (Direction.MAX, Direction.MIN)
ALL_RULES = list(Rule)


def box(mean, half):
    return ConfidenceBox(
        tuple(mean),
        tuple(m - h for m, h in zip(mean, half)),
        tuple(m + h for m, h in zip(mean, half)),
        0.9,
        ("hoeffding",) * len(mean),
    )


# Each sketch gives (candidate mean/half-widths, witness mean/half-widths) in
# (maximise, minimise) space plus the set of rules that fire.
SKETCHES = {
    "overlapping":      (((3.3, 4.6), (1.6, 2.5)), ((5.4, 3.0), (2.6, 2.0)),
                         {Rule.SIMPLE}),
    "far_enough":       (((3.6, 5.5), (3.0, 1.2)), ((6.0, 3.0), (1.4, 2.8)),
                         {Rule.SIMPLE, Rule.FE}),
    "far_from_excl":    (((2.6, 5.8), (1.3, 1.4)), ((5.0, 3.3), (2.7, 2.9)),
                         {Rule.SIMPLE, Rule.FE, Rule.FFE}),
    "far_from_witness": (((3.6, 4.5), (2.7, 2.8)), ((5.8, 2.1), (1.3, 1.2)),
                         {Rule.SIMPLE, Rule.FE, Rule.FFW}),
    "far_from_each":    (((3.4, 5.5), (1.6, 1.9)), ((6.0, 2.5), (1.5, 1.9)),
                         {Rule.SIMPLE, Rule.FE, Rule.FFE, Rule.FFW, Rule.FFEO}),
    "conservatively":   (((2.6, 5.5), (1.3, 1.2)), ((6.5, 1.9), (1.3, 1.1)),
                         set(ALL_RULES)),
}


@pytest.mark.parametrize("name", sorted(SKETCHES))
def test_rule_matrix_on_sketches(name):
    (cm, ch), (wm, wh), firing = SKETCHES[name]
    cand, wit = box(cm, ch), box(wm, wh)
    for rule in ALL_RULES:
        assert pair_excludes(rule, cand, wit, MAXMIN) == (rule in firing), (name, rule)


def test_min_dimension_is_mirrored():
    # Same geometry reflected: flipping the minimised dimension's sign and
    # direction must not change any verdict.
    for (cm, ch), (wm, wh), firing in SKETCHES.values():
        cand = box((cm[0], -cm[1]), ch)
        wit = box((wm[0], -wm[1]), wh)
        for rule in ALL_RULES:
            got = pair_excludes(rule, cand, wit, (Direction.MAX, Direction.MAX))
            assert got == (rule in firing)


def test_equal_means_tie_break_keeps_one():
    a = box((1.0, 2.0), (0.0, 0.0))
    b = box((1.0, 2.0), (0.0, 0.0))
    for rule in ALL_RULES:
        assert excludes(rule, 5, a, 3, b, MAXMIN)       # witness id 3 < 5
        assert not excludes(rule, 3, a, 5, b, MAXMIN)   # not the other way
    survivors = select_candidates(Rule.SIMPLE, {3: a, 5: b}, MAXMIN)
    assert survivors == [3]


def test_dimension_mismatch_rejected():
    a = box((1.0, 2.0), (0.1, 0.1))
    b = ConfidenceBox((1.0,), (0.9,), (1.1,), 0.9, ("h",))
    with pytest.raises(ValueError, match="dimension"):
        pair_excludes(Rule.SIMPLE, a, b, MAXMIN)


def test_select_on_oracle_exact_mr_values():
    # Zero-width boxes at the four deterministic strategy values: the two
    # stop variants collapse onto (0,0) and the tie-break keeps one of them.
    stats = {
        0: box((3.4, 112.0), (0.0, 0.0)),   # write + subm
        1: box((0.85, 10.0), (0.0, 0.0)),   # write + arch
        2: box((0.0, 0.0), (0.0, 0.0)),     # stop (subm shadow)
        3: box((0.0, 0.0), (0.0, 0.0)),     # stop (arch shadow)
    }
    assert select_candidates(Rule.SIMPLE, stats, MAXMIN) == [0, 1, 2]


def test_select_empty_stats():
    assert select_candidates(Rule.SIMPLE, {}, MAXMIN) == []


def test_select_huge_widths_keep_everyone():
    rng = np.random.default_rng(0)
    stats = {i: box(rng.uniform(0, 1, 2), (50.0, 50.0)) for i in range(8)}
    assert select_candidates(Rule.CF, stats, MAXMIN) == list(range(8))


def _random_stats(rng, k=10):
    return {
        i: box(rng.uniform(0.0, 1.0, 2), rng.uniform(0.0, 0.3, 2))
        for i in range(k)
    }


def _excluded_sets(stats, dirs):
    out = {}
    for rule in ALL_RULES:
        kept = set(select_candidates(rule, stats, dirs))
        out[rule] = set(stats) - kept
    return out


def test_exclusion_lattice_on_random_maps():
    # Pair-level: cf => ffeo <=> (ffe and ffw) => fe => simple, per witness.
    # Set-level: every subset relation of the chain; the ffeo identity only
    # one-directional because the two witnesses may differ.
    rng = np.random.default_rng(2024)
    dirs_pool = [(Direction.MAX, Direction.MAX), MAXMIN,
                 (Direction.MIN, Direction.MIN), (Direction.MIN, Direction.MAX)]
    for trial in range(300):
        dirs = dirs_pool[trial % 4]
        stats = _random_stats(rng)
        for i in stats:
            for j in stats:
                if i == j:
                    continue
                fire = {r: pair_excludes(r, stats[i], stats[j], dirs) for r in ALL_RULES}
                assert not fire[Rule.CF] or fire[Rule.FFEO]
                assert fire[Rule.FFEO] == (fire[Rule.FFE] and fire[Rule.FFW])
                assert not fire[Rule.FFE] or fire[Rule.FE]
                assert not fire[Rule.FFW] or fire[Rule.FE]
                assert not fire[Rule.FE] or fire[Rule.SIMPLE]
        excl = _excluded_sets(stats, dirs)
        assert excl[Rule.CF] <= excl[Rule.FFEO]
        assert excl[Rule.FFEO] <= excl[Rule.FFE] & excl[Rule.FFW]
        assert excl[Rule.FFE] <= excl[Rule.FE]
        assert excl[Rule.FFW] <= excl[Rule.FE]
        assert excl[Rule.FE] <= excl[Rule.SIMPLE]


def test_select_is_idempotent_and_nonempty():
    rng = np.random.default_rng(55)
    for _ in range(100):
        stats = _random_stats(rng, k=8)
        for rule in ALL_RULES:
            first = select_candidates(rule, stats, MAXMIN)
            assert first, rule
            again = select_candidates(rule, {i: stats[i] for i in first}, MAXMIN)
            assert again == first


def test_select_order_independent():
    rng = np.random.default_rng(9)
    stats = _random_stats(rng)
    reversed_stats = dict(reversed(list(stats.items())))
    assert (select_candidates(Rule.FE, stats, MAXMIN)
            == select_candidates(Rule.FE, reversed_stats, MAXMIN))
