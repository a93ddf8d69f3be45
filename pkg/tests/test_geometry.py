import itertools
import math

import numpy as np
import pytest

from mosmc import Direction
from mosmc.geometry import (
    FrontApproximation,
    GEOM_TOL,
    UnsupportedDimensionError,
    build_front,
    hypervolume,
    max_gap_direction,
    nondominated_corners,
    normalize,
    optimistic_corner,
    pareto_hull,
    pessimistic_corner,
)
from mosmc.stats import ConfidenceBox

MAXMIN = (Direction.MAX, Direction.MIN)
MAXMAX = (Direction.MAX, Direction.MAX)


def box(mean, half):
    return ConfidenceBox(
        tuple(mean),
        tuple(m - h for m, h in zip(mean, half)),
        tuple(m + h for m, h in zip(mean, half)),
        0.9,
        ("hoeffding",) * len(mean),
    )


class FakeStats:
    def __init__(self, entries):
        self._boxes = dict(entries)

    def boxes(self):
        return self._boxes


# --- normalisation and corners ----------------------------------------------

def test_normalize_negates_min_dims():
    assert normalize((3.4, 112.0), MAXMIN) == (3.4, -112.0)
    assert normalize((3.4, 112.0), MAXMAX) == (3.4, 112.0)


def test_normalize_involution():
    rng = np.random.default_rng(0)
    for _ in range(50):
        p = tuple(rng.normal(size=2))
        assert normalize(normalize(p, MAXMIN), MAXMIN) == p


def test_corners_of_box():
    b = ConfidenceBox((0.85, 10.0), (0.8, 9.0), (0.9, 11.0), 0.9, ("h", "h"))
    assert pessimistic_corner(b, MAXMIN) == (0.8, 11.0)
    assert optimistic_corner(b, MAXMIN) == (0.9, 9.0)


def test_zero_width_box_corners_collapse():
    b = box((1.5, 2.5), (0.0, 0.0))
    assert pessimistic_corner(b, MAXMIN) == optimistic_corner(b, MAXMIN) == (1.5, 2.5)


def test_corner_distance_is_two_eps_root_d():
    eps = 0.3
    b = box((1.0, 2.0), (eps, eps))
    p = pessimistic_corner(b, MAXMIN)
    o = optimistic_corner(b, MAXMIN)
    dist = math.dist(p, o)
    assert dist == pytest.approx(2 * eps * math.sqrt(2))


# --- fronts -------------------------------------------------------------------

def test_single_strategy_front():
    stats = FakeStats({7: box((0.85, 10.0), (0.0, 0.0))})
    front = build_front(stats, MAXMIN, "under")
    assert front.corners == ((0.85, 10.0),)
    assert front.sources == (7,)


def test_six_box_sketch_front():
    # Six confidence boxes in (maximise, minimise) space; the under front is
    # the staircase through the top-left corners, the over front through the
    # bottom-right ones.
    boxes = {
        1: ((-0.25, 25.0), (0.25, 15.0)),
        2: ((0.1, 17.5), (0.1, 2.5)),
        3: ((3.0, 105.0), (0.5, 5.0)),
        4: ((0.55, 45.0), (0.25, 5.0)),
        5: ((1.1, 38.5), (0.1, 1.5)),
        6: ((2.35, 75.0), (0.45, 5.0)),
    }
    stats = FakeStats({k: box(m, h) for k, (m, h) in boxes.items()})
    under = build_front(stats, MAXMIN, "under")
    np.testing.assert_allclose(
        under.corners, [(0.0, 20.0), (1.0, 40.0), (1.9, 80.0), (2.5, 110.0)], atol=1e-12)
    assert under.sources == (2, 5, 6, 3)
    over = build_front(stats, MAXMIN, "over")
    np.testing.assert_allclose(
        over.corners, [(0.0, 10.0), (2.8, 70.0), (3.5, 100.0)], atol=1e-12)
    assert over.sources == (1, 6, 3)


def test_collinear_middle_corner_dropped():
    stats = FakeStats({
        1: box((0.0, 2.0), (0.0, 0.0)),
        2: box((1.0, 1.0), (0.0, 0.0)),
        3: box((2.0, 0.0), (0.0, 0.0)),
    })
    front = build_front(stats, MAXMAX, "under")
    assert front.corners == ((0.0, 2.0), (2.0, 0.0))
    # Brute-force confirmation: hull area identical with and without point 2.
    full = pareto_hull([(0.0, 2.0), (1.0, 1.0), (2.0, 0.0)])[0]
    sub = pareto_hull([(0.0, 2.0), (2.0, 0.0)])[0]
    assert full == sub


def test_front_rejects_other_dimensions():
    stats = FakeStats({1: ConfidenceBox((1.0,) * 3, (0.9,) * 3, (1.1,) * 3, 0.9, ("h",) * 3)})
    with pytest.raises(UnsupportedDimensionError):
        build_front(stats, (Direction.MAX,) * 3, "under")
    pts = nondominated_corners(stats, (Direction.MAX,) * 3, "under")
    assert pts == [(1, (0.9, 0.9, 0.9))]


def test_under_front_monotone_under_extra_strategies():
    rng = np.random.default_rng(42)
    for _ in range(25):
        entries = {i: box(rng.uniform(0, 1, 2), rng.uniform(0, 0.2, 2)) for i in range(12)}
        small = FakeStats(dict(list(entries.items())[:6]))
        big = FakeStats(entries)
        ref = (-1.0, -1.0)
        hv_small = hypervolume(build_front(small, MAXMAX, "under"), ref)
        hv_big = hypervolume(build_front(big, MAXMAX, "under"), ref)
        assert hv_big >= hv_small - GEOM_TOL


def test_pessimistic_corners_dominated_by_front():
    rng = np.random.default_rng(11)
    entries = {i: box(rng.uniform(0, 1, 2), rng.uniform(0, 0.2, 2)) for i in range(30)}
    stats = FakeStats(entries)
    front = build_front(stats, MAXMAX, "under")
    xs = [c[0] for c in front.corners]
    ys = [c[1] for c in front.corners]
    for b in entries.values():
        px, py = pessimistic_corner(b, MAXMAX)
        assert px <= xs[-1] + GEOM_TOL
        envelope = np.interp(px, xs, ys) if xs[0] <= px else ys[0]
        assert py <= envelope + 1e-9


# --- hypervolume ---------------------------------------------------------------

def test_hv_unit_square():
    front = FrontApproximation("under", MAXMAX, ((1.0, 1.0),), (0,))
    assert hypervolume(front, (0.0, 0.0)) == pytest.approx(1.0)


def test_hv_triangle():
    front = FrontApproximation("under", MAXMAX, ((0.0, 1.0), (1.0, 0.0)), (0, 1))
    assert hypervolume(front, (0.0, 0.0)) == pytest.approx(0.5)


def test_hv_true_front_of_paper_example():
    # Trapezoid decomposition by hand: integrating (120 - front(x)) over
    # x in [0, 3.4] gives 408 - 4.25 - 155.55 = 248.2.
    front = FrontApproximation(
        "exact", MAXMIN, ((0.0, 0.0), (0.85, 10.0), (3.4, 112.0)), (0, 1, 2))
    assert hypervolume(front, (0.0, 120.0)) == pytest.approx(248.2)


def test_hv_matches_monte_carlo_on_random_fronts():
    rng = np.random.default_rng(3)
    for _ in range(5):
        pts = [tuple(rng.uniform(0.2, 1.0, 2)) for _ in range(8)]
        hull, src = pareto_hull(pts, list(range(len(pts))))
        front = FrontApproximation("under", MAXMAX, tuple(hull), tuple(src))
        ref = (0.0, 0.0)
        exact = hypervolume(front, ref)
        samples = rng.uniform(0.0, 1.0, size=(1_000_000, 2))
        xs = np.array([c[0] for c in hull])
        ys = np.array([c[1] for c in hull])
        env = np.interp(samples[:, 0], xs, ys, left=ys[0], right=-np.inf)
        mc = (samples[:, 1] <= env).mean()
        assert exact == pytest.approx(mc, rel=0.01)


def test_hv_rejects_undominated_reference():
    front = FrontApproximation("under", MAXMAX, ((1.0, 1.0),), (0,))
    with pytest.raises(ValueError, match="reference"):
        hypervolume(front, (2.0, 0.0))


def test_hv_empty_front_warns_zero():
    front = FrontApproximation("under", MAXMAX, (), ())
    with pytest.warns(UserWarning):
        assert hypervolume(front, (0.0, 0.0)) == 0.0


def test_hv_strictly_monotone_on_nested_fronts():
    inner = FrontApproximation("under", MAXMAX, ((0.5, 0.4),), (0,))
    outer = FrontApproximation("under", MAXMAX, ((0.6, 0.5),), (0,))
    ref = (0.0, 0.0)
    assert hypervolume(outer, ref) > hypervolume(inner, ref)


# --- max-gap weight direction ---------------------------------------------------

def test_max_gap_degenerate_identical_points():
    f = FrontApproximation("under", MAXMAX, ((1.0, 1.0),), (0,))
    g = FrontApproximation("over", MAXMAX, ((1.0, 1.0),), (0,))
    assert max_gap_direction(f, g) == (0.5, 0.5)


def test_max_gap_purely_vertical():
    under = FrontApproximation("under", MAXMAX, ((0.0, 0.0),), (0,))
    over = FrontApproximation("over", MAXMAX, ((0.0, 1.0),), (0,))
    assert max_gap_direction(under, over) == (0.0, 1.0)


def test_max_gap_three_corner_fixture():
    # Exhaustive facet-distance enumeration done by hand: the middle facet
    # from (0,2) to (2,0) has unit normal (1,1)/sqrt(2) and carries the over
    # corner (2,2) at distance 2*sqrt(2) > 1 (the two boundary rays see at
    # most 1.0), so the returned direction is (1/2, 1/2).
    under = FrontApproximation("under", MAXMAX, ((0.0, 2.0), (2.0, 0.0)), (0, 1))
    over = FrontApproximation("over", MAXMAX, ((0.0, 3.0), (2.0, 2.0), (3.0, 0.0)), (0, 1, 2))
    w = max_gap_direction(under, over)
    assert w == pytest.approx((0.5, 0.5))


def test_max_gap_tie_prefers_first_facet():
    # Both rays see the same gap; the left ray (facet 0) wins the tie.
    under = FrontApproximation("under", MAXMAX, ((0.0, 0.0),), (0,))
    over = FrontApproximation("over", MAXMAX, ((1.0, 1.0),), (0,))
    assert max_gap_direction(under, over) == (0.0, 1.0)


# --- round trips -----------------------------------------------------------------

def test_normalize_round_trip_preserves_front(tmp_path):
    from mosmc.geometry import read_front_csv, write_front_csv

    front = FrontApproximation(
        "under", MAXMIN, ((0.0, 0.0), (0.85, 10.0), (3.4, 112.0)), (5, 6, 7))
    path = tmp_path / "front.csv"
    write_front_csv(path, [front])
    back = read_front_csv(path, MAXMIN)
    assert len(back) == 1
    assert back[0].corners == front.corners
    assert back[0].sources == front.sources
