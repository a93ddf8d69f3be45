"""Corner extraction, convex under/over-approximations of a Pareto front in
two dimensions, hypervolume, and the max-gap weight direction.

Everything works in a normalised all-maximise space: minimised dimensions
are negated up front, so the front is always the upper-right convex chain
and the region it bounds (together with the two axis-parallel boundary rays
extending from the extreme corners) is the approximation of the achievable
set. Geometric tolerance is 1e-12: near-identical corners are merged and
collinear chain points dropped.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

from .model import Direction

GEOM_TOL = 1e-12


class UnsupportedDimensionError(ValueError):
    pass


def normalize(point, dirs):
    """Negate minimised dimensions; involutive."""
    if len(point) != len(dirs):
        raise ValueError("point/direction length mismatch")
    return tuple(-x if d is Direction.MIN else x for x, d in zip(point, dirs))


def pessimistic_corner(box, dirs):
    """Box corner that is worst in every objective's direction."""
    return tuple(
        (l if d is Direction.MAX else u)
        for l, u, d in zip(box.lowers, box.uppers, dirs)
    )


def optimistic_corner(box, dirs):
    return tuple(
        (u if d is Direction.MAX else l)
        for l, u, d in zip(box.lowers, box.uppers, dirs)
    )


@dataclass(frozen=True)
class FrontApproximation:
    """Convex corner chain bounding the achievable set from one side.

    Corners are in original (un-normalised) coordinates, ordered so that the
    first normalised dimension strictly increases along the chain; `sources`
    gives the strategy id behind each corner (-1 for synthetic points).
    """

    kind: str                     # "under" | "over" | "exact"
    dirs: tuple[Direction, ...]
    corners: tuple[tuple[float, ...], ...]
    sources: tuple[int, ...]

    @property
    def is_empty(self) -> bool:
        return len(self.corners) == 0

    def normalized_corners(self):
        return [normalize(c, self.dirs) for c in self.corners]


def pareto_hull(points, sources=None):
    """Upper-right convex chain of 2-D points in normalised max-space.

    Dominated and near-duplicate points are removed first, then the chain is
    convexified (collinear middles dropped). Returns (points, sources) with
    the first coordinate strictly increasing.
    """
    if sources is None:
        sources = [-1] * len(points)
    items = sorted(zip(points, sources), key=lambda e: (e[0][0], e[0][1]))
    merged = []
    for p, src in items:
        if merged and abs(p[0] - merged[-1][0][0]) <= GEOM_TOL and abs(p[1] - merged[-1][0][1]) <= GEOM_TOL:
            continue
        merged.append((p, src))
    # Pareto-maximal scan: walk x descending, keep strictly improving y.
    nondom = []
    best_y = -float("inf")
    for p, src in sorted(merged, key=lambda e: (-e[0][0], -e[0][1])):
        if p[1] > best_y:
            nondom.append((p, src))
            best_y = p[1]
    nondom.reverse()
    chain: list = []
    for p, src in nondom:
        while len(chain) >= 2:
            o, a = chain[-2][0], chain[-1][0]
            cross = (a[0] - o[0]) * (p[1] - o[1]) - (a[1] - o[1]) * (p[0] - o[0])
            if cross >= -GEOM_TOL:
                chain.pop()
            else:
                break
        chain.append((p, src))
    return [p for p, _ in chain], [s for _, s in chain]


def build_front(stats, dirs, kind: str) -> FrontApproximation:
    """Convex front of the pessimistic (under) or optimistic (over) corners
    of every strategy's confidence box. Only d = 2 supports the hull; use
    nondominated_corners for higher dimensions."""
    if len(dirs) != 2:
        raise UnsupportedDimensionError(
            f"convex fronts are supported for 2 objectives, not {len(dirs)}; "
            "use nondominated_corners for the unclosed corner set"
        )
    corner_of = pessimistic_corner if kind == "under" else optimistic_corner
    pts, srcs = [], []
    for sigma, box in sorted(stats.boxes().items()):
        pts.append(normalize(corner_of(box, dirs), dirs))
        srcs.append(sigma)
    hull, hull_src = pareto_hull(pts, srcs)
    corners = tuple(normalize(p, dirs) for p in hull)
    return FrontApproximation(kind, tuple(dirs), corners, tuple(hull_src))


def nondominated_corners(stats, dirs, kind: str):
    """Non-dominated corner set without convex closure (any dimension)."""
    corner_of = pessimistic_corner if kind == "under" else optimistic_corner
    items = [
        (sigma, normalize(corner_of(box, dirs), dirs))
        for sigma, box in sorted(stats.boxes().items())
    ]
    out = []
    for sigma, p in items:
        dominated = any(
            all(q[i] >= p[i] for i in range(len(p))) and any(q[i] > p[i] for i in range(len(p)))
            for _t, q in items
        )
        if not dominated:
            out.append((sigma, normalize(p, dirs)))
    return out


def hypervolume(front: FrontApproximation, reference, dirs=None) -> float:
    """Area dominated by the front relative to a worst-case reference point.

    The reference must be dominated by every corner (after normalisation);
    the area includes the two boundary rays, i.e. it is the exact staircase
    area between the convex chain and the reference.
    """
    dirs = front.dirs if dirs is None else tuple(dirs)
    if len(dirs) != 2:
        raise UnsupportedDimensionError("hypervolume is supported for 2 objectives only")
    if front.is_empty:
        warnings.warn("hypervolume of an empty front is 0", stacklevel=2)
        return 0.0
    ref = normalize(reference, dirs)
    pts = front.normalized_corners()
    for c in pts:
        if c[0] < ref[0] - GEOM_TOL or c[1] < ref[1] - GEOM_TOL:
            raise ValueError(
                f"reference point {tuple(reference)} is not dominated by corner "
                f"{normalize(c, dirs)}"
            )
    area = (pts[0][0] - ref[0]) * (pts[0][1] - ref[1])
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        area += (x1 - x0) * ((y0 - ref[1]) + (y1 - ref[1])) / 2.0
    return area


def max_gap_direction(under: FrontApproximation, over: FrontApproximation) -> tuple[float, float]:
    """Outward normal (normalised to sum 1) of the under-front facet with the
    largest gap to the over-front, measured along the facet's Euclidean unit
    normal. Facets are the left boundary ray, the chain segments left to
    right, and the right boundary ray; ties keep the smallest facet index.
    Degenerate (coincident) fronts give (1/2, 1/2)."""
    if under.is_empty or over.is_empty:
        raise ValueError("both fronts must be non-empty")
    if len(under.dirs) != 2:
        raise UnsupportedDimensionError("max-gap direction is supported for 2 objectives only")
    u = under.normalized_corners()
    v = over.normalized_corners()
    facets = [(u[0], (0.0, 1.0))]
    for (x0, y0), (x1, y1) in zip(u, u[1:]):
        nx, ny = -(y1 - y0), (x1 - x0)
        norm = (nx * nx + ny * ny) ** 0.5
        facets.append(((x0, y0), (nx / norm, ny / norm)))
    facets.append((u[-1], (1.0, 0.0)))
    best_gap = -float("inf")
    best_normal = None
    for point, normal in facets:
        gap = max((p[0] - point[0]) * normal[0] + (p[1] - point[1]) * normal[1] for p in v)
        if gap > best_gap + GEOM_TOL:
            best_gap = gap
            best_normal = normal
    if best_gap <= GEOM_TOL:
        return (0.5, 0.5)
    nx, ny = best_normal
    return (nx / (nx + ny), ny / (nx + ny))


def write_front_csv(path, fronts):
    """Export front corners as CSV rows `dim1,dim2,kind,strategy_id` in chain order."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["dim1", "dim2", "kind", "strategy_id"])
        for front in fronts:
            for corner, src in zip(front.corners, front.sources):
                w.writerow([repr(corner[0]), repr(corner[1]), front.kind, src])


def read_front_csv(path, dirs) -> list[FrontApproximation]:
    groups: dict[str, tuple[list, list]] = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            pts, srcs = groups.setdefault(row["kind"], ([], []))
            pts.append((float(row["dim1"]), float(row["dim2"])))
            srcs.append(int(row["strategy_id"]))
    return [
        FrontApproximation(kind, tuple(dirs), tuple(pts), tuple(srcs))
        for kind, (pts, srcs) in groups.items()
    ]
