"""Static stability scoring for brick structures.

Instead of settling a structure in a dynamics engine, every horizontal cut
through the assembly is checked directly: the sub-structure above a cut
must keep its center of mass over the support region at that cut, with
slack for lateral center-of-mass shifts that emulate external pushes from
the four axis directions. The returned penalty is zero for structures that
survive every shifted check and grows with how far a shifted center of
mass leaves its support hull; optimizers use the negated penalty so larger
is better. The evaluator is pure and deterministic; a dynamics backend can
be swapped in behind the same signature later.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .lattice import Combination, Primitive, connects, plan_overlap_cells


@dataclass(frozen=True)
class StabilityConfig:
    """Lateral push magnitude and penalty weights."""

    perturbation: float = 0.5
    w_margin: float = 1.0
    w_disconnect: float = 1000.0

    def __post_init__(self):
        if self.perturbation < 0:
            raise ValueError("perturbation must be >= 0")
        if self.w_margin < 0 or self.w_disconnect < 0:
            raise ValueError("weights must be >= 0")


def _convex_hull(points: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Monotone-chain hull, counter-clockwise, no duplicate endpoint."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[tuple[float, float]] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[float, float]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _dist_point_segment(p: tuple[float, float], a: tuple[float, float], b: tuple[float, float]) -> float:
    ax, ay = a
    bx, by = b
    px, py = p
    dx, dy = bx - ax, by - ay
    seg2 = dx * dx + dy * dy
    if seg2 == 0.0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * dx + (py - ay) * dy) / seg2
    t = max(0.0, min(1.0, t))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def _signed_margin(point: tuple[float, float], hull: list[tuple[float, float]]) -> float:
    """Euclidean distance to the hull boundary; positive inside, negative outside."""
    if not hull:
        raise ValueError("empty support region")
    if len(hull) == 1:
        return -math.hypot(point[0] - hull[0][0], point[1] - hull[0][1])
    if len(hull) == 2:
        return -_dist_point_segment(point, hull[0], hull[1])
    boundary = min(
        _dist_point_segment(point, hull[i], hull[(i + 1) % len(hull)])
        for i in range(len(hull))
    )
    inside = True
    for i in range(len(hull)):
        ax, ay = hull[i]
        bx, by = hull[(i + 1) % len(hull)]
        if (bx - ax) * (point[1] - ay) - (by - ay) * (point[0] - ax) < 0:
            inside = False
            break
    return boundary if inside else -boundary


def _component_count(bricks: list[Primitive]) -> int:
    n = len(bricks)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if connects(bricks[i], bricks[j]):
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj
    return len({find(i) for i in range(n)})


def _support_hulls(bricks: list[Primitive]) -> list[tuple[list[Primitive], list[tuple[float, float]]]]:
    """(bricks above cut, support hull) for the ground cut and every layer cut."""
    by_layer: dict[int, list[Primitive]] = {}
    for b in bricks:
        by_layer.setdefault(b.z, []).append(b)
    top = max(by_layer)
    cuts = []

    # Ground cut: everything rests on the footprints of the grounded bricks.
    ground_cells: set[tuple[int, int]] = set()
    for b in by_layer.get(0, []):
        l1, l2 = b.dims
        ground_cells.update((b.a1 + i, b.a2 + j) for i in range(l1) for j in range(l2))
    if ground_cells:
        centers = [(i + 0.5, j + 0.5) for i, j in ground_cells]
        cuts.append((list(bricks), _convex_hull(centers)))

    for k in range(1, top + 1):
        above = [b for b in bricks if b.z >= k]
        if not above:
            continue
        support: set[tuple[int, int]] = set()
        for u in by_layer.get(k, []):
            for w in by_layer.get(k - 1, []):
                support.update(plan_overlap_cells(u, w))
        centers = [(i + 0.5, j + 0.5) for i, j in support]
        cuts.append((above, _convex_hull(centers)))
    return cuts


def stability_penalty(c: Combination, cfg: StabilityConfig | None = None) -> float:
    """Non-negative instability measure of a brick structure.

    Zero when, at every cut, the center of mass of the material above stays
    inside the support hull under all four lateral shifts; otherwise the sum
    of hull-exit distances, plus a large term per extra connected component.
    """
    if len(c) == 0:
        raise ValueError("empty combination")
    cfg = cfg or StabilityConfig()
    bricks = list(c.bricks)

    total = 0.0
    for above, hull in _support_hulls(bricks):
        cx = sum(b.center[0] for b in above) / len(above)
        cy = sum(b.center[1] for b in above) / len(above)
        if not hull:
            # No stud contact at this cut: the structure is disconnected
            # here; the component term below carries the penalty.
            continue
        for dx, dy in ((cfg.perturbation, 0.0), (-cfg.perturbation, 0.0),
                       (0.0, cfg.perturbation), (0.0, -cfg.perturbation)):
            margin = _signed_margin((cx + dx, cy + dy), hull)
            if margin < 0:
                total += cfg.w_margin * (-margin)

    components = _component_count(bricks)
    total += cfg.w_disconnect * (components - 1)
    return total
