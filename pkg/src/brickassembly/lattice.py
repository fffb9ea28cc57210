"""Discrete geometry of 2x4 brick primitives on an integer stud lattice.

A primitive occupies a 4x2x1 block of lattice cells (lengthwise) or a
2x4x1 block (breadthwise). Bricks connect only across adjacent layers,
through at least one vertically aligned stud cell. All coordinates are
anchor-based: the anchor is the minimum corner of the footprint, so every
geometric predicate stays in exact integer arithmetic. The center-based
coordinate convention used by some interchange files maps to anchors via
``Primitive.from_center``.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

from ._backend import active_backend

LENGTHWISE = 0
BREADTHWISE = 1

# Footprint stud extents along (axis1, axis2), indexed by direction.
DIMS = ((4, 2), (2, 4))


class Primitive(NamedTuple):
    """One placed brick: anchor cell (a1, a2, z) plus direction d."""

    a1: int
    a2: int
    z: int
    d: int

    def validate(self) -> "Primitive":
        if self.z < 0:
            raise ValueError(f"layer index must be >= 0, got {self.z}")
        if self.d not in (0, 1):
            raise ValueError(f"direction must be 0 or 1, got {self.d}")
        return self

    @property
    def dims(self) -> tuple[int, int]:
        return DIMS[self.d]

    @property
    def center(self) -> tuple[float, float]:
        l1, l2 = DIMS[self.d]
        return (self.a1 + l1 / 2.0, self.a2 + l2 / 2.0)

    @classmethod
    def from_center(cls, c1: float, c2: float, z: int, d: int) -> "Primitive":
        """Build from center-of-footprint coordinates (first two axes)."""
        l1, l2 = DIMS[d]
        a1 = c1 - l1 / 2.0
        a2 = c2 - l2 / 2.0
        if a1 != int(a1) or a2 != int(a2):
            raise ValueError(f"center ({c1}, {c2}) is not on the stud lattice for d={d}")
        return cls(int(a1), int(a2), int(z), int(d)).validate()

    def sort_key(self) -> tuple[int, int, int, int]:
        """Canonical enumeration order: (z, a1, a2, d)."""
        return (self.z, self.a1, self.a2, self.d)


def footprint(p: Primitive) -> frozenset[tuple[int, int, int]]:
    """The 8 lattice cells occupied by a primitive."""
    l1, l2 = DIMS[p.d]
    return frozenset(
        (p.a1 + i, p.a2 + j, p.z) for i in range(l1) for j in range(l2)
    )


def plan_overlap_cells(p: Primitive, q: Primitive) -> frozenset[tuple[int, int]]:
    """Shared (axis1, axis2) stud columns of two footprints, layers ignored."""
    p1, p2 = DIMS[p.d]
    q1, q2 = DIMS[q.d]
    lo1, hi1 = max(p.a1, q.a1), min(p.a1 + p1, q.a1 + q1)
    lo2, hi2 = max(p.a2, q.a2), min(p.a2 + p2, q.a2 + q2)
    if lo1 >= hi1 or lo2 >= hi2:
        return frozenset()
    return frozenset((i, j) for i in range(lo1, hi1) for j in range(lo2, hi2))


def plan_overlap_count(p: Primitive, q: Primitive) -> int:
    p1, p2 = DIMS[p.d]
    q1, q2 = DIMS[q.d]
    w = min(p.a1 + p1, q.a1 + q1) - max(p.a1, q.a1)
    h = min(p.a2 + p2, q.a2 + q2) - max(p.a2, q.a2)
    if w <= 0 or h <= 0:
        return 0
    return w * h


def overlaps(p: Primitive, q: Primitive) -> bool:
    """True iff the two footprints share at least one lattice cell."""
    return p.z == q.z and plan_overlap_count(p, q) > 0


def connects(p: Primitive, q: Primitive) -> bool:
    """True iff the bricks sit on adjacent layers and engage >= 1 stud."""
    return abs(p.z - q.z) == 1 and plan_overlap_count(p, q) > 0


class GridBounds(NamedTuple):
    """Axis extents (m1, m2, m3); valid cells live in [0, mi) per axis."""

    m1: int
    m2: int
    m3: int

    def validate(self) -> "GridBounds":
        if min(self) <= 0:
            raise ValueError(f"grid extents must be positive, got {tuple(self)}")
        return self

    def contains(self, p: Primitive) -> bool:
        l1, l2 = DIMS[p.d]
        return (
            0 <= p.a1 and p.a1 + l1 <= self.m1
            and 0 <= p.a2 and p.a2 + l2 <= self.m2
            and 0 <= p.z < self.m3
        )


class Combination:
    """Ordered sequence of non-overlapping, mutually connected bricks.

    The order is the assembly sequence: every brick after the first must
    connect to at least one earlier brick. Free-standing grounded towers
    are rejected, which keeps the stability analysis well defined.
    """

    __slots__ = ("bricks", "_cells")

    def __init__(self) -> None:
        self.bricks: list[Primitive] = []
        self._cells: set[tuple[int, int, int]] = set()

    @classmethod
    def from_bricks(cls, bricks: Iterable[Primitive | Sequence[int]], validate: bool = True) -> "Combination":
        combo = cls()
        for b in bricks:
            p = b if isinstance(b, Primitive) else Primitive(*b)
            if validate:
                combo.add(p)
            else:
                combo.bricks.append(p)
                combo._cells.update(footprint(p))
        return combo

    def __len__(self) -> int:
        return len(self.bricks)

    def __iter__(self):
        return iter(self.bricks)

    def occupied_cells(self) -> frozenset[tuple[int, int, int]]:
        return frozenset(self._cells)

    def can_add(self, p: Primitive) -> bool:
        cells = footprint(p)
        if self._cells & cells:
            return False
        if not self.bricks:
            return p.z == 0
        return any(connects(p, b) for b in self.bricks)

    def add(self, p: Primitive) -> None:
        p.validate()
        cells = footprint(p)
        if self._cells & cells:
            raise ValueError(f"brick {tuple(p)} overlaps the existing structure")
        if self.bricks:
            if not any(connects(p, b) for b in self.bricks):
                raise ValueError(f"brick {tuple(p)} does not connect to the structure")
        elif p.z != 0:
            raise ValueError("first brick must rest on the ground plane z = 0")
        self.bricks.append(p)
        self._cells |= cells

    def pop_last(self, n: int = 1) -> list[Primitive]:
        """Remove and return the last n bricks (most recent first)."""
        if n > len(self.bricks):
            raise ValueError(f"cannot remove {n} bricks from {len(self.bricks)}")
        removed = []
        for _ in range(n):
            p = self.bricks.pop()
            self._cells -= footprint(p)
            removed.append(p)
        return removed

    def as_array(self) -> np.ndarray:
        return np.array([tuple(b) for b in self.bricks], dtype=np.int64).reshape(-1, 4)

    def copy(self) -> "Combination":
        dup = Combination()
        dup.bricks = list(self.bricks)
        dup._cells = set(self._cells)
        return dup


def enumerate_attachments(c: Combination, bounds: Optional[GridBounds] = None) -> list[Primitive]:
    """Every legal placement touching the structure, in (z, a1, a2, d) order.

    A placement is legal when it stays inside ``bounds`` (plan-unbounded,
    z >= 0 when bounds is None), overlaps no existing brick, and connects
    to at least one. Raises ValueError on an empty combination.
    """
    if len(c) == 0:
        raise ValueError("no structure to attach to")
    if bounds is not None:
        bounds.validate()
        b = bounds
        args = (1, b.m1, b.m2, b.m3)
    else:
        args = (0, 0, 0, 0)
    rows = active_backend().enumerate_attachments(c.as_array(), *args)
    return [Primitive(int(r[0]), int(r[1]), int(r[2]), int(r[3])) for r in rows]


def sample_attachments(
    c: Combination,
    bounds: Optional[GridBounds],
    count: int,
    rng: np.random.Generator,
    exclude: Optional[set[Primitive]] = None,
) -> list[Primitive]:
    """Uniform sample without replacement from the feasible placements.

    Returns min(count, |feasible|) placements, reproducible per generator
    state. Placements in ``exclude`` are removed from the pool first.
    """
    feasible = enumerate_attachments(c, bounds)
    if exclude:
        feasible = [p for p in feasible if p not in exclude]
    if not feasible:
        return []
    if count >= len(feasible):
        return list(feasible)
    idx = rng.choice(len(feasible), size=count, replace=False)
    return [feasible[i] for i in sorted(idx)]
