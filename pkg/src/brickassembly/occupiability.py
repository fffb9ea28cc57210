"""Target shapes, the occupiability grid, and the shape-side evaluators.

A target is a set of lattice cells inside fixed grid extents. A cell is
*occupiable* when it belongs to the target and no placed brick covers it,
so filling the structure only ever consumes occupiability. The candidate
score is the number of occupiable cells under the candidate's footprint,
an integer in [0, 8]. Evaluators are deterministic: observation noise is
modeled by the surrogate's noise variance, never injected here.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from ._backend import active_backend
from .lattice import Combination, GridBounds, Primitive, connects, footprint, plan_overlap_count


@dataclass(frozen=True)
class TargetShape:
    """Desired cells within extents (m1, m2, m3)."""

    cells: frozenset[tuple[int, int, int]]
    extents: GridBounds

    def __post_init__(self):
        self.extents.validate()
        if not self.cells:
            raise ValueError("target shape must contain at least one cell")
        m1, m2, m3 = self.extents
        for (i, j, k) in self.cells:
            if not (0 <= i < m1 and 0 <= j < m2 and 0 <= k < m3):
                raise ValueError(f"target cell {(i, j, k)} outside extents {tuple(self.extents)}")

    @classmethod
    def from_cells(cls, cells: Iterable[Iterable[int]], extents: Iterable[int]) -> "TargetShape":
        return cls(
            cells=frozenset(tuple(int(v) for v in c) for c in cells),
            extents=GridBounds(*(int(v) for v in extents)),
        )

    @classmethod
    def box(cls, m1: int, m2: int, m3: int) -> "TargetShape":
        """A solid box filling the whole grid."""
        cells = frozenset(itertools.product(range(m1), range(m2), range(m3)))
        return cls(cells=cells, extents=GridBounds(m1, m2, m3))

    @classmethod
    def from_combination(cls, c: Combination, padding: int = 0) -> "TargetShape":
        """Voxelize a combination, translating it into the positive octant."""
        if len(c) == 0:
            raise ValueError("cannot voxelize an empty combination")
        cells = sorted(c.occupied_cells())
        lo1 = min(i for i, _, _ in cells) - padding
        lo2 = min(j for _, j, _ in cells) - padding
        shifted = frozenset((i - lo1, j - lo2, k) for i, j, k in cells)
        m1 = max(i for i, _, _ in shifted) + 1 + padding
        m2 = max(j for _, j, _ in shifted) + 1 + padding
        m3 = max(k for _, _, k in shifted) + 1 + padding
        return cls(cells=shifted, extents=GridBounds(m1, m2, m3))

    @classmethod
    def from_json(cls, text: str) -> "TargetShape":
        doc = json.loads(text)
        return cls.from_cells(doc["cells"], doc["extents"])

    def to_json(self) -> str:
        doc = {
            "extents": list(self.extents),
            "cells": [list(c) for c in sorted(self.cells)],
        }
        return json.dumps(doc, sort_keys=True)

    def mask(self) -> np.ndarray:
        m = np.zeros(tuple(self.extents), dtype=np.uint8)
        for i, j, k in self.cells:
            m[i, j, k] = 1
        return m


@dataclass
class OccupiabilityGrid:
    """A target plus the cells currently occupied by a combination."""

    target: TargetShape
    occupied: frozenset[tuple[int, int, int]] = field(default_factory=frozenset)

    @classmethod
    def for_combination(cls, target: TargetShape, c: Combination) -> "OccupiabilityGrid":
        return cls(target=target, occupied=c.occupied_cells())

    def _check(self, cell: tuple[int, int, int]) -> None:
        m1, m2, m3 = self.target.extents
        i, j, k = cell
        if not (0 <= i < m1 and 0 <= j < m2 and 0 <= k < m3):
            raise ValueError(f"cell {cell} outside extents {tuple(self.target.extents)}")

    def occupancy(self, cell: tuple[int, int, int]) -> int:
        """1 iff the cell is covered by a placed brick."""
        self._check(cell)
        return 1 if cell in self.occupied else 0

    def occupiability(self, cell: tuple[int, int, int]) -> int:
        """1 iff the cell belongs to the target and is still empty."""
        self._check(cell)
        return 1 if cell in self.target.cells and cell not in self.occupied else 0


def occupiability_score(candidate: Primitive, c: Combination, target: TargetShape) -> int:
    """Number of still-occupiable target cells under the candidate footprint."""
    if not target.extents.contains(candidate):
        raise ValueError(f"candidate {tuple(candidate)} outside extents {tuple(target.extents)}")
    occupied = c.occupied_cells()
    return sum(
        1 for cell in footprint(candidate)
        if cell in target.cells and cell not in occupied
    )


def occupiability_scores_batch(
    candidates: np.ndarray, target_mask: np.ndarray, occupied_mask: np.ndarray
) -> np.ndarray:
    """Kernel-backed batch scoring; candidates must already be in-bounds."""
    return active_backend().occupiability_scores(
        np.ascontiguousarray(candidates, dtype=np.int64),
        np.ascontiguousarray(target_mask, dtype=np.uint8),
        np.ascontiguousarray(occupied_mask, dtype=np.uint8),
    )


def _require_nonempty(c: Combination) -> None:
    if len(c) == 0:
        raise ValueError("empty combination")


def height(c: Combination) -> int:
    """Topmost layer index plus one."""
    _require_nonempty(c)
    return max(b.z for b in c.bricks) + 1


def width(c: Combination) -> int:
    """Bounding extent of occupied cells along axis 1."""
    _require_nonempty(c)
    lo = min(b.a1 for b in c.bricks)
    hi = max(b.a1 + b.dims[0] for b in c.bricks)
    return hi - lo


def depth(c: Combination) -> int:
    """Bounding extent of occupied cells along axis 2."""
    _require_nonempty(c)
    lo = min(b.a2 for b in c.bricks)
    hi = max(b.a2 + b.dims[1] for b in c.bricks)
    return hi - lo


def connected_studs(c: Combination) -> int:
    """Total engaged stud cells, summed over all connected brick pairs."""
    _require_nonempty(c)
    total = 0
    for i, p in enumerate(c.bricks):
        for q in c.bricks[i + 1:]:
            if connects(p, q):
                total += plan_overlap_count(p, q)
    return total
