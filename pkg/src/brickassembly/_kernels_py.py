"""Pure-Python twin of the compiled placement kernels.

Same contracts and bit-identical outputs as ``_kernels_cy``; used whenever
the compiled extension is unavailable. Kept free of per-call allocations
beyond what numpy needs so the backend benchmark is a fair comparison.
"""

from __future__ import annotations

import numpy as np

NAME = "python"

_DIMS = ((4, 2), (2, 4))


def enumerate_attachments(bricks: np.ndarray, bounded: int, m1: int, m2: int, m3: int) -> np.ndarray:
    """All legal placements against ``bricks`` as an (n, 4) int64 array.

    Rows are (z, a1, a2, d)-sorted tuples stored as (a1, a2, z, d). A legal
    placement connects to >= 1 brick, overlaps none, and (when bounded)
    keeps its footprint inside [0, m1) x [0, m2) x [0, m3).
    """
    n = bricks.shape[0]
    rows = [(int(r[0]), int(r[1]), int(r[2]), int(r[3])) for r in bricks]
    candidates: set[tuple[int, int, int, int]] = set()
    for b1, b2, bz, bd in rows:
        w1, w2 = _DIMS[bd]
        for dz in (1, -1):
            z = bz + dz
            if z < 0 or (bounded and z >= m3):
                continue
            for d in (0, 1):
                l1, l2 = _DIMS[d]
                for x in range(b1 - l1 + 1, b1 + w1):
                    if bounded and (x < 0 or x + l1 > m1):
                        continue
                    for y in range(b2 - l2 + 1, b2 + w2):
                        if bounded and (y < 0 or y + l2 > m2):
                            continue
                        candidates.add((z, x, y, d))
    out = []
    for z, x, y, d in candidates:
        l1, l2 = _DIMS[d]
        ok = True
        for b1, b2, bz, bd in rows:
            if bz != z:
                continue
            w1, w2 = _DIMS[bd]
            if x < b1 + w1 and b1 < x + l1 and y < b2 + w2 and b2 < y + l2:
                ok = False
                break
        if ok:
            out.append((z, x, y, d))
    out.sort()
    result = np.empty((len(out), 4), dtype=np.int64)
    for i, (z, x, y, d) in enumerate(out):
        result[i, 0] = x
        result[i, 1] = y
        result[i, 2] = z
        result[i, 3] = d
    return result


def occupiability_scores(candidates: np.ndarray, target_mask: np.ndarray, occupied_mask: np.ndarray) -> np.ndarray:
    """Per-candidate count of footprint cells still occupiable in the target."""
    k = candidates.shape[0]
    scores = np.zeros(k, dtype=np.int64)
    for i in range(k):
        a1 = int(candidates[i, 0])
        a2 = int(candidates[i, 1])
        z = int(candidates[i, 2])
        l1, l2 = _DIMS[int(candidates[i, 3])]
        block_t = target_mask[a1:a1 + l1, a2:a2 + l2, z]
        block_o = occupied_mask[a1:a1 + l1, a2:a2 + l2, z]
        scores[i] = int(np.count_nonzero(block_t & ~block_o))
    return scores


def contact_cells(candidates: np.ndarray, bricks: np.ndarray) -> np.ndarray:
    """Per-candidate stud-cavity contact cell count against ``bricks``.

    Counts plan-overlap cells with every brick exactly one layer above or
    below; this is the incremental connected-studs gain of each candidate.
    """
    k = candidates.shape[0]
    rows = [(int(r[0]), int(r[1]), int(r[2]), int(r[3])) for r in bricks]
    out = np.zeros(k, dtype=np.int64)
    for i in range(k):
        a1 = int(candidates[i, 0])
        a2 = int(candidates[i, 1])
        z = int(candidates[i, 2])
        l1, l2 = _DIMS[int(candidates[i, 3])]
        total = 0
        for b1, b2, bz, bd in rows:
            if abs(bz - z) != 1:
                continue
            w1, w2 = _DIMS[bd]
            w = min(a1 + l1, b1 + w1) - max(a1, b1)
            h = min(a2 + l2, b2 + w2) - max(a2, b2)
            if w > 0 and h > 0:
                total += w * h
        out[i] = total
    return out
