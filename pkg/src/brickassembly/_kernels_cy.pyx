# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled placement kernels: the hot loops behind attachment enumeration,
occupiability scoring, and contact counting. Twin of ``_kernels_py``."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

NAME = "cython"

cdef inline void _dims(long d, long *l1, long *l2) noexcept nogil:
    if d == 0:
        l1[0] = 4
        l2[0] = 2
    else:
        l1[0] = 2
        l2[0] = 4


def enumerate_attachments(cnp.int64_t[:, :] bricks, int bounded, long m1, long m2, long m3):
    """All legal placements against ``bricks`` as an (n, 4) int64 array."""
    cdef long n = bricks.shape[0]
    # Each brick spawns at most 46 candidate anchors per adjacent layer.
    cdef long cap = n * 2 * 46
    if cap == 0:
        return np.empty((0, 4), dtype=np.int64)
    keys = np.empty(cap, dtype=np.int64)
    cdef cnp.int64_t[:] kview = keys
    cdef long count = 0
    cdef long i, b1, b2, bz, bd, w1, w2, l1, l2, x, y, z, d
    cdef long xmin, ymin, sx, sy
    cdef int up

    # Candidates are packed into one integer per placement so deduplication
    # and (z, a1, a2, d) ordering become a single flat sort.
    xmin = bricks[0, 0]
    ymin = bricks[0, 1]
    sx = bricks[0, 0]
    sy = bricks[0, 1]
    with nogil:
        for i in range(n):
            if bricks[i, 0] < xmin:
                xmin = bricks[i, 0]
            if bricks[i, 0] > sx:
                sx = bricks[i, 0]
            if bricks[i, 1] < ymin:
                ymin = bricks[i, 1]
            if bricks[i, 1] > sy:
                sy = bricks[i, 1]
    xmin -= 3
    ymin -= 3
    sx = sx + 4 - xmin
    sy = sy + 4 - ymin

    with nogil:
        for i in range(n):
            b1 = bricks[i, 0]
            b2 = bricks[i, 1]
            bz = bricks[i, 2]
            bd = bricks[i, 3]
            _dims(bd, &w1, &w2)
            for up in range(2):
                z = bz + 1 if up == 0 else bz - 1
                if z < 0 or (bounded and z >= m3):
                    continue
                for d in range(2):
                    _dims(d, &l1, &l2)
                    for x in range(b1 - l1 + 1, b1 + w1):
                        if bounded and (x < 0 or x + l1 > m1):
                            continue
                        for y in range(b2 - l2 + 1, b2 + w2):
                            if bounded and (y < 0 or y + l2 > m2):
                                continue
                            kview[count] = ((z * sx + (x - xmin)) * sy + (y - ymin)) * 2 + d
                            count += 1

    unique = np.unique(keys[:count])
    cdef cnp.int64_t[:] uview = unique
    cdef long k = unique.shape[0]
    out = np.empty((k, 4), dtype=np.int64)
    cdef cnp.int64_t[:, :] ov = out
    cdef long kept = 0
    cdef long j, key
    cdef int bad

    with nogil:
        for i in range(k):
            key = uview[i]
            d = key % 2
            key //= 2
            y = key % sy + ymin
            key //= sy
            x = key % sx + xmin
            z = key // sx
            _dims(d, &l1, &l2)
            bad = 0
            for j in range(n):
                if bricks[j, 2] != z:
                    continue
                b1 = bricks[j, 0]
                b2 = bricks[j, 1]
                _dims(bricks[j, 3], &w1, &w2)
                if x < b1 + w1 and b1 < x + l1 and y < b2 + w2 and b2 < y + l2:
                    bad = 1
                    break
            if not bad:
                ov[kept, 0] = x
                ov[kept, 1] = y
                ov[kept, 2] = z
                ov[kept, 3] = d
                kept += 1

    return out[:kept].copy()


def occupiability_scores(cnp.int64_t[:, :] candidates, cnp.uint8_t[:, :, :] target_mask, cnp.uint8_t[:, :, :] occupied_mask):
    """Per-candidate count of footprint cells still occupiable in the target."""
    cdef long k = candidates.shape[0]
    out = np.zeros(k, dtype=np.int64)
    cdef cnp.int64_t[:] ov = out
    cdef long i, a1, a2, z, l1, l2, x, y, s
    with nogil:
        for i in range(k):
            a1 = candidates[i, 0]
            a2 = candidates[i, 1]
            z = candidates[i, 2]
            _dims(candidates[i, 3], &l1, &l2)
            s = 0
            for x in range(a1, a1 + l1):
                for y in range(a2, a2 + l2):
                    if target_mask[x, y, z] and not occupied_mask[x, y, z]:
                        s += 1
            ov[i] = s
    return out


def contact_cells(cnp.int64_t[:, :] candidates, cnp.int64_t[:, :] bricks):
    """Per-candidate stud-cavity contact cell count against ``bricks``."""
    cdef long k = candidates.shape[0]
    cdef long n = bricks.shape[0]
    out = np.zeros(k, dtype=np.int64)
    cdef cnp.int64_t[:] ov = out
    cdef long i, j, a1, a2, z, l1, l2, b1, b2, bz, w1, w2, w, h, dz, total
    with nogil:
        for i in range(k):
            a1 = candidates[i, 0]
            a2 = candidates[i, 1]
            z = candidates[i, 2]
            _dims(candidates[i, 3], &l1, &l2)
            total = 0
            for j in range(n):
                bz = bricks[j, 2]
                dz = bz - z
                if dz != 1 and dz != -1:
                    continue
                b1 = bricks[j, 0]
                b2 = bricks[j, 1]
                _dims(bricks[j, 3], &w1, &w2)
                w = (a1 + l1 if a1 + l1 < b1 + w1 else b1 + w1) - (a1 if a1 > b1 else b1)
                h = (a2 + l2 if a2 + l2 < b2 + w2 else b2 + w2) - (a2 if a2 > b2 else b2)
                if w > 0 and h > 0:
                    total += w * h
            ov[i] = total
    return out
