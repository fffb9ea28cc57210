"""Geometry export: Wavefront OBJ meshes and run-length-encoded voxel grids.

Bricks render as plain cuboids (studs omitted); one OBJ group per brick.
Horizontal units are studs and the layer height defaults to 1.2 studs, the
aspect ratio of a real 2x4 brick. The voxel format is a documented RLE
text file with header ``VOXRLE v1 m1 m2 m3``; the grid is flattened with
axis 3 fastest, axis 1 slowest. Output is byte-stable for equal inputs.
"""

from __future__ import annotations

import numpy as np

from .lattice import Combination, GridBounds

DEFAULT_LAYER_HEIGHT = 1.2

# Cuboid faces as vertex-index quads split into triangles; vertices are
# ordered (x, y, z) binary-counter style over the brick's corners.
_FACES = (
    (0, 1, 3, 2),  # x = lo
    (4, 6, 7, 5),  # x = hi
    (0, 4, 5, 1),  # y = lo
    (2, 3, 7, 6),  # y = hi
    (0, 2, 6, 4),  # z = lo
    (1, 5, 7, 3),  # z = hi
)


def _fmt(value: float) -> str:
    text = f"{value:.6f}"
    return "-0.000000" if text == "-0.000000" else text


def to_obj(c: Combination, layer_height: float = DEFAULT_LAYER_HEIGHT) -> str:
    """Serialize a combination as Wavefront OBJ text, one group per brick."""
    if len(c) == 0:
        raise ValueError("cannot export an empty combination")
    lines = ["# brickassembly mesh export", f"# bricks: {len(c)}"]
    base = 1
    for index, brick in enumerate(c.bricks):
        l1, l2 = brick.dims
        x0, x1 = float(brick.a1), float(brick.a1 + l1)
        y0, y1 = float(brick.a2), float(brick.a2 + l2)
        z0, z1 = brick.z * layer_height, (brick.z + 1) * layer_height
        lines.append(f"g brick_{index}")
        for x in (x0, x1):
            for y in (y0, y1):
                for z in (z0, z1):
                    lines.append(f"v {_fmt(x)} {_fmt(y)} {_fmt(z)}")
        for quad in _FACES:
            a, b, cc, d = (base + i for i in quad)
            lines.append(f"f {a} {b} {cc}")
            lines.append(f"f {a} {cc} {d}")
        base += 8
    return "\n".join(lines) + "\n"


def to_voxels(c: Combination, extents: GridBounds) -> str:
    """Serialize occupancy over the extents as run-length-encoded text."""
    extents.validate()
    m1, m2, m3 = extents
    grid = np.zeros((m1, m2, m3), dtype=np.uint8)
    for (i, j, k) in sorted(c.occupied_cells()):
        if not (0 <= i < m1 and 0 <= j < m2 and 0 <= k < m3):
            raise ValueError(f"occupied cell {(i, j, k)} outside extents {tuple(extents)}")
        grid[i, j, k] = 1
    flat = grid.reshape(-1)
    lines = [f"VOXRLE v1 {m1} {m2} {m3}"]
    run_value = int(flat[0]) if flat.size else 0
    run_len = 0
    for v in flat:
        if int(v) == run_value:
            run_len += 1
        else:
            lines.append(f"{run_len} {run_value}")
            run_value = int(v)
            run_len = 1
    if run_len:
        lines.append(f"{run_len} {run_value}")
    return "\n".join(lines) + "\n"


def parse_voxels(text: str) -> np.ndarray:
    """Inverse of ``to_voxels``; returns the dense 0/1 grid."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    header = lines[0].split()
    if header[:2] != ["VOXRLE", "v1"]:
        raise ValueError("not a VOXRLE v1 document")
    m1, m2, m3 = (int(v) for v in header[2:5])
    flat = np.zeros(m1 * m2 * m3, dtype=np.uint8)
    pos = 0
    for ln in lines[1:]:
        run, value = (int(v) for v in ln.split())
        flat[pos:pos + run] = value
        pos += run
    if pos != flat.size:
        raise ValueError(f"RLE runs cover {pos} cells, expected {flat.size}")
    return flat.reshape((m1, m2, m3))
