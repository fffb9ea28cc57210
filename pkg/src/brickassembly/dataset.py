"""Combinatorial 3D shape dataset: schema, generators, validation, stats.

Instances are ordered brick sequences labeled with one of 14 shape
classes. Group A holds the two-brick connection types, group B parametric
component shapes (bar, line, plate, wall, cuboid, square pyramid), and
group C composite objects shipped as a small curated set. Any brick set
whose contact graph is connected can be re-sequenced; ``augment`` samples
such alternative assembly orders uniformly step by step.

Serialization is JSON lines, one instance per line:
``{"class": str, "bricks": [[a1, a2, z, d], ...]}`` with anchor
coordinates. ``Primitive.from_center`` converts center-based coordinates.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional

import numpy as np

from .lattice import Combination, Primitive, connects, footprint

CLASS_LABELS = (
    "parallel", "perpendicular",
    "bar", "line", "plate", "wall", "cuboid", "square_pyramid",
    "bench", "sofa", "cup", "hollow", "table", "car",
)

GROUP_A = ("parallel", "perpendicular")
GROUP_B = ("bar", "line", "plate", "wall", "cuboid", "square_pyramid")
GROUP_C = ("bench", "sofa", "cup", "hollow", "table", "car")


@dataclass(frozen=True)
class ShapeInstance:
    class_label: str
    sequence: tuple[Primitive, ...]

    def __post_init__(self):
        if self.class_label not in CLASS_LABELS:
            raise ValueError(f"unknown class {self.class_label!r}")

    def to_jsonl(self) -> str:
        return json.dumps(
            {"class": self.class_label, "bricks": [list(b) for b in self.sequence]},
            sort_keys=True,
        )

    @classmethod
    def from_jsonl(cls, line: str) -> "ShapeInstance":
        doc = json.loads(line)
        return cls(
            class_label=doc["class"],
            sequence=tuple(Primitive(*b) for b in doc["bricks"]),
        )


class Violation(NamedTuple):
    index: int
    reason: str


def validate_sequence(seq: Iterable[Primitive]) -> Optional[Violation]:
    """None when the sequence is assemblable; else the first violation."""
    bricks = list(seq)
    if not bricks:
        return Violation(0, "empty sequence")
    if bricks[0].z != 0:
        return Violation(0, "first brick not grounded")
    cells: set[tuple[int, int, int]] = set()
    for i, b in enumerate(bricks):
        try:
            b.validate()
        except ValueError as exc:
            return Violation(i, str(exc))
        fp = footprint(b)
        if cells & fp:
            return Violation(i, "overlap")
        if i > 0 and not any(connects(b, prev) for prev in bricks[:i]):
            return Violation(i, "no contact")
        cells |= fp
    return None


def write_jsonl(instances: Iterable[ShapeInstance]) -> str:
    return "".join(inst.to_jsonl() + "\n" for inst in instances)


def read_jsonl(text: str) -> list[ShapeInstance]:
    return [ShapeInstance.from_jsonl(line) for line in text.splitlines() if line.strip()]


# ---------------------------------------------------------------------------
# Group A: the two-brick connection types
# ---------------------------------------------------------------------------

def generate_group_a() -> list[ShapeInstance]:
    """All 46 two-brick instances, lower brick at the origin."""
    from .lattice import enumerate_attachments

    base = Combination.from_bricks([Primitive(0, 0, 0, 0)])
    instances = []
    for upper in enumerate_attachments(base, None):
        label = "parallel" if upper.d == 0 else "perpendicular"
        instances.append(ShapeInstance(label, (Primitive(0, 0, 0, 0), upper)))
    return instances


# ---------------------------------------------------------------------------
# Group B: parametric component shapes
# ---------------------------------------------------------------------------

def _suggest(value: int, multiple: int, minimum: int) -> int:
    adjusted = max(minimum, round(value / multiple) * multiple)
    return adjusted if adjusted != value else adjusted + multiple


def _require_multiple(name: str, value: int, multiple: int, minimum: int) -> None:
    if value < minimum or value % multiple:
        raise ValueError(
            f"{name}={value} is not tileable by 2x4 bricks; "
            f"nearest feasible value is {_suggest(value, multiple, minimum)}"
        )


def _layer_a(w: int, d: int, z: int, o1: int = 0, o2: int = 0) -> list[Primitive]:
    """Regular lengthwise tiling of a w x d slab."""
    return [
        Primitive(o1 + x, o2 + y, z, 0)
        for x in range(0, w, 4)
        for y in range(0, d, 2)
    ]


def _layer_b(w: int, d: int, z: int, o1: int = 0, o2: int = 0) -> list[Primitive]:
    """Bridging tiling of a w x d slab (w >= d): crosses every seam of
    ``_layer_a`` so the two-layer contact graph comes out connected.

    Breadthwise edge columns tie vertically adjacent row pairs, the top and
    bottom lengthwise rows tie horizontally adjacent column strips, and the
    interior is woven from alternating 4x4 blocks so every inner strip gets
    both a row bridge and a column bridge.
    """
    bricks = [Primitive(o1, o2 + y, z, 1) for y in range(0, d, 4)]
    bricks += [Primitive(o1 + w - 2, o2 + y, z, 1) for y in range(0, d, 4)]
    if w > 4:
        bricks += [Primitive(o1 + x, o2, z, 0) for x in range(2, w - 4, 4)]
        bricks += [Primitive(o1 + x, o2 + d - 2, z, 0) for x in range(2, w - 4, 4)]
        for y in range(2, d - 4, 4):
            for bi, x in enumerate(range(2, w - 4, 4)):
                if bi == 0:
                    # Row bridge: spans the horizontal seam of this band.
                    bricks.append(Primitive(o1 + x, o2 + y, z, 1))
                    bricks.append(Primitive(o1 + x + 2, o2 + y, z, 1))
                else:
                    # Column bridges: tie adjacent strips on both row pairs.
                    bricks.append(Primitive(o1 + x, o2 + y, z, 0))
                    bricks.append(Primitive(o1 + x, o2 + y + 2, z, 0))
    return bricks


def _sequence_order(bricks: Iterable[Primitive]) -> tuple[Primitive, ...]:
    """Deterministic valid assembly order: always the smallest feasible brick."""
    remaining = sorted(set(bricks), key=Primitive.sort_key)
    placed: list[Primitive] = []
    while remaining:
        pick = None
        for b in remaining:
            if (not placed and b.z == 0) or (placed and any(connects(b, p) for p in placed)):
                pick = b
                break
        if pick is None:
            raise ValueError("brick set admits no valid assembly order")
        placed.append(pick)
        remaining.remove(pick)
    return tuple(placed)


def bar(n: int) -> ShapeInstance:
    """n lengthwise bricks stacked with alternating one-stud offsets."""
    if n < 1:
        raise ValueError("bar needs at least one brick")
    seq = tuple(Primitive(i % 2, 0, i, 0) for i in range(n))
    return ShapeInstance("bar", seq)


def line(n: int) -> ShapeInstance:
    """n bricks zigzagging between two layers along axis 1."""
    if n < 1:
        raise ValueError("line needs at least one brick")
    seq = tuple(Primitive(2 * i, 0, i % 2, 0) for i in range(n))
    return ShapeInstance("line", seq)


def _transpose(bricks: list[Primitive]) -> list[Primitive]:
    return [Primitive(b.a2, b.a1, b.z, 1 - b.d) for b in bricks]


def _slab(w: int, d: int, layers: int) -> list[Primitive]:
    # The bridging layer assumes the wide axis comes first; build tall
    # slabs transposed and swap axes back.
    if w < d:
        return _transpose(_slab(d, w, layers))
    bricks: list[Primitive] = []
    for z in range(layers):
        maker = _layer_a if z % 2 == 0 else _layer_b
        bricks += maker(w, d, z)
    return bricks


def cuboid(w: int, d: int, layers: int) -> ShapeInstance:
    """Fully occupied w x d x layers box."""
    _require_multiple("width", w, 4, 4)
    _require_multiple("depth", d, 4, 4)
    if layers < 2:
        # Bricks in one layer never interconnect, so a single-layer box
        # larger than one brick has no valid assembly order.
        raise ValueError("layers=1 is not assemblable; nearest feasible value is 2")
    return ShapeInstance("cuboid", _sequence_order(_slab(w, d, layers)))


def plate(w: int, d: int) -> ShapeInstance:
    """Thin two-layer slab."""
    _require_multiple("width", w, 4, 4)
    _require_multiple("depth", d, 4, 4)
    return ShapeInstance("plate", _sequence_order(_slab(w, d, 2)))


def wall(length: int, layers: int) -> ShapeInstance:
    """Two-stud-thick running-bond wall; odd courses are recessed by two."""
    _require_multiple("length", length, 4, 8 if layers > 1 else 4)
    if layers < 1:
        raise ValueError("wall needs at least one layer")
    bricks = []
    for z in range(layers):
        if z % 2 == 0:
            bricks += [Primitive(x, 0, z, 0) for x in range(0, length, 4)]
        else:
            bricks += [Primitive(x, 0, z, 0) for x in range(2, length - 4, 4)]
    return ShapeInstance("wall", _sequence_order(bricks))


def square_pyramid(base: int, levels: int) -> ShapeInstance:
    """Stepped pyramid of two-layer slabs shrinking two studs per side."""
    _require_multiple("base", base, 4, 4)
    max_levels = (base - 4) // 4 + 1
    if not (1 <= levels <= max_levels):
        raise ValueError(
            f"levels={levels} infeasible for base {base}; supported range is 1..{max_levels}"
        )
    bricks: list[Primitive] = []
    for lvl in range(levels):
        side = base - 4 * lvl
        offset = 2 * lvl
        z = 2 * lvl
        bricks += _layer_a(side, side, z, offset, offset)
        bricks += _layer_b(side, side, z + 1, offset, offset)
    return ShapeInstance("square_pyramid", _sequence_order(bricks))


def generate_group_b(class_label: str, **params) -> ShapeInstance:
    makers = {
        "bar": bar,
        "line": line,
        "plate": plate,
        "wall": wall,
        "cuboid": cuboid,
        "square_pyramid": square_pyramid,
    }
    if class_label not in makers:
        raise ValueError(f"not a group B class: {class_label!r}")
    return makers[class_label](**params)


# ---------------------------------------------------------------------------
# Group C: curated composite instances
# ---------------------------------------------------------------------------

def _ring_a(z: int) -> list[Primitive]:
    return [
        Primitive(0, 0, z, 0), Primitive(4, 0, z, 0),
        Primitive(0, 6, z, 0), Primitive(4, 6, z, 0),
        Primitive(0, 2, z, 1), Primitive(6, 2, z, 1),
    ]


def _ring_b(z: int) -> list[Primitive]:
    return [
        Primitive(0, 0, z, 1), Primitive(6, 0, z, 1),
        Primitive(0, 4, z, 1), Primitive(6, 4, z, 1),
        Primitive(2, 0, z, 0), Primitive(2, 6, z, 0),
    ]


def _bench_bricks() -> list[Primitive]:
    seat = _slab(8, 4, 2)
    back = [Primitive(0, 0, 2, 0), Primitive(4, 0, 2, 0), Primitive(2, 0, 3, 0)]
    return seat + back


def _sofa_bricks() -> list[Primitive]:
    seat = _slab(8, 8, 2)
    back = [Primitive(0, 0, 2, 0), Primitive(4, 0, 2, 0), Primitive(2, 0, 3, 0)]
    arms = [Primitive(0, 2, 2, 1), Primitive(6, 2, 2, 1)]
    return seat + back + arms


def _cup_bricks() -> list[Primitive]:
    return _slab(8, 8, 2) + _ring_a(2) + _ring_b(3)


def _hollow_bricks() -> list[Primitive]:
    return _ring_a(0) + _ring_b(1) + _ring_a(2) + _ring_b(3)


def _table_bricks() -> list[Primitive]:
    legs = [
        Primitive(a1, a2, z, 0)
        for a1, a2 in ((0, 0), (4, 0), (0, 6), (4, 6))
        for z in (0, 1)
    ]
    top = _layer_a(8, 8, 2) + _layer_b(8, 8, 3)
    return legs + top


def _car_bricks() -> list[Primitive]:
    chassis = _slab(8, 4, 2)
    cabin = _layer_a(4, 4, 2, 2, 0) + _layer_b(4, 4, 3, 2, 0)
    return chassis + cabin


def generate_group_c() -> list[ShapeInstance]:
    """One curated instance per composite class."""
    makers = {
        "bench": _bench_bricks,
        "sofa": _sofa_bricks,
        "cup": _cup_bricks,
        "hollow": _hollow_bricks,
        "table": _table_bricks,
        "car": _car_bricks,
    }
    return [
        ShapeInstance(label, _sequence_order(makers[label]()))
        for label in GROUP_C
    ]


# ---------------------------------------------------------------------------
# Augmentation and statistics
# ---------------------------------------------------------------------------

def augment(instance: ShapeInstance, rng_seed: int, count: int) -> list[tuple[Primitive, ...]]:
    """Sample ``count`` valid assembly orders of the instance's brick set."""
    if validate_sequence(instance.sequence) is not None:
        raise ValueError("cannot augment an invalid instance")
    bricks = list(instance.sequence)
    rng = np.random.default_rng(rng_seed)
    orders = []
    for _ in range(count):
        remaining = list(bricks)
        placed: list[Primitive] = []
        while remaining:
            if placed:
                options = [b for b in remaining if any(connects(b, p) for p in placed)]
            else:
                options = [b for b in remaining if b.z == 0]
            pick = options[int(rng.integers(len(options)))]
            placed.append(pick)
            remaining.remove(pick)
        orders.append(tuple(placed))
    return orders


def stats(collection: Iterable[ShapeInstance]) -> dict[str, tuple[int, float, float]]:
    """Per-class (instance count, mean bricks, population std of bricks)."""
    sizes: dict[str, list[int]] = {}
    for inst in collection:
        sizes.setdefault(inst.class_label, []).append(len(inst.sequence))
    out = {}
    for label, values in sorted(sizes.items()):
        arr = np.array(values, dtype=float)
        out[label] = (len(values), float(arr.mean()), float(arr.std()))
    return out


def stats_csv(collection: Iterable[ShapeInstance]) -> str:
    lines = ["class,count,mean,std"]
    for label, (count, mean, std) in stats(collection).items():
        lines.append(f"{label},{count},{mean!r},{std!r}")
    return "\n".join(lines) + "\n"
