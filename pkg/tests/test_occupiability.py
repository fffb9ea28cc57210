import numpy as np
import pytest

from brickassembly.lattice import Combination, GridBounds, Primitive, enumerate_attachments, footprint
from brickassembly.occupiability import (
    OccupiabilityGrid,
    TargetShape,
    connected_studs,
    depth,
    height,
    occupiability_score,
    occupiability_scores_batch,
    width,
)


def slab_target():
    return TargetShape.from_cells(
        [(i, j, 0) for i in range(4) for j in range(2)], (8, 8, 2)
    )


class TestTargetShape:
    def test_rejects_out_of_extents(self):
        with pytest.raises(ValueError):
            TargetShape.from_cells([(8, 0, 0)], (8, 8, 2))

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            TargetShape.from_cells([], (4, 4, 1))

    def test_json_round_trip(self):
        t = slab_target()
        assert TargetShape.from_json(t.to_json()) == t

    def test_from_combination_voxelizes(self):
        c = Combination.from_bricks([Primitive(0, 0, 0, 0), Primitive(0, 0, 1, 0)])
        t = TargetShape.from_combination(c)
        assert len(t.cells) == 16
        assert tuple(t.extents) == (4, 2, 2)

    def test_from_combination_shifts_to_origin(self):
        c = Combination.from_bricks([Primitive(3, 2, 0, 0)])
        t = TargetShape.from_combination(c)
        assert (0, 0, 0) in t.cells
        assert tuple(t.extents) == (4, 2, 1)


class TestGrid:
    def test_occupancy(self):
        grid = OccupiabilityGrid.for_combination(
            slab_target(), Combination.from_bricks([Primitive(0, 0, 0, 0)])
        )
        assert grid.occupancy((0, 0, 0)) == 1
        assert grid.occupancy((0, 0, 1)) == 0

    def test_occupancy_empty_combination(self):
        grid = OccupiabilityGrid(target=slab_target())
        assert grid.occupancy((0, 0, 0)) == 0

    def test_occupiability_cases(self):
        target = slab_target()
        empty = OccupiabilityGrid(target=target)
        assert empty.occupiability((0, 0, 0)) == 1
        covered = OccupiabilityGrid.for_combination(
            target, Combination.from_bricks([Primitive(0, 0, 0, 0)])
        )
        assert covered.occupiability((0, 0, 0)) == 0
        assert empty.occupiability((5, 5, 0)) == 0  # outside target

    def test_out_of_extents_errors(self):
        grid = OccupiabilityGrid(target=slab_target())
        with pytest.raises(ValueError):
            grid.occupancy((9, 0, 0))
        with pytest.raises(ValueError):
            grid.occupiability((0, 0, 5))


class TestOccupiabilityScore:
    def test_full_coverage(self):
        target = slab_target()
        assert occupiability_score(Primitive(0, 0, 0, 0), Combination(), target) == 8

    def test_partial_coverage(self):
        target = slab_target()
        assert occupiability_score(Primitive(2, 0, 0, 0), Combination(), target) == 4

    def test_outside_target(self):
        target = slab_target()
        assert occupiability_score(Primitive(4, 4, 0, 0), Combination(), target) == 0

    def test_out_of_extents_errors(self):
        with pytest.raises(ValueError):
            occupiability_score(Primitive(6, 0, 0, 0), Combination(), slab_target())

    def test_monotone_consumption(self):
        target = TargetShape.box(8, 8, 2)
        empty = Combination()
        one = Combination.from_bricks([Primitive(0, 0, 0, 0)])
        cand = Primitive(2, 0, 1, 0)
        assert occupiability_score(cand, one, target) <= occupiability_score(cand, empty, target)

    def test_batch_matches_scalar(self):
        target = TargetShape.box(8, 8, 3)
        combo = Combination.from_bricks([Primitive(0, 0, 0, 0), Primitive(2, 0, 1, 0)])
        cands = enumerate_attachments(combo, target.extents)
        occ_mask = np.zeros(tuple(target.extents), dtype=np.uint8)
        for cell in combo.occupied_cells():
            occ_mask[cell] = 1
        batch = occupiability_scores_batch(
            np.array([tuple(p) for p in cands]), target.mask(), occ_mask
        )
        scalar = [occupiability_score(p, combo, target) for p in cands]
        assert batch.tolist() == scalar


class TestExplicitFunctions:
    def test_single_brick(self):
        c = Combination.from_bricks([Primitive(0, 0, 0, 0)])
        assert height(c) == 1
        assert width(c) == 4
        assert depth(c) == 2
        assert connected_studs(c) == 0

    def test_perfect_stack(self):
        c = Combination.from_bricks([Primitive(0, 0, 0, 0), Primitive(0, 0, 1, 0)])
        assert height(c) == 2
        assert connected_studs(c) == 8

    def test_offset_stack(self):
        c = Combination.from_bricks([Primitive(0, 0, 0, 0), Primitive(3, 0, 1, 0)])
        assert width(c) == 7
        assert connected_studs(c) == 2

    def test_empty_raises(self):
        for fn in (height, width, depth, connected_studs):
            with pytest.raises(ValueError):
                fn(Combination())

    def test_order_invariance(self):
        bricks = [Primitive(0, 0, 0, 0), Primitive(2, 0, 1, 0), Primitive(4, 0, 0, 0)]
        a = Combination.from_bricks(bricks)
        b = Combination.from_bricks([bricks[0], bricks[1], bricks[2]])
        b.bricks = [bricks[2], bricks[0], bricks[1]]  # same set, shuffled
        for fn in (height, width, depth, connected_studs):
            assert fn(a) == fn(b)
