import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brickassembly.lattice import (
    Combination,
    GridBounds,
    Primitive,
    connects,
    enumerate_attachments,
    footprint,
    overlaps,
    plan_overlap_cells,
    sample_attachments,
)

primitives = st.builds(
    Primitive,
    a1=st.integers(-6, 6),
    a2=st.integers(-6, 6),
    z=st.integers(0, 4),
    d=st.integers(0, 1),
)


def brute_force_attachments(base: Primitive) -> set[Primitive]:
    """Independent oracle: scan all nearby offsets and keep legal ones."""
    found = set()
    for dz in (-1, 1):
        z = base.z + dz
        if z < 0:
            continue
        for dx in range(-5, 6):
            for dy in range(-5, 6):
                for d in (0, 1):
                    cand = Primitive(base.a1 + dx, base.a2 + dy, z, d)
                    shared_plan = {(i, j) for i, j, _ in footprint(cand)} & {
                        (i, j) for i, j, _ in footprint(base)
                    }
                    if shared_plan:
                        found.add(cand)
    return found


class TestFootprint:
    def test_lengthwise_origin(self):
        cells = footprint(Primitive(0, 0, 0, 0))
        assert cells == {(i, j, 0) for i in range(4) for j in range(2)}

    def test_breadthwise_origin(self):
        cells = footprint(Primitive(0, 0, 0, 1))
        assert cells == {(i, j, 0) for i in range(2) for j in range(4)}

    def test_translated(self):
        cells = footprint(Primitive(2, 5, 3, 0))
        assert cells == {(i, j, 3) for i in range(2, 6) for j in range(5, 7)}

    @given(primitives)
    def test_always_eight_cells(self, p):
        assert len(footprint(p)) == 8


class TestPredicates:
    def test_full_stack_connects(self):
        assert connects(Primitive(0, 0, 0, 0), Primitive(0, 0, 1, 0))

    def test_no_plan_overlap_no_connection(self):
        assert not connects(Primitive(0, 0, 0, 0), Primitive(4, 0, 1, 0))

    def test_single_stud_corner_connects(self):
        p, q = Primitive(0, 0, 0, 0), Primitive(3, 1, 1, 0)
        assert connects(p, q)
        assert plan_overlap_cells(p, q) == {(3, 1)}

    def test_same_layer_never_connects(self):
        assert not connects(Primitive(0, 0, 0, 0), Primitive(0, 0, 0, 1))

    def test_identical_overlap(self):
        assert overlaps(Primitive(0, 0, 0, 0), Primitive(0, 0, 0, 0))

    def test_different_layers_never_overlap(self):
        assert not overlaps(Primitive(0, 0, 0, 0), Primitive(0, 0, 1, 0))

    def test_cross_direction_overlap(self):
        p, q = Primitive(0, 0, 0, 0), Primitive(3, 0, 0, 1)
        assert overlaps(p, q)
        assert plan_overlap_cells(p, q) == {(3, 0), (3, 1)}

    @given(primitives, primitives)
    @settings(max_examples=200)
    def test_symmetry(self, p, q):
        assert overlaps(p, q) == overlaps(q, p)
        assert connects(p, q) == connects(q, p)

    @given(primitives, primitives)
    @settings(max_examples=200)
    def test_predicates_match_cell_sets(self, p, q):
        fp, fq = footprint(p), footprint(q)
        assert overlaps(p, q) == bool(fp & fq)
        plan_p = {(i, j) for i, j, _ in fp}
        plan_q = {(i, j) for i, j, _ in fq}
        expected = abs(p.z - q.z) == 1 and bool(plan_p & plan_q)
        assert connects(p, q) == expected


class TestPrimitive:
    def test_invariants(self):
        with pytest.raises(ValueError):
            Primitive(0, 0, -1, 0).validate()
        with pytest.raises(ValueError):
            Primitive(0, 0, 0, 2).validate()

    def test_center_round_trip(self):
        for p in (Primitive(0, 0, 0, 0), Primitive(3, 1, 2, 1), Primitive(-2, -1, 0, 0)):
            c1, c2 = p.center
            assert Primitive.from_center(c1, c2, p.z, p.d) == p

    def test_center_values(self):
        assert Primitive(0, 0, 0, 0).center == (2.0, 1.0)
        assert Primitive(0, 0, 0, 1).center == (1.0, 2.0)

    def test_off_lattice_center_rejected(self):
        with pytest.raises(ValueError):
            Primitive.from_center(2.5, 1.0, 0, 0)


class TestCombination:
    def test_rejects_overlap(self):
        c = Combination.from_bricks([Primitive(0, 0, 0, 0)])
        with pytest.raises(ValueError, match="overlaps"):
            c.add(Primitive(0, 0, 0, 1))

    def test_rejects_disconnected(self):
        c = Combination.from_bricks([Primitive(0, 0, 0, 0)])
        with pytest.raises(ValueError, match="connect"):
            c.add(Primitive(10, 10, 0, 0))

    def test_rejects_floating_first_brick(self):
        with pytest.raises(ValueError, match="ground"):
            Combination.from_bricks([Primitive(0, 0, 1, 0)])

    def test_pop_last_restores_cells(self):
        c = Combination.from_bricks([Primitive(0, 0, 0, 0), Primitive(0, 0, 1, 0)])
        removed = c.pop_last(1)
        assert removed == [Primitive(0, 0, 1, 0)]
        assert c.occupied_cells() == footprint(Primitive(0, 0, 0, 0))


class TestEnumerateAttachments:
    def test_single_brick_unbounded_is_46(self):
        c = Combination.from_bricks([Primitive(0, 0, 0, 0)])
        att = enumerate_attachments(c, None)
        assert len(att) == 46
        assert sum(1 for p in att if p.d == 0) == 21
        assert sum(1 for p in att if p.d == 1) == 25

    def test_matches_brute_force_oracle(self):
        base = Primitive(0, 0, 0, 0)
        c = Combination.from_bricks([base])
        assert set(enumerate_attachments(c, None)) == brute_force_attachments(base)

    def test_elevated_brick_attaches_above_and_below(self):
        c = Combination.from_bricks(
            [Primitive(0, 0, 0, 0), Primitive(0, 0, 1, 0)], validate=True
        )
        att = enumerate_attachments(c, None)
        assert any(p.z == 2 for p in att)
        assert all(not overlaps(p, b) for p in att for b in c.bricks)
        assert all(any(connects(p, b) for b in c.bricks) for p in att)

    def test_bounds_filter(self):
        c = Combination.from_bricks([Primitive(0, 0, 0, 0)])
        att = enumerate_attachments(c, GridBounds(4, 4, 2))
        unbounded = set(enumerate_attachments(c, None))
        assert set(att) <= unbounded
        for p in att:
            assert GridBounds(4, 4, 2).contains(p)

    def test_empty_combination_raises(self):
        with pytest.raises(ValueError, match="no structure"):
            enumerate_attachments(Combination(), None)

    def test_order_and_uniqueness(self):
        c = Combination.from_bricks([Primitive(0, 0, 0, 0), Primitive(2, 0, 1, 0)])
        att = enumerate_attachments(c, None)
        keys = [p.sort_key() for p in att]
        assert keys == sorted(keys)
        assert len(set(att)) == len(att)


class TestSampleAttachments:
    def test_reproducible(self):
        c = Combination.from_bricks([Primitive(0, 0, 0, 0)])
        a = sample_attachments(c, None, 10, np.random.default_rng(5))
        b = sample_attachments(c, None, 10, np.random.default_rng(5))
        assert a == b
        assert len(a) == 10
        assert len(set(a)) == 10

    def test_clamps_to_feasible(self):
        c = Combination.from_bricks([Primitive(0, 0, 0, 0)])
        got = sample_attachments(c, None, 100, np.random.default_rng(0))
        assert len(got) == 46

    def test_subset_of_enumeration(self):
        c = Combination.from_bricks([Primitive(0, 0, 0, 0)])
        universe = set(enumerate_attachments(c, None))
        for seed in (1, 2):
            got = sample_attachments(c, None, 12, np.random.default_rng(seed))
            assert set(got) <= universe

    def test_exclusion(self):
        c = Combination.from_bricks([Primitive(0, 0, 0, 0)])
        universe = enumerate_attachments(c, None)
        banned = set(universe[:40])
        got = sample_attachments(c, None, 46, np.random.default_rng(0), exclude=banned)
        assert set(got) == set(universe[40:])
