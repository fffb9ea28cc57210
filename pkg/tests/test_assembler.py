import json

import numpy as np
import pytest

from brickassembly.assembler import (
    AssemblyConfig,
    assemble,
    assemble_explicit,
    count_combinations,
    objective_gains,
)
from brickassembly.lattice import Combination, Primitive, connects, enumerate_attachments, overlaps
from brickassembly.occupiability import TargetShape, connected_studs, depth, height, width


def box_target(m1=8, m2=8, m3=3):
    return TargetShape.box(m1, m2, m3)


class TestAssemblyConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            AssemblyConfig(steps=0)
        with pytest.raises(ValueError):
            AssemblyConfig(rollback_window=0)
        with pytest.raises(ValueError):
            AssemblyConfig(rollback_mode="bogus")


class TestAssemble:
    def test_single_forced_step_completes_target(self):
        # Target exactly one brick-slot larger than the seed.
        cells = [(i, j, k) for i in range(4) for j in range(2) for k in range(2)]
        target = TargetShape.from_cells(cells, (4, 2, 2))
        cfg = AssemblyConfig(steps=1)
        trace = assemble(target, cfg, seed=0)
        assert trace.status == "completed"
        assert trace.final.occupied_cells() == target.cells

    def test_zero_threshold_never_rolls_back(self):
        target = box_target()
        cfg = AssemblyConfig(steps=6, rollback_threshold=0.0)
        trace = assemble(target, cfg, seed=0)
        assert not any(e["kind"] == "rollback" for e in trace.events)

    def test_final_combination_valid(self):
        target = box_target()
        trace = assemble(target, AssemblyConfig(steps=12), seed=1)
        bricks = trace.final.bricks
        rebuilt = Combination.from_bricks(bricks)  # validates incrementally
        assert rebuilt.occupied_cells() == trace.final.occupied_cells()
        for i, p in enumerate(bricks):
            for q in bricks[i + 1:]:
                assert not overlaps(p, q)

    def test_trace_replay_matches_final(self):
        target = box_target()
        trace = assemble(target, AssemblyConfig(steps=15), seed=2)
        assert trace.replay().bricks == trace.final.bricks

    def test_deterministic_trace_bytes(self):
        target = box_target()
        docs = [
            assemble(target, AssemblyConfig(steps=8), seed=7).to_json()
            for _ in range(2)
        ]
        assert docs[0] == docs[1]

    def test_trace_schema(self):
        target = box_target()
        doc = json.loads(assemble(target, AssemblyConfig(steps=4), seed=0).to_json())
        assert set(doc) == {"config", "steps", "events", "final", "status"}
        step = doc["steps"][0]
        assert set(step) == {"t", "brick", "y_o", "y_s", "observations", "rollback", "rollback_depth"}
        assert isinstance(step["brick"], list) and len(step["brick"]) == 4
        assert all(set(o) == {"brick", "y_o", "y_s"} for o in step["observations"])

    def test_rollback_removes_window_and_excludes(self):
        # The cuboid run saturates and rolls back repeatedly; every
        # rollback event must remove exactly the window size, and a
        # placement removed at step t must never be re-chosen at step t.
        target = box_target()
        cfg = AssemblyConfig(steps=30, rollback_window=2, rollback_threshold=12.0)
        trace = assemble(target, cfg, seed=0)
        rollback_events = [
            e for e in trace.events
            if e["kind"] in ("rollback", "rollback_forced")
        ]
        assert rollback_events, "run never rolled back; not exercising the mechanics"
        for event in rollback_events:
            assert len(event["removed"]) == cfg.rollback_window

        # Chronological replay: steps and their rollback markers interleave
        # with the events in order, so exclusion sets can be reconstructed.
        excluded: dict[int, set[tuple]] = {}
        event_iter = iter(rollback_events)
        for rec in trace.steps:
            assert tuple(rec.brick) not in excluded.get(rec.t, set())
            depth = rec.rollback_depth
            while depth > 0:
                event = next(event_iter)
                for item in event["removed"]:
                    excluded.setdefault(item["t"], set()).add(tuple(item["brick"]))
                depth -= len(event["removed"])
        assert trace.status in ("completed", "saturated")

    def test_literal_mode_rolls_back_constantly(self):
        target = box_target()
        cfg = AssemblyConfig(steps=6, rollback_mode="literal", rollback_threshold=1.0)
        trace = assemble(target, cfg, seed=0)
        assert any(e["kind"] in ("rollback", "rollback_skipped") for e in trace.events)


class TestExplicitObjectives:
    def test_gains_match_definitions(self):
        rng = np.random.default_rng(0)
        combo = Combination.from_bricks([Primitive(0, 0, 0, 0)])
        for _ in range(4):
            att = enumerate_attachments(combo, None)
            cand = att[int(rng.integers(len(att)))]
            for objective, fn in (
                ("height", height), ("width", width), ("depth", depth),
                ("studs", connected_studs),
            ):
                gain = float(objective_gains(objective, combo, [cand])[0])
                after = combo.copy()
                after.add(cand)
                assert gain == pytest.approx(fn(after) - fn(combo)), objective
            combo.add(cand)

    def test_oracle_height_curve(self):
        curves = assemble_explicit("height", "oracle", 6, [-1])
        assert curves[-1] == [float(t + 1) for t in range(1, 7)]

    def test_oracle_width_curve(self):
        curves = assemble_explicit("width", "oracle", 5, [-1])
        assert curves[-1] == [float(4 + 3 * t) for t in range(1, 6)]

    def test_oracle_studs_curve(self):
        curves = assemble_explicit("studs", "oracle", 5, [-1])
        assert curves[-1] == [float(8 * t) for t in range(1, 6)]

    def test_oracle_beats_every_method_stepwise(self):
        steps = 5
        oracle = assemble_explicit("height", "oracle", steps, [-1])[-1]
        for method in ("random", "greedy"):
            for seed, values in assemble_explicit("height", method, steps, [0, 1]).items():
                assert all(o >= v for o, v in zip(oracle, values))

    def test_random_reproducible(self):
        a = assemble_explicit("width", "random", 8, [3])
        b = assemble_explicit("width", "random", 8, [3])
        assert a == b

    def test_unknown_names_rejected(self):
        with pytest.raises(ValueError):
            assemble_explicit("volume", "oracle", 3, [0])
        with pytest.raises(ValueError):
            assemble_explicit("height", "annealing", 3, [0])

    def test_curves_monotone(self):
        for method in ("random", "greedy"):
            for values in assemble_explicit("depth", method, 6, [0, 1]).values():
                assert all(b >= a for a, b in zip(values, values[1:]))


class TestCountCombinations:
    def test_two_bricks(self):
        result = count_combinations(2)
        assert result["total"] == 46
        assert result["parallel"] == 21
        assert result["perpendicular"] == 25

    def test_three_bricks_conventions(self):
        fixed = count_combinations(3, "seed-fixed")
        translated = count_combinations(3, "translation")
        assert fixed["total"] == 3556
        assert translated["total"] <= fixed["total"]

    def test_rejects_other_n(self):
        with pytest.raises(ValueError):
            count_combinations(4)
