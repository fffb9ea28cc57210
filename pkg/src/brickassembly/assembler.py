"""Outer assembly loop with rollback, baselines, and combination counting.

The main loop places one brick per step via the candidate-selection
machinery, then checks a trailing window of occupiability scores: when the
window's cumulative shortfall from the 8-cell ideal reaches the threshold,
the last bricks are removed and those placements are barred from
re-selection at their steps. Two anti-loop guards bound the total work:
barred placements never come back at the same step, and a step that has
been re-executed five times stops rolling back.

The explicit-function drivers run the same selection loop against a single
closed-form objective with rollback and stability disabled, alongside
random, best-of-q-random, and full-enumeration oracle baselines.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._backend import active_backend
from .bo import BoConfig, Observation, SaturationError, _run_candidate_loop, select_next
from .lattice import Combination, GridBounds, Primitive, enumerate_attachments
from .occupiability import TargetShape, depth, height, width
from .stability import StabilityConfig

ROLLBACK_SHORTFALL = "shortfall"
ROLLBACK_LITERAL = "literal"

PER_STEP_IDEAL = 8.0
MAX_STEP_REPEATS = 5

OBJECTIVES = ("height", "width", "depth", "studs")
METHODS = ("bo", "random", "greedy", "oracle")


@dataclass(frozen=True)
class AssemblyConfig:
    """Outer-loop budgets: step count, rollback window and threshold."""

    steps: int = 10
    rollback_window: int = 2
    rollback_threshold: float = 12.0
    rollback_mode: str = ROLLBACK_SHORTFALL
    max_step_repeats: int = MAX_STEP_REPEATS
    initial: tuple[Primitive, ...] = (Primitive(0, 0, 0, 0),)

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.rollback_window < 1:
            raise ValueError("rollback window must be >= 1")
        if self.rollback_threshold < 0:
            raise ValueError("rollback threshold must be >= 0")
        if self.rollback_mode not in (ROLLBACK_SHORTFALL, ROLLBACK_LITERAL):
            raise ValueError(f"unknown rollback mode {self.rollback_mode!r}")
        if not self.initial:
            raise ValueError("initial combination must hold at least one brick")


@dataclass
class StepRecord:
    t: int
    brick: Primitive
    y_o: float
    y_s: float
    observations: list[Observation]
    rollback_depth: int = 0

    @property
    def rollback(self) -> bool:
        return self.rollback_depth > 0

    def to_doc(self) -> dict:
        return {
            "t": self.t,
            "brick": list(self.brick),
            "y_o": self.y_o,
            "y_s": self.y_s,
            "observations": [
                {"brick": list(o.primitive), "y_o": o.y_o, "y_s": o.y_s}
                for o in self.observations
            ],
            "rollback": self.rollback,
            "rollback_depth": self.rollback_depth,
        }


@dataclass
class AssemblyTrace:
    """Chronological record of an assembly run; replayable."""

    config: dict
    steps: list[StepRecord] = field(default_factory=list)
    events: list[dict] = field(default_factory=list)
    final: Optional[Combination] = None
    status: str = "completed"

    def to_json(self) -> str:
        doc = {
            "config": self.config,
            "steps": [s.to_doc() for s in self.steps],
            "events": self.events,
            "final": [list(b) for b in (self.final.bricks if self.final else [])],
            "status": self.status,
        }
        return json.dumps(doc, sort_keys=True)

    def replay(self) -> Combination:
        """Rebuild the final combination from the chronological records."""
        combo = Combination.from_bricks(
            Primitive(*b) for b in self.config["initial"]
        )
        for rec in self.steps:
            combo.add(rec.brick)
            if rec.rollback_depth:
                combo.pop_last(rec.rollback_depth)
        return combo


def _window_triggers(cfg: AssemblyConfig, chosen_scores: list[float], step_max: list[float]) -> bool:
    """Whether the trailing window asks for a rollback."""
    w = cfg.rollback_window
    if len(chosen_scores) < w:
        return False
    if cfg.rollback_mode == ROLLBACK_SHORTFALL:
        if cfg.rollback_threshold == 0:
            return False
        shortfall = sum(PER_STEP_IDEAL - s for s in chosen_scores[-w:])
        return shortfall >= cfg.rollback_threshold
    regret = sum(m - s for m, s in zip(step_max[-w:], chosen_scores[-w:]))
    return regret < cfg.rollback_threshold


def assemble(
    target: TargetShape,
    cfg: AssemblyConfig,
    bo_cfg: Optional[BoConfig] = None,
    stability_cfg: Optional[StabilityConfig] = None,
    seed: int = 0,
) -> AssemblyTrace:
    """Grow the initial combination by cfg.steps bricks toward the target.

    Returns the full trace; trace.status is "completed" after all steps or
    "saturated" when no feasible placement remained (partial result).
    """
    bo_cfg = bo_cfg or BoConfig()
    stability_cfg = stability_cfg or StabilityConfig()
    rng = np.random.default_rng(seed)

    combo = Combination.from_bricks(cfg.initial)
    trace = AssemblyTrace(config={
        "steps": cfg.steps,
        "rollback_window": cfg.rollback_window,
        "rollback_threshold": cfg.rollback_threshold,
        "rollback_mode": cfg.rollback_mode,
        "max_step_repeats": cfg.max_step_repeats,
        "initial": [list(b) for b in cfg.initial],
        "seed": seed,
        "bo": {
            "v": bo_cfg.v, "q": bo_cfg.q, "acq_samples": bo_cfg.acq_samples,
            "gamma0": bo_cfg.gamma0, "gamma1": bo_cfg.gamma1,
            "lambda_o_range": list(bo_cfg.lambda_o_range),
            "lambda_s_range": list(bo_cfg.lambda_s_range),
        },
        "stability": {
            "perturbation": stability_cfg.perturbation,
            "w_margin": stability_cfg.w_margin,
            "w_disconnect": stability_cfg.w_disconnect,
        },
        "target_extents": list(target.extents),
    })

    excluded: dict[int, set[Primitive]] = {}
    exec_count: dict[int, int] = {}
    sat_count: dict[int, int] = {}
    chosen_scores: list[float] = []
    step_max: list[float] = []
    t = 0

    def forced_rollback(step: int) -> bool:
        """Escape a dead end by undoing the trailing window, same exclusion
        rules as a scored rollback. False when stuck. Every retry strictly
        grows an exclusion set, so the per-step cap only trims worst cases."""
        nonlocal t
        sat_count[step] = sat_count.get(step, 0) + 1
        if sat_count[step] >= cfg.max_step_repeats:
            return False
        if target.cells <= combo.occupied_cells():
            return False
        if t < cfg.rollback_window:
            return False
        depth = cfg.rollback_window
        removed = combo.pop_last(depth)
        trace.steps[-1].rollback_depth += depth
        removed_steps = []
        for offset, b in enumerate(removed):
            s = t - offset
            excluded.setdefault(s, set()).add(b)
            removed_steps.append({"t": s, "brick": list(b)})
        del chosen_scores[-depth:]
        del step_max[-depth:]
        trace.events.append({"kind": "rollback_forced", "t": step, "removed": removed_steps})
        t -= depth
        return True

    while t < cfg.steps:
        step = t + 1
        try:
            brick, observations = select_next(
                combo, bo_cfg, target, stability_cfg, rng,
                exclude=excluded.get(step),
            )
        except SaturationError:
            if forced_rollback(step):
                continue
            trace.status = "saturated"
            trace.events.append({"kind": "saturated", "t": step})
            break

        combo.add(brick)
        exec_count[step] = exec_count.get(step, 0) + 1
        chosen = next(o for o in observations if o.primitive == brick)
        chosen_scores.append(chosen.y_o)
        step_max.append(max(o.y_o for o in observations))
        record = StepRecord(
            t=step, brick=brick, y_o=chosen.y_o, y_s=chosen.y_s,
            observations=observations,
        )
        trace.steps.append(record)
        t = step

        if t >= cfg.rollback_window and _window_triggers(cfg, chosen_scores, step_max):
            if exec_count.get(t, 0) >= cfg.max_step_repeats:
                trace.events.append({"kind": "rollback_skipped", "t": t})
                continue
            removed = combo.pop_last(cfg.rollback_window)
            record.rollback_depth += cfg.rollback_window
            removed_steps = []
            for offset, b in enumerate(removed):
                s = t - offset
                excluded.setdefault(s, set()).add(b)
                removed_steps.append({"t": s, "brick": list(b)})
            del chosen_scores[-cfg.rollback_window:]
            del step_max[-cfg.rollback_window:]
            trace.events.append({
                "kind": "rollback", "t": t, "removed": removed_steps,
            })
            t -= cfg.rollback_window

    trace.final = combo
    return trace


# ---------------------------------------------------------------------------
# Explicit evaluation functions and baselines
# ---------------------------------------------------------------------------

def _initial_value(objective: str, c: Combination) -> float:
    if objective == "height":
        return float(height(c))
    if objective == "width":
        return float(width(c))
    if objective == "depth":
        return float(depth(c))
    if objective == "studs":
        from .occupiability import connected_studs

        return float(connected_studs(c))
    raise ValueError(f"unknown objective {objective!r}")


def objective_gains(objective: str, c: Combination, candidates: list[Primitive]) -> np.ndarray:
    """Incremental objective value of each candidate against c."""
    if not candidates:
        return np.zeros(0)
    arr = np.array([tuple(p) for p in candidates], dtype=np.int64)
    if objective == "height":
        h = height(c)
        return np.maximum(0, arr[:, 2] + 1 - h).astype(float)
    if objective == "width":
        lo = min(b.a1 for b in c.bricks)
        hi = max(b.a1 + b.dims[0] for b in c.bricks)
        ends = arr[:, 0] + np.where(arr[:, 3] == 0, 4, 2)
        return (np.maximum(hi, ends) - np.minimum(lo, arr[:, 0]) - (hi - lo)).astype(float)
    if objective == "depth":
        lo = min(b.a2 for b in c.bricks)
        hi = max(b.a2 + b.dims[1] for b in c.bricks)
        ends = arr[:, 1] + np.where(arr[:, 3] == 0, 2, 4)
        return (np.maximum(hi, ends) - np.minimum(lo, arr[:, 1]) - (hi - lo)).astype(float)
    if objective == "studs":
        return active_backend().contact_cells(arr, c.as_array()).astype(float)
    raise ValueError(f"unknown objective {objective!r}")


def _argmax_gain(candidates: list[Primitive], gains: np.ndarray) -> Primitive:
    best = np.flatnonzero(gains == gains.max())
    if len(best) == 1:
        return candidates[best[0]]
    return min((candidates[i] for i in best), key=Primitive.sort_key)


def _explicit_step(
    objective: str,
    method: str,
    c: Combination,
    bo_cfg: BoConfig,
    rng: np.random.Generator,
) -> Primitive:
    feasible = enumerate_attachments(c, None)
    if not feasible:
        raise SaturationError("assembly saturated")

    if method == "oracle":
        return _argmax_gain(feasible, objective_gains(objective, c, feasible))
    if method == "random":
        return feasible[int(rng.integers(len(feasible)))]
    if method == "greedy":
        if bo_cfg.q >= len(feasible):
            pool = feasible
        else:
            idx = rng.choice(len(feasible), size=bo_cfg.q, replace=False)
            pool = [feasible[i] for i in sorted(idx)]
        return _argmax_gain(pool, objective_gains(objective, c, pool))
    if method == "bo":
        def evaluate(p: Primitive) -> Observation:
            gain = float(objective_gains(objective, c, [p])[0])
            return Observation(primitive=p, y_o=gain, y_s=0.0)

        brick, _ = _run_candidate_loop(c, bo_cfg, None, rng, evaluate)
        return brick
    raise ValueError(f"unknown method {method!r}")


def assemble_explicit(
    objective: str,
    method: str,
    steps: int,
    seeds: list[int],
    bo_cfg: Optional[BoConfig] = None,
) -> dict[int, list[float]]:
    """Per-seed objective value after each step for one method.

    Stability and rollback are off; the selection score is the incremental
    objective gain. The oracle ignores seeds and returns one series keyed
    by seed -1. On saturation the last value is held for remaining steps.
    """
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    bo_cfg = bo_cfg or BoConfig(lambda_s_range=(0.0, 0.0))
    if method == "oracle":
        seeds = [-1]

    curves: dict[int, list[float]] = {}
    for seed in seeds:
        rng = np.random.default_rng(max(seed, 0))
        combo = Combination.from_bricks([Primitive(0, 0, 0, 0)])
        values: list[float] = []
        for _ in range(steps):
            try:
                brick = _explicit_step(objective, method, combo, bo_cfg, rng)
            except SaturationError:
                values.append(values[-1] if values else _initial_value(objective, combo))
                continue
            combo.add(brick)
            values.append(_initial_value(objective, combo))
        curves[seed] = values
    return curves


# ---------------------------------------------------------------------------
# Combination counting
# ---------------------------------------------------------------------------

def _canonical_translation(bricks: frozenset[Primitive]) -> frozenset[Primitive]:
    lo1 = min(b.a1 for b in bricks)
    lo2 = min(b.a2 for b in bricks)
    lo3 = min(b.z for b in bricks)
    return frozenset(Primitive(b.a1 - lo1, b.a2 - lo2, b.z - lo3, b.d) for b in bricks)


def count_combinations(n: int, convention: str = "seed-fixed") -> dict:
    """Exhaustive count of distinct n-brick combinations.

    The first brick is pinned at the origin (lengthwise, ground layer) and
    combinations are counted as brick sets. Convention "seed-fixed" counts
    distinct sets as-is; "translation" first normalizes each set by
    translating its minimum corner to the origin. Published counts for
    n >= 3 depend on an unstated dedup convention, so for n = 3 the result
    is reported, not asserted, against any external figure.
    """
    if n not in (2, 3):
        raise ValueError("only n in {2, 3} is supported")
    if convention not in ("seed-fixed", "translation"):
        raise ValueError(f"unknown convention {convention!r}")

    seed = Primitive(0, 0, 0, 0)
    base = Combination.from_bricks([seed])
    two = enumerate_attachments(base, None)

    if n == 2:
        parallel = sum(1 for p in two if p.d == 0)
        return {
            "n": 2,
            "convention": convention,
            "total": len(two),
            "parallel": parallel,
            "perpendicular": len(two) - parallel,
        }

    sets: set[frozenset[Primitive]] = set()
    for p2 in two:
        combo = Combination.from_bricks([seed, p2])
        for p3 in enumerate_attachments(combo, None):
            key = frozenset((seed, p2, p3))
            if convention == "translation":
                key = _canonical_translation(key)
            sets.add(key)
    return {"n": 3, "convention": convention, "total": len(sets)}
