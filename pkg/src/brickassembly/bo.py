"""Candidate selection: acquisition, scalarization, and the per-step loops.

Each assembly step evaluates a fixed budget of q candidate placements: v
uniformly random ones seed the surrogates, then the remaining q - v are
chosen one at a time by maximizing a randomly scalarized GP-UCB over a
fresh sample of feasible placements. The step returns the observed
placement with the best occupiability score, stability breaking ties.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from . import gp
from .lattice import Combination, GridBounds, Primitive, enumerate_attachments
from .occupiability import TargetShape, occupiability_score
from .stability import StabilityConfig, stability_penalty


class SaturationError(RuntimeError):
    """No feasible placement remains."""


@dataclass(frozen=True)
class BoConfig:
    """Budgets and schedules for one candidate-selection step.

    q total candidates are observed per step, the first v at random. The
    acquisition is maximized over acq_samples sampled feasible placements,
    or over as many as fit in time_budget_s when that is set. gamma
    follows gamma0 + gamma1 * ln(1 + t) with t the observation count.
    """

    v: int = 10
    q: int = 20
    acq_samples: int = 1000
    time_budget_s: Optional[float] = None
    gamma0: float = 1.0
    gamma1: float = 1.0
    lambda_o_range: tuple[float, float] = (0.8, 0.9)
    lambda_s_range: tuple[float, float] = (0.0, 0.1)

    def __post_init__(self):
        if not (self.q > self.v >= 1):
            raise ValueError(f"need q > v >= 1, got q={self.q}, v={self.v}")
        if self.acq_samples < 1:
            raise ValueError("acq_samples must be >= 1")
        for lo, hi in (self.lambda_o_range, self.lambda_s_range):
            if not (0.0 <= lo <= hi <= 1.0):
                raise ValueError("lambda ranges must satisfy 0 <= lo <= hi <= 1")


class Observation(NamedTuple):
    """One evaluated placement with its two scores."""

    primitive: Primitive
    y_o: float
    y_s: float


def ucb(mean: float, var: float, gamma: float) -> float:
    """Upper confidence bound mean + gamma * sqrt(var)."""
    return mean + gamma * np.sqrt(var)


def scalarized_acquisition(
    p: Primitive,
    model_o: gp.GpModel,
    model_s: gp.GpModel,
    lambda_o: float,
    lambda_s: float,
    gamma: float,
) -> float:
    """Randomly weighted sum of the two per-objective UCB values at p."""
    mu_o, var_o = gp.posterior(model_o, p)
    mu_s, var_s = gp.posterior(model_s, p)
    return lambda_o * ucb(mu_o, var_o, gamma) + lambda_s * ucb(mu_s, var_s, gamma)


def gamma_schedule(cfg: BoConfig, t: int) -> float:
    return cfg.gamma0 + cfg.gamma1 * np.log1p(t)


def _sample_pool(
    feasible: list[Primitive], cfg: BoConfig, rng: np.random.Generator
) -> list[Primitive]:
    """The placements scored by one acquisition maximization."""
    if cfg.time_budget_s is None:
        if cfg.acq_samples >= len(feasible):
            return list(feasible)
        idx = rng.choice(len(feasible), size=cfg.acq_samples, replace=False)
        return [feasible[i] for i in sorted(idx)]
    deadline = time.monotonic() + cfg.time_budget_s
    order = rng.permutation(len(feasible))
    pool = []
    for i in order:
        pool.append(feasible[i])
        if time.monotonic() >= deadline:
            break
    pool.sort(key=Primitive.sort_key)
    return pool


def _acquisition_argmax(
    pool: list[Primitive],
    models: list[tuple[float, gp.GpModel]],
    gamma: float,
) -> Primitive:
    X = gp.encode_batch(pool)
    total = np.zeros(len(pool))
    for lam, model in models:
        if lam == 0.0:
            continue
        mu, var = model.posterior_batch(X)
        total += lam * (mu + gamma * np.sqrt(var))
    best = np.flatnonzero(total == total.max())
    if len(best) == 1:
        return pool[best[0]]
    return min((pool[i] for i in best), key=Primitive.sort_key)


def query_candidate(
    c: Combination,
    history: list[Observation],
    cfg: BoConfig,
    bounds: Optional[GridBounds],
    rng: np.random.Generator,
    exclude: Optional[set[Primitive]] = None,
) -> Primitive:
    """One surrogate-guided query: fit, sample feasible placements, maximize.

    Fits one GP per objective on the encoded history, draws the
    scalarization weights, and returns the sampled feasible placement with
    the highest weighted UCB. Ties break lexicographically. Raises
    SaturationError when no feasible placement remains.
    """
    if not history:
        raise ValueError("need at least one observation to fit surrogates")
    feasible = enumerate_attachments(c, bounds)
    if exclude:
        feasible = [p for p in feasible if p not in exclude]
    if not feasible:
        raise SaturationError("assembly saturated")

    prims = [o.primitive for o in history]
    model_o = gp.fit(prims, [o.y_o for o in history])
    model_s = gp.fit(prims, [o.y_s for o in history])
    lambda_o = float(rng.uniform(*cfg.lambda_o_range))
    lambda_s = float(rng.uniform(*cfg.lambda_s_range))
    gamma = gamma_schedule(cfg, len(history))

    pool = _sample_pool(feasible, cfg, rng)
    return _acquisition_argmax(pool, [(lambda_o, model_o), (lambda_s, model_s)], gamma)


def select_next(
    c: Combination,
    cfg: BoConfig,
    target: TargetShape,
    stability_cfg: StabilityConfig,
    rng: np.random.Generator,
    exclude: Optional[set[Primitive]] = None,
) -> tuple[Primitive, list[Observation]]:
    """Pick the next placement after observing up to q candidates.

    Returns the observed placement with the highest occupiability score,
    breaking ties by stability and then lexicographic order, together with
    every observation made. Raises SaturationError when nothing can be
    placed.
    """

    def evaluate(p: Primitive) -> Observation:
        trial = c.copy()
        trial.add(p)
        return Observation(
            primitive=p,
            y_o=float(occupiability_score(p, c, target)),
            y_s=-stability_penalty(trial, stability_cfg),
        )

    return _run_candidate_loop(c, cfg, target.extents, rng, evaluate, exclude)


def _run_candidate_loop(
    c: Combination,
    cfg: BoConfig,
    bounds: Optional[GridBounds],
    rng: np.random.Generator,
    evaluate: Callable[[Primitive], Observation],
    exclude: Optional[set[Primitive]] = None,
) -> tuple[Primitive, list[Observation]]:
    feasible = enumerate_attachments(c, bounds)
    if exclude:
        feasible = [p for p in feasible if p not in exclude]
    if not feasible:
        raise SaturationError("assembly saturated")

    if cfg.v >= len(feasible):
        initial = list(feasible)
    else:
        idx = rng.choice(len(feasible), size=cfg.v, replace=False)
        initial = [feasible[i] for i in sorted(idx)]

    observations = [evaluate(p) for p in initial]
    seen = {o.primitive for o in observations}
    budget = min(cfg.q, len(feasible))
    base_exclude = set(exclude) if exclude else set()

    while len(observations) < budget:
        p = query_candidate(c, observations, cfg, bounds, rng, exclude=base_exclude | seen)
        observations.append(evaluate(p))
        seen.add(p)

    best = max(
        observations,
        key=lambda o: (o.y_o, o.y_s, tuple(-v for v in o.primitive.sort_key())),
    )
    return best.primitive, observations
