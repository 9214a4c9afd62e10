"""Black-box search for blood-type potential adjustments.

The objective is the summed life-years total over training cohorts with all
offers accepted, which makes every evaluation deterministic. The zero vector
is always evaluated first, so the tuned score can never fall below the plain
benefit-greedy baseline. The remaining budget goes to a seeded Sobol
quasi-random sweep of the search box followed by coordinate-descent
refinement around the incumbent with halving steps.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import qmc

from .acceptance import AcceptanceConfig
from .cohort import Cohort
from .policies import ModelSet, PolicyKind, PolicySpec
from .simulator import SimConfig, run

logger = logging.getLogger("allocsim.tuning")

Theta = Tuple[float, float, float, float]


@dataclass(frozen=True)
class TuneConfig:
    training_cohorts: Tuple[Cohort, ...]
    budget_evals: int = 50
    search_box: Tuple[Tuple[float, float], ...] = (((-5.0, 5.0),) * 4)
    local_refine: bool = True
    seed: int = 0

    def __post_init__(self):
        if not self.training_cohorts:
            raise ValueError("at least one training cohort is required")
        if self.budget_evals < 1:
            raise ValueError("budget_evals must be >= 1")
        box = tuple((float(lo), float(hi)) for lo, hi in self.search_box)
        if len(box) != 4 or any(hi <= lo for lo, hi in box):
            raise ValueError("search_box must be four (low, high) intervals")
        object.__setattr__(self, "search_box", box)


@dataclass(frozen=True)
class TuneResult:
    best_potentials: Theta
    best_score: float
    evaluations: Tuple[Tuple[Theta, float], ...]


def tune_result_to_dict(result: TuneResult) -> dict:
    return {
        "best_potentials": list(result.best_potentials),
        "best_score": result.best_score,
        "evaluations": [
            {"potentials": list(theta), "score": score} for theta, score in result.evaluations
        ],
    }


def evaluate_theta(
    theta: Sequence[float],
    cohorts: Sequence[Cohort],
    models: ModelSet,
    base_spec: PolicySpec,
) -> float:
    """Summed all-accept objective of the potential policy across cohorts."""
    potentials = tuple(float(v) for v in theta)
    spec = replace(base_spec, kind=PolicyKind.POTENTIAL, potentials=potentials)
    total = 0.0
    for cohort in cohorts:
        config = SimConfig(
            horizon_days=cohort.schema.horizon_days,
            policy=spec,
            acceptance=AcceptanceConfig(always_accept=True),
            batch_size=1,
            seed=0,  # no randomness is consumed under always_accept
            replications=1,
        )
        total += run(config, cohort, models).total_life_years
    return total


def _sobol_points(n: int, box: Tuple[Tuple[float, float], ...], seed: int) -> np.ndarray:
    if n <= 0:
        return np.zeros((0, len(box)))
    sampler = qmc.Sobol(d=len(box), scramble=True, seed=seed)
    # Draw the next power of two and truncate to keep the sampler warning-free.
    m = max(1, int(math.ceil(math.log2(n))))
    points = sampler.random_base2(m)[:n]
    lows = np.asarray([lo for lo, _ in box])
    highs = np.asarray([hi for _, hi in box])
    return qmc.scale(points, lows, highs)


def tune_potentials(
    config: TuneConfig,
    models: ModelSet,
    base_spec: PolicySpec,
) -> TuneResult:
    """Search the box for the best potentials; deterministic given the seed."""
    log: List[Tuple[Theta, float]] = []
    box = config.search_box

    def evaluate(theta: Sequence[float]) -> float:
        clipped = tuple(
            float(min(max(v, lo), hi)) for v, (lo, hi) in zip(theta, box)
        )
        score = evaluate_theta(clipped, config.training_cohorts, models, base_spec)
        log.append((clipped, score))
        logger.debug("evaluated %s -> %.3f", clipped, score)
        return score

    best_theta: Theta = (0.0, 0.0, 0.0, 0.0)
    best_score = evaluate(best_theta)

    remaining = config.budget_evals - 1
    n_sobol = remaining if not config.local_refine else (remaining * 3) // 5
    for point in _sobol_points(n_sobol, box, config.seed):
        score = evaluate(point)
        if score > best_score:
            best_score = score
            best_theta = log[-1][0]
    remaining -= n_sobol

    if config.local_refine and remaining > 0:
        steps = np.asarray([(hi - lo) / 4.0 for lo, hi in box])
        min_step = 1e-3
        while remaining > 0 and float(steps.max()) > min_step:
            improved = False
            for axis in range(4):
                for sign in (+1.0, -1.0):
                    if remaining <= 0:
                        break
                    candidate = list(best_theta)
                    candidate[axis] += sign * steps[axis]
                    score = evaluate(candidate)
                    remaining -= 1
                    if score > best_score:
                        best_score = score
                        best_theta = log[-1][0]
                        improved = True
            if not improved:
                steps = steps / 2.0
    return TuneResult(best_theta, best_score, tuple(log))
