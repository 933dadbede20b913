"""Per-weight lambda tuning by seeded random search over [0, W]."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from ..policies import Algorithm, BoundVariant, SearchConfig, as_rational
from ..search import SearchLimitExceeded, SearchLimits, run_search

RESOLUTION = 10_000


@dataclass
class TuningResult:
    W: Fraction
    best: Fraction
    best_mean: float
    trials: List[Tuple[Fraction, float]] = field(default_factory=list)


def _mean_expansions(domain, instances, W, lam, bound, limits) -> float:
    config = SearchConfig(Algorithm.WBAE, W, lam, bound=bound)
    total = 0
    for inst in instances:
        try:
            total += run_search(config, domain, inst, limits=limits).expansions
        except SearchLimitExceeded:
            return float("inf")
    return total / len(instances)


def tune_lambda_trials(domain, W, instances: Sequence, trials: int = 50, seed: int = 0, *,
                       bound: BoundVariant = BoundVariant.GCD, candidates: Sequence = (),
                       limits: Optional[SearchLimits] = None) -> TuningResult:
    """Run exactly ``trials`` search batches; the first ones use ``candidates``.

    Remaining lambdas are drawn uniformly from [0, W] on a 1e-4 grid. A batch
    that hits a limit scores infinity. Ties go to the smaller lambda.
    """
    W = as_rational(W)
    if trials < 1:
        raise ValueError("trials must be positive")
    if not instances:
        raise ValueError("no tuning instances")
    rng = random.Random(seed)
    hi = int(W * RESOLUTION)
    result = TuningResult(W, Fraction(0), float("inf"))
    forced = [as_rational(c) for c in candidates][:trials]
    for i in range(trials):
        lam = forced[i] if i < len(forced) else Fraction(rng.randint(0, hi), RESOLUTION)
        mean = _mean_expansions(domain, instances, W, lam, bound, limits)
        result.trials.append((lam, mean))
        if mean < result.best_mean or (mean == result.best_mean and lam < result.best):
            result.best, result.best_mean = lam, mean
    return result


def tune_lambda(domain, W, instances: Sequence, trials: int = 50, seed: int = 0, **kwargs) -> Fraction:
    """Return the lambda with the lowest mean expansions on ``instances``."""
    return tune_lambda_trials(domain, W, instances, trials, seed, **kwargs).best
