"""Seeded ensembles: per-member seed derivation, execution, aggregation.

Member ``i`` of an ensemble with master seed ``s`` draws from
``SeedSequence(s, spawn_key=(i,))``; a retry after a failed member uses
``spawn_key=(i, attempt)``.  Seeds depend only on member ids, so results do
not depend on the number of workers or on scheduling.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .exceptions import PhonoNetError
from .network import NetStats

logger = logging.getLogger(__name__)

MAX_MEMBER_ATTEMPTS = 5


def member_seed(master_seed: int, member: int, attempt: int = 0) -> np.random.SeedSequence:
    key = (member,) if attempt == 0 else (member, attempt)
    return np.random.SeedSequence(master_seed, spawn_key=key)


def _run_member(func, model, master_seed, member):
    failures = 0
    for attempt in range(MAX_MEMBER_ATTEMPTS):
        try:
            return func(model, member_seed(master_seed, member, attempt)), failures
        except PhonoNetError as exc:
            failures += 1
            logger.warning("member %d attempt %d failed: %s", member, attempt, exc)
            last = exc
    raise last


def _star(args):
    return _run_member(*args)


def map_members(func, model, members, master_seed: int, jobs: int = 1) -> list:
    """Run ``func(model, seed)`` for each member id; results in member order."""
    tasks = [(func, model, master_seed, m) for m in members]
    if jobs is None or jobs <= 1 or len(tasks) <= 1:
        return [_star(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
        return list(pool.map(_star, tasks))


def mean_sem(values):
    arr = np.asarray([v for v in values if v is not None], dtype=float)
    arr = arr[~np.isnan(arr)]
    if len(arr) == 0:
        return float("nan"), float("nan")
    mean = float(arr.mean())
    sem = float(arr.std(ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else float("nan")
    return mean, sem


def mean_histogram(histograms) -> dict:
    """Member-averaged histogram (missing bins count as zero)."""
    histograms = list(histograms)
    keys = sorted(set().union(*histograms)) if histograms else []
    n = len(histograms)
    return {k: sum(h.get(k, 0) for h in histograms) / n for k in keys}


@dataclass
class EnsembleResult:
    stats: list
    distributions: list
    failures: int = 0
    mean: dict = field(default_factory=dict)
    sem: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.mean and self.stats:
            for name in NetStats.numeric_fields():
                self.mean[name], self.sem[name] = mean_sem(
                    getattr(s, name) for s in self.stats)

    def __len__(self):
        return len(self.stats)

    def mean_distribution(self, name: str) -> dict:
        return mean_histogram(getattr(d, name) for d in self.distributions)


def run_ensemble(func, model, ensemble: int, seed: int, jobs: int = 1) -> EnsembleResult:
    """Ensemble of ``(NetStats, DistributionBundle)`` members."""
    out = map_members(func, model, range(ensemble), seed, jobs)
    return EnsembleResult([r[0][0] for r in out], [r[0][1] for r in out],
                          failures=sum(r[1] for r in out))
