"""Deterministic percentile bootstrap.

Seed contract: resample ``i`` of a call seeded with ``seed`` draws from
``numpy.random.default_rng(SeedSequence((seed, i)))``. The mixing performed
by ``SeedSequence`` on its entropy tuple is fixed and documented by numpy, so
resamples are reproducible across processes and may be computed in any order
(or in parallel) with bit-identical results. Callers that need several
independent bootstrap runs from one user-facing seed derive per-call seeds
with :func:`derive_seed`.
"""

from __future__ import annotations

from typing import Callable, Optional, Sequence

import numpy as np

from .model import DataError

__all__ = ["derive_seed", "resample_rng", "bootstrap_ci", "percentile_interval"]


def derive_seed(seed: int, *tags: int) -> int:
    """Mix a user seed with integer tags into a new stream seed."""
    ss = np.random.SeedSequence((int(seed),) + tuple(int(t) for t in tags))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def resample_rng(seed: int, i: int) -> np.random.Generator:
    """Generator for resample ``i`` under the seed contract above."""
    return np.random.default_rng(np.random.SeedSequence((int(seed), int(i))))


def percentile_interval(samples: np.ndarray, level: float) -> tuple:
    """Central percentile interval at the given confidence level (percent)."""
    alpha = (100.0 - level) / 2.0
    low, high = np.percentile(samples, [alpha, 100.0 - alpha])
    return float(low), float(high)


def bootstrap_ci(
    values,
    n_resamples: int = 1000,
    level: float = 95.0,
    seed: int = 0,
    statistic: Optional[Callable[[np.ndarray], float]] = None,
) -> tuple:
    """Percentile bootstrap confidence interval.

    Parameters
    ----------
    values : array-like, shape (n,) or (n, k)
        Observations; rows are the resampling unit.
    n_resamples : int
        Number of bootstrap resamples (B >= 1).
    level : float
        Confidence level in percent, 0 < level < 100.
    seed : int
        Stream seed; resample i uses ``SeedSequence((seed, i))``.
    statistic : callable, optional
        Maps a resampled array (same shape semantics as ``values``) to a
        float. Defaults to the mean of a 1-d sample.

    Returns
    -------
    (low, high) : tuple of float
    """
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise DataError("empty input")
    if n_resamples < 1:
        raise DataError("n_resamples must be >= 1")
    if not 0.0 < level < 100.0:
        raise DataError("level must be in (0, 100)")
    if statistic is None:
        if arr.ndim != 1:
            raise DataError("default statistic requires 1-d values")
        statistic = lambda a: float(np.mean(a))
    n = arr.shape[0]
    stats = np.empty(n_resamples)
    for i in range(n_resamples):
        idx = resample_rng(seed, i).integers(0, n, size=n)
        stats[i] = statistic(arr[idx])
    return percentile_interval(stats, level)
