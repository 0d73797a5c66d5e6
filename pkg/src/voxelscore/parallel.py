"""Deterministic task execution.

BLAS pools are pinned to one thread while tasks run; concurrency comes
only from our own thread pool, and each task writes disjoint output, so
results are byte-identical for any worker count. threadpool_limits is
reentrant, so nested pipeline calls are fine.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

from threadpoolctl import threadpool_limits


def effective_workers(workers: int) -> int:
    if workers < 0:
        raise ValueError(f"workers must be >= 0, got {workers}")
    if workers == 0:
        return os.cpu_count() or 1
    return workers


def run_tasks(fn, items, workers: int = 0) -> list:
    """Apply fn to each item, results in item order."""
    items = list(items)
    n = effective_workers(workers)
    with threadpool_limits(limits=1):
        if n <= 1 or len(items) <= 1:
            return [fn(item) for item in items]
        with ThreadPoolExecutor(max_workers=n) as pool:
            return list(pool.map(fn, items))
