"""Ordered worker pool for independent sweep points."""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor

from axbwave.common.errors import AxbError, ConfigError

logger = logging.getLogger(__name__)

THREADS_ENV = "AXB_THREADS"


def resolve_threads(threads: int | None = None) -> int:
    """AXB_THREADS if set, else threads, else 1."""
    raw = os.environ.get(THREADS_ENV)
    if raw is not None:
        try:
            threads = int(raw)
        except ValueError as exc:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
    threads = 1 if threads is None else threads
    if threads < 1:
        raise ConfigError(f"thread count must be >= 1, got {threads}")
    return threads


def map_ordered(func, jobs, threads: int = 1, batch_size: int = 4) -> list:
    """[func(job) for job in jobs], in job order.

    threads == 1 runs inline; otherwise jobs go to a process pool in chunks of
    batch_size. func and the jobs must be picklable.
    """
    jobs = list(jobs)
    if threads == 1 or len(jobs) <= 1:
        return [func(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, jobs, chunksize=max(1, batch_size)))


class _Guarded:
    """Picklable wrapper that turns library errors into ("error", message)."""

    def __init__(self, func):
        self.func = func

    def __call__(self, job):
        try:
            return ("ok", self.func(job))
        except AxbError as exc:
            return ("error", f"{type(exc).__name__}: {exc}")


def run_batches(func, jobs, threads: int = 1, batch_size: int = 16) -> dict:
    """Run jobs in sub-batches; a failing point is recorded, not raised.

    Returns dict with total, completed, failed, errors (job index and message)
    and results (None where the job failed), all in job order.
    """
    jobs = list(jobs)
    result = {
        "total": len(jobs),
        "completed": 0,
        "failed": 0,
        "errors": [],
        "results": [],
    }
    wrapped = _Guarded(func)
    for start in range(0, len(jobs), batch_size):
        batch = jobs[start : start + batch_size]
        for offset, (status, payload) in enumerate(map_ordered(wrapped, batch, threads)):
            if status == "ok":
                result["completed"] += 1
                result["results"].append(payload)
            else:
                result["failed"] += 1
                result["errors"].append({"job": start + offset, "error": payload})
                result["results"].append(None)
                logger.warning("sweep point %d failed: %s", start + offset, payload)
    return result
