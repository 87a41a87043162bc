"""Ordered fan-out of independent sweep points."""

from __future__ import annotations

import logging
import multiprocessing
import os
from typing import Callable, Iterable, List, Optional, TypeVar, Union

T = TypeVar("T")
R = TypeVar("R")

logger = logging.getLogger(__name__)


def resolve_jobs(value: Optional[Union[int, str]] = None) -> int:
    """Worker count from ``--jobs`` or ``NHPUMP_JOBS``; never below 1."""
    if value is None:
        value = os.environ.get("NHPUMP_JOBS")
    if value in (None, ""):
        return 1
    try:
        jobs = int(value)
    except (TypeError, ValueError):
        logger.warning("Ignoring non-integer job count %r", value)
        return 1
    return max(1, jobs)


def run_ordered(func: Callable[[T], R], items: Iterable[T], jobs: int = 1) -> List[R]:
    """Map ``func`` over ``items`` and return results in input order.

    With ``jobs > 1`` the work goes to a process pool, so ``func`` and every
    item must be picklable.
    """
    items = list(items)
    jobs = min(resolve_jobs(jobs), max(1, len(items)))
    if jobs == 1:
        return [func(item) for item in items]

    logger.debug("Dispatching %d sweep points to %d workers", len(items), jobs)
    with multiprocessing.Pool(processes=jobs) as pool:
        return pool.map(func, items)
