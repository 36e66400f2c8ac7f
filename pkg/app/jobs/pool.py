# app/jobs/pool.py

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, TypeVar

from app.core.config import settings

log = logging.getLogger("pool")

T = TypeVar("T")
R = TypeVar("R")


def resolve_jobs(jobs: int | None) -> int:
    return max(1, settings.JOBS if jobs is None else int(jobs))


def _apply_settings(values: dict):
    # workers started by spawn or forkserver import a fresh settings object
    for name, value in values.items():
        setattr(settings, name, value)


def map_ordered(
    fn: Callable[..., R],
    items: Iterable[T],
    jobs: int | None = None,
    chunksize: int = 1,
    mp_context=None,
) -> list[R]:
    """
    fn(*item) for every item, results in input order whatever the worker count.
    fn must be a module-level function so it pickles. Workers run with the
    parent's current settings, CLI overrides included.
    """
    items = [it if isinstance(it, tuple) else (it,) for it in items]
    jobs = resolve_jobs(jobs)
    if jobs == 1 or len(items) < 2:
        return [fn(*it) for it in items]

    log.debug(f"fan out {len(items)} tasks over {jobs} workers")
    with ProcessPoolExecutor(
        max_workers=jobs,
        mp_context=mp_context,
        initializer=_apply_settings,
        initargs=(settings.model_dump(),),
    ) as ex:
        return list(ex.map(fn, *zip(*items), chunksize=chunksize))
