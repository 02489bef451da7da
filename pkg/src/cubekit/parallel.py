"""Order-preserving map, optionally over worker processes."""

from __future__ import annotations

import multiprocessing as mp
import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def workers() -> int:
    return max(1, min(8, os.cpu_count() or 1))


def pmap(fn: Callable[[T], R], items: Iterable[T], parallel: bool = False, chunks: int = 4) -> list[R]:
    """[fn(x) for x in items]; with parallel=True the calls run in worker
    processes but results keep input order, so output is identical."""
    items = list(items)
    if not parallel or len(items) < 2 or workers() == 1:
        return [fn(x) for x in items]
    n = workers()
    size = max(1, len(items) // (n * chunks))
    ctx = mp.get_context("fork") if "fork" in mp.get_all_start_methods() else None
    with ProcessPoolExecutor(max_workers=n, mp_context=ctx) as ex:
        return list(ex.map(fn, items, chunksize=size))
