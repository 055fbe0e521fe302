from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def default_workers() -> int:
    return os.cpu_count() or 1


def parallel_map(func: Callable[[T], R], items: Sequence[T], workers: int | None = 1) -> list[R]:
    """Order-preserving map; ``func`` must be picklable when ``workers > 1``.

    Every task derives its own random stream from its arguments, so results
    do not depend on the worker count.
    """
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    chunk = max(1, len(items) // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items, chunksize=chunk))
