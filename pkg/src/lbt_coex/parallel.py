"""Worker-count resolution and order-preserving parallel map."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor

ENV_THREADS = "LBT_COEX_THREADS"


def worker_count(requested: int | None = None) -> int:
    """Requested workers (default: CPU count), capped by $LBT_COEX_THREADS."""
    n = requested if requested is not None else (os.cpu_count() or 1)
    cap = os.environ.get(ENV_THREADS)
    if cap:
        try:
            n = min(n, int(cap))
        except ValueError:
            raise ValueError(f"{ENV_THREADS} must be an integer, got {cap!r}") from None
    return max(1, n)


def ordered_map(fn, items, *, workers: int | None = None, threads: bool = False):
    """``[fn(x) for x in items]``, optionally concurrent; output order = input order."""
    items = list(items)
    n = min(worker_count(workers), len(items)) if items else 1
    if n <= 1:
        return [fn(x) for x in items]
    pool = ThreadPoolExecutor if threads else ProcessPoolExecutor
    with pool(max_workers=n) as ex:
        return list(ex.map(fn, items))
