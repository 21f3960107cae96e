"""Runtime knobs: thread cap for embarrassingly parallel grid work.

All grid evaluations in the package are pure, so results are identical
however the work is partitioned.  HOLOFLOW_THREADS caps the worker
count; unset or 1 means sequential.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count() -> int:
    raw = os.environ.get("HOLOFLOW_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def parallel_map(fn, items):
    """Map preserving order; threaded when HOLOFLOW_THREADS > 1."""
    items = list(items)
    n = thread_count()
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(n, len(items))) as pool:
        return list(pool.map(fn, items))
