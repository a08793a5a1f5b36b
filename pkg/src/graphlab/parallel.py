"""Worker-count policy for the fan-out points.

All computations are pure, so per-source and per-level work can run on a
thread pool; the GRAPHLAB_THREADS environment variable bounds the pool
size (default 1, so behavior is serial unless asked for).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
import os


def worker_count() -> int:
    raw = os.environ.get("GRAPHLAB_THREADS", "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def map_maybe_parallel(fn, items):
    """Map preserving order, threaded only when the policy allows it."""
    items = list(items)
    n = worker_count()
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(n, len(items))) as pool:
        return list(pool.map(fn, items))
