"""Worker-count resolution and an order-preserving thread map."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

ENV_WORKERS = "SPECTRAL_WORKERS"


def resolve_workers(workers=None) -> int:
    """Explicit value, else ``$SPECTRAL_WORKERS``, else the logical core count."""
    if workers is None:
        env = os.environ.get(ENV_WORKERS, "").strip()
        workers = int(env) if env else (os.cpu_count() or 1)
    workers = int(workers)
    if workers < 1:
        raise ValueError("workers must be at least 1")
    return workers


def ordered_map(fn, items, workers=None) -> list:
    """``[fn(x) for x in items]``, possibly on a thread pool; output order is input order."""
    items = list(items)
    w = min(resolve_workers(workers), max(len(items), 1))
    if w == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=w) as pool:
        return list(pool.map(fn, items))
