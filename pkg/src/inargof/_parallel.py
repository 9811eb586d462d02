"""Order-preserving parallel map.

Results are always assembled by task index, and every task draws from its own
addressed random stream, so output does not depend on the worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable

ENV_THREADS = "INAR_GOF_THREADS"


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: ``INAR_GOF_THREADS`` if set, else ``threads``, else 1."""
    env = os.environ.get(ENV_THREADS)
    if env:
        try:
            threads = int(env)
        except ValueError:
            raise ValueError(f"{ENV_THREADS} must be an integer, got {env!r}") from None
    return max(1, int(threads or 1))


def pmap(func: Callable, items: Iterable, threads: int | None = None) -> list:
    items = list(items)
    workers = min(resolve_threads(threads), len(items)) if items else 1
    if workers <= 1:
        return [func(it) for it in items]
    chunk = max(1, len(items) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(func, items, chunksize=chunk))
