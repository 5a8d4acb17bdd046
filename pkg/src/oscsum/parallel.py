"""Thread-count control and order-preserving parallel maps.

Work is always cut into chunks whose boundaries depend only on the
problem size, never on the number of threads, and partial results are
combined in chunk order. Results are therefore bit-identical for any
thread count.
"""

from __future__ import annotations

import os
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")

_lock = threading.Lock()
_threads = int(os.environ.get("OSCSUM_THREADS", "1") or 1)
_pool: ThreadPoolExecutor | None = None


def set_threads(count: int) -> None:
    """Set the number of worker threads used by :func:`ordered_map`."""
    global _threads, _pool
    if count < 1:
        raise ValueError("thread count must be positive")
    with _lock:
        if count != _threads and _pool is not None:
            _pool.shutdown(wait=True)
            _pool = None
        _threads = count


def get_threads() -> int:
    return _threads


def _executor() -> ThreadPoolExecutor:
    global _pool
    with _lock:
        if _pool is None:
            _pool = ThreadPoolExecutor(max_workers=_threads, thread_name_prefix="oscsum")
        return _pool


def ordered_map(func: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """``[func(x) for x in items]``, possibly on worker threads, in input order."""
    items = list(items)
    if _threads == 1 or len(items) < 2 or threading.current_thread().name.startswith("oscsum"):
        return [func(x) for x in items]
    return list(_executor().map(func, items))


def chunk_bounds(n: int, chunk: int) -> list[tuple[int, int]]:
    """Fixed ``[start, stop)`` blocks covering ``range(n)``."""
    return [(s, min(s + chunk, n)) for s in range(0, n, chunk)]


def ordered_sum(parts: Sequence) -> complex | float:
    """Pairwise sum of partial results in their given order."""
    arr = np.asarray(parts)
    return arr.sum() if arr.size else 0.0


def blocked_sum(values_of: Callable[[int, int], np.ndarray], n: int, chunk: int = 1 << 16):
    """Sum ``values_of(start, stop)`` over fixed blocks of ``range(n)``.

    Each block is reduced with numpy's pairwise summation and the block
    totals are then reduced the same way, giving a fixed reduction tree.
    """
    bounds = chunk_bounds(n, chunk)
    partials = ordered_map(lambda se: values_of(*se).sum(), bounds)
    return ordered_sum(partials)
