"""Deterministic parallel map over replicate indices.

Tasks must be pure functions of their index (randomness comes from
per-index streams), so the gathered result is independent of the
scheduling order and of the thread count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

T = TypeVar("T")


def map_indexed(fn: Callable[[int], T], count: int, threads: int = 1) -> list[T]:
    """Apply ``fn`` to 0..count-1, returning results in index order."""
    if threads <= 1 or count <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(count)))
