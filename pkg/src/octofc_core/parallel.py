"""Ordered thread-pool map.

numpy releases the GIL inside LAPACK and large array kernels, so a thread
pool over independent chunks gives real speedups without pickling operands.
Results always come back in input order.
"""

from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor

import structlog

from octofc_core.config import worker_count

logger = structlog.get_logger(__name__)


def ordered_map[T, R](
    fn: Callable[[T], R],
    items: Sequence[T],
    threads: int | None = None,
) -> list[R]:
    """Apply ``fn`` to every item, in parallel, returning results in order.

    Args:
        fn: Pure function evaluated once per item.
        items: Work items.
        threads: Thread cap; defaults to ``OCTOFC_THREADS``.
    """
    workers = min(worker_count(threads), len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    logger.debug("ORDERED_MAP_DISPATCH", items=len(items), workers=workers)
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))


def chunk_ranges(total: int, chunk: int) -> list[tuple[int, int]]:
    """Split ``range(total)`` into consecutive ``(start, stop)`` chunks."""
    return [(start, min(start + chunk, total)) for start in range(0, total, chunk)]
