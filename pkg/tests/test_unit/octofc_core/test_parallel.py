"""Tests for the ordered thread-pool map."""

import threading

from octofc_core.parallel import chunk_ranges, ordered_map


class TestOrderedMap:
    """Test result ordering across thread counts."""

    def test_order_is_preserved(self) -> None:
        """Results come back in input order."""
        items = list(range(50))
        for threads in (1, 4):
            assert ordered_map(lambda k: k * k, items, threads) == [k * k for k in items]

    def test_uses_worker_threads(self) -> None:
        """More than one worker runs the items when allowed."""
        seen: set[str] = set()
        barrier = threading.Barrier(2, timeout=10)

        def work(k: int) -> int:
            seen.add(threading.current_thread().name)
            barrier.wait()
            return k

        assert ordered_map(work, [0, 1], 2) == [0, 1]
        assert len(seen) == 2

    def test_empty(self) -> None:
        """No items give no results."""
        assert ordered_map(str, [], 4) == []


class TestChunkRanges:
    """Test chunking of index ranges."""

    def test_chunks(self) -> None:
        """The last chunk is shorter."""
        assert chunk_ranges(10, 4) == [(0, 4), (4, 8), (8, 10)]
        assert chunk_ranges(0, 4) == []
