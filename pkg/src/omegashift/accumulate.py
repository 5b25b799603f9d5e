"""Deterministic chunked reductions.

Chunk boundaries depend only on the chunk length, partial results are always
combined in ascending chunk order with compensated summation, and worker
threads only change who computes a chunk, never the combine order.  Single-
and multi-threaded runs therefore agree to the last bit.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor


def chunk_spans(lo: int, hi: int, chunk: int = 1 << 20) -> list[tuple[int, int]]:
    """Half-open spans covering [lo, hi) with fixed boundaries."""
    if chunk < 1:
        raise ValueError("chunk < 1")
    return [(a, min(a + chunk, hi)) for a in range(lo, hi, chunk)]


def map_ordered(fn, spans, threads: int = 1) -> list:
    """fn over spans, results in span order regardless of thread count."""
    if threads <= 1 or len(spans) <= 1:
        return [fn(a, b) for a, b in spans]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda ab: fn(*ab), spans))


def kahan_sum(values) -> complex | float:
    """Compensated sum in the given order (works for float and complex)."""
    total = 0.0
    carry = 0.0
    for v in values:
        y = v - carry
        t = total + y
        carry = (t - total) - y
        total = t
    return total
