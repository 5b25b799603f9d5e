"""Prime generation shared by the factor-count sieve and the Euler products."""

from __future__ import annotations

import numpy as np

_CACHE_LIMIT = 32_000_000  # full arrays above this are streamed, not cached
_cache: dict[int, np.ndarray] = {}


def primes_up_to(limit: int) -> np.ndarray:
    """All primes <= limit as an ascending int64 array."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return np.nonzero(mask)[0].astype(np.int64)


def cached_primes(limit: int) -> np.ndarray:
    """primes_up_to with a one-slot cache, for repeated product evaluations."""
    if limit > _CACHE_LIMIT:
        raise ValueError(f"refusing to cache prime table above {_CACHE_LIMIT}")
    hit = _cache.get(limit)
    if hit is None:
        _cache.clear()
        hit = _cache[limit] = primes_up_to(limit)
    return hit


def iter_prime_blocks(limit: int, block_len: int = 1 << 22):
    """Yield ascending int64 arrays of primes covering [2, limit].

    Segmented so working memory stays O(block_len + pi(sqrt(limit))); block
    boundaries are fixed by block_len alone, which keeps downstream
    block-ordered reductions deterministic.
    """
    if limit < 2:
        return
    base = primes_up_to(int(limit**0.5))
    for lo in range(2, limit + 1, block_len):
        hi = min(lo + block_len, limit + 1)
        mask = np.ones(hi - lo, dtype=bool)
        if lo <= 1:
            mask[: 2 - lo] = False
        for p in base:
            p = int(p)
            start = max(p * p, ((lo + p - 1) // p) * p)
            if start < hi:
                mask[start - lo :: p] = False
        yield (np.nonzero(mask)[0] + lo).astype(np.int64)
