"""Segmented sieve for distinct-prime-factor counts.

Builds, for every n in [2, x_max], the pair

    omega[n]       = number of distinct primes dividing n
    omega_small[n] = number of distinct primes p <= w dividing n

as byte tables.  Everything downstream (level sets, weighted statistics,
generating-function evaluations) reads these two arrays.
"""

from __future__ import annotations

import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .primes import primes_up_to

X_MAX_CEILING = 1 << 40
DEFAULT_SEGMENT = 1 << 22

MAGIC = b"OMGT"
CACHE_VERSION = 1
_HEADER = struct.Struct("<4sIQQ")


class CacheMismatchError(ValueError):
    """Cached table header disagrees with the requested parameters."""


@dataclass(frozen=True)
class SieveConfig:
    """Parameters of one table build.

    x_max : largest argument tabulated (inclusive), 2 <= x_max <= 2**40
    w     : small-prime threshold for omega_small, 2 <= w <= x_max
    segment_length : numbers processed per segment; any value >= 1024
        produces the identical table, it only trades memory for call overhead
    threads : worker threads mapped over segments (disjoint output slices,
        so the result is independent of the count)
    """

    x_max: int
    w: int
    segment_length: int = DEFAULT_SEGMENT
    threads: int = 1

    def __post_init__(self):
        if not (2 <= self.x_max <= X_MAX_CEILING):
            raise ValueError(f"x_max={self.x_max} outside [2, 2^40]")
        if not (2 <= self.w <= self.x_max):
            raise ValueError(f"w={self.w} outside [2, x_max]")
        if self.segment_length < 1024:
            raise ValueError("segment_length < 1024")
        if self.threads < 1:
            raise ValueError("threads < 1")


@dataclass
class OmegaTable:
    """Byte tables of factor counts, indexed directly by n (entries 0,1 unused)."""

    x_max: int
    w: int
    omega: np.ndarray = field(repr=False)
    omega_small: np.ndarray = field(repr=False)

    def __eq__(self, other):
        return (
            isinstance(other, OmegaTable)
            and self.x_max == other.x_max
            and self.w == other.w
            and np.array_equal(self.omega, other.omega)
            and np.array_equal(self.omega_small, other.omega_small)
        )


def _fill_segment(omega, omega_small, base, lo, hi, w):
    """Count prime divisors for n in [lo, hi) into the shared output arrays.

    For each base prime p <= sqrt(x_max), multiples get one count and the
    residual cofactor loses every power of p.  Whatever remains above 1 is
    the unique prime factor larger than sqrt(x_max): it always counts toward
    omega, and toward omega_small iff it is <= w.
    """
    om = omega[lo:hi]
    osm = omega_small[lo:hi]
    rem = np.arange(lo, hi, dtype=np.int64)
    for p in base:
        p = int(p)
        start = (-lo) % p
        om[start::p] += 1
        if p <= w:
            osm[start::p] += 1
        q = p
        while q < hi:
            rem[(-lo) % q :: q] //= p
            q *= p
    big = rem > 1
    om[big] += 1
    if w >= hi - 1:
        osm[big] += 1
    else:
        osm[big & (rem <= w)] += 1


def build_omega_table(config: SieveConfig) -> OmegaTable:
    """Build the omega/omega_small tables for config.

    Segments are independent and write disjoint slices, so the table is
    bit-identical for every segment_length and thread count.
    """
    x_max, w = config.x_max, config.w
    omega = np.zeros(x_max + 1, dtype=np.uint8)
    omega_small = np.zeros(x_max + 1, dtype=np.uint8)
    base = primes_up_to(int(np.sqrt(x_max)) + 1)
    base = base[base * base <= x_max]
    spans = [
        (lo, min(lo + config.segment_length, x_max + 1))
        for lo in range(2, x_max + 1, config.segment_length)
    ]
    if config.threads == 1 or len(spans) == 1:
        for lo, hi in spans:
            _fill_segment(omega, omega_small, base, lo, hi, w)
    else:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            jobs = [
                pool.submit(_fill_segment, omega, omega_small, base, lo, hi, w)
                for lo, hi in spans
            ]
            for j in jobs:
                j.result()
    return OmegaTable(x_max=x_max, w=w, omega=omega, omega_small=omega_small)


def iter_omega_level(table: OmegaTable, k: int, x: int, chunk: int = 1 << 20):
    """Yield n in [2, x] with omega(n) == k, ascending."""
    _check_range(table, x)
    if k < 0:
        raise ValueError("k < 0")
    for lo in range(2, x + 1, chunk):
        hi = min(lo + chunk, x + 1)
        for n in np.nonzero(table.omega[lo:hi] == k)[0]:
            yield lo + int(n)


def count_omega_level(table: OmegaTable, k: int, x: int) -> int:
    """#{n in [2, x] : omega(n) == k}; zero for k == 0 by the range convention."""
    _check_range(table, x)
    if k < 0:
        raise ValueError("k < 0")
    return int(np.count_nonzero(table.omega[2 : x + 1] == k))


def _check_range(table: OmegaTable, x: int):
    if not (2 <= x <= table.x_max):
        raise ValueError(f"x={x} outside [2, x_max={table.x_max}]")


def cache_path(cache_dir: str, x_max: int, w: int) -> str:
    return os.path.join(cache_dir, f"omega_x{x_max}_w{w}.bin")


def save_table(table: OmegaTable, path: str) -> None:
    """Write header + raw little-endian byte arrays, atomically."""
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, CACHE_VERSION, table.x_max, table.w))
        fh.write(table.omega.tobytes())
        fh.write(table.omega_small.tobytes())
    os.replace(tmp, path)


def load_table(path: str, x_max: int | None = None, w: int | None = None) -> OmegaTable:
    """Read a cached table; mismatched header fields raise CacheMismatchError."""
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) < _HEADER.size:
            raise CacheMismatchError(f"{path}: truncated header")
        magic, version, file_x, file_w = _HEADER.unpack(head)
        if magic != MAGIC or version != CACHE_VERSION:
            raise CacheMismatchError(f"{path}: bad magic/version {magic!r} v{version}")
        if x_max is not None and file_x != x_max:
            raise CacheMismatchError(f"{path}: has x_max={file_x}, wanted {x_max}")
        if w is not None and file_w != w:
            raise CacheMismatchError(f"{path}: has w={file_w}, wanted {w}")
        n = file_x + 1
        omega = np.frombuffer(fh.read(n), dtype=np.uint8)
        omega_small = np.frombuffer(fh.read(n), dtype=np.uint8)
    if omega.size != n or omega_small.size != n:
        raise CacheMismatchError(f"{path}: truncated payload")
    return OmegaTable(x_max=file_x, w=file_w, omega=omega.copy(), omega_small=omega_small.copy())
