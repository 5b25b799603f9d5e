"""Multiplicative kernel and weighted generating function.

The level-set statistics rest on one identity: the multiplicative kernel g
defined on prime powers by

    g(p)   = 2(z - 1)  if p <= w else 0
    g(p^2) = 1 - 2z    if p <= w else -1
    g(p^a) = 0         for a > 2

satisfies (g * tau)(n) = 2^omega(n) * z^omega(n, w), where tau is the divisor
count and * is Dirichlet convolution.  This module exposes the kernel, the
identity check, the totient-averaged transform f(l) = sum_{d^2 q = l}
g(q)/phi(dq), and the weighted generating function

    F_k(z) = sum over n in the k-level set of 2^omega(n-1) * z^omega(n-1, w),

a polynomial in z whose coefficients are the small-factor masses.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .accumulate import chunk_spans, kahan_sum, map_ordered
from .sieve import OmegaTable, SieveConfig, _check_range, build_omega_table

R_CONFIG = 4.0
FACTOR_LIMIT = 1 << 50


@dataclass(frozen=True)
class WeightKernel:
    """Kernel parameters: small-prime threshold w >= 2 and tilt point |z| <= 4."""

    w: int
    z: complex

    def __post_init__(self):
        if self.w < 2:
            raise ValueError("w < 2")
        if abs(self.z) > R_CONFIG + 1e-9:
            raise ValueError(f"|z|={abs(self.z):.3f} exceeds {R_CONFIG}")


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def kernel_value(p: int, alpha: int, kernel: WeightKernel) -> complex:
    """g(p^alpha); p must be prime, alpha >= 1."""
    if not _is_prime(p):
        raise ValueError(f"p={p} is not prime")
    if alpha < 1:
        raise ValueError("alpha < 1")
    if alpha > 2:
        return 0.0 + 0.0j
    z = complex(kernel.z)
    if p <= kernel.w:
        return 2.0 * (z - 1.0) if alpha == 1 else 1.0 - 2.0 * z
    return complex(0.0) if alpha == 1 else complex(-1.0)


def _factorize(n: int) -> list[tuple[int, int]]:
    if not 1 <= n <= FACTOR_LIMIT:
        raise ValueError(f"n={n} outside factorization range [1, 2^50]")
    out = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if m > 1:
        out.append((m, 1))
    return out


def convolution_check(n: int, kernel: WeightKernel) -> tuple[complex, complex]:
    """(sum_{q | n} g(q) tau(n/q), 2^omega(n) z^omega(n, w)) for one n."""
    if n < 1:
        raise ValueError("n < 1")
    fact = _factorize(n)
    lhs = 0.0 + 0.0j
    exps = [0] * len(fact)
    while True:
        g = 1.0 + 0.0j
        tau = 1
        for (p, e), a in zip(fact, exps):
            if a:
                g *= kernel_value(p, a, kernel)
            tau *= e - a + 1
        lhs += g * tau
        i = 0
        while i < len(fact) and exps[i] == fact[i][1]:
            exps[i] = 0
            i += 1
        if i == len(fact):
            break
        exps[i] += 1
    om = len(fact)
    om_small = sum(1 for p, _ in fact if p <= kernel.w)
    z = complex(kernel.z)
    rhs = (2.0**om) * (z**om_small if om_small else 1.0 + 0.0j)
    return lhs, rhs


def convolution_max_deviation(
    n_max: int, kernel: WeightKernel, table: OmegaTable | None = None
) -> float:
    """max |g * tau - 2^omega z^omega_small| over 1 <= n <= n_max.

    The convolution side accumulates g(q) tau(m) over q-multiples with numpy;
    the target side reads a factor-count table, so the two routes share no
    arithmetic.
    """
    if n_max < 2:
        raise ValueError("n_max < 2")
    tau = np.zeros(n_max + 1, dtype=np.int64)
    for d in range(1, n_max + 1):
        tau[d::d] += 1
    spf = np.zeros(n_max + 1, dtype=np.int64)
    for p in range(2, n_max + 1):
        if spf[p] == 0:
            spf[p::p] = np.where(spf[p::p] == 0, p, spf[p::p])
    g = np.zeros(n_max + 1, dtype=np.complex128)
    g[1] = 1.0
    for q in range(2, n_max + 1):
        p = int(spf[q])
        m, a = q // p, 1
        while m % p == 0:
            m //= p
            a += 1
        gm = g[m]
        g[q] = gm * kernel_value(p, a, kernel) if gm != 0 else 0.0
    lhs = np.zeros(n_max + 1, dtype=np.complex128)
    lhs[1:] = tau[1:]  # q = 1 term
    for q in range(2, n_max + 1):
        gq = g[q]
        if gq != 0:
            cnt = n_max // q
            lhs[q::q] += gq * tau[1 : cnt + 1]
    w_eff = min(kernel.w, n_max)  # primes above n_max divide nothing below it
    usable = (
        table is not None
        and table.x_max >= n_max
        and (table.w == kernel.w or (table.w >= n_max and kernel.w >= n_max))
    )
    if not usable:
        table = build_omega_table(SieveConfig(x_max=n_max, w=w_eff))
    om = table.omega[1 : n_max + 1].astype(np.int64)
    osm = table.omega_small[1 : n_max + 1].astype(np.int64)
    zpow = _powers(complex(kernel.z), int(osm.max()) + 1)
    rhs = np.ldexp(1.0, om.astype(np.int32)) * zpow[osm]
    return float(np.max(np.abs(lhs[1:] - rhs)))


def _powers(z: complex, count: int) -> np.ndarray:
    out = np.empty(count, dtype=np.complex128)
    out[0] = 1.0  # z^0 := 1 including z = 0
    for j in range(1, count):
        out[j] = out[j - 1] * z
    return out


def phi_prime_power(p: int, e: int, kernel: WeightKernel) -> complex:
    """Closed form of the totient-averaged kernel on l = p^e.

    Odd e = 2a+1:  (2z-2)/(p^a (p-1)) below w, 0 above.
    Even e = 2a+2: 1/(p^a (p-1)) + (1-2z)/(p^(a+1) (p-1)) below w,
                   1/(p^a (p-1)) - 1/(p^(a+1) (p-1)) above.
    """
    if not _is_prime(p):
        raise ValueError(f"p={p} is not prime")
    if e < 1:
        raise ValueError("e < 1")
    z = complex(kernel.z)
    if e % 2 == 1:
        a = (e - 1) // 2
        if p > kernel.w:
            return 0.0 + 0.0j
        return (2.0 * z - 2.0) / (p**a * (p - 1))
    a = (e - 2) // 2
    base = 1.0 / (p**a * (p - 1))
    if p > kernel.w:
        return base - 1.0 / (p ** (a + 1) * (p - 1))
    return base + (1.0 - 2.0 * z) / (p ** (a + 1) * (p - 1))


def phi_weighted_kernel(ell: int, kernel: WeightKernel) -> complex:
    """f(l) = sum_{d^2 q = l} g(q)/phi(dq), multiplicative in l; f(1) = 1."""
    if ell < 1:
        raise ValueError("ell < 1")
    value = 1.0 + 0.0j
    for p, e in _factorize(ell):
        value *= phi_prime_power(p, e, kernel)
        if value == 0:
            break
    return value


@dataclass(frozen=True)
class GenFunValue:
    """One evaluation of the weighted generating function."""

    k: int
    x: int
    w: int
    z: complex
    value: complex
    weight_total: int  # unweighted-by-z mass, bounds |value| at |z| <= 1
    terms: int


def _level_pairs(table: OmegaTable, k: int, x: int, threads: int = 1):
    """(omega(n-1), omega(n-1, w)) arrays over the k-level set, n ascending."""
    _check_range(table, x)
    if k < 0:
        raise ValueError("k < 0")

    def one(lo, hi):
        mask = table.omega[lo:hi] == k
        return (
            table.omega[lo - 1 : hi - 1][mask],
            table.omega_small[lo - 1 : hi - 1][mask],
        )

    parts = map_ordered(one, chunk_spans(2, x + 1), threads)
    om1 = np.concatenate([a for a, _ in parts]) if parts else np.empty(0, np.uint8)
    osm1 = np.concatenate([b for _, b in parts]) if parts else np.empty(0, np.uint8)
    return om1, osm1


def _genfun_from_pairs(om1, osm1, z: complex, threads: int = 1):
    zpow = _powers(complex(z), (int(osm1.max()) if om1.size else 0) + 1)

    def one(lo, hi):
        weights = np.ldexp(1.0, om1[lo:hi].astype(np.int32))
        return complex(np.sum(weights * zpow[osm1[lo:hi]]))

    spans = chunk_spans(0, om1.size)
    return kahan_sum(map_ordered(one, spans, threads)) if spans else 0.0 + 0.0j


def eval_genfun(
    table: OmegaTable, k: int, x: int, z: complex | float, threads: int = 1
) -> GenFunValue:
    """F_k(z) = sum_{omega(n)=k, 2<=n<=x} 2^omega(n-1) z^omega(n-1, w), exactly.

    Terms are accumulated with compensated summation over fixed chunks in
    ascending order, so every thread count returns the identical value.
    """
    if abs(z) > R_CONFIG + 1e-9:
        raise ValueError(f"|z|={abs(z):.3f} exceeds {R_CONFIG}")
    om1, osm1 = _level_pairs(table, k, x, threads)
    value = complex(_genfun_from_pairs(om1, osm1, complex(z), threads))
    weight_total = int(np.sum(np.int64(1) << om1.astype(np.int64))) if om1.size else 0
    return GenFunValue(
        k=k, x=x, w=table.w, z=complex(z), value=value,
        weight_total=weight_total, terms=int(om1.size),
    )


@dataclass(frozen=True)
class CoefficientVector:
    """Polynomial coefficients of F_k: entry l is the weighted mass at
    omega(n-1, w) = l.  Entries are >= 0 and sum to the total weighted mass."""

    k: int
    x: int
    w: int
    coefficients: np.ndarray
    weight_total: int


def extract_coefficients(
    table: OmegaTable, k: int, x: int, threads: int = 1
) -> CoefficientVector:
    """Coefficients of F_k via an inverse DFT on the unit circle.

    Uses degree+1 roots of unity, where the degree is the largest
    omega(n-1, w) attained on the level set (at most 9 at desk scale, and
    always below 32).
    """
    om1, osm1 = _level_pairs(table, k, x, threads)
    if om1.size == 0:
        return CoefficientVector(k, x, table.w, np.zeros(1), 0)
    degree = int(osm1.max())
    m = degree + 1
    roots = [cmath.exp(2j * cmath.pi * j / m) for j in range(m)]
    values = [_genfun_from_pairs(om1, osm1, zj, threads) for zj in roots]
    coeffs = np.empty(m, dtype=np.float64)
    for l in range(m):
        acc = kahan_sum(
            values[j] * cmath.exp(-2j * cmath.pi * j * l / m) for j in range(m)
        )
        coeffs[l] = acc.real / m
    weight_total = int(np.sum(np.int64(1) << om1.astype(np.int64)))
    tiny = 1e-6 * max(weight_total, 1)
    coeffs[(coeffs < 0) & (coeffs > -tiny)] = 0.0
    return CoefficientVector(k, x, table.w, coeffs, weight_total)


@dataclass(frozen=True)
class ProfilePoint:
    t: float
    psi: complex
    gaussian_gap: float  # |psi - exp(-t^2/2)|


def characteristic_profile(
    table: OmegaTable, k: int, x: int, t_grid, threads: int = 1
) -> list[ProfilePoint]:
    """Normalized characteristic function of the small-factor count.

        psi(t) = exp(-i t sqrt(T)) F_k(exp(i t / sqrt(T))) / F_k(1),
        T = 2 loglog w,

    reported against the Gaussian target exp(-t^2/2).  |psi| <= 1 always.
    """
    T = 2.0 * math.log(math.log(table.w)) if table.w > 2 else 0.0
    if T <= 0.0:
        raise ValueError(f"w={table.w} too small: 2*loglog(w) must be positive")
    om1, osm1 = _level_pairs(table, k, x, threads)
    total = float(np.sum(np.ldexp(1.0, om1.astype(np.int32)))) if om1.size else 0.0
    if total == 0.0:
        raise ValueError(f"empty level set k={k}, x={x}")
    sqrt_t = math.sqrt(T)
    out = []
    for t in t_grid:
        t = float(t)
        val = _genfun_from_pairs(om1, osm1, cmath.exp(1j * t / sqrt_t), threads)
        psi = cmath.exp(-1j * t * sqrt_t) * val / total
        out.append(ProfilePoint(t=t, psi=psi, gaussian_gap=abs(psi - math.exp(-0.5 * t * t))))
    return out
