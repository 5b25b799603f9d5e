"""Independent oracle implementations used to freeze expected test values.

Nothing here imports the package under test.  The arithmetic oracles use
plain trial division and Python integers; the Euler-product oracle uses
mpmath with a prime-zeta tail so its error is far below the tolerances it
is used to check.  Frozen constants in the test files were produced by
running this module directly (python3 tests/oracles.py).
"""

from __future__ import annotations

import math
from functools import lru_cache

import mpmath as mp


# ---------------------------------------------------------------- arithmetic


def factorize(n: int) -> list[tuple[int, int]]:
    if n < 1:
        raise ValueError("n must be positive")
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


def omega_pair(n: int, w: int) -> tuple[int, int]:
    """(distinct prime factors, distinct prime factors <= w) of n; (0,0) for n=1."""
    if n == 1:
        return 0, 0
    fac = factorize(n)
    return len(fac), sum(1 for p, _ in fac if p <= w)


def level_triples(x: int, w: int) -> list[tuple[int, int, int]]:
    """For n = 2..x: (omega(n), omega(n-1), omega(n-1, w)), index n-2."""
    out = []
    for n in range(2, x + 1):
        k = omega_pair(n, x)[0]
        v, u = omega_pair(n - 1, w)
        out.append((k, v, u))
    return out


def weighted_mass(triples, k: int) -> int:
    return sum(1 << v for kk, v, _ in triples if kk == k)


def weighted_mass_below(triples, k: int, threshold: float, on_small: bool = False) -> int:
    tot = 0
    for kk, v, u in triples:
        if kk == k and (u if on_small else v) <= threshold:
            tot += 1 << v
    return tot


def weighted_mass_at(triples, k: int, ell: int) -> int:
    return sum(1 << v for kk, v, u in triples if kk == k and u == ell)


def weighted_moment(triples, k: int, x: int, m: int) -> float:
    center = 2.0 * math.log(math.log(x))
    scale = math.sqrt(center)
    total = weighted_mass(triples, k)
    acc = 0.0
    for kk, v, _ in triples:
        if kk == k:
            acc += (1 << v) * ((v - center) / scale) ** m
    return acc / total


def joint_counts(triples, k: int) -> dict[tuple[int, int], int]:
    out: dict[tuple[int, int], int] = {}
    for kk, v, u in triples:
        if kk == k:
            out[(v, u)] = out.get((v, u), 0) + 1
    return out


# ------------------------------------------------------------ Euler products
# All products have per-prime shape (1 + a/(p-1+s)) * (1-1/p)^a.  The log of
# the factor, as a series in u = 1/p, starts at u^2, so the sum over p > P0
# is a short combination of prime zeta values.


@lru_cache(maxsize=None)
def _small_primes(limit: int) -> tuple[int, ...]:
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for p in range(2, int(limit**0.5) + 1):
        if flags[p]:
            flags[p * p :: p] = b"\x00" * len(range(p * p, limit + 1, p))
    return tuple(i for i in range(2, limit + 1) if flags[i])


def euler_product_mp(a, s, P0: int = 10_000, terms: int = 16, dps: int = 60):
    """log of prod_p (1+a/(p-1+s))(1-1/p)^a as an mpmath number (mpc if complex)."""
    with mp.workdps(dps):
        a = mp.mpmathify(a)
        s = mp.mpmathify(s)

        def logf(u):
            return mp.log(1 + a * u / (1 - u + s * u)) + a * mp.log(1 - u)

        coeffs = mp.taylor(logf, 0, terms)
        primes = _small_primes(P0)
        head = mp.fsum(logf(mp.mpf(1) / p) for p in primes)
        tail = mp.mpf(0)
        for j in range(2, terms + 1):
            partial = mp.fsum(mp.mpf(p) ** (-j) for p in primes)
            tail += coeffs[j] * (mp.primezeta(j) - partial)
        return head + tail


def level_density_mp(r, **kw):
    with mp.workdps(kw.get("dps", 60)):
        return mp.exp(euler_product_mp(r, 0, **kw)) / mp.gamma(r + 1)


def tilted_level_mp(r, **kw):
    with mp.workdps(kw.get("dps", 60)):
        return mp.exp(euler_product_mp(r + 1, 0, **kw)) / mp.gamma(r + 1)


def tilt_product_mp(r, z, **kw):
    with mp.workdps(kw.get("dps", 60)):
        z = mp.mpmathify(z)
        return mp.exp(mp.euler * (2 * z - 2) + euler_product_mp(2 * z - 1, r, **kw))


def tilt_profile_mp(r, z, **kw):
    with mp.workdps(kw.get("dps", 60)):
        z = mp.mpmathify(z)
        return mp.exp(mp.euler * (2 * z - 2) + euler_product_mp(2 * z - 2, r + 1, **kw))


def coprimality_density_mp(ell: int, y, **kw):
    with mp.workdps(kw.get("dps", 60)):
        y = mp.mpmathify(y)
        val = mp.exp(euler_product_mp(y, 0, **kw)) / mp.gamma(y + 1)
        for p, _ in factorize(ell):
            val /= 1 + y / (p - 1)
        return val


def coprimality_dd_mp(ell: int, y, **kw):
    h = mp.mpf("1e-6")
    with mp.workdps(kw.get("dps", 60)):
        f = lambda t: coprimality_density_mp(ell, t, **kw)
        return mp.diff(f, mp.mpmathify(y), 2, h=h, method="step")


# --------------------------------------------------------- kernel enumeration


def kernel_g(p: int, alpha: int, w: int, z) -> complex:
    if alpha == 1:
        return 2 * (z - 1) if p <= w else 0.0
    if alpha == 2:
        return 1 - 2 * z if p <= w else -1.0
    return 0.0


def kernel_g_general(q: int, w: int, z) -> complex:
    out = 1.0 + 0.0j
    for p, e in factorize(q):
        out *= kernel_g(p, e, w, z)
    return out


def phi_via_enumeration(ell: int, w: int, z) -> complex:
    """sum over d^2 * q = ell of g(q) / phi(d*q), straight from the definition."""
    total = 0.0 + 0.0j
    d = 1
    while d * d <= ell:
        if ell % (d * d) == 0:
            q = ell // (d * d)
            phi = 1
            for p, e in factorize(d * q):
                phi *= (p - 1) * p ** (e - 1)
            total += kernel_g_general(q, w, z) / phi
        d += 1
    return total


if __name__ == "__main__":
    mp.mp.dps = 40
    print("# frozen Euler-product oracle values (30 digits)")
    for r in (0.25, 0.5, 1.0, 2.0):
        print(f'    ("level_density", {r}): "{mp.nstr(level_density_mp(mp.mpf(r)), 30)}",')
    for r in (0.25, 0.5, 1.0, 2.0):
        print(f'    ("tilted_level", {r}): "{mp.nstr(tilted_level_mp(mp.mpf(r)), 30)}",')
    print(f'    ("tilt_product", 1.0, 2.0): "{mp.nstr(tilt_product_mp(mp.mpf(1), mp.mpf(2)), 30)}",')
    zc = mp.mpc("0.8", "0.3")
    print(f'    ("tilt_product", 0.5, 0.8+0.3j): "{mp.nstr(tilt_product_mp(mp.mpf(0.5), zc, dps=60), 32)}",')
    print(f'    ("tilt_profile", 0.25, 2.338): "{mp.nstr(tilt_profile_mp(mp.mpf(0.25), mp.mpf(2.338)), 30)}",')
    print(f'    ("tilt_profile", 0.5, 0.8+0.3j): "{mp.nstr(tilt_profile_mp(mp.mpf(0.5), zc, dps=60), 32)}",')
    for ell, y in ((1, 1.0), (6, 1.0), (12, 1.5)):
        print(f'    ("coprimality", {ell}, {y}): "{mp.nstr(coprimality_density_mp(ell, mp.mpf(y)), 30)}",')
    print(f'    ("coprimality_dd", 1, 1.0): "{mp.nstr(coprimality_dd_mp(1, mp.mpf(1)), 25)}",')
    print(f'    ("coprimality_dd", 6, 1.0): "{mp.nstr(coprimality_dd_mp(6, mp.mpf(1)), 25)}",')
    # identity sanity for the oracle itself
    print("# h(1/2) - e^-gamma =", mp.nstr(tilt_product_mp(mp.mpf(0.5), mp.mpf(0.5)) - mp.exp(-mp.euler), 8))
    print("# H(0.7,1) - 1     =", mp.nstr(tilt_profile_mp(mp.mpf(0.7), mp.mpf(1)) - 1, 8))
