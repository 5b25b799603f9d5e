"""High-precision constants from truncated Euler products.

Every product evaluated here has per-prime factors of the shape

    (1 + a/(p - 1 + s)) * (1 - 1/p)**a

for a coefficient a (possibly complex) and a shift s >= 0, so a single
log-evaluation core serves all of them.  The 1/p terms cancel between the two
factors, the log-factor is O(1/p^2), and truncation at P carries a rigorous
tail bound: an explicit constant c(a, s) times the exact remainder
sum_{p > P} p^(-2), the latter obtained from the prime zeta value at 2 minus
the partial sum accumulated during the same pass.

Derivation of c(a, s), valid for p >= 1000, |a| <= 10, 0 <= s <= 5: with
u = a/(p-1+s),

    log F_p = a*(1-s)/(p*(p-1+s)) - u^2/2 - a/(2 p^2) + R,

where |R| <= |u|^3/(3(1-|u|)) + |a|/(2 p^3 (1-1/p)) from the Taylor
remainders of log(1+u) and a*log(1-1/p).  Using p-1+s >= 0.999 p and
1/p <= 1e-3 gives

    |log F_p| <= (1.01*|a|*|1-s| + 0.51*|a|^2 + 0.51*|a| + 0.001*|a|^3) / p^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc, gamma as _gamma

from .accumulate import kahan_sum
from .primes import cached_primes, iter_prime_blocks

EULER_GAMMA = 0.577215664901532860606512090082
PRIME_ZETA_2 = 0.452247420041065498506543364832

R_CEILING = 4.0
DEFAULT_TRUNCATION = 10_000_000
MIN_TRUNCATION = 1000
_BLOCK = 1 << 20


class PoleError(ValueError):
    """Evaluation point within 1e-6 of a pole of the product."""


@dataclass(frozen=True)
class EulerProductResult:
    """Truncated product value plus a rigorous bound on |log full - log truncated|."""

    value: complex | float
    truncation_prime: int
    tail_bound: float
    primes_used: int


@dataclass(frozen=True)
class LevelRatio:
    """Relative level r = (k - 1)/loglog(x) of a k-factor level set at scale x."""

    k: int
    x: float
    r: float

    @classmethod
    def from_kx(cls, k: int, x: float, ceiling: float = R_CEILING) -> "LevelRatio":
        if k < 1:
            raise ValueError("k < 1")
        if x <= math.e:
            raise ValueError("x <= e: loglog(x) undefined or nonpositive")
        r = (k - 1) / math.log(math.log(x))
        if not 0.0 <= r <= ceiling:
            raise ValueError(f"r={r:.4f} outside [0, {ceiling}] for k={k}, x={x:g}")
        return cls(k=k, x=float(x), r=r)


def level_ratio(k: int, x: float, ceiling: float = R_CEILING) -> float:
    return LevelRatio.from_kx(k, x, ceiling).r


def normal_cdf(y: float) -> float:
    """Standard normal distribution function, |error| <= 1e-12 over the reals."""
    return 0.5 * erfc(-y / math.sqrt(2.0))


def _tail_constant(a: complex, s: float) -> float:
    m = abs(a)
    return 1.01 * m * abs(1.0 - s) + 0.51 * m * m + 0.51 * m + 0.001 * m**3


def _log_core(a: complex | float, s: float, P: int):
    """(log product, tail_bound, primes_used, exact_zero) for the shared factor shape.

    Blocks are fixed-size and combined ascending, so the value is reproducible.
    A factor that vanishes exactly (1 + a/(p-1+s) == 0) marks the whole
    product as exactly zero.
    """
    if P < MIN_TRUNCATION:
        raise ValueError(f"truncation P={P} < {MIN_TRUNCATION}")
    m = abs(a)
    if m > 2.0 * R_CEILING + 2.0 + 1e-9:
        raise ValueError(f"|a|={m:.3f} outside tail-bound derivation range")
    if not 0.0 <= s <= R_CEILING + 1.0 + 1e-9:
        raise ValueError(f"shift s={s} outside [0, {R_CEILING + 1}]")
    is_complex = isinstance(a, complex) and a.imag != 0.0
    a_val = complex(a) if is_complex else float(np.real(a))
    log_parts: list = []
    inv_sq_parts: list[float] = []
    count = 0
    exact_zero = False
    if P <= 32_000_000:
        blocks = (
            cached_primes(P)[i : i + _BLOCK]
            for i in range(0, len(cached_primes(P)), _BLOCK)
        )
    else:
        blocks = iter_prime_blocks(P, _BLOCK)
    for ps in blocks:
        pf = ps.astype(np.float64)
        u = a_val / (pf - 1.0 + s)
        factor = 1.0 + u
        if np.any(factor == 0):
            exact_zero = True
            keep = factor != 0
            pf, u, factor = pf[keep], u[keep], factor[keep]
        log_parts.append(complex(np.sum(np.log1p(u) + a_val * np.log1p(-1.0 / pf))))
        inv_sq_parts.append(float(np.sum(1.0 / (pf * pf))))
        count += len(ps)
    log_value = kahan_sum(log_parts)
    partial_inv_sq = kahan_sum(inv_sq_parts)
    remainder = max(PRIME_ZETA_2 - partial_inv_sq, 0.0) + 1e-12
    tail = _tail_constant(a_val, s) * remainder
    if not is_complex:
        log_value = log_value.real if isinstance(log_value, complex) else log_value
    return log_value, tail, count, exact_zero


def _assemble(prefactor, core, P: int) -> EulerProductResult:
    log_value, tail, count, exact_zero = core
    value = complex(0.0 if exact_zero else prefactor * np.exp(log_value))
    if value.imag == 0.0:
        value = value.real
    return EulerProductResult(
        value=value, truncation_prime=P, tail_bound=tail, primes_used=count
    )


def _check_z(z: complex | float):
    if abs(z) > R_CEILING + 1e-9:
        raise ValueError(f"|z|={abs(z):.3f} exceeds ceiling {R_CEILING}")


def _check_r(r: float):
    if not 0.0 <= r <= R_CEILING:
        raise ValueError(f"r={r} outside [0, {R_CEILING}]")


def level_density_constant(r: float, P: int = DEFAULT_TRUNCATION) -> EulerProductResult:
    """prod_p (1 + r/(p-1)) (1 - 1/p)^r / Gamma(r+1).

    Mean-value density constant of the k-factor level set; equals 1 at r = 0.
    """
    _check_r(r)
    return _assemble(1.0 / float(_gamma(r + 1.0)), _log_core(float(r), 0.0, P), P)


def tilted_level_constant(r: float, P: int = DEFAULT_TRUNCATION) -> EulerProductResult:
    """prod_p (1 + (r+1)/(p-1)) (1 - 1/p)^(r+1) / Gamma(r+1).

    Leading constant of the weighted level-set mass; equals 1 at r = 0, and
    factors exactly as level_density_constant(r) * tilt_product(r, 1).
    """
    _check_r(r)
    return _assemble(1.0 / float(_gamma(r + 1.0)), _log_core(float(r) + 1.0, 0.0, P), P)


def tilt_product(r: float, z: complex | float, P: int = DEFAULT_TRUNCATION) -> EulerProductResult:
    """exp(gamma (2z-2)) prod_p (1 + (2z-1)/(p-1+r)) (1 - 1/p)^(2z-1).

    Euler factor of the weighted generating function; equals exp(-gamma)
    exactly at z = 1/2 (every p-factor is 1).
    """
    _check_r(r)
    _check_z(z)
    a = 2.0 * z - 1.0
    pre = np.exp(EULER_GAMMA * (2.0 * z - 2.0))
    return _assemble(pre, _log_core(a, float(r), P), P)


def tilt_profile(r: float, z: complex | float, P: int = DEFAULT_TRUNCATION) -> EulerProductResult:
    """exp(gamma (2z-2)) prod_p (1 + (2z-2)/(p+r)) (1 - 1/p)^(2z-2).

    Normalized profile tilt_product(r, z)/tilt_product(r, 1): identically 1 at
    z = 1, and exactly 0 at (r, z) = (0, 0) where the p = 2 factor vanishes.
    """
    _check_r(r)
    _check_z(z)
    a = 2.0 * z - 2.0
    pre = np.exp(EULER_GAMMA * a)
    return _assemble(pre, _log_core(a, float(r) + 1.0, P), P)


def coprimality_density(
    ell: int, y: complex | float, P: int = DEFAULT_TRUNCATION
) -> EulerProductResult:
    """Density constant of the level set restricted to n coprime to ell:

        prod_p (1 + y/(p-1)) (1 - 1/p)^y / Gamma(y+1)
            * prod_{p | ell} (1 + y/(p-1))^(-1).

    Equals 1 at y = 0 for every ell.  Points within 1e-6 of a pole
    y = 1 - p for p | ell are rejected.
    """
    if ell < 1:
        raise ValueError("ell < 1")
    _check_z(y)
    pdiv = _prime_divisors(ell)
    for p in pdiv:
        if abs(y - (1 - p)) < 1e-6:
            raise PoleError(f"y={y} within 1e-6 of pole at {1 - p} (p={p} | ell)")
    correction = 1.0 + 0.0j if isinstance(y, complex) else 1.0
    for p in pdiv:
        correction /= 1.0 + y / (p - 1.0)
    pre = correction / _gamma(y + 1.0)
    pre = complex(pre) if isinstance(y, complex) and y.imag != 0 else float(np.real(pre))
    return _assemble(pre, _log_core(y, 0.0, P), P)


def coprimality_density_dd(
    ell: int, r: float, P: int = DEFAULT_TRUNCATION, step: float = 1e-4
) -> float:
    """Second derivative in y of coprimality_density at y = r.

    Central differences with the given step, Richardson-extrapolated against
    step/2 (leading h^2 error cancels).
    """

    def f(y: float) -> float:
        return float(coprimality_density(ell, y, P).value)

    center = f(r)

    def second(h: float) -> float:
        return (f(r + h) - 2.0 * center + f(r - h)) / (h * h)

    d_h = second(step)
    d_half = second(step / 2.0)
    return (4.0 * d_half - d_h) / 3.0


def _prime_divisors(ell: int) -> list[int]:
    out = []
    m = ell
    p = 2
    while p * p <= m:
        if m % p == 0:
            out.append(p)
            while m % p == 0:
                m //= p
        p += 1 if p == 2 else 2
    if m > 1:
        out.append(m)
    return out
