"""Built-in verification battery.

Runs named invariant checks and prints one [PASS]/[FAIL]/[WARN] line each.
The fast level finishes in seconds on small ranges; the full level rebuilds
tables up to 1e8 and exercises the large-scale trend checks.  Trend checks
degrade to warnings when the largest scale available is below 1e7.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import genfun
from .constants import (
    EULER_GAMMA,
    coprimality_density,
    level_density_constant,
    normal_cdf,
    tilt_product,
    tilt_profile,
    tilted_level_constant,
)
from .experiment import resolve_w
from .sieve import SieveConfig, build_omega_table, count_omega_level, iter_omega_level
from .stats import (
    gaussian_spec,
    joint_histogram,
    ks_distance,
    ks_weighted_histogram,
    loglog,
    small_factor_prediction,
    total_weighted_mass,
    weighted_mass,
    weighted_mass_at,
    weighted_mass_below,
    weighted_moment,
)

Z_GRID = (0.0 + 0.0j, 1.0 + 0.0j, -1.0 + 0.0j, 1.0j, 1.7 + 0.3j)
W_GRID = (2, 10, 97)


@dataclass
class CheckResult:
    name: str
    status: str  # PASS | FAIL | WARN
    detail: str


@dataclass
class VerifySummary:
    level: str
    results: list[CheckResult]

    @property
    def failures(self) -> int:
        return sum(1 for r in self.results if r.status == "FAIL")

    @property
    def warnings(self) -> int:
        return sum(1 for r in self.results if r.status == "WARN")


def _trial_omega(n: int, w: int) -> tuple[int, int]:
    om = osm = 0
    m, p = n, 2
    while p * p <= m:
        if m % p == 0:
            om += 1
            if p <= w:
                osm += 1
            while m % p == 0:
                m //= p
        p += 1 if p == 2 else 2
    if m > 1:
        om += 1
        if m <= w:
            osm += 1
    return om, osm


def _check_sieve_known_values():
    t12 = build_omega_table(SieveConfig(x_max=12, w=12))
    t30 = build_omega_table(SieveConfig(x_max=30, w=3))
    t10 = build_omega_table(SieveConfig(x_max=10, w=10))
    ok = (
        t12.omega[12] == 2
        and t12.omega_small[12] == 2
        and t30.omega[30] == 3
        and t30.omega_small[30] == 2
        and count_omega_level(t30, 2, 30) == 12
        and list(iter_omega_level(t10, 1, 10)) == [2, 3, 4, 5, 7, 8, 9]
        and list(iter_omega_level(t10, 2, 10)) == [6, 10]
        and count_omega_level(t10, 0, 10) == 0
    )
    return ok, "12=2^2*3, 30=2*3*5, level sets at x=10"


def _check_sieve_vs_trial_division():
    x, w = 3000, 13
    table = build_omega_table(SieveConfig(x_max=x, w=w))
    for n in range(2, x + 1):
        om, osm = _trial_omega(n, w)
        if table.omega[n] != om or table.omega_small[n] != osm:
            return False, f"mismatch at n={n}"
    return True, f"all n <= {x} match trial division (w={w})"


def _check_sieve_determinism():
    x, w = 50_000, 50
    ref = build_omega_table(SieveConfig(x_max=x, w=w, segment_length=1 << 14))
    for seg in (1024, 4096, 1 << 20):
        for th in (1, 3):
            t = build_omega_table(
                SieveConfig(x_max=x, w=w, segment_length=seg, threads=th)
            )
            if t != ref:
                return False, f"segment={seg} threads={th} differs"
    return True, "identical across segment lengths and thread counts"


def _check_partition_identity():
    x = 10_000
    table = build_omega_table(SieveConfig(x_max=x, w=10))
    n_total = sum(count_omega_level(table, k, x) for k in range(1, 16))
    if n_total != x - 1:
        return False, f"sum pi_k = {n_total} != {x - 1}"
    mass = sum(weighted_mass(table, k, x) for k in range(1, 16))
    want = total_weighted_mass(table, x)
    if mass != want:
        return False, f"sum of level masses {mass} != {want}"
    return True, f"sum_k pi_k = x-1 and masses partition ({want})"


def _check_convolution_identity():
    worst = 0.0
    for w in W_GRID:
        for z in Z_GRID:
            kernel = genfun.WeightKernel(w=w, z=z)
            worst = max(worst, genfun.convolution_max_deviation(2000, kernel))
    ok = worst < 1e-10
    return ok, f"max |g*tau - 2^om z^om_w| = {worst:.2e} over n <= 2000"


def _phi_direct(p: int, e: int, kernel) -> complex:
    total = 0.0 + 0.0j
    for a in range(e // 2 + 1):
        # d = p^a, q = p^(e-2a); phi(dq) = phi(p^(e-a))
        q_exp = e - 2 * a
        g = 1.0 + 0.0j if q_exp == 0 else genfun.kernel_value(p, q_exp, kernel)
        phi = p ** (e - a) - p ** (e - a - 1)
        total += g / phi
    return total


def _check_phi_kernel_closed_forms():
    worst = 0.0
    for w in W_GRID:
        for z in Z_GRID:
            kernel = genfun.WeightKernel(w=w, z=z)
            for p in (2, 3, 5, 7, 11, 13, 29):
                for e in range(1, 7):
                    dev = abs(
                        genfun.phi_prime_power(p, e, kernel)
                        - _phi_direct(p, e, kernel)
                    )
                    worst = max(worst, dev)
    return worst < 1e-12, f"max closed-form deviation {worst:.2e}"


def _check_phi_kernel_multiplicative():
    kernel = genfun.WeightKernel(w=10, z=1.7 + 0.3j)
    worst = 0.0
    pairs = [(a, b) for a in range(2, 80) for b in range(2, 80) if math.gcd(a, b) == 1]
    for a, b in pairs:
        dev = abs(
            genfun.phi_weighted_kernel(a * b, kernel)
            - genfun.phi_weighted_kernel(a, kernel)
            * genfun.phi_weighted_kernel(b, kernel)
        )
        worst = max(worst, dev)
    return worst < 1e-12, f"max |f(ab) - f(a)f(b)| = {worst:.2e} ({len(pairs)} pairs)"


def _check_euler_identities():
    P = 100_000
    msgs = []
    ok = True
    dev0 = abs(tilted_level_constant(0.0, P).value - 1.0)
    ok &= dev0 < 1e-9
    msgs.append(f"|A(0)-1|={dev0:.1e}")
    for r in (0.0, 0.25, 0.5, 1.0, 2.0):
        a = tilted_level_constant(r, P).value
        c = level_density_constant(r, P).value
        h1 = tilt_product(r, 1.0, P).value
        dev = abs(a - c * h1)
        ok &= dev < 1e-9
        devh = abs(tilt_profile(r, 1.0, P).value - 1.0)
        ok &= devh < 1e-12
    msgs.append("A=C*h(1), H(r,1)=1")
    devg = abs(tilt_product(0.5, 0.5, P).value - math.exp(-EULER_GAMMA))
    ok &= devg < 1e-12
    msgs.append(f"|h(1/2)-e^-gamma|={devg:.1e}")
    l1 = coprimality_density(1, 1.0, P).value
    l6 = coprimality_density(6, 1.0, P).value
    ok &= abs(l6 - l1 / 3.0) < 1e-12
    msgs.append("lambda_6(1)=lambda_1(1)/3")
    ok &= tilt_profile(0.0, 0.0, P).value == 0.0
    msgs.append("H(0,0)=0")
    t1 = tilted_level_constant(1.0, P).tail_bound
    t2 = tilted_level_constant(1.0, 2 * P).tail_bound
    ok &= 0 < t2 < t1
    msgs.append("tail bound decreasing")
    return bool(ok), "; ".join(msgs)


def _check_normal_cdf():
    ok = (
        abs(normal_cdf(0.0) - 0.5) < 1e-15
        and abs(normal_cdf(1.0) - 0.841344746068543) < 1e-9
        and normal_cdf(-8.0) < 1e-14
        and 1.0 - normal_cdf(8.0) < 1e-14
    )
    # strict monotonicity holds in float64 until the tails saturate near +-8.3
    grid = [normal_cdf(b / 4.0) for b in range(-32, 33)]
    ok &= all(a < b for a, b in zip(grid, grid[1:]))
    return bool(ok), "values and monotonicity"


def _check_coefficients_vs_direct():
    x = 10_000
    worst = 0.0
    for w in (10, resolve_w("auto", x)):
        table = build_omega_table(SieveConfig(x_max=x, w=w))
        for k in (1, 2, 3):
            vec = genfun.extract_coefficients(table, k, x)
            hist = joint_histogram(table, k, x)
            for ell, coeff in enumerate(vec.coefficients):
                direct = weighted_mass_at(table, k, x, ell, hist=hist)
                worst = max(worst, abs(coeff - direct) / max(direct, 1.0))
    return worst < 1e-6, f"max componentwise deviation {worst:.2e}"


def _check_genfun_examples():
    t10 = build_omega_table(SieveConfig(x_max=10, w=2))
    val = genfun.eval_genfun(t10, 1, 10, 1.0)
    vec = genfun.extract_coefficients(t10, 1, 10)
    ok = (
        abs(val.value - 15.0) < 1e-12
        and val.weight_total == 15
        and np.allclose(vec.coefficients, [5.0, 10.0], atol=1e-9)
    )
    t10b = build_omega_table(SieveConfig(x_max=10, w=10))
    ok &= weighted_mass(t10b, 2, 10) == 4
    return bool(ok), "F(x=10,k=1,w=2): F(1)=15, coeffs [5,10]; S_2(10)=4"


def _check_threshold_monotone():
    x = 10_000
    table = build_omega_table(SieveConfig(x_max=x, w=10))
    hist = joint_histogram(table, 2, x)
    total = weighted_mass(table, 2, x, hist=hist)
    prev = -1
    for y in np.linspace(-4, 8, 25):
        cur = weighted_mass_below(table, 2, x, float(y), hist=hist)
        if cur < prev or cur > total:
            return False, f"not monotone at y={y}"
        prev = cur
    if prev != total:
        return False, "S(y=8) != S"
    return True, "nondecreasing in y, saturates at the full mass"


def _check_profile_modulus():
    x = 10_000
    table = build_omega_table(SieveConfig(x_max=x, w=10))
    pts = genfun.characteristic_profile(table, 2, x, np.linspace(-3, 3, 13))
    worst = max(abs(p.psi) for p in pts)
    return worst <= 1.0 + 1e-12, f"max |psi| = {worst:.6f}"


def _check_stat_determinism():
    x = 10_000
    table = build_omega_table(SieveConfig(x_max=x, w=10))
    z = 0.83 + 0.41j
    v1 = genfun.eval_genfun(table, 2, x, z, threads=1)
    v3 = genfun.eval_genfun(table, 2, x, z, threads=3)
    if v1.value != v3.value:
        return False, "eval_genfun differs across thread counts"
    h1 = joint_histogram(table, 2, x, threads=1)
    h3 = joint_histogram(table, 2, x, threads=3)
    if not np.array_equal(h1, h3):
        return False, "joint_histogram differs across thread counts"
    return True, "bit-identical statistics for threads in {1, 3}"


def _check_ks_synthetic():
    center, scale = 20.0, 4.0
    vs = list(range(4, 37))
    cdf = [normal_cdf((v - center) / scale) for v in vs]
    weights = [0.0] * 64
    prev = 0.0
    for v, c in zip(vs, cdf):
        weights[v] = (c - prev) * 1e9
        prev = c
    weights[vs[-1]] += (1.0 - prev) * 1e9
    dist = ks_weighted_histogram(weights, center, scale)
    resolution = max(b - a for a, b in zip(cdf, cdf[1:]))
    return dist <= resolution + 1e-12, f"distance {dist:.4f} <= grid gap {resolution:.4f}"


_FAST_CHECKS = [
    ("sieve_known_values", _check_sieve_known_values),
    ("sieve_vs_trial_division", _check_sieve_vs_trial_division),
    ("sieve_determinism", _check_sieve_determinism),
    ("partition_identity", _check_partition_identity),
    ("convolution_identity", _check_convolution_identity),
    ("phi_kernel_closed_forms", _check_phi_kernel_closed_forms),
    ("phi_kernel_multiplicative", _check_phi_kernel_multiplicative),
    ("euler_identities", _check_euler_identities),
    ("normal_cdf", _check_normal_cdf),
    ("coefficients_vs_direct", _check_coefficients_vs_direct),
    ("genfun_examples", _check_genfun_examples),
    ("threshold_monotone", _check_threshold_monotone),
    ("profile_modulus", _check_profile_modulus),
    ("stat_determinism", _check_stat_determinism),
    ("ks_synthetic", _check_ks_synthetic),
]


def _full_battery(x_top: int, emit) -> list[CheckResult]:
    """Large-scale trend checks; x_top below 1e7 demotes failures to warnings."""
    xs = [x for x in (100_000, 1_000_000, 10_000_000, 100_000_000) if x <= x_top]
    soft = x_top < 10_000_000
    results = []

    def trend(name, ok, detail):
        status = "PASS" if ok else ("WARN" if soft else "FAIL")
        results.append(CheckResult(name, status, detail))
        emit(results[-1])

    tables = {}
    for x in xs:
        w = resolve_w("loglog_sq", x)
        tables[x] = build_omega_table(SieveConfig(x_max=x, w=w))
    k = 2
    hists = {x: joint_histogram(tables[x], k, x) for x in xs}

    ks_vals = [ks_distance(tables[x], k, x, hist=hists[x]) for x in xs]
    ok = all(0.0 <= d <= 1.0 for d in ks_vals) and all(
        b <= 1.1 * a for a, b in zip(ks_vals, ks_vals[1:])
    )
    trend("ks_trend", ok, "ks(k=2): " + ", ".join(f"{d:.4f}" for d in ks_vals))

    x = xs[-1]
    spec = gaussian_spec(x)
    marg = hists[x].sum(axis=1)
    mass = sum(int(c) << v for v, c in enumerate(marg))
    mean = sum((int(c) << v) * v for v, c in enumerate(marg)) / mass
    gap = abs(mean - spec.center)
    trend("mean_location", gap <= 3.0,
          f"|weighted mean - 2loglog x| = {gap:.3f} at x={x:.0e}")

    if len(xs) >= 2:
        m2 = [weighted_moment(tables[x], k, x, 2, hist=hists[x]) for x in xs]
        m4 = [weighted_moment(tables[x], k, x, 4, hist=hists[x]) for x in xs]
        ok = (
            0.5 <= m2[-1] <= 1.5
            and 1.5 <= m4[-1] <= 4.5
            and abs(m2[-1] - 1.0) <= abs(m2[0] - 1.0)
            and abs(m4[-1] - 3.0) <= abs(m4[0] - 3.0)
        )
        trend("moment_trend", ok,
              f"m2: {m2[0]:.3f}->{m2[-1]:.3f}, m4: {m4[0]:.3f}->{m4[-1]:.3f}")

    table = tables[xs[-1]]
    x = xs[-1]
    w = table.w
    ell_top = int(3 * loglog(w))
    mass = sum(int(c) << v for v, c in enumerate(hists[x].sum(axis=1)))
    emp = [weighted_mass_at(table, k, x, l, hist=hists[x]) for l in range(ell_top + 1)]
    theo = [
        small_factor_prediction(k, x, l, w, P=1_000_000, mass=mass)
        for l in range(ell_top + 1)
    ]
    corr = float(np.corrcoef(emp, theo)[0, 1])
    peak_gap = abs(int(np.argmax(emp)) - int(np.argmax(theo)))
    trend("profile_correlation", corr > 0.9 and peak_gap <= 2,
          f"corr={corr:.4f}, peak gap={peak_gap} over ell<=({ell_top})")

    gaps = {t: [] for t in (0.5, 1.0, 2.0)}
    for x in xs:
        pts = genfun.characteristic_profile(tables[x], k, x, list(gaps))
        for p in pts:
            gaps[p.t].append(p.gaussian_gap)
    ok = all(g[-1] <= 1.1 * g[0] for g in gaps.values())
    trend("psi_trend", ok,
          "; ".join(f"t={t}: {g[0]:.4f}->{g[-1]:.4f}" for t, g in gaps.items()))
    return results


def verify_suite(level: str = "fast", x_top: int = 100_000_000, quiet: bool = False) -> VerifySummary:
    """Run the named battery; returns a summary with failure/warning counts."""
    if level not in ("fast", "full"):
        raise ValueError(f"level={level!r} (expected fast|full)")
    results: list[CheckResult] = []

    def emit(res: CheckResult):
        if not quiet:
            print(f"[{res.status}] {res.name}: {res.detail}")

    for name, fn in _FAST_CHECKS:
        try:
            ok, detail = fn()
            res = CheckResult(name, "PASS" if ok else "FAIL", detail)
        except Exception as exc:  # a crash is a failure, not an abort
            res = CheckResult(name, "FAIL", f"raised {type(exc).__name__}: {exc}")
        results.append(res)
        emit(res)
    if level == "full":
        results.extend(_full_battery(x_top, emit))
    summary = VerifySummary(level=level, results=results)
    if not quiet:
        print(
            f"{summary.level}: {len(results)} checks, "
            f"{summary.failures} failed, {summary.warnings} warnings"
        )
    return summary
