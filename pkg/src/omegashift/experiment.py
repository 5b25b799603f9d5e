"""Experiment configuration, execution, and deterministic reports.

A run is described by a flat key = value text file, executed over a grid of
(x, k) pairs, and written as a CSV plus a JSON mirror.  Reruns of the same
config produce byte-identical files except for the runtime_ms column, which
is deliberately last in the schema.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import time
from dataclasses import dataclass, field

from . import __version__
from .constants import R_CEILING
from .sieve import (
    OmegaTable,
    SieveConfig,
    build_omega_table,
    cache_path,
    load_table,
    save_table,
)
from .stats import (
    PredictionReport,
    classical_baseline,
    gaussian_moment,
    joint_histogram,
    ks_distance,
    large_factor_ratio,
    loglog,
    logloglog,
    make_report,
    normal_cdf,
    small_factor_prediction,
    unweighted_baseline,
    weighted_mass,
    weighted_mass_at,
    weighted_mass_below,
    weighted_mass_theoretical,
    weighted_moment,
)

CSV_HEADER = "statistic,x,k,w,param,empirical,theoretical,rel_dev,error_scale,runtime_ms"

THREADS_ENV = "OMEGASHIFT_THREADS"

_DEFAULTS = {
    "w_rule": "auto",
    "y_grid": [-2.0, -1.0, 0.0, 1.0, 2.0],
    "ell_max": -1,
    "moments": [],
    "truncation_prime": 10_000_000,
    "output_dir": "reports",
    "cache_dir": "",
    "threads": 1,
    "baseline": False,
    "large_factor_c": -1.0,
}


@dataclass(frozen=True)
class ExperimentConfig:
    x_list: tuple[int, ...]
    k_list: tuple[int, ...]
    w_rule: str = "auto"
    y_grid: tuple[float, ...] = (-2.0, -1.0, 0.0, 1.0, 2.0)
    ell_max: int = -1
    moments: tuple[int, ...] = ()
    truncation_prime: int = 10_000_000
    output_dir: str = "reports"
    cache_dir: str = ""
    threads: int = 1
    baseline: bool = False
    large_factor_c: float = -1.0

    def __post_init__(self):
        if not self.x_list:
            raise ValueError("x_list is empty")
        if not self.k_list:
            raise ValueError("k_list is empty")
        if min(self.x_list) < 16:
            raise ValueError("every x must be >= 16")
        if min(self.k_list) < 1:
            raise ValueError("every k must be >= 1")
        cap = R_CEILING * loglog(min(self.x_list)) + 1.0
        if max(self.k_list) > cap:
            raise ValueError(
                f"k={max(self.k_list)} too deep for x={min(self.x_list)} "
                f"(ceiling {cap:.1f})"
            )
        _parse_w_rule(self.w_rule)
        if self.truncation_prime < 1000:
            raise ValueError("truncation_prime < 1000")
        if self.threads < 1:
            raise ValueError("threads < 1")
        for m in self.moments:
            if not 0 <= m <= 12:
                raise ValueError(f"moment order {m} outside [0, 12]")


def _parse_w_rule(rule: str):
    if rule in ("auto", "loglog_sq"):
        return rule, None
    if rule.startswith("fixed:"):
        try:
            n = int(rule.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad w_rule {rule!r}") from None
        if n < 2:
            raise ValueError("fixed w must be >= 2")
        return "fixed", n
    raise ValueError(f"unknown w_rule {rule!r} (expected auto|loglog_sq|fixed:<int>)")


def resolve_w(rule: str, x: int) -> int:
    """Small-prime threshold for scale x.

    auto      exp(log x / (loglog x)^2)   (slowly growing, the default)
    loglog_sq exp((loglog x)^2)           (wide small-prime window)
    fixed:N   N (N >= 2 enforced at parse time), clamped down to x
    """
    kind, n = _parse_w_rule(rule)
    if kind == "fixed":
        return max(2, min(n, x))
    t = loglog(x)
    if kind == "auto":
        w = math.exp(math.log(x) / (t * t))
    else:
        w = math.exp(t * t)
    return max(2, min(int(round(w)), x))


_LIST_KEYS = {"x_list", "k_list", "moments"}
_FLOAT_LIST_KEYS = {"y_grid"}
_INT_KEYS = {"ell_max", "truncation_prime", "threads"}
_FLOAT_KEYS = {"large_factor_c"}
_BOOL_KEYS = {"baseline"}
_STR_KEYS = {"w_rule", "output_dir", "cache_dir"}


def parse_config(text: str) -> ExperimentConfig:
    """Parse the flat key = value format ('#' starts a comment)."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key = value, got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key in _LIST_KEYS:
            values[key] = tuple(int(v) for v in val.replace(",", " ").split())
        elif key in _FLOAT_LIST_KEYS:
            values[key] = tuple(float(v) for v in val.replace(",", " ").split())
        elif key in _INT_KEYS:
            values[key] = int(val)
        elif key in _FLOAT_KEYS:
            values[key] = float(val)
        elif key in _BOOL_KEYS:
            if val.lower() not in ("true", "false", "0", "1"):
                raise ValueError(f"line {lineno}: bad boolean {val!r}")
            values[key] = val.lower() in ("true", "1")
        elif key in _STR_KEYS:
            values[key] = val
        else:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
    for req in ("x_list", "k_list"):
        if req not in values:
            raise ValueError(f"missing required key {req!r}")
    merged = dict(_DEFAULTS)
    merged.update(values)
    merged["x_list"] = tuple(values["x_list"])
    merged["k_list"] = tuple(values["k_list"])
    merged["y_grid"] = tuple(merged["y_grid"])
    merged["moments"] = tuple(merged["moments"])
    return ExperimentConfig(**merged)


def config_hash(config: ExperimentConfig) -> str:
    canon = "\n".join(
        f"{k}={getattr(config, k)!r}" for k in sorted(ExperimentConfig.__dataclass_fields__)
    )
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


def _get_table(config: ExperimentConfig, x: int, w: int) -> OmegaTable:
    if config.cache_dir:
        os.makedirs(config.cache_dir, exist_ok=True)
        path = cache_path(config.cache_dir, x, w)
        if os.path.exists(path):
            return load_table(path, x_max=x, w=w)
        table = build_omega_table(SieveConfig(x_max=x, w=w, threads=config.threads))
        save_table(table, path)
        return table
    return build_omega_table(SieveConfig(x_max=x, w=w, threads=config.threads))


def _timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, (time.perf_counter() - t0) * 1e3


@dataclass
class ExperimentResult:
    csv_path: str
    json_path: str
    rows: list[PredictionReport] = field(default_factory=list)


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Execute the grid and write reports; row order is deterministic."""
    threads = int(os.environ.get(THREADS_ENV, config.threads) or config.threads)
    rows: list[PredictionReport] = []
    P = config.truncation_prime
    for x in config.x_list:
        w = resolve_w(config.w_rule, x)
        table = _get_table(config, x, w)
        l2x, l3x = loglog(x), logloglog(x)
        gauss_err = l3x / math.sqrt(2.0 * l2x)
        for k in config.k_list:
            hist = joint_histogram(table, k, x, threads=threads)
            mass, ms = _timed(weighted_mass, table, k, x, hist=hist)
            theo_mass = weighted_mass_theoretical(k, x, P)
            rows.append(
                make_report("weighted_total", x, k, w, None, mass, theo_mass,
                            1.0 / l2x, ms)
            )
            if mass == 0:
                continue
            for y in config.y_grid:
                emp, ms = _timed(
                    weighted_mass_below, table, k, x, y, hist=hist
                )
                rows.append(
                    make_report("weighted_cdf", x, k, w, y, emp,
                                mass * normal_cdf(y), gauss_err, ms)
                )
            if config.y_grid:
                emp, ms = _timed(ks_distance, table, k, x, hist=hist)
                rows.append(
                    make_report("ks_distance", x, k, w, None, emp, gauss_err,
                                gauss_err, ms)
                )
            if config.ell_max >= 0 and w >= 3:
                l2w = loglog(w)
                for ell in range(config.ell_max + 1):
                    emp, ms = _timed(
                        weighted_mass_at, table, k, x, ell, hist=hist
                    )
                    theo = small_factor_prediction(k, x, ell, w, P, mass=mass)
                    err = k / l2x**2 + (ell + 1) / l2w**2
                    rows.append(
                        make_report("small_factor_profile", x, k, w, ell,
                                    emp, theo, err, ms)
                    )
            for m in config.moments:
                emp, ms = _timed(weighted_moment, table, k, x, m, hist=hist)
                rows.append(
                    make_report(f"moment_m{m}", x, k, w, m, emp,
                                gaussian_moment(m), gauss_err, ms)
                )
            if config.baseline:
                for y in config.y_grid:
                    rows.append(unweighted_baseline(table, k, x, y, hist=hist))
            if config.large_factor_c >= 0:
                emp, ms = _timed(
                    large_factor_ratio, table, k, x, config.large_factor_c,
                    hist=hist,
                )
                rows.append(
                    make_report("large_factor_ratio", x, k, w,
                                config.large_factor_c, emp, 0.0, 1.0 / l2x, ms)
                )
        if config.baseline:
            for y in config.y_grid:
                rows.append(classical_baseline(table, x, y))
    os.makedirs(config.output_dir, exist_ok=True)
    tag = config_hash(config)
    csv_path = os.path.join(config.output_dir, f"report_{tag}.csv")
    json_path = os.path.join(config.output_dir, f"report_{tag}.json")
    _write_csv(csv_path, rows)
    _write_json(json_path, rows, config, tag)
    return ExperimentResult(csv_path=csv_path, json_path=json_path, rows=rows)


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(path: str, rows: list[PredictionReport]) -> None:
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                _cell(v)
                for v in (r.statistic, r.x, r.k, r.w, r.param, r.empirical,
                          r.theoretical, r.rel_dev, r.error_scale, r.runtime_ms)
            )
        )
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


def _write_json(path, rows, config: ExperimentConfig, tag: str) -> None:
    doc = {
        "metadata": {
            "package_version": __version__,
            "config_hash": tag,
            "r_definition": "(k-1)/loglog(x)",
            "r_definition_rejected": "(k-1)*loglog(x)",
            "w_rule": config.w_rule,
            "truncation_prime": config.truncation_prime,
        },
        "rows": [
            {
                "statistic": r.statistic, "x": r.x, "k": r.k, "w": r.w,
                "param": r.param, "empirical": r.empirical,
                "theoretical": r.theoretical, "rel_dev": r.rel_dev,
                "error_scale": r.error_scale, "runtime_ms": r.runtime_ms,
            }
            for r in rows
        ],
    }
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    os.replace(tmp, path)
