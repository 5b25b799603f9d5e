"""Exact counting and limit-law verification for weighted factor statistics.

The package measures how the number of distinct prime factors of n-1
distributes when n ranges over integers with a fixed number of distinct
prime factors, each n weighted by 2^(distinct prime factors of n-1).
It provides an exact segmented sieve, high-precision Euler-product
constants with rigorous truncation bounds, a generating-function layer,
statistics against the Gaussian limit, and an experiment runner.
"""

__version__ = "0.1.0"

from .constants import (
    EulerProductResult,
    LevelRatio,
    PoleError,
    coprimality_density,
    coprimality_density_dd,
    level_density_constant,
    level_ratio,
    normal_cdf,
    tilt_product,
    tilt_profile,
    tilted_level_constant,
)
from .experiment import (
    ExperimentConfig,
    ExperimentResult,
    parse_config,
    resolve_w,
    run_experiment,
)
from .genfun import (
    CoefficientVector,
    GenFunValue,
    ProfilePoint,
    WeightKernel,
    characteristic_profile,
    convolution_check,
    convolution_max_deviation,
    eval_genfun,
    extract_coefficients,
    kernel_value,
    phi_prime_power,
    phi_weighted_kernel,
)
from .sieve import (
    CacheMismatchError,
    OmegaTable,
    SieveConfig,
    build_omega_table,
    cache_path,
    count_omega_level,
    iter_omega_level,
    load_table,
    save_table,
)
from .stats import (
    PredictionReport,
    ThresholdSpec,
    gaussian_moment,
    gaussian_spec,
    joint_histogram,
    ks_distance,
    large_factor_ratio,
    loglog,
    small_factor_prediction,
    total_weighted_mass,
    weighted_mass,
    weighted_mass_at,
    weighted_mass_below,
    weighted_mass_theoretical,
    weighted_moment,
)
from .verify import VerifySummary, verify_suite

__all__ = [
    "__version__",
    "CacheMismatchError",
    "CoefficientVector",
    "EulerProductResult",
    "ExperimentConfig",
    "ExperimentResult",
    "GenFunValue",
    "LevelRatio",
    "OmegaTable",
    "PoleError",
    "PredictionReport",
    "ProfilePoint",
    "SieveConfig",
    "ThresholdSpec",
    "VerifySummary",
    "WeightKernel",
    "build_omega_table",
    "cache_path",
    "characteristic_profile",
    "convolution_check",
    "convolution_max_deviation",
    "coprimality_density",
    "coprimality_density_dd",
    "count_omega_level",
    "eval_genfun",
    "extract_coefficients",
    "gaussian_moment",
    "gaussian_spec",
    "iter_omega_level",
    "joint_histogram",
    "kernel_value",
    "ks_distance",
    "large_factor_ratio",
    "level_density_constant",
    "level_ratio",
    "load_table",
    "loglog",
    "normal_cdf",
    "parse_config",
    "phi_prime_power",
    "phi_weighted_kernel",
    "resolve_w",
    "run_experiment",
    "save_table",
    "small_factor_prediction",
    "tilt_product",
    "tilt_profile",
    "tilted_level_constant",
    "total_weighted_mass",
    "verify_suite",
    "weighted_mass",
    "weighted_mass_at",
    "weighted_mass_below",
    "weighted_mass_theoretical",
    "weighted_moment",
]
