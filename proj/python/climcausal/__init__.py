"""Causal discovery over World Bank indicator panels."""

from ._core import (
    ClimcausalError,
    build_prompts,
    estimate_order,
    evaluate,
    median_bandwidth,
    prune,
    run_real,
    run_synthetic,
    stein_hessian_diag,
    stein_score,
    synthesize,
)

__all__ = [
    "ClimcausalError",
    "build_prompts",
    "estimate_order",
    "evaluate",
    "median_bandwidth",
    "prune",
    "run_real",
    "run_synthetic",
    "stein_hessian_diag",
    "stein_score",
    "synthesize",
]
