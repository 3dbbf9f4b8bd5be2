"""Kernel-based specification tests for regression models (C++ core)."""

import json

from ._core import (
    DataError,
    DegenerateError,
    eval_kernel,
    f_statistic,
    gen_sample,
    glr_statistic,
    kernel_constants,
    loss_curvature,
    loss_eval,
    noncentrality,
    nw_fit,
    ols_fit,
    pitman_are,
    rot_bandwidth,
    self_convolution,
    spec_test,
)
from ._core import run_experiment_json as _run_experiment_json

__version__ = "0.1.0"


def run_experiment(config, reps=0, threads=0):
    """Run a preset name (table2..table6) or key = value config text; returns the report as a dict."""
    return json.loads(_run_experiment_json(config, reps, threads))


__all__ = [
    "DataError",
    "DegenerateError",
    "eval_kernel",
    "f_statistic",
    "gen_sample",
    "glr_statistic",
    "kernel_constants",
    "loss_curvature",
    "loss_eval",
    "noncentrality",
    "nw_fit",
    "ols_fit",
    "pitman_are",
    "rot_bandwidth",
    "run_experiment",
    "self_convolution",
    "spec_test",
]
