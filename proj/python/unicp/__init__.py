"""Bayesian multiple changepoint detection on a randomized uniform grid.

The heavy lifting lives in the compiled ``_core`` extension; this package
re-exports its entry points.
"""

from ._core import (
    InputError,
    IoError,
    RuntimeAbort,
    cusum,
    generate_benchmark,
    log_marginal,
    map_count,
    run_gibbs,
    viterbi_map,
)

__all__ = [
    "InputError",
    "IoError",
    "RuntimeAbort",
    "cusum",
    "generate_benchmark",
    "log_marginal",
    "map_count",
    "run_gibbs",
    "viterbi_map",
]
