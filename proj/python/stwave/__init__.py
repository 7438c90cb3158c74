"""Space-time FEM solver for wave-equation data assimilation with
piecewise-constant wave speed."""

from ._core import (
    RunConfig,
    __version__,
    exact_dt,
    exact_value,
    gcc_threshold,
    observed_order,
    run_single,
    sweep_contrast,
    sweep_levels,
    write_csv,
)

__all__ = [
    "RunConfig",
    "__version__",
    "exact_dt",
    "exact_value",
    "gcc_threshold",
    "observed_order",
    "run_single",
    "sweep_contrast",
    "sweep_levels",
    "write_csv",
]
