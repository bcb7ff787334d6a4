"""Forced graphical mean curvature flow: homogenization laboratory."""

from ._core import (
    EffectiveTable,
    ForcingField,
    GridSpec,
    HomogError,
    build_table,
    check_coercivity,
    cone_experiment,
    effective_value,
    evaluate_F,
    evolve,
    fit_exponent,
    monitor_suite,
    parse_config,
    rate_sweep,
    solve_effective,
    version,
)

__all__ = [
    "EffectiveTable",
    "ForcingField",
    "GridSpec",
    "HomogError",
    "build_table",
    "check_coercivity",
    "cone_experiment",
    "effective_value",
    "evaluate_F",
    "evolve",
    "fit_exponent",
    "monitor_suite",
    "parse_config",
    "rate_sweep",
    "solve_effective",
    "version",
]

__version__ = version()
