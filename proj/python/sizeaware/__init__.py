"""Size-aware dispatching and scheduling in parallel queues.

Distributions are dicts in the config format, e.g.
``{"kind": "bounded_pareto", "k": 0.33959, "p": 1000.0, "alpha": 1.5}``.
"""

import json as _json

from ._sizeaware import (
    ConfigError,
    InstabilityError,
    admit,
    analytic_columns,
    estimate_value,
    fifo_better_than_lifo,
    fifo_mean_slowdown,
    lifo_conditional_slowdown,
    rnd_lifo_system_slowdown,
    rnd_opt_probabilities,
    simulate_columns,
    sita_e_thresholds,
    value,
    value_check_columns,
)
from ._sizeaware import analytic as _analytic
from ._sizeaware import simulate as _simulate

DEFAULT_PARETO = {"kind": "bounded_pareto", "k": 0.33959, "p": 1000.0, "alpha": 1.5}


def _as_json(config):
    return config if isinstance(config, str) else _json.dumps(config)


def simulate(config, quick=False):
    """Simulate every (system, load, policy) cell of a config; returns CSV text."""
    return _simulate(_as_json(config), quick)


def analytic(config):
    """Closed-form rows for a config; returns CSV text."""
    return _analytic(_as_json(config))


__all__ = [
    "ConfigError",
    "InstabilityError",
    "DEFAULT_PARETO",
    "admit",
    "analytic",
    "analytic_columns",
    "estimate_value",
    "fifo_better_than_lifo",
    "fifo_mean_slowdown",
    "lifo_conditional_slowdown",
    "rnd_lifo_system_slowdown",
    "rnd_opt_probabilities",
    "simulate",
    "simulate_columns",
    "sita_e_thresholds",
    "value",
    "value_check_columns",
]
