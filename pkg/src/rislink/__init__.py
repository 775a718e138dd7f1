"""Analysis and placement optimization of a single RIS-assisted wireless link.

The library evaluates coverage probability and ergodic rate of a
source-RIS-destination link under statistical (long-term) and instantaneous
(short-term) phase-shift designs via Gamma moment matching, validates every
closed form against a Monte Carlo oracle, and optimizes the RIS position by
projected gradient ascent on the analytic coverage expression.
"""

from . import analytic, channel, cli, errors, montecarlo, phase, placement, specfun

__all__ = [
    "analytic",
    "channel",
    "cli",
    "errors",
    "montecarlo",
    "phase",
    "placement",
    "specfun",
]

__version__ = "0.1.0"
