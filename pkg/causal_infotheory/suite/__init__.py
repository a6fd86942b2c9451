from .generator import GenConfig, gen_scm, gen_protocol, random_weights
from .checks import check_all, check_trials, dpi_violations
from .hunt import (
    KINDS,
    HuntResult,
    Sketch,
    TrialOutcome,
    best_query,
    hunt,
    shrink,
)
from .runlog import HuntLog, load_hunt_log

__all__ = [
    "GenConfig",
    "gen_scm",
    "gen_protocol",
    "random_weights",
    "check_all",
    "check_trials",
    "dpi_violations",
    "KINDS",
    "HuntResult",
    "Sketch",
    "TrialOutcome",
    "best_query",
    "hunt",
    "shrink",
    "HuntLog",
    "load_hunt_log",
]
