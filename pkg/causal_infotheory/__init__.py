from ._version import __version__
from .errors import CausalInfoError, ParseError
from .dist import FiniteRange, Pmf
from .scm import Scm, Protocol, Atomic, Stochastic, General, entailed, post_dist
from .metrics import (
    CausalQuery,
    entropy,
    causal_entropy,
    causal_information_gain,
    conditional_causal_entropy,
    conditional_causal_information_gain,
    post_intervention_mutual_information,
)
from .report import PropReport, Witness
from .dsl import parse_scm, parse_pmf_literal, serialize_scm
from .suite import GenConfig, gen_scm, check_all, hunt, load_hunt_log
from .utils import load_config


__all__ = [
    "__version__",
    "CausalInfoError",
    "ParseError",
    "FiniteRange",
    "Pmf",
    "Scm",
    "Protocol",
    "Atomic",
    "Stochastic",
    "General",
    "entailed",
    "post_dist",
    "CausalQuery",
    "entropy",
    "causal_entropy",
    "causal_information_gain",
    "conditional_causal_entropy",
    "conditional_causal_information_gain",
    "post_intervention_mutual_information",
    "PropReport",
    "Witness",
    "parse_scm",
    "parse_pmf_literal",
    "serialize_scm",
    "GenConfig",
    "gen_scm",
    "check_all",
    "hunt",
    "load_hunt_log",
    "load_config",
]
