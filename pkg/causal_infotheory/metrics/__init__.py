from .info import (
    entropy,
    joint_entropy,
    cond_entropy,
    mutual_information,
    cond_mutual_information,
    log2_fraction,
)
from .causal import (
    Method,
    CausalQuery,
    causal_entropy,
    causal_entropy_methods,
    causal_information_gain,
    conditional_causal_entropy,
    conditional_causal_entropy_methods,
    conditional_causal_information_gain,
    average_atomic_mutual_information,
    post_intervention_mutual_information,
    check_chain_rule_hc,
    check_chain_rule_ic,
    max_slack,
)

__all__ = [
    "entropy",
    "joint_entropy",
    "cond_entropy",
    "mutual_information",
    "cond_mutual_information",
    "log2_fraction",
    "Method",
    "CausalQuery",
    "causal_entropy",
    "causal_entropy_methods",
    "causal_information_gain",
    "conditional_causal_entropy",
    "conditional_causal_entropy_methods",
    "conditional_causal_information_gain",
    "average_atomic_mutual_information",
    "post_intervention_mutual_information",
    "check_chain_rule_hc",
    "check_chain_rule_ic",
    "max_slack",
]
