from dataclasses import dataclass, replace
from enum import Enum
from itertools import combinations
from typing import Dict, Iterable, List, Sequence, Tuple
from ..dist import Pmf, expectation, format_pmf
from ..errors import BadQuery, InconsistentResult
from ..report import TOL, PropReport
from ..scm import Atomic, Protocol, Scm, Stochastic, entailed, post_dist
from .info import cond_entropy, entropy, log2_fraction, mutual_information


class Method(str, Enum):
    DEFINITION = "definition"
    PLUG_IN = "plug-in"
    COVARIATE_SPECIFIC = "covariate-specific"
    CONDITIONAL_ENTROPY = "conditional-entropy"


@dataclass(frozen=True)
class CausalQuery:
    """Arguments of H_c(Y | Z, do(X ~ X')).

    Args:
        model (Scm): Valid model.
        target (Sequence[str]): Y, one or more endogenous ids.
        intervened (str): X.
        protocol (Protocol): Distribution of X' over the range of X.
        given (Sequence[str], optional): Z, conditioned on after intervening.
    """

    model: Scm
    target: Tuple[str, ...]
    intervened: str
    protocol: Protocol
    given: Tuple[str, ...] = ()

    def __post_init__(self):
        target, given = tuple(self.target), tuple(self.given)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "given", given)
        if len(target) == 0:
            raise BadQuery("query needs a non-empty target")
        if len(set(target)) != len(target) or len(set(given)) != len(given):
            raise BadQuery("target and conditioning set must not repeat variables")
        self.model.require_endogenous(target + given + (self.intervened,))
        if self.intervened in target:
            raise BadQuery(f"target may not contain the intervened variable {self.intervened}")
        if self.intervened in given:
            raise BadQuery(
                f"conditioning set may not contain the intervened variable {self.intervened}"
            )
        overlap = set(target) & set(given)
        if overlap:
            raise BadQuery(f"target and conditioning set share {', '.join(sorted(overlap))}")
        if self.protocol.target != self.intervened:
            raise BadQuery(
                f"protocol is for {self.protocol.target}, query intervenes on {self.intervened}"
            )
        self.protocol.check(self.model)

    def without_given(self) -> "CausalQuery":
        return replace(self, given=())

    def with_target(self, target: Sequence[str], given: Sequence[str] = ()) -> "CausalQuery":
        return replace(self, target=tuple(target), given=tuple(given))

    def describe(self) -> Dict[str, object]:
        return {
            "target": list(self.target),
            "intervened": self.intervened,
            "protocol": format_pmf(self.protocol.dist),
            "given": list(self.given),
        }


def _atomic(q: CausalQuery, x: int, variables: Iterable[str]) -> Pmf:
    return post_dist(q.model, Atomic(q.intervened, x), variables)


def _stochastic(q: CausalQuery, variables: Iterable[str]) -> Pmf:
    return post_dist(q.model, Stochastic(q.protocol), variables)


def _over_protocol(q: CausalQuery, f) -> float:
    """E_{x ~ p_X'}[f(x)], zero-mass x skipped."""
    return expectation(q.protocol.dist, lambda idx: f(idx[0]))


def causal_entropy(q: CausalQuery, method: Method = Method.DEFINITION) -> float:
    """H_c(Y | do(X ~ X')) in bits.

    definition: E_x[H(Y | do(X=x))]. plug-in: -E[log p(y | do(X=x))] over
    the post-stochastic joint of X and Y. covariate-specific:
    H(Y | X, do(X=X')).
    """
    if q.given:
        raise BadQuery("causal entropy takes no conditioning set")
    method = Method(method)
    if method == Method.DEFINITION:
        return _over_protocol(q, lambda x: entropy(_atomic(q, x, q.target)))
    joint = _stochastic(q, q.target + (q.intervened,))
    if method == Method.COVARIATE_SPECIFIC:
        return cond_entropy(joint, [q.intervened])
    if method == Method.PLUG_IN:
        # p(Y | do(X=x)) per supported x, looked up cell by cell of the joint
        atomic = {x: _atomic(q, x, q.target) for x in q.protocol.support()}
        x_axis = joint.axis(q.intervened)
        y_axes = [joint.axis(v) for v in q.model.in_declaration_order(q.target)]

        def surprise(idx):
            return -log2_fraction(atomic[idx[x_axis]].table[tuple(idx[a] for a in y_axes)])

        return expectation(joint, surprise)
    raise BadQuery(f"method {method.value} does not compute causal entropy")


def causal_entropy_methods(q: CausalQuery) -> Dict[Method, float]:
    """All three formulations; raises InconsistentResult beyond 1e-9 bits."""
    values = {
        m: causal_entropy(q, m)
        for m in (Method.DEFINITION, Method.PLUG_IN, Method.COVARIATE_SPECIFIC)
    }
    if max_slack(values.values()) > TOL:
        raise InconsistentResult(
            "causal entropy formulations disagree: "
            + ", ".join(f"{m.value}={v!r}" for m, v in values.items())
        )
    return values


def max_slack(values: Iterable[float]) -> float:
    values = list(values)
    return max((abs(a - b) for a, b in combinations(values, 2)), default=0.0)


def causal_information_gain(q: CausalQuery) -> float:
    """I_c = H(Y) - H_c(Y | do(X ~ X')). Negative values are returned as is."""
    return entropy(entailed(q.model, q.target)) - causal_entropy(q.without_given())


def conditional_causal_entropy(q: CausalQuery, method: Method = Method.DEFINITION) -> float:
    """H_c(Y | Z, do(X ~ X')), intervening before conditioning.

    definition: E_x E_{z ~ p_Z^{do(X=x)}}[H(Y | Z=z, do(X=x))], zero-mass
    (x, z) skipped. conditional-entropy: H(Y | Z, X, do(X=X')).
    """
    if not q.given:
        return causal_entropy(q)
    method = Method(method)
    if method == Method.DEFINITION:
        return _over_protocol(
            q, lambda x: cond_entropy(_atomic(q, x, q.target + q.given), q.given)
        )
    if method == Method.CONDITIONAL_ENTROPY:
        # X joins Z on the conditioning side of the post-stochastic joint
        joint = _stochastic(q, q.target + q.given + (q.intervened,))
        return cond_entropy(joint, q.given + (q.intervened,))
    raise BadQuery(f"method {method.value} does not compute conditional causal entropy")


def conditional_causal_entropy_methods(q: CausalQuery) -> Dict[Method, float]:
    values = {
        m: conditional_causal_entropy(q, m)
        for m in (Method.DEFINITION, Method.CONDITIONAL_ENTROPY)
    }
    if max_slack(values.values()) > TOL:
        raise InconsistentResult(
            "conditional causal entropy formulations disagree: "
            + ", ".join(f"{m.value}={v!r}" for m, v in values.items())
        )
    return values


def conditional_causal_information_gain(q: CausalQuery) -> float:
    """H(Y | Z) on the observational joint minus H_c(Y | Z, do(X ~ X'))."""
    if not q.given:
        return causal_information_gain(q)
    observed = entailed(q.model, q.target + q.given)
    return cond_entropy(observed, q.given) - conditional_causal_entropy(q)


def average_atomic_mutual_information(q: CausalQuery) -> float:
    """E_{x ~ p_X'}[I(Y; Z | do(X=x))]."""
    if not q.given:
        raise BadQuery("post-intervention mutual information needs a conditioning set")
    return _over_protocol(
        q,
        lambda x: mutual_information(_atomic(q, x, q.target + q.given), q.target, q.given),
    )


def post_intervention_mutual_information(q: CausalQuery) -> float:
    """H_c(Y | do) - H_c(Y | Z, do), cross-checked against the protocol
    average of post-atomic mutual information."""
    if not q.given:
        raise BadQuery("post-intervention mutual information needs a conditioning set")
    value = causal_entropy(q.without_given()) - conditional_causal_entropy(q)
    average = average_atomic_mutual_information(q)
    if abs(value - average) > TOL:
        raise InconsistentResult(
            f"post-intervention mutual information {value!r} vs average {average!r}"
        )
    return value


def _chain_terms(
    model: Scm, targets: Sequence[str], intervened: str, protocol: Protocol
) -> List[CausalQuery]:
    targets = list(targets)
    if len(targets) == 0:
        raise BadQuery("chain rule needs at least one target")
    # term i: Y_i given Y_1..Y_{i-1}
    return [
        CausalQuery(model, (y,), intervened, protocol, tuple(targets[:i]))
        for i, y in enumerate(targets)
    ]


def check_chain_rule_hc(
    model: Scm,
    targets: Sequence[str],
    intervened: str,
    protocol: Protocol,
    prop: str = "ChainRule-Hc",
) -> PropReport:
    """H_c(Y_1..Y_n | do) against the sum of H_c(Y_i | Y_<i, do)."""
    terms = _chain_terms(model, targets, intervened, protocol)
    whole = CausalQuery(model, tuple(targets), intervened, protocol)
    lhs = causal_entropy(whole)
    rhs = sum(conditional_causal_entropy(t) for t in terms)
    return PropReport.identity(prop, lhs, rhs, whole.describe())


def check_chain_rule_ic(
    model: Scm,
    targets: Sequence[str],
    intervened: str,
    protocol: Protocol,
    prop: str = "ChainRule-Ic",
) -> PropReport:
    """I_c(Y_1..Y_n | do) against the sum of I_c(Y_i | Y_<i, do)."""
    terms = _chain_terms(model, targets, intervened, protocol)
    whole = CausalQuery(model, tuple(targets), intervened, protocol)
    lhs = causal_information_gain(whole)
    rhs = sum(conditional_causal_information_gain(t) for t in terms)
    return PropReport.identity(prop, lhs, rhs, whole.describe())
