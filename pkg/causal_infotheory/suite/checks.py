from multiprocessing import Pool
from typing import Callable, Dict, List, Optional
import numpy as np
from ..dist import conditionally_independent, format_pmf
from ..errors import InconsistentResult
from ..metrics import (
    CausalQuery,
    Method,
    average_atomic_mutual_information,
    causal_entropy,
    causal_information_gain,
    check_chain_rule_hc,
    check_chain_rule_ic,
    conditional_causal_entropy,
    entropy,
)
from ..report import FAIL, PASS, TOL, PropReport
from ..scm import (
    DEFAULT_MAX_CELLS,
    Atomic,
    Protocol,
    Scm,
    Stochastic,
    covariate_specific,
    entailed,
    entailed_oracle,
    has_total_causal_effect,
    post_dist,
)
from .generator import draw, shuffled


def query_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed])))


def _seeded(report: PropReport, seed: int) -> PropReport:
    report.witness = dict(report.witness, seed=seed)
    return report


def _guarded(
    prop: str, witness: Dict[str, object], compute: Callable[[], PropReport]
) -> PropReport:
    """Disagreeing formulations of one quantity become a failed record."""
    try:
        return compute()
    except InconsistentResult as err:
        nan = float("nan")
        return PropReport(prop, FAIL, nan, nan, float("inf"), witness, str(err))


def check_all(model: Scm, protocol: Protocol, seed: int = 0) -> List[PropReport]:
    """Run every proposition against one model and one protocol.

    `seed` selects the query: the target Y, an optional conditioning
    variable Z and an ordered target vector for the chain rules, all drawn
    from the endogenous variables other than the intervened one.

    Args:
        model (Scm): Valid model.
        protocol (Protocol): Protocol for the intervened variable.
        seed (int, optional): Query-selection seed. Defaults to 0.

    Returns:
        List[PropReport]: Universal checks (pass/fail) then informational
            records (existence of H_c > H(Y), negative I_c, DPI violations).
    """
    model.require_valid()
    protocol.check(model)
    x = protocol.target
    rng = query_rng(seed)
    everything = list(model.endogenous_ids)
    others = [v for v in everything if v != x]
    protocol_text = format_pmf(protocol.dist)
    reports: List[PropReport] = []

    oracle_witness = {"vars": everything, "seed": seed}
    reports.append(
        PropReport.exact(
            "Inference-Oracle",
            entailed(model, everything),
            entailed_oracle(model, everything),
            oracle_witness,
        )
    )
    if others:
        for value in protocol.support():
            witness = {
                "intervened": x,
                "value": model.range_of(x).label(value),
                "vars": others,
                "protocol": protocol_text,
                "seed": seed,
            }
            reports.append(
                PropReport.exact(
                    "Lemma-B1",
                    covariate_specific(model, protocol, value, others),
                    post_dist(model, Atomic(x, value), others),
                    witness,
                )
            )

    point = draw(rng, 0, len(model.range_of(x)) - 1)
    reports.append(
        PropReport.exact(
            "Atomic-Stochastic-Point",
            post_dist(model, Stochastic(Protocol.point(model, x, point)), everything),
            post_dist(model, Atomic(x, point), everything),
            {"intervened": x, "value": model.range_of(x).label(point), "seed": seed},
        )
    )
    marginal = post_dist(model, Stochastic(protocol), [x])
    reports.append(
        PropReport.exact(
            "Stochastic-Marginal",
            marginal.rename({x: protocol.dist.variables[0]}),
            protocol.dist,
            {"intervened": x, "protocol": protocol_text, "seed": seed},
        )
    )
    if not others:
        return reports

    order = shuffled(rng, others)
    y = order[0]
    z = order[1] if len(order) > 1 else None
    vec = order[: draw(rng, 1, min(3, len(order)))]

    q = CausalQuery(model, (y,), x, protocol)
    witness = dict(q.describe(), seed=seed)
    hc = causal_entropy(q, Method.DEFINITION)
    reports.append(
        PropReport.identity("Prop-3.2", hc, causal_entropy(q, Method.PLUG_IN), witness)
    )
    reports.append(
        PropReport.identity(
            "Prop-3.3", hc, causal_entropy(q, Method.COVARIATE_SPECIFIC), witness
        )
    )
    reports.append(PropReport.at_most("Prop-3.4", 0.0, hc, witness, tol=1e-12))
    stochastic_h = entropy(post_dist(model, Stochastic(protocol), [y]))
    reports.append(PropReport.at_most("Cor-3.6", hc, stochastic_h, witness))
    reports.append(_independence_bound(model, protocol, vec, seed))

    if z is not None:
        qz = CausalQuery(model, (y,), x, protocol, (z,))
        zwitness = dict(qz.describe(), seed=seed)
        hcond = conditional_causal_entropy(qz, Method.DEFINITION)
        reports.append(
            PropReport.identity(
                "Prop-CondHc",
                hcond,
                conditional_causal_entropy(qz, Method.CONDITIONAL_ENTROPY),
                zwitness,
            )
        )
        reports.append(PropReport.at_most("Prop-CondReduces", hcond, hc, zwitness))
        pair = check_chain_rule_hc(model, [y, z], x, protocol, prop="ChainRule-Hc-2")
        reports.append(_seeded(pair, seed))
        reports.append(
            _guarded(
                "Prop-4.5",
                zwitness,
                lambda: PropReport.identity(
                    "Prop-4.5", hc - hcond, average_atomic_mutual_information(qz), zwitness
                ),
            )
        )

    reports.append(_seeded(check_chain_rule_hc(model, vec, x, protocol), seed))
    reports.append(_seeded(check_chain_rule_ic(model, vec, x, protocol), seed))

    ic = causal_information_gain(q)
    if not has_total_causal_effect(model, x, y):
        reports.append(PropReport.identity("NoEffect-Ic", ic, 0.0, witness))

    hy = entropy(entailed(model, [y]))
    if hc > hy + TOL:
        reports.append(
            PropReport.info(
                "Prop-3.5", hy, hc, witness, f"causal entropy of {y} exceeds its entropy"
            )
        )
    if ic < -TOL:
        reports.append(
            PropReport.info(
                "Cor-4.1", ic, 0.0, witness, f"causal information gain on {y} is negative"
            )
        )
    reports.extend(dpi_violations(model, protocol, seed))
    return reports


def _independence_bound(
    model: Scm, protocol: Protocol, vec: List[str], seed: int
) -> PropReport:
    """H_c of the vector against the sum of the marginal H_c, with equality
    exactly when the components are independent given X after do(X=X')."""
    x = protocol.target
    q = CausalQuery(model, tuple(vec), x, protocol)
    witness = dict(q.describe(), seed=seed)
    lhs = causal_entropy(q)
    rhs = sum(causal_entropy(q.with_target([v])) for v in vec)
    joint = post_dist(model, Stochastic(protocol), list(vec) + [x])
    independent = conditionally_independent(joint, [[v] for v in vec], [x])
    equal = abs(lhs - rhs) <= TOL
    ok = lhs <= rhs + TOL and equal == independent
    return PropReport(
        "IndependenceBound",
        PASS if ok else FAIL,
        lhs,
        rhs,
        rhs - lhs,
        witness,
        f"independent={str(independent).lower()}",
    )


def dpi_violations(model: Scm, protocol: Protocol, seed: int = 0) -> List[PropReport]:
    """Informational records for edges X -> A -> B with I_c(B) > I_c(A)."""
    x = protocol.target
    graph = model.graph
    gains: Dict[str, float] = {}

    def gain(var: str) -> float:
        if var not in gains:
            gains[var] = causal_information_gain(CausalQuery(model, (var,), x, protocol))
        return gains[var]

    reports = []
    for a in model.in_declaration_order(graph.successors(x)):
        for b in model.in_declaration_order(graph.successors(a)):
            if b == x or gain(b) <= gain(a) + TOL:
                continue
            witness = {
                "target": [a],
                "downstream": [b],
                "intervened": x,
                "protocol": format_pmf(protocol.dist),
                "seed": seed,
            }
            reports.append(
                PropReport.info(
                    "DPI-Violation",
                    gain(a),
                    gain(b),
                    witness,
                    f"Ic({b}) exceeds Ic({a}) on the chain {x} -> {a} -> {b}",
                )
            )
    return reports


def _check_trial(args) -> List[PropReport]:
    from ..dsl import parse_pmf_literal, parse_scm

    scm_text, intervened, protocol_text, seed, max_cells = args
    model = parse_scm(scm_text, max_cells=max_cells)
    dist = parse_pmf_literal(
        protocol_text, model.range_of(intervened), f"{intervened}_aux"
    )
    return check_all(model, Protocol(intervened, dist), seed)


def check_trials(
    scm_text: str,
    intervened: str,
    protocol_text: str,
    seed: int = 0,
    trials: int = 1,
    jobs: int = 1,
    max_cells: Optional[int] = None,
) -> List[PropReport]:
    """`check_all` for query seeds seed..seed+trials-1, merged in seed order.

    With jobs > 1 the trials run in a process pool; every worker re-parses
    the model text, so the output does not depend on the schedule.
    """
    max_cells = DEFAULT_MAX_CELLS if max_cells is None else max_cells
    tasks = [
        (scm_text, intervened, protocol_text, seed + t, max_cells) for t in range(trials)
    ]
    if jobs > 1 and len(tasks) > 1:
        with Pool(processes=jobs) as pool:
            batches = pool.map(_check_trial, tasks)
    else:
        batches = [_check_trial(task) for task in tasks]
    return [report for batch in batches for report in batch]
