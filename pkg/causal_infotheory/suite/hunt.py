import copy
from dataclasses import dataclass, field
from fractions import Fraction
from multiprocessing import Pool
from typing import Dict, Iterator, List, Optional, Sequence, Tuple
import numpy as np
from ..dist import FiniteRange, Pmf, format_pmf
from ..errors import CausalInfoError
from ..metrics import CausalQuery, causal_information_gain
from ..report import DPI, NEGATIVE_GAIN, TOL, Witness
from ..scm import NOISE, Assignment, LookupTable, Protocol, Scm, Variable
from .generator import GenConfig, draw, gen_protocol, gen_scm

KINDS = (NEGATIVE_GAIN, DPI)

# (target, downstream, lhs, rhs)
Query = Tuple[Tuple[str, ...], Tuple[str, ...], float, float]


@dataclass
class TrialOutcome:
    trial: int
    found: bool
    margin: float
    witness: Optional[Witness] = None


@dataclass
class HuntResult:
    kind: str
    seed: int
    budget: int
    trials_run: int
    witnesses: List[Witness] = field(default_factory=list)
    outcomes: List[TrialOutcome] = field(default_factory=list)


def _gains(model: Scm, protocol: Protocol):
    cache: Dict[str, float] = {}

    def gain(var: str) -> float:
        if var not in cache:
            cache[var] = causal_information_gain(
                CausalQuery(model, (var,), protocol.target, protocol)
            )
        return cache[var]

    return gain


def best_query(kind: str, model: Scm, protocol: Protocol) -> Optional[Query]:
    """Query with the largest violation margin, first in declaration order
    on ties. None when the model offers no query of this kind."""
    x = protocol.target
    gain = _gains(model, protocol)
    best, best_margin = None, -np.inf
    if kind == NEGATIVE_GAIN:
        for y in model.endogenous_ids:
            if y != x and -gain(y) > best_margin:
                best, best_margin = ((y,), (), gain(y), 0.0), -gain(y)
        return best
    for a in model.in_declaration_order(model.graph.successors(x)):
        for b in model.in_declaration_order(model.graph.successors(a)):
            if b != x and gain(b) - gain(a) > best_margin:
                best, best_margin = ((a,), (b,), gain(a), gain(b)), gain(b) - gain(a)
    return best


def evaluate(
    kind: str, model: Scm, protocol: Protocol, target: Sequence[str], downstream: Sequence[str]
) -> Tuple[float, float]:
    """Both sides of the relation for a fixed query."""
    x = protocol.target
    lhs = causal_information_gain(CausalQuery(model, tuple(target), x, protocol))
    if kind == DPI:
        return lhs, causal_information_gain(CausalQuery(model, tuple(downstream), x, protocol))
    return lhs, 0.0


@dataclass
class Sketch:
    """Mutable tabular copy of a model that shrinking moves edit.

    Tables are integer arrays over (parent ranges..., noise range) holding
    target value-indices, as `Scm.mechanism` returns them.
    """

    name: str
    order: List[str]
    labels: Dict[str, List[str]]
    parents: Dict[str, List[str]]
    noise: Dict[str, str]
    noise_labels: Dict[str, List[str]]
    weights: Dict[str, List[Fraction]]
    tables: Dict[str, np.ndarray]
    intervened: str
    protocol: List[Fraction]

    @classmethod
    def of(cls, model: Scm, protocol: Protocol, name: str) -> "Sketch":
        sketch = cls(name, list(model.endogenous_ids), {}, {}, {}, {}, {}, {},
                     protocol.target, list(protocol.dist.masses()))
        for var in sketch.order:
            a = model.assignments[var]
            sketch.labels[var] = list(model.range_of(var).labels)
            sketch.parents[var] = list(a.parents)
            sketch.noise[var] = a.noise
            sketch.noise_labels[var] = list(model.range_of(a.noise).labels)
            sketch.weights[var] = list(model.noise_dist[a.noise].masses())
            sketch.tables[var] = np.array(model.mechanism(var))
        return sketch

    def to_model(self, max_cells: int) -> Tuple[Scm, Protocol]:
        endogenous, noise, assignments, noise_dist = [], [], [], {}
        for var in self.order:
            n = self.noise[var]
            noise_range = FiniteRange.from_labels(self.noise_labels[var])
            endogenous.append(Variable(var, FiniteRange.from_labels(self.labels[var])))
            noise.append(Variable(n, noise_range, NOISE))
            noise_dist[n] = Pmf.from_weights(n, noise_range, self.weights[var])
            table = self.tables[var]
            rows = {idx: int(table[idx]) for idx in np.ndindex(*table.shape)}
            inputs = self.parents[var] + [n]
            assignments.append(
                Assignment(var, tuple(self.parents[var]), n, LookupTable(inputs, rows))
            )
        model = Scm(self.name, endogenous, noise, assignments, noise_dist, max_cells=max_cells)
        x = self.intervened
        dist = Pmf.from_weights(f"{x}_aux", model.range_of(x), self.protocol)
        return model, Protocol(x, dist)

    def children(self, var: str) -> Iterator[str]:
        return (child for child in self.order if var in self.parents[child])


def _drop_variable(s: Sketch, var: str) -> Optional[Sketch]:
    s = copy.deepcopy(s)
    for child in list(s.children(var)):
        axis = s.parents[child].index(var)
        s.tables[child] = np.take(s.tables[child], 0, axis=axis)
        s.parents[child].remove(var)
    s.order.remove(var)
    for part in (s.labels, s.parents, s.noise, s.noise_labels, s.weights, s.tables):
        del part[var]
    return s


def _shrink_range(s: Sketch, var: str, i: int, floor: int = 1) -> Optional[Sketch]:
    """Drop label i of `var`; cells that produced it fall back to a neighbour."""
    size = len(s.labels[var])
    if size <= max(floor, 1):
        return None
    if var == s.intervened and not any(w for j, w in enumerate(s.protocol) if j != i):
        return None
    s = copy.deepcopy(s)
    s.labels[var].pop(i)
    table = np.where(s.tables[var] == i, 1 if i == 0 else i - 1, s.tables[var])
    s.tables[var] = np.where(table > i, table - 1, table)
    for child in list(s.children(var)):
        axis = s.parents[child].index(var)
        s.tables[child] = np.delete(s.tables[child], i, axis=axis)
    if var == s.intervened:
        s.protocol.pop(i)
    return s


def _shrink_noise(s: Sketch, var: str, i: int) -> Optional[Sketch]:
    """Drop noise label i together with its weight."""
    if not any(w for j, w in enumerate(s.weights[var]) if j != i):
        return None
    s = copy.deepcopy(s)
    s.noise_labels[var].pop(i)
    s.weights[var].pop(i)
    s.tables[var] = np.delete(s.tables[var], i, axis=-1)
    return s


def _zero_weight(weights: List[Fraction], i: int) -> Optional[List[Fraction]]:
    if weights[i] == 0 or not any(w for j, w in enumerate(weights) if j != i):
        return None
    weights = list(weights)
    weights[i] = Fraction(0)
    return weights


def _moves(s: Sketch, keep: Sequence[str], floor: int = 1) -> Iterator[Sketch]:
    for var in s.order:
        if var not in keep:
            yield _drop_variable(s, var)
    # zero-weight noise labels first
    for var in s.order:
        for i, w in enumerate(s.weights[var]):
            if w == 0:
                yield _shrink_noise(s, var, i)
    for var in s.order:
        for i in reversed(range(len(s.labels[var]))):
            yield _shrink_range(s, var, i, floor if var in keep else 1)
    for var in s.order:
        for i in reversed(range(len(s.noise_labels[var]))):
            yield _shrink_noise(s, var, i)
    for var in s.order:
        for i in range(len(s.weights[var])):
            weights = _zero_weight(s.weights[var], i)
            if weights is not None:
                moved = copy.deepcopy(s)
                moved.weights[var] = weights
                yield moved
    for i in range(len(s.protocol)):
        weights = _zero_weight(s.protocol, i)
        if weights is not None:
            moved = copy.deepcopy(s)
            moved.protocol = weights
            yield moved


def shrink(
    kind: str, sketch: Sketch, target: Sequence[str], downstream: Sequence[str], max_cells: int
) -> Tuple[Sketch, float, float]:
    """Greedy deletion: apply the first move that keeps the violation and
    start over, until no move does.

    Chain variables of a `dpi` witness keep at least two values, so the
    downstream variable never collapses to a constant.
    """
    keep = [sketch.intervened, *target, *downstream]
    floor = 2 if kind == DPI else 1
    model, protocol = sketch.to_model(max_cells)
    lhs, rhs = evaluate(kind, model, protocol, target, downstream)
    progress = True
    while progress:
        progress = False
        for candidate in _moves(sketch, keep, floor):
            if candidate is None:
                continue
            try:
                model, protocol = candidate.to_model(max_cells)
                c_lhs, c_rhs = evaluate(kind, model, protocol, target, downstream)
            except CausalInfoError:
                continue
            if c_rhs - c_lhs > TOL:
                sketch, lhs, rhs, progress = candidate, c_lhs, c_rhs, True
                break
    return sketch, lhs, rhs


def stem(kind: str, seed: int, trial: int) -> str:
    return f"{kind.replace('-', '_')}_s{seed}_t{trial}"


def _trial_model(kind: str, cfg: GenConfig, trial: int) -> Tuple[Scm, Protocol]:
    rng = cfg.rng(trial)
    if kind == DPI:
        model = gen_scm(cfg, rng, chain=True)
        return model, gen_protocol(model, "X", cfg, rng)
    model = gen_scm(cfg, rng)
    x = model.endogenous_ids[draw(rng, 0, len(model.endogenous_ids) - 1)]
    return model, gen_protocol(model, x, cfg, rng)


def _hunt_trial(args) -> TrialOutcome:
    from ..dsl import parse_pmf_literal, parse_scm, serialize_scm

    kind, cfg, trial, candidate = args
    if candidate is not None:
        scm_text, x, protocol_text = candidate
        model = parse_scm(scm_text, max_cells=cfg.max_joint_cells)
        dist = parse_pmf_literal(protocol_text, model.range_of(x), f"{x}_aux")
        protocol = Protocol(x, dist)
    else:
        model, protocol = _trial_model(kind, cfg, trial)
    query = best_query(kind, model, protocol)
    if query is None:
        return TrialOutcome(trial, False, float("nan"))
    target, downstream, lhs, rhs = query
    margin = rhs - lhs
    if margin <= TOL:
        return TrialOutcome(trial, False, margin)

    name = stem(kind, cfg.seed, trial)
    sketch, lhs, rhs = shrink(
        kind, Sketch.of(model, protocol, name), target, downstream, cfg.max_joint_cells
    )
    small, small_protocol = sketch.to_model(cfg.max_joint_cells)
    witness = Witness(
        kind=kind,
        scm_text=serialize_scm(small),
        protocol=format_pmf(small_protocol.dist),
        intervened=protocol.target,
        target=target,
        lhs=lhs,
        rhs=rhs,
        seed=cfg.seed,
        trial=trial,
        downstream=downstream,
    )
    return TrialOutcome(trial, True, margin, witness)


def hunt(
    kind: str,
    cfg: GenConfig,
    budget: int,
    candidates: Optional[Sequence[Tuple[Scm, Protocol]]] = None,
    limit: int = 1,
    jobs: int = 1,
) -> HuntResult:
    """Search for counterexamples: negative causal information gain, or a
    chain X -> Y -> Z where I_c(Z) exceeds I_c(Y).

    Trial t uses `candidates[t]` when given, a generated model from the
    stream (cfg.seed, t) otherwise. Trials run in batches (in a process pool
    when jobs > 1) and are merged in trial order, so the result does not
    depend on `jobs`.

    Args:
        kind (str): "negative-gain" or "dpi".
        cfg (GenConfig): Generator settings and seed.
        budget (int): Maximum number of trials.
        candidates (Sequence[Tuple[Scm, Protocol]], optional): Models tried first.
        limit (int, optional): Stop after this many witnesses. Defaults to 1.
        jobs (int, optional): Worker processes. Defaults to 1.

    Returns:
        HuntResult: Shrunk witnesses and per-trial outcomes.
    """
    from ..dsl import serialize_scm

    assert kind in KINDS, f"unknown hunt kind {kind}"
    assert budget >= 0, "budget must be non-negative"
    texts = [
        (serialize_scm(model), protocol.target, format_pmf(protocol.dist))
        for model, protocol in (candidates or [])
    ]
    result = HuntResult(kind, cfg.seed, budget, 0)
    batch = jobs * 8 if jobs > 1 else 1
    pool = Pool(processes=jobs) if jobs > 1 else None
    try:
        for start in range(0, budget, batch):
            tasks = [
                (kind, cfg, t, texts[t] if t < len(texts) else None)
                for t in range(start, min(start + batch, budget))
            ]
            outcomes = pool.map(_hunt_trial, tasks) if pool else [_hunt_trial(t) for t in tasks]
            for outcome in outcomes:
                result.outcomes.append(outcome)
                result.trials_run = outcome.trial + 1
                if outcome.found:
                    result.witnesses.append(outcome.witness)
                if len(result.witnesses) >= limit:
                    return result
    finally:
        if pool is not None:
            pool.close()
            pool.join()
    return result
