from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union
import networkx as nx
from ..dist import FiniteRange, Pmf, condition
from ..errors import BadQuery, CycleCreated, RangeMismatch, ZeroProbabilityEvent
from .inference import entailed
from .model import NOISE, Assignment, LookupTable, Scm, Variable


def fresh_id(model: Scm, base: str) -> str:
    taken = set(model.endogenous_ids) | set(model.noise_ids)
    candidate, k = base, 1
    while candidate in taken:
        candidate, k = f"{base}{k}", k + 1
    return candidate


@dataclass(frozen=True)
class Protocol:
    """Distribution of the auxiliary variable X' standing in for `target`.

    `dist` is a single-variable pmf whose range must equal the target's
    range, labels and order included.
    """

    target: str
    dist: Pmf

    def __post_init__(self):
        if len(self.dist.scope) != 1:
            raise BadQuery("a protocol is a pmf over a single auxiliary variable")

    @classmethod
    def over(cls, model: Scm, target: str, masses: Sequence) -> "Protocol":
        model.require_endogenous([target])
        return cls(target, Pmf([(f"{target}_aux", model.range_of(target))], masses))

    @classmethod
    def point(cls, model: Scm, target: str, index: int) -> "Protocol":
        model.require_endogenous([target])
        return cls(target, Pmf.point(f"{target}_aux", model.range_of(target), index))

    @property
    def range(self) -> FiniteRange:
        return self.dist.scope[0][1]

    def prob(self, index: int) -> Fraction:
        return self.dist.table[index]

    def support(self) -> List[int]:
        return [i for i in range(len(self.range)) if self.dist.table[i] != 0]

    def check(self, model: Scm) -> None:
        model.require_endogenous([self.target])
        if self.range != model.range_of(self.target):
            raise RangeMismatch(
                f"protocol range {self.range} differs from range "
                f"{model.range_of(self.target)} of {self.target}"
            )


@dataclass(frozen=True)
class Atomic:
    target: str
    value: int


@dataclass(frozen=True)
class Stochastic:
    protocol: Protocol

    @property
    def target(self) -> str:
        return self.protocol.target


@dataclass(frozen=True)
class General:
    """Arbitrary replacement assignment.

    When the assignment reads a new noise variable, its range and pmf are
    passed along; otherwise it must reuse the target's current noise.
    """

    assignment: Assignment
    noise_variable: Optional[Variable] = None
    noise_dist: Optional[Pmf] = None

    @property
    def target(self) -> str:
        return self.assignment.target


Intervention = Union[Atomic, Stochastic, General]


def _replacement(
    model: Scm, iv: Intervention
) -> Tuple[Assignment, Variable, Pmf]:
    target = iv.target
    rng = model.range_of(target)
    if isinstance(iv, Atomic):
        if not 0 <= iv.value < len(rng):
            raise RangeMismatch(f"value index {iv.value} outside range {rng} of {target}")
        noise_id = fresh_id(model, f"{target}_do")
        unit = FiniteRange(("0",))
        body = LookupTable((noise_id,), {(0,): iv.value})
        return (
            Assignment(target, (), noise_id, body),
            Variable(noise_id, unit, NOISE),
            Pmf.point(noise_id, unit, 0),
        )
    if isinstance(iv, Stochastic):
        iv.protocol.check(model)
        noise_id = fresh_id(model, f"{target}_aux")
        body = LookupTable((noise_id,), {(i,): i for i in range(len(rng))})
        return (
            Assignment(target, (), noise_id, body),
            Variable(noise_id, rng, NOISE),
            iv.protocol.dist.rename({iv.protocol.dist.variables[0]: noise_id}),
        )
    a = iv.assignment
    old_noise = model.assignments[target].noise
    if iv.noise_variable is None:
        if a.noise != old_noise:
            raise BadQuery(
                f"replacement for {target} reads noise {a.noise} without a distribution"
            )
        return a, model.variable(old_noise), model.noise_dist[old_noise]
    if iv.noise_dist is None or iv.noise_dist.scope != ((a.noise, iv.noise_variable.range),):
        raise RangeMismatch(f"noise pmf of the replacement for {target} is not over {a.noise}")
    return a, iv.noise_variable, iv.noise_dist


def apply(model: Scm, iv: Intervention) -> Scm:
    """Post-intervention model. The input model is left untouched.

    The target's assignment and its noise variable are swapped in place, so
    declaration order is preserved.
    """
    model.require_valid()
    model.require_endogenous([iv.target])
    assignment, noise_var, noise_pmf = _replacement(model, iv)
    target = iv.target
    model.require_endogenous(assignment.parents)
    graph = model.graph.copy()
    graph.remove_edges_from(list(graph.in_edges(target)))
    graph.add_edges_from((p, target) for p in assignment.parents)
    if not nx.is_directed_acyclic_graph(graph):
        cycle = nx.find_cycle(graph)
        path = " -> ".join([u for u, _ in cycle] + [cycle[0][0]])
        raise CycleCreated(f"intervention on {target} creates cycle {path}")

    old_noise = model.assignments[target].noise
    noise = [noise_var if v.id == old_noise else v for v in model.noise]
    noise_dist = {
        (noise_var.id if n == old_noise else n): (noise_pmf if n == old_noise else d)
        for n, d in model.noise_dist.items()
    }
    return model.replace(
        assignments={target: assignment}, noise=noise, noise_dist=noise_dist
    )


def post_dist(model: Scm, iv: Intervention, variables: Iterable[str]) -> Pmf:
    return entailed(apply(model, iv), variables)


def covariate_specific(
    model: Scm, protocol: Protocol, x: int, variables: Iterable[str]
) -> Pmf:
    """p_{vars | X=x} after do(X=X'), by conditioning the stochastic joint."""
    variables = list(variables)
    if protocol.target in variables:
        raise BadQuery(f"covariate-specific query may not ask for {protocol.target}")
    protocol.check(model)
    if protocol.prob(x) == 0:
        raise ZeroProbabilityEvent(
            f"protocol gives {protocol.target}={protocol.range.label(x)} zero mass"
        )
    joint = post_dist(model, Stochastic(protocol), variables + [protocol.target])
    return condition(joint, {protocol.target: x})


def intervention_table(
    model: Scm, protocol: Protocol, target: Iterable[str]
) -> List[Tuple[str, Pmf]]:
    """Post-intervention marginals of `target`: one column per atomic value,
    then the stochastic one."""
    target = list(target)
    x = protocol.target
    columns = []
    for i, label in enumerate(model.range_of(x).labels):
        columns.append((f"do({x}={label})", post_dist(model, Atomic(x, i), target)))
    columns.append((f"do({x}={x}')", post_dist(model, Stochastic(protocol), target)))
    return columns
