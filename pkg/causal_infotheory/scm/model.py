from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Mapping, Optional, Sequence, Tuple
import networkx as nx
import numpy as np
from ..dist import FiniteRange, Pmf
from ..errors import InvalidModel, JointSizeExceeded, UnknownVariable


ENDOGENOUS = "endogenous"
NOISE = "noise"
DEFAULT_MAX_CELLS = 10 ** 6


@dataclass(frozen=True)
class Variable:
    id: str
    range: FiniteRange
    kind: str = ENDOGENOUS


class LookupTable(object):
    """Explicit structural assignment: input value-indices -> target index.

    Args:
        inputs (Sequence[str]): Ids of the variables the table is keyed by,
            parents first and the noise variable last.
        rows (Mapping[Tuple[int, ...], int]): Target value-index per input
            tuple. Missing rows make the assignment non-total.

    Raises:
        InvalidModel: A row key does not have one index per input.
    """

    def __init__(self, inputs: Sequence[str], rows: Mapping[Tuple[int, ...], int]):
        self.inputs = tuple(inputs)
        self.rows = {tuple(int(i) for i in key): int(v) for key, v in rows.items()}
        for key in self.rows:
            if len(key) != len(self.inputs):
                raise InvalidModel(
                    f"table row {key} has {len(key)} indices, inputs are ({', '.join(self.inputs)})"
                )

    @property
    def references(self) -> Tuple[str, ...]:
        return self.inputs

    def evaluate(
        self,
        env: Mapping[str, int],
        ranges: Mapping[str, FiniteRange],
        target: FiniteRange,
    ) -> int:
        return self.rows.get(tuple(env[var] for var in self.inputs), -1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LookupTable):
            return NotImplemented
        return self.inputs == other.inputs and self.rows == other.rows

    def __repr__(self) -> str:
        return f"LookupTable({', '.join(self.inputs)}; {len(self.rows)} rows)"


@dataclass(frozen=True)
class Assignment:
    """f_target(parents, noise). Parents are kept in declaration order."""

    target: str
    parents: Tuple[str, ...]
    noise: str
    body: object

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(self.parents))


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    subject: str
    witness: Optional[Tuple] = None

    def __str__(self) -> str:
        return f"[{self.kind}] {self.message}"


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return len(self.violations) == 0

    def add(self, kind: str, message: str, subject: str, witness=None) -> None:
        self.violations.append(Violation(kind, message, subject, witness))

    def of_kind(self, kind: str) -> List[Violation]:
        return [v for v in self.violations if v.kind == kind]

    def __str__(self) -> str:
        if self.ok:
            return "model is valid"
        return "\n".join(str(v) for v in self.violations)


class Scm(object):
    """Finite discrete structural causal model.

    Args:
        name (str): Model name used by the text format.
        endogenous (Sequence[Variable]): Endogenous variables in declaration order.
        noise (Sequence[Variable]): Noise variables in declaration order.
        assignments (Sequence[Assignment]): One per endogenous variable.
        noise_dist (Mapping[str, Pmf]): One single-variable pmf per noise variable.
        max_cells (int, optional): Cap on the product of all range sizes.
            Defaults to 10**6.
    """

    def __init__(
        self,
        name: str,
        endogenous: Sequence[Variable],
        noise: Sequence[Variable],
        assignments: Sequence[Assignment],
        noise_dist: Mapping[str, Pmf],
        max_cells: int = DEFAULT_MAX_CELLS,
    ):
        self.name = name
        self.endogenous = tuple(endogenous)
        self.noise = tuple(noise)
        self.assignments = {a.target: a for a in assignments}
        self.noise_dist = dict(noise_dist)
        self.max_cells = max_cells
        self._mechanisms: Dict[str, np.ndarray] = {}
        self._report: Optional[ValidationReport] = None

    # ----- lookups
    @property
    def endogenous_ids(self) -> Tuple[str, ...]:
        return tuple(v.id for v in self.endogenous)

    @property
    def noise_ids(self) -> Tuple[str, ...]:
        return tuple(v.id for v in self.noise)

    @cached_property
    def _by_id(self) -> Dict[str, Variable]:
        return {v.id: v for v in self.noise + self.endogenous}

    def variable(self, var: str) -> Variable:
        try:
            return self._by_id[var]
        except KeyError:
            raise UnknownVariable(f"{var} is not a variable of model {self.name}")

    def range_of(self, var: str) -> FiniteRange:
        return self.variable(var).range

    @property
    def ranges(self) -> Dict[str, FiniteRange]:
        return {var: v.range for var, v in self._by_id.items()}

    def is_endogenous(self, var: str) -> bool:
        return var in self._by_id and self._by_id[var].kind == ENDOGENOUS

    def require_endogenous(self, variables: Sequence[str]) -> None:
        unknown = [v for v in variables if not self.is_endogenous(v)]
        if unknown:
            raise UnknownVariable(
                f"{', '.join(unknown)} not endogenous in model {self.name}"
            )

    def declaration_index(self, var: str) -> int:
        return self.endogenous_ids.index(var)

    def in_declaration_order(self, variables) -> List[str]:
        variables = set(variables)
        return [v for v in self.endogenous_ids if v in variables]

    def num_cells(self) -> int:
        cells = 1
        for v in self.endogenous + self.noise:
            cells *= len(v.range)
        return cells

    def check_size(self) -> None:
        cells = self.num_cells()
        if cells > self.max_cells:
            raise JointSizeExceeded(
                f"model {self.name} spans {cells} joint cells, cap is {self.max_cells}"
            )

    # ----- structure
    @cached_property
    def graph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(self.endogenous_ids)
        for target, a in self.assignments.items():
            for parent in a.parents:
                graph.add_edge(parent, target)
        return graph

    @cached_property
    def topological_order(self) -> Tuple[str, ...]:
        """Lexicographically least topological order by declaration index."""
        index = {var: i for i, var in enumerate(self.endogenous_ids)}
        try:
            return tuple(
                nx.lexicographical_topological_sort(self.graph, key=lambda v: index[v])
            )
        except nx.NetworkXUnfeasible:
            raise InvalidModel(f"model {self.name} has a cycle")

    def mechanism(self, target: str) -> np.ndarray:
        """Compiled assignment of `target`.

        Integer array over (parent ranges..., noise range) holding the target
        value-index, -1 where the body is undefined or leaves the range.
        """
        if target not in self._mechanisms:
            a = self.assignments[target]
            ranges = self.ranges
            target_range = ranges[target]
            inputs = a.parents + (a.noise,)
            shape = tuple(len(ranges[var]) for var in inputs)
            table = np.full(shape, -1, dtype=np.int64)
            for idx in np.ndindex(*shape):
                value = a.body.evaluate(dict(zip(inputs, idx)), ranges, target_range)
                if 0 <= value < len(target_range):
                    table[idx] = value
            table.flags.writeable = False
            self._mechanisms[target] = table
        return self._mechanisms[target]

    # ----- derivation
    def replace(
        self,
        assignments: Optional[Mapping[str, Assignment]] = None,
        noise: Optional[Sequence[Variable]] = None,
        noise_dist: Optional[Mapping[str, Pmf]] = None,
        name: Optional[str] = None,
    ) -> "Scm":
        """New model with some parts swapped. Unchanged mechanisms are shared."""
        merged = dict(self.assignments)
        merged.update(assignments or {})
        model = Scm(
            name if name is not None else self.name,
            self.endogenous,
            noise if noise is not None else self.noise,
            [merged[var] for var in self.endogenous_ids if var in merged],
            noise_dist if noise_dist is not None else self.noise_dist,
            max_cells=self.max_cells,
        )
        for target, table in self._mechanisms.items():
            if model.assignments.get(target) is self.assignments.get(target):
                model._mechanisms[target] = table
        return model

    def with_max_cells(self, max_cells: int) -> "Scm":
        model = self.replace()
        model.max_cells = max_cells
        return model

    # ----- validity
    def report(self) -> ValidationReport:
        if self._report is None:
            self._report = validate(self)
        return self._report

    def require_valid(self) -> None:
        report = self.report()
        if not report.ok:
            raise InvalidModel(
                f"model {self.name} is invalid: {report.violations[0].message}",
                report=report,
            )

    def __repr__(self) -> str:
        return (
            f"Scm({self.name}; endogenous={list(self.endogenous_ids)}, "
            f"noise={list(self.noise_ids)})"
        )


def _format_cycle(edges) -> str:
    nodes = [u for u, _ in edges] + [edges[0][0]]
    return " -> ".join(nodes)


def validate(model: Scm) -> ValidationReport:
    """Collect every violation of the SCM invariants. Empty report iff valid."""
    report = ValidationReport()
    seen = set()
    for v in model.noise + model.endogenous:
        if v.id in seen:
            report.add("duplicate", f"variable {v.id} is declared twice", v.id)
        seen.add(v.id)
        if v.kind not in (ENDOGENOUS, NOISE):
            report.add("structure", f"variable {v.id} has unknown kind {v.kind}", v.id)

    noise_ids = set(model.noise_ids)
    endo_ids = set(model.endogenous_ids)
    noise_users: Dict[str, List[str]] = {n: [] for n in model.noise_ids}
    structural_ok = True
    for var in model.endogenous_ids:
        a = model.assignments.get(var)
        if a is None:
            report.add("structure", f"variable {var} has no assignment", var)
            structural_ok = False
            continue
        bad_parents = [p for p in a.parents if p not in endo_ids]
        if bad_parents:
            report.add(
                "structure",
                f"assignment of {var} has unknown parents {', '.join(bad_parents)}",
                var,
            )
            structural_ok = False
        if a.noise not in noise_ids:
            report.add("structure", f"assignment of {var} uses unknown noise {a.noise}", var)
            structural_ok = False
        else:
            noise_users[a.noise].append(var)
        allowed = set(a.parents) | {a.noise}
        stray = [r for r in getattr(a.body, "references", ()) if r not in allowed]
        if stray:
            report.add(
                "structure",
                f"assignment of {var} reads {', '.join(stray)} outside its inputs",
                var,
            )
            structural_ok = False
    for target in model.assignments:
        if target not in endo_ids:
            report.add("structure", f"assignment for undeclared variable {target}", target)
    for n, users in noise_users.items():
        if len(users) != 1:
            report.add(
                "structure",
                f"noise {n} must feed exactly one assignment, feeds {len(users)}",
                n,
            )

    for n in model.noise_ids:
        dist = model.noise_dist.get(n)
        if dist is None:
            report.add("normalization", f"noise {n} has no distribution", n)
            continue
        if dist.scope != ((n, model.range_of(n)),):
            report.add("range", f"distribution of noise {n} is not over its range", n)
        elif not dist.is_normalized():
            report.add("normalization", f"distribution of noise {n} is not normalized", n)

    if not structural_ok:
        return report
    try:
        cycle = nx.find_cycle(model.graph)
    except nx.NetworkXNoCycle:
        cycle = None
    if cycle is not None:
        path = _format_cycle(cycle)
        report.add("cycle", f"cycle {path}", cycle[0][0], tuple(u for u, _ in cycle))

    for var in model.endogenous_ids:
        a = model.assignments[var]
        table = model.mechanism(var)
        holes = np.argwhere(table < 0)
        if len(holes) > 0:
            witness = tuple(int(i) for i in holes[0])
            labels = ", ".join(
                f"{inp}={model.range_of(inp).label(i)}"
                for inp, i in zip(a.parents + (a.noise,), witness)
            )
            report.add(
                "non-total",
                f"assignment of {var} is undefined or out of range at {labels}",
                var,
                witness,
            )
    return report


def structurally_equal(a: Scm, b: Scm) -> bool:
    """Same variables, ranges, parents, noise pmfs and compiled mechanisms."""
    if a.name != b.name:
        return False
    if a.endogenous != b.endogenous or a.noise != b.noise:
        return False
    for var in a.endogenous_ids:
        fa, fb = a.assignments[var], b.assignments[var]
        if fa.parents != fb.parents or fa.noise != fb.noise:
            return False
        if not np.array_equal(a.mechanism(var), b.mechanism(var)):
            return False
    return all(a.noise_dist[n] == b.noise_dist[n] for n in a.noise_ids)
