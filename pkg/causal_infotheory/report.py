import json
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple, Union


TOL = 1e-9

PASS = "pass"
FAIL = "fail"
INFO = "info"

Side = Union[float, str]


def format_bits(value: float) -> str:
    """Bits with 12 digits after the point; negative zero prints as zero."""
    text = f"{value + 0.0:.12f}"
    if text == "-0.000000000000":
        return "0.000000000000"
    return text


def _side(value: Side) -> str:
    return value if isinstance(value, str) else format_bits(value)


@dataclass
class PropReport:
    """Outcome of checking one proposition on one model and query.

    `lhs`/`rhs` are bit values or pmf digests; `slack` is rhs - lhs for
    inequalities and |lhs - rhs| for identities. Failed reports always
    carry the query as `witness`.
    """

    prop: str
    status: str
    lhs: Side
    rhs: Side
    slack: float
    witness: Optional[Dict[str, Any]] = None
    detail: str = ""

    def __post_init__(self):
        assert self.status in (PASS, FAIL, INFO), f"unknown status {self.status}"
        if self.status == FAIL:
            assert self.witness is not None, f"failed {self.prop} needs a witness"

    @property
    def passed(self) -> bool:
        return self.status != FAIL

    @classmethod
    def identity(cls, prop: str, lhs: float, rhs: float, witness, tol: float = TOL):
        slack = abs(lhs - rhs)
        status = PASS if slack <= tol else FAIL
        return cls(prop, status, lhs, rhs, slack, witness)

    @classmethod
    def at_most(cls, prop: str, lhs: float, rhs: float, witness, tol: float = TOL):
        """lhs <= rhs up to tol."""
        slack = rhs - lhs
        status = PASS if slack >= -tol else FAIL
        return cls(prop, status, lhs, rhs, slack, witness)

    @classmethod
    def exact(cls, prop: str, lhs, rhs, witness):
        """Exact equality of two pmfs, reported through their digests."""
        status = PASS if lhs == rhs else FAIL
        return cls(prop, status, lhs.digest(), rhs.digest(), 0.0, witness)

    @classmethod
    def info(cls, prop: str, lhs: float, rhs: float, witness, detail: str):
        return cls(prop, INFO, lhs, rhs, rhs - lhs, witness, detail)

    def to_dict(self) -> Dict[str, Any]:
        record = {
            "prop": self.prop,
            "status": self.status,
            "lhs": _side(self.lhs),
            "rhs": _side(self.rhs),
            "slack": format_bits(self.slack),
        }
        if self.witness is not None:
            record["witness"] = self.witness
        return record

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


NEGATIVE_GAIN = "negative-gain"
DPI = "dpi"


@dataclass
class Witness:
    """A counterexample: canonical model text plus the query that exposes it.

    For `negative-gain` the relation is `Ic(target) < 0` (lhs = Ic, rhs = 0).
    For `dpi` it is `Ic(target) < Ic(downstream)` on a chain
    intervened -> target -> downstream.
    """

    kind: str
    scm_text: str
    protocol: str
    intervened: str
    target: Tuple[str, ...]
    lhs: float
    rhs: float
    seed: int
    trial: int
    downstream: Tuple[str, ...] = ()
    paths: List[str] = field(default_factory=list)

    @property
    def relation(self) -> str:
        y = ",".join(self.target)
        if self.kind == DPI:
            return f"Ic({y}) < Ic({','.join(self.downstream)})"
        return f"Ic({y}) < 0"

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    def replay(self, max_cells: Optional[int] = None) -> Tuple[float, float]:
        """Recompute both sides from the stored text and query."""
        from .dsl import parse_scm, parse_pmf_literal
        from .metrics.causal import CausalQuery, causal_information_gain
        from .scm import Protocol

        kwargs = {} if max_cells is None else {"max_cells": max_cells}
        model = parse_scm(self.scm_text, **kwargs)
        dist = parse_pmf_literal(self.protocol, model.range_of(self.intervened))
        protocol = Protocol(self.intervened, dist)
        lhs = causal_information_gain(
            CausalQuery(model, self.target, self.intervened, protocol)
        )
        if self.kind == DPI:
            rhs = causal_information_gain(
                CausalQuery(model, self.downstream, self.intervened, protocol)
            )
        else:
            rhs = 0.0
        return lhs, rhs

    def holds(self, tol: float = TOL) -> bool:
        lhs, rhs = self.replay()
        return lhs < rhs - tol

    def to_json(self, scm_file: Optional[str] = None) -> Dict[str, Any]:
        record = {
            "kind": self.kind,
            "relation": self.relation,
            "protocol": self.protocol,
            "intervened": self.intervened,
            "target": list(self.target),
            "downstream": list(self.downstream),
            "lhs": format_bits(self.lhs),
            "rhs": format_bits(self.rhs),
            "seed": self.seed,
            "trial": self.trial,
        }
        if scm_file is not None:
            record["scm"] = scm_file
        return record

    def save(self, out_dir: str, stem: str) -> List[str]:
        """Write `<stem>.scm` and its `<stem>.json` sidecar into out_dir."""
        os.makedirs(out_dir, exist_ok=True)
        scm_path = os.path.join(out_dir, f"{stem}.scm")
        json_path = os.path.join(out_dir, f"{stem}.json")
        with open(scm_path, "w", encoding="utf-8", newline="\n") as f:
            f.write(self.scm_text)
        with open(json_path, "w", encoding="utf-8", newline="\n") as f:
            f.write(json.dumps(self.to_json(os.path.basename(scm_path)), sort_keys=True))
            f.write("\n")
        self.paths = [scm_path, json_path]
        return self.paths

    @classmethod
    def from_files(cls, json_path: str, scm_path: Optional[str] = None) -> "Witness":
        with open(json_path, encoding="utf-8") as f:
            record = json.load(f)
        if scm_path is None:
            scm_path = os.path.join(os.path.dirname(json_path), record["scm"])
        with open(scm_path, encoding="utf-8") as f:
            scm_text = f.read()
        return cls(
            kind=record["kind"],
            scm_text=scm_text,
            protocol=record["protocol"],
            intervened=record["intervened"],
            target=tuple(record["target"]),
            lhs=float(record["lhs"]),
            rhs=float(record["rhs"]),
            seed=int(record["seed"]),
            trial=int(record["trial"]),
            downstream=tuple(record.get("downstream", [])),
            paths=[scm_path, json_path],
        )
