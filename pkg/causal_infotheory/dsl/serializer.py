import hashlib
from ..dist import format_pmf
from ..scm import LookupTable, Scm
from .expr import ExprBody, Table, format_expr


def _body_text(model: Scm, target: str) -> str:
    body = model.assignments[target].body
    ranges = model.ranges
    if isinstance(body, ExprBody):
        return format_expr(body.expr, ranges)
    if isinstance(body, LookupTable):
        rows = []
        for key, value in body.rows.items():
            labels = tuple(ranges[var].label(i) for var, i in zip(body.inputs, key))
            rows.append((labels, ranges[target].label(value)))
        return format_expr(Table(body.inputs, tuple(rows)), ranges)
    raise TypeError(f"cannot serialize body {body!r} of {target}")


def serialize_scm(model: Scm) -> str:
    """Canonical text: noise declarations in noise order, then variables in
    declaration order, two-space indent, LF line ends."""
    lines = [f"scm {model.name} {{"]
    for v in model.noise:
        lines.append(f"  noise {v.id} ~ {format_pmf(model.noise_dist[v.id])}")
    for v in model.endogenous:
        lines.append(f"  var {v.id} : {v.range} = {_body_text(model, v.id)}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def model_hash(model: Scm) -> str:
    """sha256 of the canonical text, first 16 hex digits."""
    return hashlib.sha256(serialize_scm(model).encode("utf-8")).hexdigest()[:16]
