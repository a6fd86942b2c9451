from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Mapping, Optional, Tuple, Union
from ..dist import FiniteRange, label_value
from .lexer import SourceSpan


Value = Union[int, str, bool]


class Expr(object):
    """Base of the assignment-body AST."""


@dataclass(frozen=True)
class IntLit(Expr):
    value: int
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class Name(Expr):
    """Bare identifier before resolution into a variable or a label."""

    name: str
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class VarRef(Expr):
    name: str
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class LabelLit(Expr):
    label: str
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class Compare(Expr):
    op: str
    left: Expr
    right: Expr
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class BoolOp(Expr):
    op: str
    left: Expr
    right: Expr
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class Not(Expr):
    operand: Expr
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class IfThenElse(Expr):
    cond: Expr
    then: Expr
    otherwise: Expr
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class Table(Expr):
    """`table (inputs) { (labels) -> label, ... }`, keyed by input labels."""

    inputs: Tuple[str, ...]
    rows: Tuple[Tuple[Tuple[str, ...], str], ...]
    span: Optional[SourceSpan] = field(default=None, compare=False)

    @cached_property
    def lookup(self) -> Dict[Tuple[str, ...], str]:
        return dict(self.rows)


class EvalError(Exception):
    pass


def _int(value: Value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise EvalError(f"{value!r} is not an integer")
    return value


def _bool(value: Value) -> bool:
    if not isinstance(value, bool):
        raise EvalError(f"{value!r} is not a truth value")
    return value


def _equal(a: Value, b: Value) -> bool:
    if isinstance(a, bool) != isinstance(b, bool):
        return False
    if isinstance(a, str) != isinstance(b, str):
        return False
    return a == b


def evaluate(expr: Expr, env: Mapping[str, int], ranges: Mapping[str, FiniteRange]) -> Value:
    """Value of `expr` with every variable bound to a value-index in `env`."""
    if isinstance(expr, IntLit):
        return expr.value
    if isinstance(expr, LabelLit):
        return label_value(expr.label)
    if isinstance(expr, VarRef):
        return ranges[expr.name].value(env[expr.name])
    if isinstance(expr, Neg):
        return -_int(evaluate(expr.operand, env, ranges))
    if isinstance(expr, BinOp):
        a = _int(evaluate(expr.left, env, ranges))
        b = _int(evaluate(expr.right, env, ranges))
        if expr.op == "+":
            return a + b
        if expr.op == "-":
            return a - b
        return a * b
    if isinstance(expr, Compare):
        a = evaluate(expr.left, env, ranges)
        b = evaluate(expr.right, env, ranges)
        if expr.op == "=":
            return _equal(a, b)
        if expr.op == "!=":
            return not _equal(a, b)
        if expr.op == "<":
            return _int(a) < _int(b)
        return _int(a) <= _int(b)
    if isinstance(expr, BoolOp):
        left = _bool(evaluate(expr.left, env, ranges))
        if expr.op == "and" and not left:
            return False
        if expr.op == "or" and left:
            return True
        return _bool(evaluate(expr.right, env, ranges))
    if isinstance(expr, Not):
        return not _bool(evaluate(expr.operand, env, ranges))
    if isinstance(expr, IfThenElse):
        if _bool(evaluate(expr.cond, env, ranges)):
            return evaluate(expr.then, env, ranges)
        return evaluate(expr.otherwise, env, ranges)
    if isinstance(expr, Table):
        key = tuple(ranges[var].label(env[var]) for var in expr.inputs)
        if key not in expr.lookup:
            raise EvalError(f"no table row for {key}")
        return label_value(expr.lookup[key])
    raise EvalError(f"unresolved expression {expr!r}")


def eval_expr(
    expr: Expr,
    env: Mapping[str, int],
    ranges: Mapping[str, FiniteRange],
    target: FiniteRange,
) -> int:
    """Value-index of `expr` in `target`, -1 if ill-typed or out of range."""
    try:
        value = evaluate(expr, env, ranges)
    except EvalError:
        return -1
    if isinstance(value, bool):
        return -1
    return target.index_of_value(value)


def references(expr: Expr) -> Tuple[str, ...]:
    """Variables read by `expr`, in order of first appearance."""
    found: List[str] = []

    def visit(node: Expr) -> None:
        if isinstance(node, VarRef) and node.name not in found:
            found.append(node.name)
        elif isinstance(node, Table):
            found.extend(var for var in node.inputs if var not in found)
        for child in children(node):
            visit(child)

    visit(expr)
    return tuple(found)


def children(expr: Expr) -> Tuple[Expr, ...]:
    if isinstance(expr, (Neg, Not)):
        return (expr.operand,)
    if isinstance(expr, (BinOp, Compare, BoolOp)):
        return (expr.left, expr.right)
    if isinstance(expr, IfThenElse):
        return (expr.cond, expr.then, expr.otherwise)
    return ()


class ExprBody(object):
    """Assignment body backed by a DSL expression."""

    def __init__(self, expr: Expr):
        self.expr = expr
        self.references = references(expr)

    def evaluate(
        self,
        env: Mapping[str, int],
        ranges: Mapping[str, FiniteRange],
        target: FiniteRange,
    ) -> int:
        return eval_expr(self.expr, env, ranges, target)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExprBody):
            return NotImplemented
        return self.expr == other.expr

    def __repr__(self) -> str:
        return f"ExprBody({format_expr(self.expr)})"


# Binding strength, loosest first.
PRECEDENCE = {
    IfThenElse: 0,
    "or": 1,
    "and": 2,
    Not: 3,
    Compare: 4,
    "+": 5,
    "-": 5,
    "*": 6,
    Neg: 7,
}
ATOM = 8


def _precedence(expr: Expr) -> int:
    if isinstance(expr, (BinOp, BoolOp)):
        return PRECEDENCE[expr.op]
    return PRECEDENCE.get(type(expr), ATOM)


def format_expr(expr: Expr, ranges: Optional[Mapping[str, FiniteRange]] = None) -> str:
    """Canonical text of `expr` with the fewest parentheses that parse back
    to the same tree. `ranges` orders table rows by value-index."""

    def wrap(node: Expr, minimum: int) -> str:
        text = fmt(node)
        return f"({text})" if _precedence(node) < minimum else text

    def fmt(node: Expr) -> str:
        if isinstance(node, IntLit):
            return str(node.value)
        if isinstance(node, (VarRef, Name)):
            return node.name
        if isinstance(node, LabelLit):
            return node.label
        if isinstance(node, Neg):
            return "-" + wrap(node.operand, PRECEDENCE[Neg])
        if isinstance(node, Not):
            return "not " + wrap(node.operand, PRECEDENCE[Not])
        if isinstance(node, (BinOp, BoolOp)):
            level = PRECEDENCE[node.op]
            return f"{wrap(node.left, level)} {node.op} {wrap(node.right, level + 1)}"
        if isinstance(node, Compare):
            level = PRECEDENCE[Compare] + 1
            return f"{wrap(node.left, level)} {node.op} {wrap(node.right, level)}"
        if isinstance(node, IfThenElse):
            return (
                f"if {fmt(node.cond)} then {fmt(node.then)} else {fmt(node.otherwise)}"
            )
        if isinstance(node, Table):
            return _format_table(node, ranges)
        raise TypeError(f"cannot format {node!r}")

    return fmt(expr)


def _format_table(node: Table, ranges: Optional[Mapping[str, FiniteRange]]) -> str:
    def order(row):
        labels = row[0]
        if ranges is None or any(
            var not in ranges or label not in ranges[var]
            for var, label in zip(node.inputs, labels)
        ):
            return (1, labels)
        return (0, tuple(ranges[var].index(label) for var, label in zip(node.inputs, labels)))

    rows = ", ".join(
        f"({', '.join(labels)}) -> {result}" for labels, result in sorted(node.rows, key=order)
    )
    return f"table ({', '.join(node.inputs)}) {{ {rows} }}"
