from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union
from ..dist import FiniteRange, Pmf, format_fraction
from ..errors import NotNormalized, ParseError, RangeMismatch
from ..scm import (
    DEFAULT_MAX_CELLS,
    NOISE,
    Assignment,
    Scm,
    Variable,
    validate,
)
from .expr import (
    BinOp,
    BoolOp,
    Compare,
    Expr,
    ExprBody,
    IfThenElse,
    IntLit,
    LabelLit,
    Name,
    Neg,
    Not,
    Table,
    VarRef,
    references,
)
from .lexer import EOF, IDENT, INT, SourceSpan, Token, normalize, tokenize


@dataclass
class Mass:
    label: str
    label_span: SourceSpan
    numerator: int
    denominator: int
    span: SourceSpan


@dataclass
class NoiseDecl:
    name: str
    name_span: SourceSpan
    masses: List[Mass]
    pmf_span: SourceSpan


@dataclass
class VarDecl:
    name: str
    name_span: SourceSpan
    labels: List[Tuple[str, SourceSpan]]
    expr: Expr


@dataclass
class ScmSyntax:
    name: str
    decls: List[Union[NoiseDecl, VarDecl]] = field(default_factory=list)


@dataclass
class TableSyntax:
    """Spans a `Table` node needs for semantic errors, kept off the AST."""

    input_spans: Tuple[SourceSpan, ...]
    row_spans: Tuple[SourceSpan, ...]
    label_spans: Tuple[Tuple[SourceSpan, ...], ...]


def _join(first: SourceSpan, last: SourceSpan) -> SourceSpan:
    return SourceSpan(first.begin, last.end, first.line, first.column)


class _Parser(object):
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.pos = 0
        self.tables: Dict[int, TableSyntax] = {}

    # ----- token plumbing
    def peek(self) -> Token:
        return self.tokens[self.pos]

    def at(self, *kinds: str) -> bool:
        return self.peek().kind in kinds

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        if token.kind != EOF:
            self.pos += 1
        return token

    def fail(self, expected: Sequence[str]):
        token = self.peek()
        raise ParseError(f"unexpected {token.describe()}", token.span, expected)

    def expect(self, *kinds: str) -> Token:
        if not self.at(*kinds):
            self.fail(kinds)
        return self.advance()

    # ----- declarations
    def scm(self) -> ScmSyntax:
        self.expect("scm")
        syntax = ScmSyntax(self.expect(IDENT).text)
        self.expect("{")
        while not self.at("}"):
            if self.at("noise"):
                syntax.decls.append(self.noise())
            elif self.at("var"):
                syntax.decls.append(self.var())
            else:
                self.fail(["noise", "var", "}"])
        self.expect("}")
        self.expect(EOF)
        return syntax

    def noise(self) -> NoiseDecl:
        self.expect("noise")
        name = self.expect(IDENT)
        self.expect("~")
        masses, span = self.pmf()
        return NoiseDecl(name.text, name.span, masses, span)

    def pmf(self) -> Tuple[List[Mass], SourceSpan]:
        start = self.expect("{")
        masses = [self.mass()]
        while self.at(","):
            self.advance()
            masses.append(self.mass())
        end = self.expect("}")
        return masses, _join(start.span, end.span)

    def mass(self) -> Mass:
        label, label_span = self.label()
        self.expect(":")
        num = self.expect(INT)
        den, end = 1, num
        if self.at("/"):
            self.advance()
            end = self.expect(INT)
            den = int(end.text)
        return Mass(label, label_span, int(num.text), den, _join(num.span, end.span))

    def label(self) -> Tuple[str, SourceSpan]:
        if self.at("-"):
            minus = self.advance()
            number = self.expect(INT)
            return "-" + number.text, _join(minus.span, number.span)
        token = self.expect(IDENT, INT, "-")
        return token.text, token.span

    def var(self) -> VarDecl:
        self.expect("var")
        name = self.expect(IDENT)
        self.expect(":")
        self.expect("{")
        labels = [self.label()]
        while self.at(","):
            self.advance()
            labels.append(self.label())
        self.expect("}")
        self.expect("=")
        return VarDecl(name.text, name.span, labels, self.expr())

    # ----- expressions, loosest binding first
    def expr(self) -> Expr:
        if self.at("if"):
            start = self.advance()
            cond = self.expr()
            self.expect("then")
            then = self.expr()
            self.expect("else")
            otherwise = self.expr()
            return IfThenElse(cond, then, otherwise, _join(start.span, otherwise.span))
        return self.disjunction()

    def disjunction(self) -> Expr:
        left = self.conjunction()
        while self.at("or"):
            self.advance()
            right = self.conjunction()
            left = BoolOp("or", left, right, _join(left.span, right.span))
        return left

    def conjunction(self) -> Expr:
        left = self.negation()
        while self.at("and"):
            self.advance()
            right = self.negation()
            left = BoolOp("and", left, right, _join(left.span, right.span))
        return left

    def negation(self) -> Expr:
        if self.at("not"):
            start = self.advance()
            operand = self.negation()
            return Not(operand, _join(start.span, operand.span))
        return self.comparison()

    def comparison(self) -> Expr:
        left = self.additive()
        if self.at("=", "!=", "<", "<="):
            op = self.advance().text
            right = self.additive()
            return Compare(op, left, right, _join(left.span, right.span))
        return left

    def additive(self) -> Expr:
        left = self.multiplicative()
        while self.at("+", "-"):
            op = self.advance().text
            right = self.multiplicative()
            left = BinOp(op, left, right, _join(left.span, right.span))
        return left

    def multiplicative(self) -> Expr:
        left = self.unary()
        while self.at("*"):
            self.advance()
            right = self.unary()
            left = BinOp("*", left, right, _join(left.span, right.span))
        return left

    def unary(self) -> Expr:
        if self.at("-"):
            start = self.advance()
            operand = self.unary()
            return Neg(operand, _join(start.span, operand.span))
        return self.primary()

    def primary(self) -> Expr:
        if self.at(INT):
            token = self.advance()
            return IntLit(int(token.text), token.span)
        if self.at(IDENT):
            token = self.advance()
            return Name(token.text, token.span)
        if self.at("("):
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        if self.at("table"):
            return self.table()
        self.fail([INT, IDENT, "(", "table", "-", "not", "if"])

    def table(self) -> Table:
        start = self.expect("table")
        self.expect("(")
        inputs = [self.expect(IDENT)]
        while self.at(","):
            self.advance()
            inputs.append(self.expect(IDENT))
        self.expect(")")
        self.expect("{")
        rows, row_spans, label_spans = [], [], []
        while True:
            open_ = self.expect("(")
            labels = [self.label()]
            while self.at(","):
                self.advance()
                labels.append(self.label())
            self.expect(")")
            self.expect("->")
            result, result_span = self.label()
            rows.append((tuple(label for label, _ in labels), result))
            row_spans.append(_join(open_.span, result_span))
            label_spans.append(tuple(span for _, span in labels) + (result_span,))
            if not self.at(","):
                break
            self.advance()
        end = self.expect("}")
        node = Table(tuple(t.text for t in inputs), tuple(rows), _join(start.span, end.span))
        self.tables[id(node)] = TableSyntax(
            tuple(t.span for t in inputs), tuple(row_spans), tuple(label_spans)
        )
        return node


class _Semantics(object):
    """Resolves names, derives parents and noise, and collects every
    semantic error before any is raised."""

    def __init__(self, syntax: ScmSyntax, tables: Dict[int, TableSyntax]):
        self.syntax = syntax
        self.tables = tables
        self.errors: List[ParseError] = []
        self.ranges: Dict[str, FiniteRange] = {}
        self.noise_decls: Dict[str, NoiseDecl] = {}
        self.var_decls: Dict[str, VarDecl] = {}

    def error(self, message: str, span: SourceSpan, expected: Sequence[str]) -> None:
        self.errors.append(ParseError(message, span, expected, "semantic"))

    def declare(self) -> None:
        for decl in self.syntax.decls:
            if decl.name in self.noise_decls or decl.name in self.var_decls:
                self.error(f"duplicate declaration of {decl.name}", decl.name_span, ["fresh identifier"])
                continue
            if isinstance(decl, NoiseDecl):
                self.noise_decls[decl.name] = decl
                labels = [(m.label, m.label_span) for m in decl.masses]
            else:
                self.var_decls[decl.name] = decl
                labels = decl.labels
            seen = set()
            for label, span in labels:
                if label in seen:
                    self.error(
                        f"duplicate label {label} in range of {decl.name}", span, ["distinct label"]
                    )
                seen.add(label)
            unique = list(dict.fromkeys(label for label, _ in labels))
            self.ranges[decl.name] = FiniteRange(tuple(unique))

    def noise_pmf(self, decl: NoiseDecl) -> Optional[Pmf]:
        masses = []
        for m in decl.masses:
            if m.denominator == 0:
                self.error("zero denominator in rational", m.span, ["positive denominator"])
                return None
            masses.append(Fraction(m.numerator, m.denominator))
        if len(masses) != len(self.ranges[decl.name]):
            return None
        total = sum(masses, Fraction(0))
        if total != 1:
            self.error(
                f"pmf of {decl.name} sums to {format_fraction(total)}, not 1",
                decl.pmf_span,
                ["masses summing to 1"],
            )
            return None
        return Pmf([(decl.name, self.ranges[decl.name])], masses, check=False)

    def resolve(self, expr: Expr) -> Expr:
        if isinstance(expr, Name):
            if expr.name in self.ranges:
                return VarRef(expr.name, expr.span)
            if any(expr.name in rng for rng in self.ranges.values()):
                return LabelLit(expr.name, expr.span)
            self.error(f"unknown variable {expr.name}", expr.span, ["declared variable"])
            return LabelLit(expr.name, expr.span)
        if isinstance(expr, Table):
            self.check_table(expr)
            return expr
        if isinstance(expr, (Neg, Not)):
            return replace(expr, operand=self.resolve(expr.operand))
        if isinstance(expr, (BinOp, Compare, BoolOp)):
            return replace(expr, left=self.resolve(expr.left), right=self.resolve(expr.right))
        if isinstance(expr, IfThenElse):
            return replace(
                expr,
                cond=self.resolve(expr.cond),
                then=self.resolve(expr.then),
                otherwise=self.resolve(expr.otherwise),
            )
        return expr

    def check_table(self, table: Table) -> None:
        spans = self.tables[id(table)]
        known = True
        for var, span in zip(table.inputs, spans.input_spans):
            if var not in self.ranges:
                self.error(f"unknown variable {var}", span, ["declared variable"])
                known = False
        if len(set(table.inputs)) != len(table.inputs):
            self.error("table header repeats a variable", table.span, ["distinct variables"])
            known = False
        seen = set()
        for (labels, _), row_span, label_spans in zip(table.rows, spans.row_spans, spans.label_spans):
            if len(labels) != len(table.inputs):
                self.error(
                    f"table row has {len(labels)} labels, header has {len(table.inputs)}",
                    row_span,
                    [f"{len(table.inputs)} labels"],
                )
                continue
            if labels in seen:
                self.error(f"duplicate table row ({', '.join(labels)})", row_span, ["distinct row"])
            seen.add(labels)
            if not known:
                continue
            for var, label, span in zip(table.inputs, labels, label_spans):
                if label not in self.ranges[var]:
                    self.error(
                        f"label {label} is not in range {self.ranges[var]} of {var}",
                        span,
                        [f"label of {var}"],
                    )

    def build(self, max_cells: int) -> Scm:
        self.declare()
        noise_dist = {}
        for name, decl in self.noise_decls.items():
            pmf = self.noise_pmf(decl)
            if pmf is not None:
                noise_dist[name] = pmf

        exprs: Dict[str, Expr] = {}
        noise_of: Dict[str, str] = {}
        synthesized: List[str] = []
        users: Dict[str, List[str]] = {n: [] for n in self.noise_decls}
        endogenous = list(self.var_decls)
        for name, decl in self.var_decls.items():
            expr = self.resolve(decl.expr)
            exprs[name] = expr
            refs = references(expr)
            noises = [r for r in refs if r in self.noise_decls]
            if len(noises) > 1:
                self.error(
                    f"assignment of {name} reads {len(noises)} noise variables "
                    f"({', '.join(noises)}), expected exactly one",
                    decl.expr.span,
                    ["one noise variable"],
                )
                for noise in noises:
                    users[noise].append(name)
                continue
            if noises:
                noise = noises[0]
            elif f"N_{name}" in self.noise_decls:
                noise = f"N_{name}"
            else:
                noise = f"N_{name}"
                k = 1
                while noise in self.ranges or noise in synthesized:
                    noise, k = f"N_{name}{k}", k + 1
                synthesized.append(noise)
            noise_of[name] = noise
            if noise in users:
                users[noise].append(name)
        for noise, readers in users.items():
            decl = self.noise_decls[noise]
            if len(readers) == 0:
                self.error(
                    f"noise {noise} is not read by any assignment",
                    decl.name_span,
                    [f"assignment reading {noise}"],
                )
            for reader in readers[1:]:
                self.error(
                    f"noise {noise} is read by both {readers[0]} and {reader}",
                    self.var_decls[reader].expr.span,
                    ["unshared noise variable"],
                )
        if self.errors:
            self.raise_errors()

        unit = FiniteRange(("0",))
        noise_vars = [Variable(n, self.ranges[n], NOISE) for n in self.noise_decls]
        for n in synthesized:
            noise_vars.append(Variable(n, unit, NOISE))
            noise_dist[n] = Pmf.point(n, unit, 0)
        assignments = []
        for name in endogenous:
            refs = references(exprs[name])
            parents = tuple(v for v in endogenous if v in refs)
            assignments.append(Assignment(name, parents, noise_of[name], ExprBody(exprs[name])))
        model = Scm(
            self.syntax.name,
            [Variable(name, self.ranges[name]) for name in endogenous],
            noise_vars,
            assignments,
            noise_dist,
            max_cells=max_cells,
        )
        report = validate(model)
        for violation in report.violations:
            decl = self.var_decls.get(violation.subject)
            if violation.kind == "cycle":
                self.error(violation.message, decl.name_span, ["acyclic parent structure"])
            elif decl is not None:
                self.error(
                    violation.message,
                    decl.expr.span,
                    [f"value in {self.ranges[violation.subject]}"],
                )
            else:
                decl = self.noise_decls[violation.subject]
                self.error(violation.message, decl.name_span, ["well-formed noise"])
        if self.errors:
            self.raise_errors()
        model._report = report
        return model

    def raise_errors(self) -> None:
        errors = sorted(self.errors, key=lambda e: (e.span.begin, e.message))
        first = errors[0]
        raise ParseError(first.message, first.span, first.expected, "semantic", errors)


def parse_scm(text: Union[str, bytes], max_cells: int = DEFAULT_MAX_CELLS) -> Scm:
    """Parse `.scm` text into a validated model.

    Raises:
        ParseError: Lexical, syntax or semantic error, with span and the set
            of expected tokens or constructs.
    """
    text = normalize(text)
    parser = _Parser(tokenize(text))
    syntax = parser.scm()
    return _Semantics(syntax, parser.tables).build(max_cells)


def parse_pmf_literal(
    text: str, rng: Optional[FiniteRange] = None, var: str = "X_aux"
) -> Pmf:
    """Parse `{label: rational, ...}`.

    With `rng` the pmf is laid out over that range; labels left out get
    mass 0 and labels outside it raise RangeMismatch. Without `rng` the
    listed labels form the range.
    """
    parser = _Parser(tokenize(normalize(text)))
    masses, _ = parser.pmf()
    parser.expect(EOF)
    given: Dict[str, Fraction] = {}
    for m in masses:
        if m.denominator == 0:
            raise ParseError("zero denominator in rational", m.span, ["positive denominator"], "semantic")
        if m.label in given:
            raise ParseError(f"duplicate label {m.label}", m.label_span, ["distinct label"], "semantic")
        given[m.label] = Fraction(m.numerator, m.denominator)
    if rng is None:
        rng = FiniteRange(tuple(given))
    outside = [label for label in given if label not in rng]
    if outside:
        raise RangeMismatch(f"labels {', '.join(outside)} are not in range {rng}")
    total = sum(given.values(), Fraction(0))
    if total != 1:
        raise NotNormalized(f"pmf {text.strip()} sums to {format_fraction(total)}, not 1")
    return Pmf([(var, rng)], [given.get(label, Fraction(0)) for label in rng.labels])
