import functools
import json
import sys
from typing import Dict, List, Optional, Tuple
import click
import pandas as pd
from rich.console import Console
from ._version import __version__
from .dist import Pmf, condition, format_pmf
from .dsl import model_hash, parse_pmf_literal, parse_scm, serialize_scm
from .errors import CausalInfoError, ParseError
from .metrics import (
    CausalQuery,
    Method,
    causal_entropy_methods,
    causal_information_gain,
    cond_entropy,
    cond_mutual_information,
    conditional_causal_entropy_methods,
    conditional_causal_information_gain,
    entropy,
    max_slack,
    mutual_information,
    post_intervention_mutual_information,
)
from .report import FAIL, format_bits
from .scm import (
    DEFAULT_MAX_CELLS,
    Atomic,
    Protocol,
    Scm,
    Stochastic,
    apply,
    entailed,
    intervention_table,
)
from .suite import GenConfig, HuntLog, check_trials, hunt
from .suite.hunt import KINDS, stem
from .utils import (
    print_columns,
    print_dist_table,
    print_hunt_summary,
    print_quantity,
    print_reports,
    print_storage,
    print_validation,
    print_welcome,
)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_IO = 2
EXIT_EMPTY = 3

QUANTITIES = ("H", "Hcond", "MI", "CMI", "Hc", "Ic", "HcCond", "IcCond", "MIc")
CAUSAL = ("Hc", "Ic", "HcCond", "IcCond", "MIc")


def _error(message: str) -> None:
    Console(stderr=True).print(f"[b red]error[/b red]: {message}", highlight=False)


def _guard(command):
    """Map exceptions to exit codes: 1 domain error, 2 I/O or bad config."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except ParseError as err:
            _error(err.render())
            sys.exit(EXIT_DOMAIN)
        except CausalInfoError as err:
            _error(str(err))
            sys.exit(EXIT_DOMAIN)
        except OSError as err:
            _error(str(err))
            sys.exit(EXIT_IO)
        except AssertionError as err:
            raise click.UsageError(str(err))

    return wrapper


def _format_option(default: str = "table"):
    return click.option(
        "--format",
        "fmt",
        type=click.Choice(["table", "json", "csv"]),
        default=default,
        show_default=True,
        help="Output encoding.",
    )


def _max_cells_option():
    return click.option(
        "--max-cells",
        type=int,
        default=None,
        help=f"Cap on the joint size of a model [default: {DEFAULT_MAX_CELLS}].",
    )


def _read_model(path: str, max_cells: Optional[int]) -> Scm:
    with open(path, "rb") as f:
        text = f.read()
    model = parse_scm(text, max_cells=max_cells or DEFAULT_MAX_CELLS)
    ctx = click.get_current_context(silent=True)
    if ctx is not None and (ctx.find_root().obj or {}).get("verbose"):
        print_welcome(model.name)
    return model


def _split(text: Optional[str]) -> List[str]:
    if not text:
        return []
    return [part.strip() for part in text.split(",") if part.strip()]


def _parse_given(model: Scm, text: Optional[str]) -> Dict[str, int]:
    """`Z=label,W=label` -> {var: value-index}."""
    event = {}
    for part in _split(text):
        if "=" not in part:
            raise click.BadParameter(f"expected VAR=label, got {part}", param_hint="--given")
        var, label = (s.strip() for s in part.split("=", 1))
        model.require_endogenous([var])
        event[var] = model.range_of(var).index(label)
    return event


def _protocol(model: Scm, var: str, literal: Optional[str]) -> Protocol:
    """Protocol for `var`; uniform over its range when no literal is given."""
    model.require_endogenous([var])
    rng = model.range_of(var)
    if literal is None:
        return Protocol(var, Pmf.uniform(f"{var}_aux", rng))
    return Protocol(var, parse_pmf_literal(literal, rng, f"{var}_aux"))


def _parse_do(model: Scm, text: str):
    """`X=label` (atomic) or `X~{label: mass, ...}` (stochastic)."""
    if "~" in text:
        var, literal = (s.strip() for s in text.split("~", 1))
        return Stochastic(_protocol(model, var, literal))
    if "=" not in text:
        raise click.BadParameter(f"expected X=label or X~{{...}}, got {text}", param_hint="--do")
    var, label = (s.strip() for s in text.split("=", 1))
    model.require_endogenous([var])
    return Atomic(var, model.range_of(var).index(label))


def _meta(model: Scm, seed: Optional[int] = None) -> Dict[str, object]:
    return {"model_hash": model_hash(model), "seed": seed, "version": __version__}


def _echo_json(record) -> None:
    click.echo(json.dumps(record, sort_keys=True))


def _echo_csv(frame: pd.DataFrame) -> None:
    click.echo(frame.to_csv(index=False, lineterminator="\n"), nl=False)


@click.group()
@click.version_option(__version__, prog_name="causal-info")
@click.option("--verbose", is_flag=True, help="Print a banner with the loaded model.")
@click.pass_context
def main(ctx, verbose):
    """Exact causal information theory on finite structural causal models."""
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose


@main.command()
@click.argument("path", type=click.Path())
@_format_option()
@_max_cells_option()
def validate(path, fmt, max_cells):
    """Parse and validate a model; problems go to stderr with line:column."""
    try:
        _read_model(path, max_cells)
        errors = []
    except ParseError as err:
        errors = err.errors
    except OSError as err:
        _error(str(err))
        sys.exit(EXIT_IO)
    if fmt == "table":
        print_validation(path, errors)
    else:
        records = [
            {
                "line": e.span.line,
                "column": e.span.column,
                "phase": e.phase,
                "message": e.message,
                "expected": list(e.expected),
            }
            for e in errors
        ]
        if fmt == "json":
            _echo_json({"path": path, "valid": not errors, "errors": records})
        else:
            columns = ["line", "column", "phase", "message", "expected"]
            rows = [dict(r, expected="|".join(r["expected"])) for r in records]
            _echo_csv(pd.DataFrame(rows, columns=columns))
        print_validation(path, errors)
    sys.exit(EXIT_DOMAIN if errors else EXIT_OK)


def _emit_pmf(title: str, p: Pmf, query: Dict[str, object], meta, fmt: str) -> None:
    records = p.to_records()
    if fmt == "json":
        _echo_json({"quantity": "dist", "query": query, "pmf": records, "meta": meta})
    elif fmt == "csv":
        _echo_csv(pd.DataFrame(records, columns=list(p.variables) + ["p"]))
    else:
        rows = [([r[v] for v in p.variables], r["p"]) for r in records]
        print_dist_table(title, p.variables, rows)


@main.command()
@click.argument("path", type=click.Path())
@click.option("--vars", "variables", required=True, help="Comma separated endogenous ids.")
@click.option("--do", "do", default=None, help='"X=label" or "X~{label: mass, ...}".')
@click.option("--given", default=None, help='"Z=label,..." conditioned on after --do.')
@_format_option()
@_max_cells_option()
@_guard
def dist(path, variables, do, given, fmt, max_cells):
    """Exact (post-intervention, conditioned) marginal distribution."""
    original = _read_model(path, max_cells)
    variables = _split(variables)
    model = original if do is None else apply(original, _parse_do(original, do))
    event = _parse_given(model, given)
    p = entailed(model, variables + [v for v in event if v not in variables])
    if event:
        p = condition(p, event)
    query = {"vars": variables, "do": do, "given": given}
    _emit_pmf(f"p({','.join(p.variables)})", p, query, _meta(original), fmt)


def _quantity(
    model: Scm,
    quantity: str,
    target: List[str],
    intervened: Optional[str],
    protocol: Optional[str],
    given: List[str],
    other: List[str],
) -> Tuple[float, Dict[str, float], Dict[str, object]]:
    query: Dict[str, object] = {"target": target, "given": given}
    if quantity in CAUSAL:
        if intervened is None:
            raise click.UsageError(f"--quantity {quantity} needs --intervene")
        q = CausalQuery(model, target, intervened, _protocol(model, intervened, protocol), given)
        query = q.describe()
        if quantity == "Hc":
            methods = causal_entropy_methods(q.without_given())
            return methods[Method.DEFINITION], {m.value: v for m, v in methods.items()}, query
        if quantity == "HcCond":
            methods = conditional_causal_entropy_methods(q)
            return methods[Method.DEFINITION], {m.value: v for m, v in methods.items()}, query
        if quantity == "Ic":
            return causal_information_gain(q.without_given()), {}, query
        if quantity == "IcCond":
            return conditional_causal_information_gain(q), {}, query
        return post_intervention_mutual_information(q), {}, query

    if quantity == "H":
        return entropy(entailed(model, target)), {}, query
    if quantity == "Hcond":
        return cond_entropy(entailed(model, target + given), given), {}, query
    query["with"] = other
    if quantity == "MI":
        p = entailed(model, other + target)
        return mutual_information(p, other, target), {}, query
    p = entailed(model, other + target + given)
    return cond_mutual_information(p, other, target, given), {}, query


@main.command()
@click.argument("path", type=click.Path())
@click.option("--quantity", type=click.Choice(QUANTITIES), required=True)
@click.option("--target", required=True, help="Y, comma separated.")
@click.option("--intervene", default=None, help="X, for causal quantities.")
@click.option("--protocol", default=None, help="Pmf literal of X' (uniform if omitted).")
@click.option("--given", default=None, help="Z, comma separated.")
@click.option("--with", "other", default=None, help="Second argument of MI/CMI.")
@_format_option()
@_max_cells_option()
@_guard
def quantity(path, quantity, target, intervene, protocol, given, other, fmt, max_cells):
    """One information-theoretic or causal quantity, in bits."""
    model = _read_model(path, max_cells)
    value, methods, query = _quantity(
        model, quantity, _split(target), intervene, protocol, _split(given), _split(other)
    )
    shown = {name: format_bits(v) for name, v in methods.items()}
    if methods:
        shown["max-slack"] = format_bits(max_slack(methods.values()))
    if fmt == "json":
        _echo_json(
            {
                "quantity": quantity,
                "value": format_bits(value),
                "query": query,
                "methods": shown,
                "meta": _meta(model),
            }
        )
    elif fmt == "csv":
        _echo_csv(pd.DataFrame([dict({"quantity": quantity, "value": format_bits(value)}, **shown)]))
    else:
        print_quantity(quantity, format_bits(value), query, shown)


@main.command()
@click.argument("path", type=click.Path())
@click.option("--intervene", default=None, help="X (defaults to the first declared variable).")
@click.option("--protocol", default=None, help="Pmf literal of X' (uniform if omitted).")
@click.option("--seed", type=int, default=None, help="Query-selection seed.")
@click.option("--trials", type=int, default=1, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--config", type=click.Path(), default=None, help="YAML/JSON generator config.")
@_format_option("json")
@_max_cells_option()
@_guard
def check(path, intervene, protocol, seed, trials, jobs, config, fmt, max_cells):
    """Run the proposition checklist; exit 1 if a universal check fails."""
    cfg = GenConfig.from_config(config, seed=seed, max_joint_cells=max_cells) if config else None
    seed = cfg.seed if cfg is not None else (seed or 0)
    max_cells = cfg.max_joint_cells if cfg is not None else max_cells
    model = _read_model(path, max_cells)
    intervene = intervene or model.endogenous_ids[0]
    chosen = _protocol(model, intervene, protocol)
    reports = check_trials(
        serialize_scm(model),
        intervene,
        format_pmf(chosen.dist),
        seed=seed,
        trials=trials,
        jobs=jobs,
        max_cells=model.max_cells,
    )
    records = [r.to_dict() for r in reports]
    if fmt == "json":
        for record in records:
            record["meta"] = _meta(model, record.get("witness", {}).get("seed", seed))
            _echo_json(record)
    elif fmt == "csv":
        for record in records:
            if "witness" in record:
                record["witness"] = json.dumps(record["witness"], sort_keys=True)
        columns = ["prop", "status", "lhs", "rhs", "slack", "witness"]
        _echo_csv(pd.DataFrame(records, columns=columns))
    else:
        print_reports(records)
    failed = [r for r in reports if r.status == FAIL]
    for report in failed:
        _error(f"{report.prop} failed: {report.to_json()}")
    sys.exit(EXIT_DOMAIN if failed else EXIT_OK)


@main.command(name="hunt")
@click.option("--kind", type=click.Choice(KINDS), required=True)
@click.option("--seed", type=int, default=None)
@click.option("--budget", type=int, default=10000, show_default=True)
@click.option("--out", type=click.Path(), default="witnesses", show_default=True)
@click.option("--limit", type=int, default=1, show_default=True, help="Stop after this many witnesses.")
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--config", type=click.Path(), default=None, help="YAML/JSON generator config.")
@_format_option()
@_max_cells_option()
@_guard
def hunt_command(kind, seed, budget, out, limit, jobs, config, fmt, max_cells):
    """Search random models for counterexamples and write shrunk witnesses."""
    if config:
        cfg = GenConfig.from_config(config, seed=seed, max_joint_cells=max_cells)
    else:
        cfg = GenConfig(seed=seed or 0, max_joint_cells=max_cells or DEFAULT_MAX_CELLS)
    result = hunt(kind, cfg, budget, limit=limit, jobs=jobs)
    witness_paths = []
    for witness in result.witnesses:
        witness_paths.extend(witness.save(out, stem(kind, cfg.seed, witness.trial)))
    log_path = HuntLog(out, kind).save(result, witness_paths)

    if fmt == "json":
        for witness in result.witnesses:
            record = witness.to_json(f"{stem(kind, cfg.seed, witness.trial)}.scm")
            # hash of the shrunk model, not of any generated one
            small = parse_scm(witness.scm_text, max_cells=cfg.max_joint_cells)
            record["meta"] = _meta(small, cfg.seed)
            _echo_json(record)
    elif fmt == "csv":
        records = [w.to_json(f"{stem(kind, cfg.seed, w.trial)}.scm") for w in result.witnesses]
        for record in records:
            record["target"] = ",".join(record["target"])
            record["downstream"] = ",".join(record["downstream"])
        columns = ["kind", "relation", "intervened", "target", "downstream", "protocol",
                   "lhs", "rhs", "seed", "trial", "scm"]
        _echo_csv(pd.DataFrame(records, columns=columns))
    else:
        print_hunt_summary(kind, budget, result.trials_run, len(result.witnesses))
        print_storage(witness_paths, log_path)
    sys.exit(EXIT_OK if result.witnesses else EXIT_EMPTY)


@main.command()
@click.argument("path", type=click.Path())
@click.option("--target", required=True, help="Y, comma separated.")
@click.option("--intervene", required=True, help="X.")
@click.option("--protocol", default=None, help="Pmf literal of X' (uniform if omitted).")
@_format_option()
@_max_cells_option()
@_guard
def tables(path, target, intervene, protocol, fmt, max_cells):
    """Post-intervention marginals of Y: one column per do(X=x), then do(X=X')."""
    model = _read_model(path, max_cells)
    chosen = _protocol(model, intervene, protocol)
    target = model.in_declaration_order(_split(target))
    columns = intervention_table(model, chosen, target)
    first = columns[0][1]
    labels = [first.labels_of(idx) for idx, _ in first.items()]
    masses = [(name, [r["p"] for r in p.to_records()]) for name, p in columns]
    if fmt == "json":
        _echo_json(
            {
                "quantity": "tables",
                "query": {"target": target, "intervened": intervene,
                          "protocol": format_pmf(chosen.dist)},
                "columns": [{"intervention": name, "pmf": p.to_records()} for name, p in columns],
                "meta": _meta(model),
            }
        )
    elif fmt == "csv":
        frame = pd.DataFrame([dict(zip(target, row)) for row in labels], columns=target)
        for name, column in masses:
            frame[name] = column
        _echo_csv(frame)
    else:
        print_columns(f"p({','.join(target)})", target, labels, masses)


if __name__ == "__main__":
    main()
