import datetime
from typing import Dict, List, Optional, Sequence, Tuple
from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from .._version import __version__


console_width = 80


def print_welcome(model_name: Optional[str] = None) -> None:
    """Display header with clock, tool version and the loaded model."""
    grid = Table.grid(expand=True)
    grid.add_column(justify="left")
    grid.add_column(justify="right")
    grid.add_row(
        "[b]causal-info[/b] :dna:",
        datetime.datetime.now().strftime("%d/%m/%y %H:%M:%S"),
    )
    grid.add_row(
        "Exact causal information theory on finite SCMs",
        f"v{__version__} :abacus:",
    )
    if model_name is not None:
        grid.add_row(f"Model: [i]{model_name}[/i]", "")
    panel = Panel(grid, style="white on blue", expand=True)
    Console(width=console_width, stderr=True).print(panel)


def print_validation(path: str, violations: Sequence, spans: bool = True) -> None:
    """Rich print of validation outcome to stderr.

    Args:
        path (str): Model file.
        violations (Sequence): ParseErrors (with spans) or model Violations.
        spans (bool, optional): Prefix every line with its line:column.
    """
    console = Console(width=console_width, stderr=True)
    if len(violations) == 0:
        console.log(f"{path}: model is valid :white_check_mark:")
        return
    table = Table(show_header=True, border_style="red", box=box.SIMPLE)
    table.add_column("Where", style="red", width=10, justify="left")
    table.add_column("Problem", justify="left")
    for violation in violations:
        where = str(violation.span) if spans and hasattr(violation, "span") else "-"
        message = getattr(violation, "message", str(violation))
        table.add_row(where, message)
    console.print(f"[b red]{path}[/b red]: {len(violations)} problem(s)")
    console.print(table)


def print_dist_table(
    title: str, variables: Sequence[str], rows: Sequence[Tuple[Sequence[str], str]]
) -> None:
    """One row per cell: variable labels, then the exact mass."""
    table = Table(title=title, show_header=True, box=box.SIMPLE, border_style="white")
    for var in variables:
        table.add_column(var, style="red", justify="center")
    table.add_column("p", style="blue", justify="right")
    for labels, mass in rows:
        table.add_row(*labels, mass)
    Console(width=console_width).print(table, justify="left")


def print_columns(
    title: str, variables: Sequence[str], labels: Sequence[Sequence[str]],
    columns: Sequence[Tuple[str, Sequence[str]]],
) -> None:
    """Post-intervention table: one column of exact masses per intervention."""
    table = Table(title=title, show_header=True, box=box.SIMPLE, border_style="white")
    table.add_column(",".join(variables), style="red", justify="center")
    for name, _ in columns:
        table.add_column(name, style="blue", justify="right")
    for i, row_labels in enumerate(labels):
        table.add_row("/".join(row_labels), *[masses[i] for _, masses in columns])
    Console(width=console_width).print(table, justify="left")


def print_quantity(
    quantity: str, value: str, query: Dict[str, object], methods: Dict[str, str]
) -> None:
    """Panel with the value in bits, the query echo and method cross-checks."""
    grid = Table.grid(expand=True)
    grid.add_column(justify="left")
    grid.add_column(justify="left")
    grid.add_row(f"[b]{quantity}[/b]", f"[b blue]{value}[/b blue] bits")
    for key, item in query.items():
        if item:
            grid.add_row(f"  {key}", str(item))
    for key, item in methods.items():
        grid.add_row(f"  {key}", item)
    Console(width=console_width).print(Panel(grid, expand=True))


def print_reports(reports: List[Dict[str, object]]) -> None:
    """Proposition table, failures highlighted."""
    table = Table(show_header=True, row_styles=["none"], border_style="white", box=box.SIMPLE)
    table.add_column(":scroll: Proposition", width=22, justify="left")
    table.add_column("Status", width=6, justify="center")
    table.add_column("lhs", width=16, justify="right")
    table.add_column("rhs", width=16, justify="right")
    table.add_column("slack", width=14, justify="right")
    colors = {"pass": "green", "fail": "red", "info": "yellow"}
    for record in reports:
        color = colors[record["status"]]
        table.add_row(
            str(record["prop"]),
            f"[{color}]{record['status']}[/{color}]",
            str(record["lhs"]),
            str(record["rhs"]),
            str(record["slack"]),
        )
    Console(width=console_width).print(table, justify="center")


def print_hunt_summary(kind: str, budget: int, trials_run: int, found: int) -> None:
    if found:
        Console().log(
            f"Hunt [b]{kind}[/b]: {found} witness(es) after {trials_run}/{budget} trials"
        )
    else:
        Console().log(f"Hunt [b]{kind}[/b]: nothing found in {budget} trials")


def print_storage(
    witness_paths: Sequence[str] = (), log_path: Optional[str] = None
) -> None:
    """Rich print of the files a hunt wrote."""
    table = Table(show_header=False, row_styles=["none"], border_style="white", box=box.SIMPLE)
    table.add_column("---", style="red", width=16, justify="left")
    table.add_column("---", style="red", width=64, justify="left")
    for path in witness_paths:
        table.add_row(":envelope_with_arrow: - Witness", path)
    if log_path is not None:
        table.add_row(":envelope_with_arrow: - Log", log_path)
    if len(witness_paths) > 0 or log_path is not None:
        Console(width=console_width).print(table, justify="left")
