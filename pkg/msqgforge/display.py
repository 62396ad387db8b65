# display.py

from typing import Any, Dict, Iterable, List, Optional

from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from .verify import CATALOGUE, VerifyReport


def _fmt(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.4g}"
    return str(value)


def _mark(holds: bool) -> str:
    return "[bold green]✓[/]" if holds else "[bold red]✗[/]"


class Display:
    """Console rendering of run and verify reports."""

    def __init__(self, console: Optional[Console] = None, quiet: bool = False):
        self.console = console or Console()
        self.quiet = quiet

    def _print(self, *items) -> None:
        if not self.quiet:
            self.console.print(*items)

    def show_run_header(self, report: Dict[str, Any]) -> None:
        schedule = report.get("schedule", {}).get("inputs", {})
        stopping = report.get("stopping", {})
        lines = [
            f"Mode: {report.get('mode', '-')}",
            f"Regime: {report.get('regime', {}).get('regime', '-')}",
            f"a = {schedule.get('a')}, b = {schedule.get('b')}, Q = {schedule.get('Q')}",
            f"M0 = {_fmt(report.get('M0'))}",
            f"Stopping time: {_fmt(stopping.get('value'))} ({stopping.get('trigger', '-')})",
        ]
        constants = report.get("constants")
        if constants:
            lines.append(f"C1 = {_fmt(constants['C1'])}, C_S = {_fmt(constants['C_S'])}, C_0 = {_fmt(constants['C_0'])}")
        self._print(Panel("\n".join(lines), title="msqg-forge run", border_style="green", box=box.ROUNDED, expand=False))

    def show_stages(self, stages: List[Dict[str, Any]]) -> None:
        table = Table(title="Stages", box=box.SIMPLE_HEAVY)
        for col in ("q", "window", "slices", "stress ratio", "energy window", "quadrature", "hypotheses", "failures"):
            table.add_column(col, justify="right" if col != "hypotheses" else "center")
        for stage in stages:
            state = stage.get("state", {})
            rows = stage.get("inductive", {}).get("rows", [])
            energy = [r for r in rows if r["id"].startswith("energy")]
            window = "-"
            if len(energy) == 2:
                window = f"[{_fmt(energy[0]['bound'])}, {_fmt(energy[1]['measured'])}]"
            held = sum(1 for r in rows if r["holds"])
            checks = stage.get("checks", {})
            table.add_row(
                str(stage["q"]),
                f"[{state.get('k_start')}, {state.get('k_stop')})",
                _fmt(stage.get("slices")),
                _fmt(stage.get("stress", {}).get("ratio")),
                window,
                _fmt(checks.get("energy_quadrature")),
                f"{held}/{len(rows)}",
                str(len(stage.get("failures", []))),
            )
        self._print(table)

    def show_inductive(self, stage: Dict[str, Any]) -> None:
        table = Table(title=f"Inductive hypotheses, stage {stage['q']}", box=box.SIMPLE)
        for col in ("id", "measured", "bound", "ratio", "", "anchor"):
            table.add_column(col)
        for row in stage.get("inductive", {}).get("rows", []):
            table.add_row(row["id"], _fmt(row["measured"]), _fmt(row["bound"]), _fmt(row["ratio"]),
                          _mark(row["holds"]), row["anchor"])
        self._print(table)

    def show_survival(self, survival: Dict[str, Any]) -> None:
        table = Table(title=f"P(T_L ≥ {_fmt(survival['horizon'])})", box=box.SIMPLE)
        for col in ("L", "probability", "stderr", "paths"):
            table.add_column(col, justify="right")
        for row in survival["rows"]:
            table.add_row(_fmt(row["L"]), _fmt(row["probability"]), _fmt(row["stderr"]), str(row["paths"]))
        self._print(table)
        self._print(f"Monotone in L: {_fmt(survival['monotone'])}")

    def show_branch(self, branch: Dict[str, Any]) -> None:
        self._print(Panel(f"Energy traces separate at t = {_fmt(branch.get('separation_time'))}\n"
                          f"branch time {_fmt(branch.get('branch_time'))}, "
                          f"max gap {_fmt(branch.get('max_difference'))}",
                          title="Energy branch", border_style="blue", box=box.ROUNDED, expand=False))

    def show_verify(self, report: VerifyReport) -> None:
        table = Table(title=f"Invariants (N = {report.N})", box=box.SIMPLE_HEAVY)
        for col in ("key", "measured", "tolerance", "", "anchor"):
            table.add_column(col)
        for row in report.rows:
            table.add_row(row.key, _fmt(row.measured), _fmt(row.tolerance), _mark(row.holds), row.anchor)
        self._print(table)
        failed = report.failed()
        if failed:
            self._print(f"[bold red]✗ {len(failed)} invariant(s) failed: {', '.join(r.key for r in failed)}")
        else:
            self._print(f"[bold green]✓ All {len(report.rows)} invariants hold")

    def show_catalogue(self) -> None:
        table = Table(title="Invariant catalogue", box=box.SIMPLE)
        table.add_column("key")
        table.add_column("anchor")
        table.add_column("description")
        for key, (anchor, description) in CATALOGUE.items():
            table.add_row(key, anchor, description)
        self._print(table)

    def show_saved(self, paths: Iterable[str]) -> None:
        for path in paths:
            self._print(f"[blue]Saved {path}")

    def show_failures(self, messages: Iterable[str]) -> None:
        for msg in messages:
            self._print(f"[yellow]! {msg}")

    def error(self, message: str) -> None:
        self.console.print(f"[bold red]Error: {message}")
