"""Command-line interface.

Exit codes: 0 success, 2 validation error, 3 incompatible elicitation,
4 I/O error.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import __version__
from .io import (
    ParseError,
    load_bundled_problem,
    parse_problem_text,
    write_report,
)
from .model import Problem, ValidationError
from .smaa import CoefficientCaps, IncompatibleElicitation, SamplingConfig, run_smaa
from .srf import local_weight_space, elementary_weights, iter_choices

EXIT_VALIDATION = 2
EXIT_INCOMPATIBLE = 3
EXIT_IO = 4


def _load(path: str) -> Problem:
    if path == "bundled:stock-exchange":
        return load_bundled_problem()
    try:
        text = Path(path).read_text("utf-8")
    except OSError as exc:
        click.echo(f"cannot read {path}: {exc}", err=True)
        sys.exit(EXIT_IO)
    try:
        return parse_problem_text(text)
    except ValidationError as exc:
        for error in exc.errors:
            click.echo(f"invalid: {error}", err=True)
        sys.exit(EXIT_VALIDATION)
    except ParseError as exc:
        click.echo(f"parse error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Rank alternatives on a hierarchy of interacting criteria, robustly."""


@main.command()
@click.argument("file")
def validate(file: str) -> None:
    """Validate a problem document."""
    problem = _load(file)
    leaves = len(problem.tree.elementary_ids)
    click.echo(
        f"ok: {len(problem.alternatives)} alternatives, {leaves} elementary criteria, "
        f"{len(problem.interactions)} interactions"
    )


@main.command()
@click.argument("file")
@click.option("--node", default=None, help="Restrict to one non-elementary node.")
def weights(file: str, node: str | None) -> None:
    """Print the deck-induced local weight spaces (and global leaf ranges)."""
    problem = _load(file)
    node_ids = [node] if node else list(problem.tree.non_elementary_ids)
    for node_id in node_ids:
        deck = problem.decks.get(node_id)
        if deck is None:
            click.echo(f"{node_id}: no deck", err=True)
            sys.exit(EXIT_VALIDATION)
        click.echo(f"node {node_id}:")
        for choice, vector in local_weight_space(deck):
            rendered = "  ".join(f"{c}={float(w):.4f}" for c, w in sorted(vector.items()))
            click.echo(f"  [{choice.describe()}]  {rendered}")
        if deck.z_range is not None:
            click.echo("  (z interval is continuous; endpoints shown)")
    if node is None:
        combos = _global_weight_ranges(problem)
        if combos:
            click.echo("global elementary weight ranges over all deck choices:")
            for leaf, (lo, hi) in combos.items():
                click.echo(f"  {leaf}: [{lo:.4f}, {hi:.4f}]")


def _global_weight_ranges(problem: Problem) -> dict[str, tuple[float, float]]:
    import itertools

    spaces = {}
    for node_id in problem.tree.non_elementary_ids:
        deck = problem.decks[node_id]
        if deck.z_range is not None:
            return {}
        spaces[node_id] = list(iter_choices(deck))
    ranges: dict[str, tuple[float, float]] = {}
    node_ids = list(spaces)
    for combo in itertools.product(*(spaces[nid] for nid in node_ids)):
        choices = dict(zip(node_ids, combo))
        for leaf, w in elementary_weights(problem.tree, problem.decks, choices).items():
            w = float(w)
            lo, hi = ranges.get(leaf, (w, w))
            ranges[leaf] = (min(lo, w), max(hi, w))
    return dict(sorted(ranges.items()))


@main.command()
@click.argument("file")
@click.option("--samples", default=10_000, show_default=True, help="Sample count.")
@click.option("--seed", default=0, show_default=True, help="Master seed.")
@click.option("--node", default=None, help="Restrict the report to one node.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json",
              show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the report here instead of stdout.")
@click.option("--figures/--no-figures", default=True, show_default=True,
              help="With --out, also render per-node preorder diagrams.")
@click.option("--workers", default=1, show_default=True, help="Parallel worker processes.")
def run(file: str, samples: int, seed: int, node: str | None, fmt: str,
        out: str | None, figures: bool, workers: int) -> None:
    """Run the robustness analysis and write the report."""
    problem = _load(file)
    if node is not None and node not in problem.tree.non_elementary_ids:
        click.echo(f"unknown node id: {node}", err=True)
        sys.exit(EXIT_VALIDATION)
    config = SamplingConfig(sample_count=samples, master_seed=seed, workers=workers)
    try:
        report = run_smaa(problem, config)
    except IncompatibleElicitation as exc:
        click.echo(f"incompatible elicitation: {exc}", err=True)
        sys.exit(EXIT_INCOMPATIBLE)
    text = write_report(report, problem, format=fmt, node=node)
    if out is None:
        click.echo(text, nl=False)
        return
    try:
        Path(out).write_text(text, "utf-8")
    except OSError as exc:
        click.echo(f"cannot write {out}: {exc}", err=True)
        sys.exit(EXIT_IO)
    click.echo(f"report written to {out}")
    if figures:
        from .figures import render_report_figures

        shown = report if node is None else _restrict(report, node)
        paths = render_report_figures(shown, problem, Path(out))
        for p in paths:
            click.echo(f"figure written to {p}")


def _restrict(report, node: str):
    from dataclasses import replace

    return replace(report, nodes={node: report.nodes[node]})


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host: str, port: int) -> None:
    """Start the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
