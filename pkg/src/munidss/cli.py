"""Command-line interface (`munidss`)."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from munidss import assessment, planning
from munidss.errors import EngineError, ValidationError
from munidss.influence import build_matrix, matrix_to_csv, total_influence_closed, total_influence_series
from munidss.service import coverage_payload, create_app, rating_payload
from munidss.storage import load_portfolio, load_project


def _load(project_file: str):
    try:
        return load_project(Path(project_file))
    except EngineError as exc:
        raise click.ClickException(str(exc)) from exc


@click.group()
def main():
    """Decision support for municipal development indicators."""


@main.command()
@click.argument("project_file", type=click.Path(exists=True, dir_okay=False))
def validate(project_file):
    """Check a project file; exit 0 if valid, 1 with a report on stderr otherwise."""
    try:
        project = load_project(Path(project_file))
    except ValidationError as exc:
        click.echo(exc.detail(), err=True)
        sys.exit(1)
    except EngineError as exc:
        click.echo(str(exc), err=True)
        sys.exit(1)
    click.echo(f"{project.id}: valid ({len(project.indicators)} indicators, "
               f"{len(project.targets)} targets, revision {project.revision})")


@main.command()
@click.argument("project_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--method", type=click.Choice(["series", "closed"]), default="series")
@click.option("--k", type=int, default=None, help="Series cutoff (default: node count).")
@click.option("--out", "out_format", type=click.Choice(["csv", "json"]), default="csv")
@click.option("--matrix", "which", type=click.Choice(["total", "direct"]), default="total",
              help="Emit the propagated total matrix or the direct aggregated one.")
def influence(project_file, method, k, out_format, which):
    """Compute the influence matrix and print it as CSV or JSON."""
    project = _load(project_file)
    try:
        direct = build_matrix(project)
        if which == "direct":
            node_order, entries, meta = direct.node_order, direct.entries, {"matrix": "direct"}
        else:
            if method == "series":
                total = total_influence_series(direct, k)
            else:
                total = total_influence_closed(direct)
            node_order, entries = total.node_order, total.entries
            meta = {
                "matrix": "total",
                "method": total.method,
                "k": total.k,
                "rho_estimate": total.rho_estimate,
            }
    except EngineError as exc:
        raise click.ClickException(str(exc)) from exc
    if out_format == "csv":
        click.echo(matrix_to_csv(node_order, entries), nl=False)
    else:
        click.echo(json.dumps({
            "node_order": list(node_order),
            **meta,
            "entries": [[float(v) for v in row] for row in entries],
        }, indent=2))


@main.command()
@click.argument("project_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--target", required=True, help="Targeted indicator id to rate against.")
@click.option("--out", "out_format", type=click.Choice(["table", "json"]), default="table")
def rate(project_file, target, out_format):
    """Rank indicators by total impact on one targeted indicator."""
    project = _load(project_file)
    try:
        total = total_influence_series(build_matrix(project))
        result = assessment.rating(project, total, target)
    except EngineError as exc:
        raise click.ClickException(str(exc)) from exc
    if out_format == "json":
        click.echo(json.dumps(rating_payload(result), indent=2))
        return
    header = f"{'rank':>4}  {'indicator_id':<20} {'total_impact':>12} {'direct_impact':>13} {'relevance':>9}  criticality"
    click.echo(f"rating for target {result.target_id}")
    click.echo(header)
    click.echo("-" * len(header))
    for e in result.entries:
        click.echo(
            f"{e.rank:>4}  {e.indicator_id:<20} {e.total_impact:>12.6g} "
            f"{e.direct_impact:>13.6g} {e.relevance:>9.6g}  {e.criticality.token}"
        )


def _parse_deltas(spec: str) -> dict[str, float]:
    deltas: dict[str, float] = {}
    for chunk in spec.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        key, sep, raw = chunk.partition("=")
        if not sep:
            raise click.ClickException(f"--delta entries look like id=value, got {chunk!r}")
        if key in deltas:
            raise click.ClickException(f"duplicate shock for {key!r}")
        try:
            deltas[key] = float(raw)
        except ValueError:
            raise click.ClickException(f"shock for {key!r} must be a number, got {raw!r}") from None
    if not deltas:
        raise click.ClickException("--delta must name at least one indicator shock")
    return deltas


@main.command()
@click.argument("project_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--delta", "delta_spec", required=True,
              help="Comma-separated shocks, e.g. roads=1.0,jobs=-0.5")
@click.option("--out", "out_format", type=click.Choice(["table", "json"]), default="table")
def whatif(project_file, delta_spec, out_format):
    """Predict node changes for the given indicator shocks."""
    project = _load(project_file)
    scenario = _parse_deltas(delta_spec)
    try:
        total = total_influence_series(build_matrix(project))
        outcome = assessment.what_if(project, total, scenario)
    except EngineError as exc:
        raise click.ClickException(str(exc)) from exc
    if out_format == "json":
        click.echo(json.dumps({"deltas": outcome}, indent=2))
        return
    targets = set(project.target_ids)
    click.echo(f"{'node':<20} {'predicted_delta':>15}")
    for node in project.indicator_ids + project.target_ids:
        marker = " (target)" if node in targets else ""
        click.echo(f"{node:<20} {outcome[node]:>15.6g}{marker}")


@main.command()
@click.argument("portfolio_file", type=click.Path(exists=True, dir_okay=False))
def coverage(portfolio_file):
    """Check a document portfolio against the stage/horizon taxonomy."""
    try:
        documents = load_portfolio(Path(portfolio_file))
    except EngineError as exc:
        raise click.ClickException(str(exc)) from exc
    report = planning.portfolio_coverage(documents)
    payload = coverage_payload(report)
    click.echo(f"documents: {len(documents)}")
    click.echo(f"missing:   {', '.join(payload['missing']) or '-'}")
    click.echo(f"duplicates: {', '.join(payload['duplicates']) or '-'}")
    click.echo("complete" if report.complete else "incomplete")


@main.command()
@click.option("--port", type=int, default=8080, show_default=True)
@click.option("--data-dir", type=click.Path(file_okay=False), default="./projects", show_default=True)
@click.option("--ui-dir", type=click.Path(file_okay=False), default=None,
              help="Static bundle to serve at / (default: ./frontend/dist when present).")
@click.option("--host", default="127.0.0.1", show_default=True)
def serve(port, data_dir, ui_dir, host):
    """Run the HTTP service."""
    import uvicorn

    if ui_dir is None and Path("frontend/dist").is_dir():
        ui_dir = "frontend/dist"
    app = create_app(data_dir, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
