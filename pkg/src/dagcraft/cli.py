"""Command line entry points.

Five subcommands: ``toygen`` writes the synthetic wind-farm dataset,
``screen`` runs permutation screening over all column pairs, ``fit``
performs one full iteration against a graph file and writes the
snapshot plus DOT views, ``adjust`` applies a multiplicity procedure to
a flat CSV of p-values, and ``serve`` starts the HTTP API. ``fit`` is
byte-reproducible: same inputs and seed, same output files.
"""

from __future__ import annotations

import csv
import json
import os
import sys

import click

from .adjust import (
    FISHER,
    WEIGHTED_SIMES,
    PValueEntry,
    bh_adjust,
    by_adjust,
    fisher_combine,
    wbh_adjust,
    weighted_simes,
)
from .datasets import generate_toy_dataset, load_csv, moment_summary, save_csv
from .graph import CausalGraph
from .report import EFFECTS, INDUCED_COV, dumps_canonical, export_dot
from .resampling import ResamplingPlan, pairwise_r2_pvalues
from .rng import derive_substream
from .session import (
    DEFAULT_MASTER_SEED,
    Project,
    Settings,
    run_iteration,
)

DATA_DIR_ENV = "DAGCRAFT_DATA_DIR"


@click.group()
@click.version_option()
def main():
    """Causal DAG workbench: fit, test, adjust, iterate."""


@main.command()
@click.option("--n", default=20000, show_default=True, help="Rows to generate.")
@click.option("--seed", default=1, show_default=True, help="Master seed.")
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="CSV path.")
def toygen(n, seed, out):
    """Generate the synthetic wind-farm dataset."""
    data = generate_toy_dataset(n, seed)
    save_csv(data, out)
    click.echo(f"wrote {data.n} rows x {data.p} columns to {out}")


@main.command()
@click.option("--data", "data_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--reps", default=999, show_default=True, help="Permutation replicates per pair.")
@click.option("--seed", default=DEFAULT_MASTER_SEED, show_default=True)
@click.option("--q", default=0.05, show_default=True, help="Adjustment level.")
@click.option(
    "--method",
    default="bh",
    show_default=True,
    type=click.Choice(["bh", "by"]),
    help="Multiplicity adjustment for the screening p-values.",
)
@click.option("--out", type=click.Path(dir_okay=False), help="Optional CSV output path.")
def screen(data_path, reps, seed, q, method, out):
    """Permutation screening of pairwise co-dependence."""
    data = load_csv(data_path)
    summary = moment_summary(data)
    plan = ResamplingPlan(reps_outer=reps, master_seed=derive_substream(seed, "screening"))
    raw = pairwise_r2_pvalues(data, plan)
    entries = [PValueEntry(f"{x},{y}", p) for (x, y), p in raw.items()]
    adjust = bh_adjust if method == "bh" else by_adjust
    result = adjust(entries, q)
    rows = []
    for (x, y), p in sorted(raw.items()):
        rid = f"{x},{y}"
        rows.append(
            {
                "x": x,
                "y": y,
                "r": f"{summary.pair_corr(x, y):.6g}",
                "raw_p": f"{p:.6g}",
                "adjusted_p": f"{result.adjusted[rid]:.6g}",
                "rejected": str(rid in result.rejected).lower(),
            }
        )
    header = ["x", "y", "r", "raw_p", "adjusted_p", "rejected"]
    if out:
        with open(out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=header, lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
        click.echo(f"wrote {len(rows)} pairs to {out}")
    else:
        click.echo("\t".join(header))
        for row in rows:
            click.echo("\t".join(row[h] for h in header))


@main.command()
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--data", "data_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--q", default=0.05, show_default=True)
@click.option("--delta-rho", default=0.05, show_default=True)
@click.option("--reps", default=200, show_default=True, help="Bootstrap replicates.")
@click.option("--seed", default=DEFAULT_MASTER_SEED, show_default=True)
@click.option(
    "--intersection",
    default=WEIGHTED_SIMES,
    show_default=True,
    type=click.Choice([WEIGHTED_SIMES, FISHER]),
)
def fit(graph_path, data_path, out_dir, q, delta_rho, reps, seed, intersection):
    """Run one iteration: fit the SCM, test, adjust, write reports."""
    with open(graph_path, encoding="utf-8") as fh:
        graph = CausalGraph.from_dict(json.load(fh))
    data = load_csv(data_path)
    settings = Settings(
        q=q,
        delta_rho=delta_rho,
        reps=reps,
        master_seed=seed,
        intersection_method=intersection,
    )
    project = Project(dataset=data, graph=graph, settings=settings)
    snapshot = run_iteration(project, record_time=False)
    os.makedirs(out_dir, exist_ok=True)
    snap_path = os.path.join(out_dir, "snapshot.json")
    with open(snap_path, "w", encoding="utf-8") as fh:
        fh.write(dumps_canonical(snapshot.to_dict()))
        fh.write("\n")
    for view, name in ((EFFECTS, "effects.dot"), (INDUCED_COV, "induced_cov.dot")):
        with open(os.path.join(out_dir, name), "w", encoding="utf-8") as fh:
            fh.write(export_dot(snapshot.graph, snapshot.family, view=view, q=q))
    family = snapshot.family
    rejected = sum(1 for r in family.records if r.rejected)
    click.echo(f"records: {len(family.records)}")
    click.echo(f"rejected at q={q:g}: {rejected}")
    click.echo(f"intersection p: {snapshot.intersection_p:.6g}")
    flagged = [r.id for r in family.records if r.rejected is False]
    if flagged:
        click.echo("not supported by the data (talking points):")
        for rid in flagged:
            click.echo(f"  {rid}")
    click.echo(f"wrote snapshot and DOT views to {out_dir}")


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--method",
    default="bh",
    show_default=True,
    type=click.Choice(["bh", "by", "wbh", "fdcr", "simes", "fisher"]),
)
@click.option("--q", default=0.05, show_default=True)
@click.option("--c0", default=1.0, show_default=True, help="Intersection cost (fdcr only).")
@click.option("--out", type=click.Path(dir_okay=False), help="Optional CSV output path.")
def adjust(input_path, method, q, c0, out):
    """Adjust a CSV of p-values (columns: id, p, optional weight)."""
    entries = []
    with open(input_path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"id", "p"} <= set(reader.fieldnames):
            raise click.ClickException("input must have columns id, p (optional weight)")
        for row in reader:
            weight = float(row.get("weight") or 1.0)
            entries.append(PValueEntry(row["id"], float(row["p"]), weight))
    if not entries:
        raise click.ClickException("no p-values in input")
    if method == "simes":
        click.echo(f"{weighted_simes(entries):.6g}")
        return
    if method == "fisher":
        click.echo(f"{fisher_combine(entries):.6g}")
        return
    if method == "fdcr":
        p0 = weighted_simes(entries)
        full = entries + [PValueEntry("intersection", p0, c0)]
        result = wbh_adjust(full, q)
        by_id = {e.id: e for e in full}
    else:
        proc = {"bh": bh_adjust, "by": by_adjust, "wbh": wbh_adjust}[method]
        result = proc(entries, q)
        by_id = {e.id: e for e in entries}
    header = ["id", "raw_p", "weight", "adjusted_p", "rejected"]
    rows = [
        {
            "id": rid,
            "raw_p": f"{by_id[rid].p:.6g}",
            "weight": f"{by_id[rid].weight:.6g}",
            "adjusted_p": f"{result.adjusted[rid]:.6g}",
            "rejected": str(rid in result.rejected).lower(),
        }
        for rid in sorted(result.adjusted)
    ]
    if out:
        with open(out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=header, lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
        click.echo(f"wrote {len(rows)} rows to {out}")
    else:
        click.echo("\t".join(header))
        for row in rows:
            click.echo("\t".join(row[h] for h in header))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option(
    "--data-dir",
    default=None,
    help=f"Project storage directory; defaults to ${DATA_DIR_ENV} or ./dagcraft-data.",
)
def serve(host, port, data_dir):
    """Start the HTTP API."""
    import uvicorn

    from .api import create_app

    uvicorn.run(create_app(data_dir), host=host, port=port, log_level="info")


if __name__ == "__main__":
    main(prog_name="dagcraft")
