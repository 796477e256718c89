"""Command-line front door: generate, eulerize, partition, plan, run,
oracle, verify, report.

Exit codes: 0 success, 2 validation failure (bad input), 3 structural
error (inconsistent internal state).
"""

from __future__ import annotations

import functools
import json
import shutil
import sys
import tempfile
from pathlib import Path

import click

from . import reporting
from .circuits import (load_circuit_binary, load_circuit_text,
                       save_circuit_binary, save_circuit_text,
                       validate_circuit)
from .errors import StructuralError, ValidationFailure
from .generator import DEFAULT_PROBABILITIES, GeneratorConfig, eulerize, generate_power_law
from .graph import load_edge_list, save_edge_list, validate_eulerian
from .mergetree import generate_merge_tree
from .oracle import hierholzer
from .partitioning import (build_meta_graph, build_partitions,
                           load_partition_file, partition_graph,
                           partition_stats, save_partition_file)
from .runtime import BspRuntime, MergeStrategy
from .unroll import UnrollStats, unroll


def guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ValidationFailure as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except StructuralError as exc:
            click.echo(f"structural error: {exc}", err=True)
            sys.exit(3)
    return wrapper


@click.group()
def main():
    """Euler circuits over partitioned graphs."""


@main.command()
@click.option("--vertices", type=int, required=True)
@click.option("--degree", type=float, default=5.0, show_default=True,
              help="Average undirected degree.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--probabilities", default=None,
              help="Quadrant probabilities a,b,c,d (default "
                   f"{','.join(map(str, DEFAULT_PROBABILITIES))}).")
@click.option("--out", type=click.Path(), required=True)
@guarded
def generate(vertices, degree, seed, probabilities, out):
    """Generate a power-law edge list."""
    probs = DEFAULT_PROBABILITIES
    if probabilities:
        parts = [float(x) for x in probabilities.split(",")]
        if len(parts) != 4:
            raise ValidationFailure("--probabilities needs four values")
        probs = tuple(parts)
    graph = generate_power_law(GeneratorConfig(vertices, degree, probs, seed))
    save_edge_list(graph, out)
    click.echo(json.dumps({"vertices": graph.vertex_count,
                           "edges": graph.edge_count, "out": str(out)}))


@main.command("eulerize")
@click.option("--in", "source", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@guarded
def eulerize_cmd(source, out, seed):
    """Add pairing edges until every vertex degree is even."""
    graph = load_edge_list(source)
    result = eulerize(graph, seed)
    save_edge_list(result.graph, out)
    report = validate_eulerian(result.graph)
    if not report.passed:
        raise StructuralError(f"eulerized output failed validation: "
                              f"{report.message()}")
    click.echo(json.dumps({
        "vertices": result.graph.vertex_count,
        "edges": result.graph.edge_count,
        "added_edges": len(result.added_edges),
        "bridge_edges": len(result.bridge_edges),
        "added_ratio_pct": round(100.0 * result.added_count
                                 / max(graph.edge_count, 1), 3),
        "out": str(out),
    }))


@main.command("partition")
@click.option("--in", "source", type=click.Path(exists=True), required=True)
@click.option("--parts", type=int, default=None)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), default=None)
@click.option("--import", "import_file", type=click.Path(exists=True),
              default=None, help="Use an existing partition file instead of "
                                 "the built-in partitioner.")
@guarded
def partition_cmd(source, parts, seed, out, import_file):
    """Partition a graph, or import and validate a partition file.

    Emits the dataset stats block (vertices, edges, boundary vertices,
    parts, edge-cut %, imbalance %) as JSON on stdout.
    """
    graph = load_edge_list(source)
    if import_file:
        assignment = load_partition_file(import_file)
    else:
        if parts is None or out is None:
            raise ValidationFailure("--parts and --out are required unless "
                                    "--import is given")
        assignment = partition_graph(graph, parts, seed)
        save_partition_file(assignment, out)
    partitions = build_partitions(graph, assignment)
    build_meta_graph(partitions)
    click.echo(json.dumps(partition_stats(graph, partitions)))


@main.command()
@click.option("--graph", "graph_file", type=click.Path(exists=True), required=True)
@click.option("--parts", "parts_file", type=click.Path(exists=True), required=True)
@click.option("--json", "json_only", is_flag=True, help="JSON only.")
@guarded
def plan(graph_file, parts_file, json_only):
    """Print the merge tree, as indented text plus JSON."""
    graph = load_edge_list(graph_file)
    partitions = build_partitions(graph, load_partition_file(parts_file))
    tree = generate_merge_tree(build_meta_graph(partitions))
    if not json_only:
        click.echo(tree.render())
    click.echo(json.dumps(tree.to_dict(), indent=2, sort_keys=True))


def _save_walk(walk, path, fmt):
    if fmt == "binary":
        save_circuit_binary(walk, path)
    else:
        save_circuit_text(walk, path)


def _load_circuit(path, fmt):
    return load_circuit_binary(path) if fmt == "binary" else load_circuit_text(path)


@main.command()
@click.option("--graph", "graph_file", type=click.Path(exists=True))
@click.option("--parts", "parts_file", type=click.Path(exists=True))
@click.option("--strategy", type=click.Choice([s.value for s in MergeStrategy]),
              default=MergeStrategy.BASELINE.value, show_default=True)
@click.option("--workers", type=int, default=None)
@click.option("--spill", type=click.Path(), default=None,
              envvar="EULERBSP_SPILL_DIR",
              help="Spill directory (env EULERBSP_SPILL_DIR).")
@click.option("--out", type=click.Path(), default=None)
@click.option("--format", "fmt", type=click.Choice(["text", "binary"]),
              default="text", show_default=True)
@click.option("--metrics", "metrics_file", type=click.Path(), default=None)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--manifest", "manifest_file", type=click.Path(exists=True),
              default=None, help="Read all run parameters from a manifest.")
@guarded
def run(graph_file, parts_file, strategy, workers, spill, out, fmt,
        metrics_file, seed, manifest_file):
    """Run the full pipeline and write the circuit plus metrics."""
    if manifest_file:
        manifest = reporting.RunManifest.from_file(manifest_file)
    else:
        if not graph_file or not parts_file or not out:
            raise ValidationFailure("--graph, --parts and --out are required "
                                    "unless --manifest is given")
        manifest = reporting.RunManifest(
            graph=str(graph_file), parts=str(parts_file), strategy=strategy,
            seed=seed, workers=workers, spill=str(spill) if spill else None,
            out=str(out), format=fmt, metrics=str(metrics_file) if metrics_file else None)
    manifest.fill_hashes()

    graph = load_edge_list(manifest.graph)
    eulerian = validate_eulerian(graph)
    if not eulerian.passed:
        raise ValidationFailure(f"input graph: {eulerian.message()}")
    if graph.edge_count == 0:
        raise ValidationFailure("input graph has no edges")
    assignment = load_partition_file(manifest.parts)
    partitions = build_partitions(graph, assignment)
    meta = build_meta_graph(partitions)
    tree = generate_merge_tree(meta)
    stats_block = partition_stats(graph, partitions)

    base = Path(manifest.spill) if manifest.spill else Path(tempfile.gettempdir())
    token = (manifest.graph_sha256[:8] + manifest.parts_sha256[:8]
             + manifest.strategy.replace("-", ""))
    spill_dir = base / f"eulerbsp-{token}"
    if spill_dir.exists():
        shutil.rmtree(spill_dir)

    runtime = BspRuntime(partitions, tree,
                         MergeStrategy.parse(manifest.strategy), spill_dir,
                         manifest.workers)
    result = runtime.run_to_root()

    stats = UnrollStats()
    walk = unroll(result.root_entry_ids, result.spill, stats)
    _save_walk(walk, manifest.out, manifest.format)
    circuit_sha = reporting.file_sha256(manifest.out)

    metrics = reporting.metrics_dict(result, manifest.to_dict(), stats_block,
                                     stats.edge_count, circuit_sha)
    if manifest.metrics:
        reporting.write_metrics(metrics, manifest.metrics)
    click.echo(json.dumps({
        "supersteps": result.supersteps,
        "edges": stats.edge_count,
        "circuit": manifest.out,
        "circuit_sha256": circuit_sha,
        "determinism_hash": metrics["determinism_hash"],
    }))


@main.command()
@click.option("--graph", "graph_file", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), required=True)
@click.option("--format", "fmt", type=click.Choice(["text", "binary"]),
              default="text", show_default=True)
@click.option("--start", type=int, default=None)
@guarded
def oracle(graph_file, out, fmt, start):
    """Sequential reference circuit."""
    graph = load_edge_list(graph_file)
    circuit = hierholzer(graph, start)
    _save_walk(circuit.walk, out, fmt)
    click.echo(json.dumps({"edges": circuit.edge_count, "out": str(out)}))


@main.command()
@click.option("--graph", "graph_file", type=click.Path(exists=True), required=True)
@click.option("--circuit", "circuit_file", type=click.Path(exists=True), required=True)
@click.option("--format", "fmt", type=click.Choice(["text", "binary"]),
              default="text", show_default=True)
@guarded
def verify(graph_file, circuit_file, fmt):
    """Validate a circuit file against a graph."""
    graph = load_edge_list(graph_file)
    circuit = _load_circuit(circuit_file, fmt)
    report = validate_circuit(graph, circuit)
    click.echo(json.dumps({"passed": report.passed, "detail": report.message()}))
    if not report.passed:
        sys.exit(2)


@main.command()
@click.argument("metrics_files", nargs=-1, required=True,
                type=click.Path(exists=True))
@click.option("--csv", "csv_out", type=click.Path(), default=None,
              help="Per-partition ledger CSV (first metrics file).")
@click.option("--comparison-csv", type=click.Path(), default=None,
              help="Per-level strategy comparison CSV (needs 2+ files).")
@guarded
def report(metrics_files, csv_out, comparison_csv):
    """Render metrics files as tables; optionally emit CSVs."""
    metrics_list = [reporting.load_metrics(p) for p in metrics_files]
    click.echo(reporting.render_report(metrics_list))
    if csv_out:
        reporting.write_partition_csv(metrics_list[0], csv_out)
    if comparison_csv:
        if len(metrics_list) < 2:
            raise ValidationFailure("--comparison-csv needs at least two "
                                    "metrics files")
        reporting.write_comparison_csv(metrics_list, comparison_csv)


if __name__ == "__main__":
    main()
