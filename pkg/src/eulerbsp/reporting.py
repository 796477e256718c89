"""Run manifests, metrics serialization, and report rendering.

A manifest pins everything a run depends on, including content hashes of
the input files, so re-running it must reproduce the circuit and metrics
byte for byte (wall-clock fields are excluded from that contract and from
the determinism hash).
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import asdict, dataclass

from .errors import ValidationFailure
from .runtime import MemoryLedger, RunResult, StrategyComparison

WALL_FIELDS = {"wall_ns", "phase1_wall_ns", "determinism_hash"}


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def derive_seed(master: int, role: str) -> int:
    """Named sub-seed so one manifest seed drives every random stage."""
    digest = hashlib.sha256(f"{master}:{role}".encode()).digest()
    return int.from_bytes(digest[:8], "big") % (2**63)


@dataclass
class RunManifest:
    graph: str
    parts: str
    strategy: str
    seed: int = 0
    workers: int | None = None
    spill: str | None = None
    out: str = "circuit.txt"
    format: str = "text"
    metrics: str | None = None
    graph_sha256: str = ""
    parts_sha256: str = ""

    def fill_hashes(self) -> "RunManifest":
        self.graph_sha256 = file_sha256(self.graph)
        self.parts_sha256 = file_sha256(self.parts)
        return self

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_file(cls, path) -> "RunManifest":
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValidationFailure(f"unknown manifest fields: {sorted(unknown)}")
        return cls(**data)


def _strip_wall(obj):
    if isinstance(obj, dict):
        return {k: _strip_wall(v) for k, v in sorted(obj.items())
                if k not in WALL_FIELDS}
    if isinstance(obj, list):
        return [_strip_wall(x) for x in obj]
    return obj


def determinism_hash(metrics: dict) -> str:
    canonical = json.dumps(_strip_wall(metrics), sort_keys=True)
    return hashlib.sha256(canonical.encode()).hexdigest()


def metrics_dict(result: RunResult, manifest: dict | None,
                 stats_block: dict, circuit_edges: int,
                 circuit_sha256: str) -> dict:
    ledger = result.ledger
    levels = []
    for level in ledger.levels():
        rows = ledger.rows_at(level)
        levels.append({
            "level": level,
            "wall_ns": ledger.level_wall_ns.get(level, 0),
            "cumulative_int64": ledger.cumulative(level),
            "average_int64": round(ledger.average(level), 3),
            "parked_int64": ledger.parked.get(level, 0),
            "remote_arc_total": ledger.remote_arc_total(level),
            "transferred_int64": ledger.transferred_at(level),
            "partitions": [{
                "partition_id": r.partition_id,
                "int64_count": r.int64_count,
                "peak_int64_count": r.peak_int64_count,
                "remote_arc_count": r.remote_arc_count,
                "path_edge_count": r.path_edge_count,
                "boundary_count": r.boundary_count,
                "phase1_ran": r.phase1_ran,
                "phase1_op_count": r.phase1_ops,
                "phase1_b": r.phase1_b,
                "phase1_i": r.phase1_i,
                "phase1_l": r.phase1_l,
                "phase1_wall_ns": max(r.end_ns - r.start_ns, 0),
                "transferred_count": r.transferred_in,
            } for r in rows],
        })
    metrics = {
        "manifest": manifest or {},
        "strategy": result.strategy.value,
        "fingerprint": result.fingerprint,
        "supersteps": result.supersteps,
        "stats": stats_block,
        "levels": levels,
        "transfers": [{"level": t.level, "src": t.src, "dst": t.dst,
                       "int64_count": t.int64_count} for t in ledger.transfers],
        "circuit": {"edges": circuit_edges, "sha256": circuit_sha256},
    }
    metrics["determinism_hash"] = determinism_hash(metrics)
    return metrics


def write_metrics(metrics: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(metrics, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_metrics(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def ledger_from_metrics(metrics: dict) -> MemoryLedger:
    """Rebuild the per-level curves a comparison needs from a metrics file."""
    from .runtime import LedgerRow

    ledger = MemoryLedger(metrics["strategy"], metrics["fingerprint"])
    for lvl in metrics["levels"]:
        ledger.parked[lvl["level"]] = lvl["parked_int64"]
        ledger.level_wall_ns[lvl["level"]] = lvl.get("wall_ns", 0)
        for p in lvl["partitions"]:
            ledger.rows[(lvl["level"], p["partition_id"])] = LedgerRow(
                level=lvl["level"], partition_id=p["partition_id"],
                int64_count=p["int64_count"],
                peak_int64_count=p["peak_int64_count"],
                remote_arc_count=p["remote_arc_count"],
                path_edge_count=p["path_edge_count"],
                boundary_count=p["boundary_count"],
                phase1_ran=p["phase1_ran"], phase1_ops=p["phase1_op_count"],
                phase1_b=p["phase1_b"], phase1_i=p["phase1_i"],
                phase1_l=p["phase1_l"], transferred_in=p["transferred_count"],
                start_ns=0, end_ns=p.get("phase1_wall_ns", 0))
    return ledger


def _format_table(headers: list[str], rows: list[list]) -> str:
    table = [headers] + [[str(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in table) for i in range(len(headers))]
    lines = []
    for i, row in enumerate(table):
        lines.append("  ".join(c.rjust(w) for c, w in zip(row, widths)))
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def render_report(metrics_list: list[dict]) -> str:
    """Human-readable tables: dataset stats, per-level costs, strategy curves."""
    out = []
    first = metrics_list[0]
    stats = first.get("stats") or {}
    if stats:
        out.append("dataset")
        out.append(_format_table(
            ["|V|", "|E|", "sum|B_i|", "parts", "edge-cut %", "imbalance %"],
            [[stats.get("vertices"), stats.get("edges"),
              stats.get("boundary_vertices"), stats.get("parts"),
              stats.get("edge_cut_pct"), stats.get("imbalance_pct")]]))
        out.append("")

    for metrics in metrics_list:
        out.append(f"strategy {metrics['strategy']}  "
                   f"(supersteps {metrics['supersteps']})")
        rows = []
        for lvl in metrics["levels"]:
            wall = lvl.get("wall_ns", 0)
            phase1 = sum(p.get("phase1_wall_ns", 0) for p in lvl["partitions"])
            share = f"{100.0 * phase1 / wall:.0f}%" if wall else "-"
            rows.append([
                lvl["level"], len(lvl["partitions"]),
                lvl["cumulative_int64"], lvl["average_int64"],
                lvl["parked_int64"], lvl["remote_arc_total"],
                lvl["transferred_int64"], share,
            ])
        out.append(_format_table(
            ["level", "parts", "cumulative", "average", "parked",
             "arcs", "transferred", "phase1 share"], rows))
        out.append("")

    if len(metrics_list) > 1:
        comparison = comparison_from_metrics(metrics_list)
        out.append("strategy comparison (int64 state per level)")
        rows = [[r["level"], r["strategy"], r["cumulative"], r["average"],
                 r["parked"], r["ideal_cumulative"], r["ideal_average"]]
                for r in comparison.as_rows()]
        out.append(_format_table(
            ["level", "strategy", "cumulative", "average", "parked",
             "ideal cum", "ideal avg"], rows))
        out.append("")
        base = comparison.cumulative.get("baseline")
        if base:
            for name, series in sorted(comparison.cumulative.items()):
                if name == "baseline":
                    continue
                gaps = [f"{100.0 * (b - s) / b:.0f}%" if b else "-"
                        for b, s in zip(base, series)]
                out.append(f"  {name} cumulative reduction vs baseline by "
                           f"level: {', '.join(gaps)}")
            out.append("")
    return "\n".join(out)


def comparison_from_metrics(metrics_list: list[dict]) -> StrategyComparison:
    from .runtime import strategy_ledger_compare

    ledgers = {}
    for metrics in metrics_list:
        name = metrics["strategy"]
        if name in ledgers:
            raise ValidationFailure(f"duplicate strategy {name!r} in report input")
        ledgers[name] = ledger_from_metrics(metrics)
    return strategy_ledger_compare(ledgers)


CSV_STRUCTURAL = ["level", "partition_id", "boundary_count", "path_edge_count",
                  "phase1_op_count"]
CSV_LEDGER = ["int64_count", "peak_int64_count", "remote_arc_count",
              "transferred_count"]


def write_partition_csv(metrics: dict, path) -> None:
    """Per-(level, partition) rows; only ledger columns vary by strategy."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_STRUCTURAL + CSV_LEDGER)
        for lvl in metrics["levels"]:
            for p in sorted(lvl["partitions"], key=lambda q: q["partition_id"]):
                writer.writerow(
                    [lvl["level"], p["partition_id"], p["boundary_count"],
                     p["path_edge_count"], p["phase1_op_count"]]
                    + [p[c] for c in CSV_LEDGER])


def write_comparison_csv(metrics_list: list[dict], path) -> None:
    comparison = comparison_from_metrics(metrics_list)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["level", "strategy", "cumulative", "average",
                         "parked", "ideal_cumulative", "ideal_average"])
        for row in comparison.as_rows():
            writer.writerow([row["level"], row["strategy"], row["cumulative"],
                             row["average"], row["parked"],
                             row["ideal_cumulative"], row["ideal_average"]])
