"""Barrier-synchronized execution of the merge tree on one machine.

Each superstep runs phase 1 on every active partition in parallel (one
worker per partition from a bounded pool), then merges partition pairs per
the tree.  Three remote-edge strategies are supported; they change memory
residency and transfer volume only, never the discovered walks, so the
final circuit is identical across strategies.

The memory ledger counts resident 8-byte integers with one audited routine:
one per boundary vertex id, three per remote arc (vertex, vertex, partition),
three per coarse path edge (endpoints plus path id), two per original-edge
endpoint pair.  Snapshots are taken after each phase 1 releases its local
structures; a peak column additionally records the pre-traversal state.
"""

from __future__ import annotations

import enum
import hashlib
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import StructuralError, ValidationFailure
from .mergetree import MergePair, MergeTree
from .partitioning import Partition
from .phase1 import NO_REF, LocalGraph, PathMap, do_phase1, run_phase1
from .spill import SpillStore

ID_LEVEL_STRIDE = 10**12
ID_PARTITION_STRIDE = 10**6


class MergeStrategy(enum.Enum):
    BASELINE = "baseline"
    DEDUP = "dedup"
    DEDUP_DEFERRED = "dedup-deferred"

    @classmethod
    def parse(cls, name: str) -> "MergeStrategy":
        for member in cls:
            if member.value == name:
                return member
        raise ValidationFailure(f"unknown strategy {name!r}")


Arc = tuple[int, int, int]  # (local vertex, remote vertex, remote leaf id)


def count_state_ints(vertex_count: int, arc_count: int,
                     edges: Iterable[tuple[int, int, int]]) -> int:
    """The audited int64 counter shared by snapshots and transfer sizing."""
    total = vertex_count + 3 * arc_count
    for _, _, ref in edges:
        total += 2 if ref == NO_REF else 3
    return total


@dataclass
class PartitionState:
    """Live state of one (possibly merged) partition between barriers."""

    pid: int
    constituents: frozenset[int]
    edges: list[tuple[int, int, int]]
    held_arcs: list[Arc]
    remote_degree: Counter
    level: int = 0

    @property
    def boundary(self) -> set[int]:
        return {v for v, d in self.remote_degree.items() if d > 0}

    def resident_ints(self) -> int:
        return count_state_ints(len(self.boundary), len(self.held_arcs), self.edges)


@dataclass
class LedgerRow:
    level: int
    partition_id: int
    int64_count: int
    peak_int64_count: int
    remote_arc_count: int
    path_edge_count: int
    boundary_count: int
    phase1_ran: bool
    phase1_ops: int
    phase1_b: int
    phase1_i: int
    phase1_l: int
    transferred_in: int
    start_ns: int
    end_ns: int


@dataclass
class TransferRecord:
    level: int
    src: int
    dst: int
    int64_count: int


@dataclass
class MemoryLedger:
    strategy: str
    fingerprint: str
    rows: dict[tuple[int, int], LedgerRow] = field(default_factory=dict)
    transfers: list[TransferRecord] = field(default_factory=list)
    parked: dict[int, int] = field(default_factory=dict)
    level_wall_ns: dict[int, int] = field(default_factory=dict)

    def levels(self) -> list[int]:
        return sorted({lvl for lvl, _ in self.rows})

    def rows_at(self, level: int) -> list[LedgerRow]:
        return [r for (lvl, _), r in sorted(self.rows.items()) if lvl == level]

    def cumulative(self, level: int) -> int:
        return sum(r.int64_count for r in self.rows_at(level))

    def average(self, level: int) -> float:
        rows = self.rows_at(level)
        return sum(r.int64_count for r in rows) / len(rows) if rows else 0.0

    def remote_arc_total(self, level: int) -> int:
        return sum(r.remote_arc_count for r in self.rows_at(level))

    def transferred_at(self, level: int) -> int:
        return sum(t.int64_count for t in self.transfers if t.level == level)


@dataclass
class RunResult:
    strategy: MergeStrategy
    tree: MergeTree
    root_path_map: PathMap
    root_entry_ids: list[int]
    ledger: MemoryLedger
    spill: SpillStore
    path_maps: dict[tuple[int, int], PathMap]
    supersteps: int
    fingerprint: str


def run_fingerprint(partitions: Sequence[Partition], tree: MergeTree) -> str:
    """Strategy-independent digest of the partitioned input plus the plan."""
    h = hashlib.sha256()
    for p in sorted(partitions, key=lambda q: q.partition_id):
        h.update(f"P{p.partition_id};{sorted(p.internal)};{sorted(p.boundary)};"
                 f"{sorted(p.local_edges())};{p.remote}".encode())
    h.update(repr(tree.to_dict()).encode())
    return h.hexdigest()


def _id_base(level: int, pid: int) -> int:
    if pid >= ID_PARTITION_STRIDE:
        raise StructuralError(f"partition id {pid} exceeds the path-id encoding")
    return (level + 1) * ID_LEVEL_STRIDE + pid * ID_PARTITION_STRIDE + 1


def run_level(partitions: Sequence[Partition], workers: int | None = None,
              level: int = 0) -> list[PathMap]:
    """Phase 1 over a set of loaded partitions, in parallel, no merging."""
    def job(p: Partition) -> PathMap:
        try:
            return do_phase1(p, _id_base(level, p.partition_id), level)
        except Exception as exc:
            raise type(exc)(f"partition {p.partition_id}: {exc}") from exc

    pool = ThreadPoolExecutor(max_workers=workers or min(8, max(1, len(partitions))))
    try:
        return list(pool.map(job, partitions))
    finally:
        pool.shutdown()


class BspRuntime:
    """Drives one run: level-0 phase 1, then merge+phase 1 per tree level."""

    def __init__(self, partitions: Sequence[Partition], tree: MergeTree,
                 strategy: MergeStrategy, spill_dir, workers: int | None = None):
        self.partitions = {p.partition_id: p for p in partitions}
        if sorted(self.partitions) != tree.leaves:
            raise StructuralError(
                f"tree leaves {tree.leaves} do not match partition ids "
                f"{sorted(self.partitions)}")
        self.tree = tree
        self.strategy = strategy
        self.spill = SpillStore(spill_dir)
        self.workers = workers
        self.fingerprint = run_fingerprint(partitions, tree)
        self.ledger = MemoryLedger(strategy.value, self.fingerprint)
        self.path_maps: dict[tuple[int, int], PathMap] = {}

        self._pair_edges: dict[tuple[int, int], list[tuple[int, int]]] = {}
        self._merge_level: dict[tuple[int, int], int] = {}
        self._holder: dict[tuple[int, int], int] = {}
        self._prepare_arcs()

    # -- setup --------------------------------------------------------------

    def _prepare_arcs(self) -> None:
        totals = {pid: len(p.remote) for pid, p in self.partitions.items()}
        for pid, p in sorted(self.partitions.items()):
            for u, v, q in p.remote:
                if pid < q:
                    # One entry per undirected remote edge, seen from the
                    # lower-id side; (u, v) has u on that side.
                    self._pair_edges.setdefault((pid, q), []).append((u, v))
        for key in sorted(self._pair_edges):
            self._pair_edges[key].sort()
            i, j = key
            if len(self.partitions) > 1:
                self._merge_level[key] = self.tree.merge_level_of(i, j)
            # The heavier side (more total remote arcs; ties to the larger id)
            # drops its mirror arcs; the lighter side holds the edge.
            heavier = i if (totals[i], i) > (totals[j], j) else j
            self._holder[key] = j if heavier == i else i

    def _leaf_arcs(self, pid: int) -> list[Arc]:
        """Arcs resident on leaf ``pid`` under the current strategy."""
        arcs: list[Arc] = []
        p = self.partitions[pid]
        if self.strategy is MergeStrategy.BASELINE:
            return [(u, v, q) for u, v, q in p.remote]
        for key, edges in self._pair_edges.items():
            if self._holder[key] != pid or pid not in key:
                continue
            other = key[0] if key[1] == pid else key[1]
            for u, v in edges:
                if key[0] == pid:
                    arcs.append((u, v, other))
                else:
                    arcs.append((v, u, other))
        return sorted(arcs)

    # -- per-level work -----------------------------------------------------

    def _phase1_state(self, state: PartitionState, level: int) -> PathMap:
        boundary = state.boundary
        local = LocalGraph(sorted(state.edges), boundary)
        if level == 0:
            local.extra_vertices = set(self.partitions[state.pid].internal)
        peak = count_state_ints(len(local.vertices), len(state.held_arcs),
                                local.edges)
        start_ns = time.monotonic_ns()
        try:
            pm = run_phase1(local, state.pid, level, _id_base(level, state.pid),
                            {v: [] for v in sorted(boundary)})
        except Exception as exc:
            raise type(exc)(f"level {level}, partition {state.pid}: {exc}") from exc
        end_ns = time.monotonic_ns()

        self.spill.write_entries(state.pid, level, pm.entries)
        state.edges = sorted(
            (min(e.source, e.sink), max(e.source, e.sink), e.path_id)
            for e in pm.paths())
        for entry in pm.entries:
            entry.steps = None
        state.level = level

        self.ledger.rows[(level, state.pid)] = LedgerRow(
            level=level, partition_id=state.pid,
            int64_count=state.resident_ints(), peak_int64_count=peak,
            remote_arc_count=len(state.held_arcs),
            path_edge_count=len(state.edges),
            boundary_count=len(boundary),
            phase1_ran=True, phase1_ops=pm.op_count,
            phase1_b=pm.boundary_count, phase1_i=pm.internal_count,
            phase1_l=pm.local_edge_count,
            transferred_in=self._incoming(level, state.pid),
            start_ns=start_ns, end_ns=end_ns)
        self.path_maps[(level, state.pid)] = pm
        return pm

    def _incoming(self, level: int, pid: int) -> int:
        return sum(t.int64_count for t in self.ledger.transfers
                   if t.level == level and t.dst == pid)

    def _snapshot_carried(self, state: PartitionState, level: int) -> None:
        prev = self.ledger.rows[(state.level, state.pid)]
        self.ledger.rows[(level, state.pid)] = LedgerRow(
            level=level, partition_id=state.pid,
            int64_count=state.resident_ints(),
            peak_int64_count=state.resident_ints(),
            remote_arc_count=len(state.held_arcs),
            path_edge_count=len(state.edges),
            boundary_count=prev.boundary_count,
            phase1_ran=False, phase1_ops=0,
            phase1_b=0, phase1_i=0, phase1_l=0,
            transferred_in=0, start_ns=0, end_ns=0)

    def _localized_edges(self, a: PartitionState, b: PartitionState) -> list[tuple[int, int]]:
        out: list[tuple[int, int]] = []
        for i in a.constituents:
            for j in b.constituents:
                out.extend(self._pair_edges.get((min(i, j), max(i, j)), ()))
        return sorted((min(u, v), max(u, v)) for u, v in out)

    def merge_pair(self, a: PartitionState, b: PartitionState, pair: MergePair,
                   level: int) -> PartitionState:
        if {a.pid, b.pid} != {pair.a, pair.b}:
            raise StructuralError(
                f"merge of {a.pid},{b.pid} does not match tree pair "
                f"{pair.a},{pair.b}")
        parent_pid = pair.parent
        child = a if a.pid != parent_pid else b

        if self.strategy is MergeStrategy.BASELINE:
            self._check_mirrors(a, b)

        localized = self._localized_edges(a, b)
        transfers = [TransferRecord(
            level, child.pid, parent_pid,
            count_state_ints(len(child.boundary),
                             0 if self.strategy is MergeStrategy.DEDUP_DEFERRED
                             else len(child.held_arcs),
                             child.edges))]

        constituents = a.constituents | b.constituents
        if self.strategy is MergeStrategy.DEDUP_DEFERRED:
            held: list[Arc] = []
            shipped: dict[int, int] = {}
            for key, lvl in self._merge_level.items():
                if lvl != level:
                    continue
                i, j = key
                if i in constituents and j in constituents:
                    holder = self._holder[key]
                    n = len(self._pair_edges[key])
                    shipped[holder] = shipped.get(holder, 0) + n
            for holder, n in sorted(shipped.items()):
                if holder != parent_pid:
                    transfers.append(TransferRecord(level, holder, parent_pid, 3 * n))
        else:
            drop = {(min(u, v), max(u, v)) for u, v in localized}
            held = sorted(
                arc for arc in a.held_arcs + b.held_arcs
                if (min(arc[0], arc[1]), max(arc[0], arc[1])) not in drop)

        remote_degree = Counter(a.remote_degree)
        remote_degree.update(b.remote_degree)
        for u, v in localized:
            remote_degree[u] -= 1
            remote_degree[v] -= 1
        if any(d < 0 for d in remote_degree.values()):
            raise StructuralError(
                f"merge {a.pid}+{b.pid}: localized more arcs than exist")

        edges = sorted(a.edges + b.edges + [(u, v, NO_REF) for u, v in localized])
        self.ledger.transfers.extend(transfers)
        return PartitionState(parent_pid, frozenset(constituents), edges,
                              held, +remote_degree, level)

    def _check_mirrors(self, a: PartitionState, b: PartitionState) -> None:
        left = Counter((min(u, v), max(u, v)) for u, v, q in a.held_arcs
                       if q in b.constituents)
        right = Counter((min(u, v), max(u, v)) for u, v, q in b.held_arcs
                        if q in a.constituents)
        if left != right:
            diff = sorted((left - right) + (right - left))
            raise StructuralError(
                f"merge {a.pid}+{b.pid}: remote arcs do not mirror "
                f"(first mismatch {diff[0]})")

    def _parked_ints(self, level: int) -> int:
        """Deferred arcs waiting on inactive leaf hosts after this level.

        At level 0 every leaf is still active, so its holdings are resident
        (already counted in the snapshot rows) rather than parked.
        """
        if self.strategy is not MergeStrategy.DEDUP_DEFERRED or level == 0:
            return 0
        total = 0
        for key, lvl in self._merge_level.items():
            if lvl > level:
                total += 3 * len(self._pair_edges[key])
        return total

    # -- the run -------------------------------------------------------------

    def run_to_root(self) -> RunResult:
        states: dict[int, PartitionState] = {}
        for pid, p in sorted(self.partitions.items()):
            arcs = self._leaf_arcs(pid)
            states[pid] = PartitionState(
                pid, frozenset([pid]),
                [(u, v, NO_REF) for u, v in p.local_edges()],
                arcs, Counter(u for u, _, _ in p.remote))

        supersteps = 0
        level = 0
        t0 = time.monotonic_ns()
        self._execute_phase1(states.values(), level)
        self.ledger.level_wall_ns[level] = time.monotonic_ns() - t0
        self.ledger.parked[level] = self._parked_ints(level)
        supersteps += 1

        for tree_level in self.tree.levels:
            level += 1
            t0 = time.monotonic_ns()
            merged: dict[int, PartitionState] = {}
            for pair in tree_level.all_pairs:
                if pair.a not in states or pair.b not in states:
                    raise StructuralError(
                        f"tree pair {pair.a},{pair.b} not active at level {level}")
                parent = self.merge_pair(states.pop(pair.a), states.pop(pair.b),
                                         pair, level)
                merged[parent.pid] = parent
            carried = dict(states)
            states = {**merged, **carried}
            self._execute_phase1(merged.values(), level)
            for state in carried.values():
                self._snapshot_carried(state, level)
            self.ledger.parked[level] = self._parked_ints(level)
            self.ledger.level_wall_ns[level] = time.monotonic_ns() - t0
            supersteps += 1

        if len(states) != 1:
            raise StructuralError(f"{len(states)} partitions left after the tree")
        root_pid = next(iter(states))
        if root_pid != self.tree.root:
            raise StructuralError(
                f"run ended at partition {root_pid}, tree root is {self.tree.root}")
        root_pm = self.path_maps[(level, root_pid)]
        return RunResult(
            strategy=self.strategy, tree=self.tree, root_path_map=root_pm,
            root_entry_ids=[e.path_id for e in root_pm.entries],
            ledger=self.ledger, spill=self.spill, path_maps=self.path_maps,
            supersteps=supersteps, fingerprint=self.fingerprint)

    def _execute_phase1(self, states: Iterable[PartitionState], level: int) -> None:
        states = sorted(states, key=lambda s: s.pid)
        if not states:
            return
        pool = ThreadPoolExecutor(
            max_workers=self.workers or min(8, len(states)))
        try:
            list(pool.map(lambda s: self._phase1_state(s, level), states))
        finally:
            pool.shutdown()


def run_to_root(partitions: Sequence[Partition], tree: MergeTree,
                strategy: MergeStrategy, spill_dir,
                workers: int | None = None) -> RunResult:
    """Convenience wrapper over :class:`BspRuntime`."""
    return BspRuntime(partitions, tree, strategy, spill_dir, workers).run_to_root()


@dataclass
class StrategyComparison:
    levels: list[int]
    cumulative: dict[str, list[int]]
    average: dict[str, list[float]]
    parked: dict[str, list[int]]
    ideal_cumulative: list[float]
    ideal_average: list[float]

    def as_rows(self) -> list[dict]:
        out = []
        for i, level in enumerate(self.levels):
            for name in self.cumulative:
                out.append({
                    "level": level,
                    "strategy": name,
                    "cumulative": self.cumulative[name][i],
                    "average": round(self.average[name][i], 3),
                    "parked": self.parked[name][i],
                    "ideal_cumulative": round(self.ideal_cumulative[i], 3),
                    "ideal_average": round(self.ideal_average[i], 3),
                })
        return out


def strategy_ledger_compare(ledgers: Mapping[str, MemoryLedger]) -> StrategyComparison:
    """Side-by-side per-level memory curves plus the constant-average ideal."""
    if not ledgers:
        raise ValidationFailure("no ledgers to compare")
    fingerprints = {led.fingerprint for led in ledgers.values()}
    if len(fingerprints) != 1:
        raise ValidationFailure(
            "ledgers come from different runs (mismatched fingerprints)")
    levels_sets = {tuple(led.levels()) for led in ledgers.values()}
    if len(levels_sets) != 1:
        raise ValidationFailure("ledgers cover different level ranges")
    levels = list(levels_sets.pop())

    reference = ledgers.get(MergeStrategy.BASELINE.value,
                            next(iter(ledgers.values())))
    ideal_avg = reference.average(levels[0]) if levels else 0.0
    partitions_per_level = [len(reference.rows_at(lvl)) for lvl in levels]

    return StrategyComparison(
        levels=levels,
        cumulative={n: [led.cumulative(l) for l in levels] for n, led in ledgers.items()},
        average={n: [led.average(l) for l in levels] for n, led in ledgers.items()},
        parked={n: [led.parked.get(l, 0) for l in levels] for n, led in ledgers.items()},
        ideal_cumulative=[ideal_avg * k for k in partitions_per_level],
        ideal_average=[ideal_avg for _ in levels],
    )
