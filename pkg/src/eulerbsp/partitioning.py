"""Partition model: internal/boundary vertices, local/remote edges.

A partition holds the vertices assigned to it, the adjacency restricted to
in-partition endpoints, and one directed arc per remote edge endpoint.  The
meta-graph aggregates remote-edge counts per partition pair and drives the
merge planner.
"""

from __future__ import annotations

import enum
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import GraphFormatError, StructuralError, ValidationFailure
from .graph import Graph, validate_eulerian


class VertexClass(enum.Enum):
    INTERNAL = "internal"
    ODD_BOUNDARY = "odd-boundary"
    EVEN_BOUNDARY = "even-boundary"


@dataclass
class Partition:
    """One fragment of a partitioned graph.

    ``remote`` holds arcs (local vertex, remote vertex, remote partition id);
    the mirror arc lives in the remote partition.  Instances are treated as
    immutable after construction; traversal marks live in phase-1 state.
    """

    partition_id: int
    internal: set[int]
    boundary: set[int]
    local: dict[int, list[int]]
    remote: list[tuple[int, int, int]]

    @property
    def vertices(self) -> set[int]:
        return self.internal | self.boundary

    def local_degree(self, v: int) -> int:
        return len(self.local.get(v, []))

    def remote_degree(self, v: int) -> int:
        return sum(1 for u, _, _ in self.remote if u == v)

    @property
    def local_edge_count(self) -> int:
        return sum(len(nbrs) for nbrs in self.local.values()) // 2

    def local_edges(self) -> list[tuple[int, int]]:
        """Each local undirected edge once, as (min, max), with multiplicity."""
        return [(u, v) for u, nbrs in self.local.items() for v in nbrs if u <= v]

    def validate(self) -> None:
        if self.internal & self.boundary:
            raise StructuralError(
                f"partition {self.partition_id}: internal and boundary overlap")
        vertices = self.vertices
        remote_deg = Counter(u for u, _, _ in self.remote)
        for u, nbrs in self.local.items():
            for v in nbrs:
                if u not in vertices or v not in vertices:
                    raise StructuralError(
                        f"partition {self.partition_id}: local edge ({u},{v}) "
                        f"leaves the partition")
        for u, _, pid in self.remote:
            if u not in self.boundary:
                raise StructuralError(
                    f"partition {self.partition_id}: remote arc at non-boundary {u}")
            if pid == self.partition_id:
                raise StructuralError(
                    f"partition {self.partition_id}: remote arc to itself")
        for v in self.boundary:
            if remote_deg[v] == 0:
                raise StructuralError(
                    f"partition {self.partition_id}: boundary vertex {v} has no remote arc")
        odd = 0
        for v in vertices:
            if (self.local_degree(v) + remote_deg[v]) % 2 == 1:
                raise ValidationFailure(
                    f"partition {self.partition_id}: vertex {v} has odd total degree")
            if v in self.boundary and self.local_degree(v) % 2 == 1:
                odd += 1
        if odd % 2 == 1:
            raise StructuralError(
                f"partition {self.partition_id}: odd boundary count {odd} is odd")


def classify_vertices(partition: Partition) -> dict[int, VertexClass]:
    """Assign every vertex its class from local-degree parity.

    Rejects partitions where some vertex has odd total degree, since the
    whole pipeline assumes Eulerian input.
    """
    remote_deg = Counter(u for u, _, _ in partition.remote)
    classes = {}
    for v in sorted(partition.vertices):
        local = partition.local_degree(v)
        if (local + remote_deg[v]) % 2 == 1:
            raise ValidationFailure(
                f"vertex {v} has odd total degree {local + remote_deg[v]}; "
                f"input is not Eulerian")
        if v not in partition.boundary:
            classes[v] = VertexClass.INTERNAL
        elif local % 2 == 1:
            classes[v] = VertexClass.ODD_BOUNDARY
        else:
            classes[v] = VertexClass.EVEN_BOUNDARY
    return classes


def build_partitions(graph: Graph, assignment: Sequence[int]) -> list[Partition]:
    """Split a graph by a per-vertex partition-id assignment."""
    if len(assignment) != graph.vertex_count:
        raise ValidationFailure(
            f"assignment covers {len(assignment)} vertices, graph has "
            f"{graph.vertex_count}")
    pids = sorted(set(assignment))
    internal: dict[int, set[int]] = {p: set() for p in pids}
    boundary: dict[int, set[int]] = {p: set() for p in pids}
    local: dict[int, dict[int, list[int]]] = {p: {} for p in pids}
    remote: dict[int, list[tuple[int, int, int]]] = {p: [] for p in pids}

    for u in range(graph.vertex_count):
        pu = assignment[u]
        internal[pu].add(u)
        for v in graph.adj[u]:
            pv = assignment[v]
            if pv == pu:
                local[pu].setdefault(u, []).append(v)
            else:
                remote[pu].append((u, v, pv))
                boundary[pu].add(u)

    parts = []
    for p in pids:
        internal[p] -= boundary[p]
        for nbrs in local[p].values():
            nbrs.sort()
        part = Partition(p, internal[p], boundary[p], local[p], sorted(remote[p]))
        part.validate()
        parts.append(part)
    return parts


@dataclass
class MetaGraph:
    """Partition adjacency: weights count undirected remote edges per pair."""

    vertices: set[int]
    weights: dict[tuple[int, int], int] = field(default_factory=dict)

    def weight(self, a: int, b: int) -> int:
        return self.weights.get((min(a, b), max(a, b)), 0)

    @property
    def total_weight(self) -> int:
        return sum(self.weights.values())


def build_meta_graph(partitions: Sequence[Partition]) -> MetaGraph:
    """Aggregate remote edges per partition pair, checking arc mirrors.

    Every remote arc must have a mirror in the referenced partition, so the
    per-pair arc multisets are compared; a missing mirror raises.
    """
    by_pid = {p.partition_id: p for p in partitions}
    sides: dict[tuple[int, int], tuple[Counter, Counter]] = {}
    for p in partitions:
        for u, v, q in p.remote:
            if q not in by_pid:
                raise StructuralError(
                    f"partition {p.partition_id}: remote arc to unknown partition {q}")
            key = (min(p.partition_id, q), max(p.partition_id, q))
            pair = sides.setdefault(key, (Counter(), Counter()))
            pair[0 if p.partition_id == key[0] else 1][(min(u, v), max(u, v))] += 1

    weights = {}
    for key, (left, right) in sorted(sides.items()):
        if left != right:
            bad = sorted((left - right) + (right - left))
            raise StructuralError(
                f"remote arcs between partitions {key[0]} and {key[1]} do not "
                f"mirror; first mismatch: {bad[0] if bad else '?'}")
        weights[key] = sum(left.values())
    return MetaGraph(set(by_pid), weights)


def load_partition_file(path) -> list[int]:
    """Line k holds the partition id of vertex k (0-based)."""
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            try:
                out.append(int(text))
            except ValueError as exc:
                raise GraphFormatError(
                    f"{path}:{lineno}: expected a partition id") from exc
    return out


def save_partition_file(assignment: Sequence[int], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for pid in assignment:
            fh.write(f"{pid}\n")


def partition_graph(graph: Graph, parts: int, seed: int = 0) -> list[int]:
    """Multi-source BFS growth balancing vertex counts, deterministic per seed.

    Quality is below a multilevel partitioner's, but the engine accepts any
    valid assignment and external partition files cover high-quality needs.
    """
    n = graph.vertex_count
    if parts < 1:
        raise ValidationFailure("parts must be at least 1")
    if parts > n:
        raise ValidationFailure(f"{parts} parts requested for {n} vertices")
    report = validate_eulerian(graph)
    if not report.passed:
        raise ValidationFailure(f"input must be Eulerian: {report.message()}")
    if parts == 1:
        return [0] * n

    rng = np.random.default_rng(seed)
    sources = rng.choice(n, size=parts, replace=False).tolist()
    assignment = [-1] * n
    frontiers = [deque([s]) for s in sources]
    sizes = [0] * parts
    for pid, s in enumerate(sources):
        assignment[s] = pid
        sizes[pid] = 1

    unassigned = n - parts
    scan = 0
    while unassigned:
        pid = min(range(parts), key=lambda i: (sizes[i], i))
        grabbed = False
        while frontiers[pid]:
            u = frontiers[pid].popleft()
            for v in graph.adj[u]:
                if assignment[v] == -1:
                    assignment[v] = pid
                    sizes[pid] += 1
                    unassigned -= 1
                    frontiers[pid].append(v)
                    grabbed = True
                    break
            if grabbed:
                if graph.adj[u]:
                    frontiers[pid].appendleft(u)
                break
        if not grabbed:
            while assignment[scan] != -1:
                scan += 1
            assignment[scan] = pid
            sizes[pid] += 1
            unassigned -= 1
            frontiers[pid].append(scan)
    return assignment


def partition_stats(graph: Graph, partitions: Sequence[Partition]) -> dict:
    """Dataset characteristics block: sizes, cut fraction, imbalance."""
    n = len(partitions)
    total_boundary = sum(len(p.boundary) for p in partitions)
    remote_undirected = sum(len(p.remote) for p in partitions) // 2
    edge_cut_pct = 100.0 * remote_undirected / graph.edge_count if graph.edge_count else 0.0
    v = graph.vertex_count
    imbalance_pct = max(
        (100.0 * abs(v - n * len(p.vertices)) / v for p in partitions), default=0.0)
    return {
        "vertices": v,
        "edges": graph.edge_count,
        "boundary_vertices": total_boundary,
        "parts": n,
        "edge_cut_pct": round(edge_cut_pct, 3),
        "imbalance_pct": round(imbalance_pct, 3),
    }
