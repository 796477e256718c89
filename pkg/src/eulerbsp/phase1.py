"""Local path and cycle discovery within one partition.

Walks start at odd boundary vertices first (each such walk must end at
another odd boundary vertex), then at even boundary vertices (each walk
closes into a cycle, possibly a zero-edge singleton), and finally at any
vertex that still has unvisited edges (closed cycles, spliced into earlier
entries at a shared pivot vertex).

Edges are ``(u, v, ref)`` triples.  At level 0 every ref is ``NO_REF``; at
merged levels a ref names the lower-level path entry the edge stands for,
which is how the final unroll reconnects coarse walks to real edges.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

from .errors import StructuralError, ValidationFailure
from .partitioning import Partition

NO_REF = -1

Step = tuple[int, int]  # (next vertex, ref of the edge crossed)


class PathKind(enum.Enum):
    PATH = 1
    CYCLE = 2
    SINGLETON = 3


@dataclass
class PathEntry:
    path_id: int
    kind: PathKind
    source: int
    sink: int
    steps: list[Step] | None
    step_count: int

    def vertex_walk(self) -> list[int]:
        if self.steps is None:
            raise StructuralError(f"entry {self.path_id} was already spilled")
        return [self.source] + [v for v, _ in self.steps]


@dataclass
class WalkRecord:
    """Diagnostics for one traversal, used by the invariant test suite."""

    start: int
    end: int
    start_class: str
    edge_count: int
    closed: bool


@dataclass
class PathMap:
    """Phase-1 output for one partition at one level."""

    partition_id: int
    level: int
    entries: list[PathEntry]
    residual_boundary: dict[int, list[tuple[int, int, int]]]
    walks: list[WalkRecord] = field(default_factory=list)
    stranded_ids: list[int] = field(default_factory=list)
    op_count: int = 0
    boundary_count: int = 0
    internal_count: int = 0
    local_edge_count: int = 0
    connected: bool = True

    def entry(self, path_id: int) -> PathEntry:
        for e in self.entries:
            if e.path_id == path_id:
                return e
        raise KeyError(path_id)

    def paths(self) -> list[PathEntry]:
        return [e for e in self.entries if e.kind is PathKind.PATH]

    def path_endpoints(self) -> list[tuple[int, int]]:
        return [(min(e.source, e.sink), max(e.source, e.sink)) for e in self.paths()]


@dataclass
class LocalGraph:
    """The multigraph one phase-1 run consumes: coarse edges plus boundary."""

    edges: list[tuple[int, int, int]]
    boundary: set[int]
    extra_vertices: set[int] = field(default_factory=set)

    @property
    def vertices(self) -> set[int]:
        vs = set(self.boundary) | set(self.extra_vertices)
        for u, v, _ in self.edges:
            vs.add(u)
            vs.add(v)
        return vs


def local_graph_from_partition(partition: Partition) -> LocalGraph:
    edges = [(u, v, NO_REF) for u, v in partition.local_edges()]
    return LocalGraph(sorted(edges), set(partition.boundary), set(partition.internal))


def _is_connected(local: LocalGraph) -> bool:
    vertices = local.vertices
    if len(vertices) <= 1:
        return True
    parent = {v: v for v in vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v, _ in local.edges:
        parent[find(u)] = find(v)
    roots = {find(v) for v in vertices}
    return len(roots) == 1


class TraversalState:
    """Visited marks and per-vertex cursors over a LocalGraph.

    An edge and its mirror direction share one visited flag, so one
    undirected edge is consumed atomically.  Cursors only move forward,
    keeping the total scan work linear in the arc count.
    """

    def __init__(self, local: LocalGraph):
        self.edges = local.edges
        self.adj: dict[int, list[int]] = {v: [] for v in local.vertices}
        for idx, (u, v, _) in enumerate(self.edges):
            self.adj[u].append(idx)
            self.adj[v].append(idx)
        for v, idxs in self.adj.items():
            idxs.sort(key=lambda i: (self._other(i, v), self.edges[i][2], i))
        self.visited = bytearray(len(self.edges))
        self.cursor = {v: 0 for v in self.adj}
        self.unvisited_deg = {v: len(idxs) for v, idxs in self.adj.items()}
        self.remaining = len(self.edges)
        self.op_count = 0

    def _other(self, idx: int, v: int) -> int:
        u, w, _ = self.edges[idx]
        return w if u == v else u

    def take_next(self, v: int) -> tuple[int, int] | None:
        """Consume the lowest-numbered unvisited edge at v, if any."""
        idxs = self.adj[v]
        i = self.cursor[v]
        while i < len(idxs) and self.visited[idxs[i]]:
            i += 1
            self.op_count += 1
        self.cursor[v] = i
        if i == len(idxs):
            return None
        idx = idxs[i]
        self.visited[idx] = 1
        self.cursor[v] = i + 1
        self.op_count += 1
        other = self._other(idx, v)
        self.unvisited_deg[v] -= 1
        self.unvisited_deg[other] -= 1
        self.remaining -= 1
        return other, self.edges[idx][2]


def find_euler_path(state: TraversalState, start: int) -> list[Step]:
    """Maximal walk over unvisited edges from ``start``; may be empty."""
    if start not in state.adj:
        raise ValidationFailure(f"vertex {start} is not in this partition")
    state.op_count += 1
    steps: list[Step] = []
    cur = start
    while True:
        nxt = state.take_next(cur)
        if nxt is None:
            return steps
        cur = nxt[0]
        steps.append(nxt)


def _walk_vertices(source: int, steps: Sequence[Step]) -> list[int]:
    return [source] + [v for v, _ in steps]


def _splice(host: PathEntry, pivot_pos: int, cycle_start: int,
            cycle_steps: list[Step], rotate_to: int) -> None:
    """Insert a closed walk into host at vertex position ``pivot_pos``."""
    verts = _walk_vertices(cycle_start, cycle_steps)
    q = verts.index(rotate_to)
    rotated = cycle_steps[q:] + cycle_steps[:q]
    host.steps = host.steps[:pivot_pos] + rotated + host.steps[pivot_pos:]
    host.step_count += len(rotated)


def _try_splice_into(entries: list[PathEntry], membership: dict[int, set[int]],
                     cycle_start: int, cycle_steps: list[Step]) -> bool:
    cycle_verts = set(_walk_vertices(cycle_start, cycle_steps))
    candidates = set()
    for v in cycle_verts:
        candidates |= membership.get(v, set())
    if not candidates:
        return False
    host = min(entries, key=lambda e: e.path_id if e.path_id in candidates else float("inf"))
    if host.path_id not in candidates:
        return False
    host_verts = host.vertex_walk()
    for pos, v in enumerate(host_verts):
        if v in cycle_verts:
            _splice(host, pos, cycle_start, cycle_steps, v)
            for w in cycle_verts:
                membership.setdefault(w, set()).add(host.path_id)
            return True
    raise StructuralError("membership index disagrees with host sequence")


def merge_into(path_map: PathMap, iv_cycle: Sequence[int]) -> PathMap:
    """Splice a closed vertex walk into the entry it intersects.

    The host is the lowest-id intersecting entry and the pivot is the first
    shared vertex in the host's sequence.  A cycle with no intersection
    signals a disconnected partition and raises.
    """
    if len(iv_cycle) < 2 or iv_cycle[0] != iv_cycle[-1]:
        raise ValidationFailure("iv_cycle must be a closed walk")
    steps = [(v, NO_REF) for v in iv_cycle[1:]]
    membership: dict[int, set[int]] = {}
    for e in path_map.entries:
        for v in e.vertex_walk():
            membership.setdefault(v, set()).add(e.path_id)
    if not _try_splice_into(path_map.entries, membership, iv_cycle[0], steps):
        raise StructuralError(
            f"cycle at {iv_cycle[0]} intersects no existing entry; the "
            f"partition component is disconnected from all boundary walks")
    return path_map


def run_phase1(local: LocalGraph, partition_id: int, level: int,
               id_base: int = 1,
               residual_boundary: dict[int, list[tuple[int, int, int]]] | None = None,
               ) -> PathMap:
    """Execute the full three-stage traversal over one local graph."""
    state = TraversalState(local)
    vertices = sorted(state.adj)
    boundary = local.boundary
    local_deg = {v: len(state.adj[v]) for v in vertices}

    odd_boundary = sorted(v for v in boundary if local_deg.get(v, 0) % 2 == 1)
    even_boundary = sorted(v for v in boundary if local_deg.get(v, 0) % 2 == 0)

    pm = PathMap(
        partition_id=partition_id,
        level=level,
        entries=[],
        residual_boundary=residual_boundary if residual_boundary is not None
        else {v: [] for v in sorted(boundary)},
        boundary_count=len(boundary),
        internal_count=len(set(vertices) - boundary),
        local_edge_count=len(local.edges),
        connected=_is_connected(local),
    )
    next_id = id_base
    membership: dict[int, set[int]] = {}

    def add_entry(kind: PathKind, source: int, sink: int, steps: list[Step]) -> PathEntry:
        nonlocal next_id
        entry = PathEntry(next_id, kind, source, sink, steps, len(steps))
        next_id += 1
        pm.entries.append(entry)
        for v in _walk_vertices(source, steps):
            membership.setdefault(v, set()).add(entry.path_id)
        return entry

    # Stage 1: paths between odd boundary vertices.  A walk flips the parity
    # of exactly its two endpoints, so every initially-odd vertex serves as a
    # start or an end exactly once and |OB|/2 paths come out.
    for v in odd_boundary:
        if state.unvisited_deg[v] % 2 == 0:
            continue
        steps = find_euler_path(state, v)
        end = steps[-1][0]
        if end == v or end not in boundary or local_deg[end] % 2 == 0:
            raise StructuralError(
                f"partition {partition_id}: walk from odd boundary {v} ended "
                f"at {end}, which is not a distinct odd boundary vertex")
        add_entry(PathKind.PATH, v, end, steps)
        pm.walks.append(WalkRecord(v, end, "odd-boundary", len(steps), False))

    for v in vertices:
        if state.unvisited_deg[v] % 2 == 1:
            raise StructuralError(
                f"partition {partition_id}: vertex {v} still has odd unvisited "
                f"degree after the odd-boundary stage")

    # Stage 2: one cycle (possibly empty) per even boundary vertex.
    for v in even_boundary:
        steps = find_euler_path(state, v)
        if steps and steps[-1][0] != v:
            raise StructuralError(
                f"partition {partition_id}: walk from even boundary {v} did "
                f"not close (ended at {steps[-1][0]})")
        if steps:
            add_entry(PathKind.CYCLE, v, v, steps)
        else:
            add_entry(PathKind.SINGLETON, v, v, [])
        pm.walks.append(WalkRecord(v, v, "even-boundary", len(steps), True))

    # Stage 3: cycles over whatever is left, spliced into earlier entries.
    pending: list[tuple[int, list[Step]]] = []
    ptr = 0
    while state.remaining:
        while state.unvisited_deg[vertices[ptr]] == 0:
            ptr += 1
        v = vertices[ptr]
        steps = find_euler_path(state, v)
        if not steps or steps[-1][0] != v:
            raise StructuralError(
                f"partition {partition_id}: leftover walk from {v} did not close")
        pm.walks.append(WalkRecord(v, v, "internal", len(steps), True))
        if not pm.entries:
            add_entry(PathKind.CYCLE, v, v, steps)
        elif not _try_splice_into(pm.entries, membership, v, steps):
            pending.append((v, steps))

    _resolve_pending(pm, membership, pending, add_entry)

    total = sum(e.step_count for e in pm.entries)
    if total != len(local.edges):
        raise StructuralError(
            f"partition {partition_id}: entries cover {total} edges, "
            f"expected {len(local.edges)}")
    pm.op_count = state.op_count
    return pm


def _resolve_pending(pm: PathMap, membership: dict[int, set[int]],
                     pending: list[tuple[int, list[Step]]], add_entry) -> None:
    """Merge leftover cycles to a fixpoint; survivors become standalone entries.

    A cycle that intersects no walk at this level belongs to a coarse
    component with no boundary here.  It still shares vertices with deeper
    spilled walks of the same run, so it is recorded as its own entry and
    picked up by the pivot expansion during the final unroll.
    """
    while pending:
        progressed = False
        for i, (start, steps) in enumerate(pending):
            if _try_splice_into(pm.entries, membership, start, steps):
                pending.pop(i)
                progressed = True
                break
        if progressed:
            continue
        merged = False
        for i in range(len(pending)):
            host_start, host_steps = pending[i]
            host_verts = set(_walk_vertices(host_start, host_steps))
            for j in range(i + 1, len(pending)):
                start, steps = pending[j]
                shared = host_verts & set(_walk_vertices(start, steps))
                if shared:
                    verts = _walk_vertices(host_start, host_steps)
                    pos = next(p for p, v in enumerate(verts) if v in shared)
                    q = _walk_vertices(start, steps).index(verts[pos])
                    rotated = steps[q:] + steps[:q]
                    pending[i] = (host_start,
                                  host_steps[:pos] + rotated + host_steps[pos:])
                    pending.pop(j)
                    merged = True
                    break
            if merged:
                break
        if not merged:
            break
    for start, steps in pending:
        entry = add_entry(PathKind.CYCLE, start, start, steps)
        pm.stranded_ids.append(entry.path_id)


def do_phase1(partition: Partition, id_base: int = 1, level: int = 0) -> PathMap:
    """Run phase 1 on a loaded partition (level-0 convenience entry point)."""
    local = local_graph_from_partition(partition)
    residual = {v: [] for v in sorted(partition.boundary)}
    for arc in partition.remote:
        residual[arc[0]].append(arc)
    return run_phase1(local, partition.partition_id, level, id_base, residual)
