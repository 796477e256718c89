"""Undirected multigraph with dense vertex ids, plus edge-list file I/O.

An undirected edge is conceptually a pair of directed arcs; the adjacency
keeps one neighbor entry per direction, so ``adj[u]`` lists ``v`` once per
parallel edge between them.  All public counts are in undirected edges.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import GraphFormatError, ValidationFailure


@dataclass
class Graph:
    """Immutable-by-convention undirected multigraph on vertices 0..n-1.

    ``original_ids`` maps dense ids back to the labels found in the source
    file when an id-compaction pass ran at load time; it is ``None`` for
    graphs whose ids were dense already.
    """

    vertex_count: int
    adj: list[list[int]]
    original_ids: list[int] | None = None
    _edge_count: int = field(default=-1, repr=False, compare=False)

    @property
    def edge_count(self) -> int:
        if self._edge_count < 0:
            object.__setattr__(self, "_edge_count", sum(len(a) for a in self.adj) // 2)
        return self._edge_count

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def edges(self) -> Iterator[tuple[int, int]]:
        """Yield each undirected edge once, as (min, max), with multiplicity."""
        for u, nbrs in enumerate(self.adj):
            for v in nbrs:
                if u <= v:
                    yield (u, v)

    def edge_multiset(self) -> Counter:
        return Counter(self.edges())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.vertex_count == other.vertex_count and self.adj == other.adj


def from_edges(vertex_count: int, edges: Iterable[tuple[int, int]],
               original_ids: list[int] | None = None) -> Graph:
    """Build a graph from undirected edge pairs, rejecting self-loops."""
    adj: list[list[int]] = [[] for _ in range(vertex_count)]
    for u, v in edges:
        if u == v:
            raise ValidationFailure(f"self-loop at vertex {u} is not allowed")
        if not (0 <= u < vertex_count and 0 <= v < vertex_count):
            raise ValidationFailure(f"edge ({u},{v}) references a vertex out of range")
        adj[u].append(v)
        adj[v].append(u)
    for nbrs in adj:
        nbrs.sort()
    return Graph(vertex_count, adj, original_ids)


def load_edge_list(path) -> Graph:
    """Read a whitespace-separated edge list, one undirected edge per line.

    Lines starting with ``#`` are comments.  ``u v`` and ``v u`` name the
    same edge; a repeated pair (either orientation) is a parallel edge.
    Vertex labels are compacted to dense 0-based ids; the original labels
    are kept on the returned graph for reporting.
    """
    pairs: list[tuple[int, int]] = []
    labels: set[int] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) != 2:
                raise GraphFormatError(f"{path}:{lineno}: expected 'u v', got {text!r}")
            try:
                a, b = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise GraphFormatError(f"{path}:{lineno}: non-integer vertex id") from exc
            if a < 0 or b < 0:
                raise GraphFormatError(f"{path}:{lineno}: negative vertex id")
            if a == b:
                raise GraphFormatError(f"{path}:{lineno}: self-loop {a}-{b} rejected")
            pairs.append((min(a, b), max(a, b)))
            labels.add(a)
            labels.add(b)

    original = sorted(labels)
    dense = {label: i for i, label in enumerate(original)}
    compacted = original != list(range(len(original)))
    edges = [(dense[a], dense[b]) for a, b in pairs]
    return from_edges(len(original), edges, original if compacted else None)


def save_edge_list(graph: Graph, path) -> None:
    """Write one undirected edge per line, in sorted order, original labels."""
    ids = graph.original_ids
    with open(path, "w", encoding="utf-8") as fh:
        for u, v in sorted(graph.edges()):
            if ids is not None:
                u, v = ids[u], ids[v]
            fh.write(f"{u} {v}\n")


def connected_components(graph: Graph, vertices: Sequence[int] | None = None) -> list[list[int]]:
    """Components over the given vertices (default: all edge-bearing ones)."""
    if vertices is None:
        vertices = [v for v in range(graph.vertex_count) if graph.adj[v]]
    pending = set(vertices)
    components = []
    while pending:
        start = min(pending)
        seen = {start}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for w in graph.adj[u]:
                if w in pending and w not in seen:
                    seen.add(w)
                    queue.append(w)
        pending -= seen
        components.append(sorted(seen))
    return components


@dataclass
class EulerianReport:
    """Result of the Eulerian-precondition check."""

    passed: bool
    odd_vertices: list[int]
    component_count: int
    components: list[list[int]]

    def message(self) -> str:
        if self.passed:
            return "graph is Eulerian"
        problems = []
        if self.odd_vertices:
            head = ", ".join(map(str, self.odd_vertices[:10]))
            more = "..." if len(self.odd_vertices) > 10 else ""
            problems.append(f"{len(self.odd_vertices)} odd-degree vertices ({head}{more})")
        if self.component_count > 1:
            problems.append(f"{self.component_count} edge-bearing components")
        return "; ".join(problems)


def validate_eulerian(graph: Graph) -> EulerianReport:
    """Pass iff every degree is even and edge-bearing vertices are connected."""
    odd = [v for v in range(graph.vertex_count) if graph.degree(v) % 2 == 1]
    comps = connected_components(graph)
    return EulerianReport(
        passed=not odd and len(comps) <= 1,
        odd_vertices=odd,
        component_count=len(comps),
        components=comps,
    )
