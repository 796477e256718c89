"""Sequential Hierholzer reference used for differential testing.

Classic stack formulation: walk greedily until stuck, then backtrack,
emitting vertices; the reversed emission order is an Euler circuit.
Edge selection is lowest-neighbor-first through a per-vertex cursor,
which makes the output deterministic and the runtime linear in |E|.
"""

from __future__ import annotations

from .circuits import EulerCircuit
from .errors import ValidationFailure
from .graph import Graph, validate_eulerian


def hierholzer_ops(graph: Graph, start: int | None = None) -> tuple[EulerCircuit, int]:
    """Return the circuit plus the number of cursor-advance operations."""
    report = validate_eulerian(graph)
    if not report.passed:
        raise ValidationFailure(f"not Eulerian: {report.message()}")

    if graph.edge_count == 0:
        v = start if start is not None else 0
        return EulerCircuit([v] if graph.vertex_count else []), 0

    if start is None:
        start = next(v for v in range(graph.vertex_count) if graph.adj[v])
    elif not graph.adj[start]:
        raise ValidationFailure(f"start vertex {start} has no edges")

    # Arc instances: adj entries are sorted, so pairing the k-th copy of v in
    # adj[u] with the k-th copy of u in adj[v] assigns each undirected edge
    # one id shared by both directions.
    edge_ids: list[list[int]] = [[] for _ in range(graph.vertex_count)]
    next_id = 0
    seen: dict[tuple[int, int], list[int]] = {}
    for u in range(graph.vertex_count):
        for v in graph.adj[u]:
            if u < v:
                seen.setdefault((u, v), []).append(next_id)
                edge_ids[u].append(next_id)
                next_id += 1
            else:
                edge_ids[u].append(seen[(v, u)].pop(0))

    visited = bytearray(next_id)
    cursor = [0] * graph.vertex_count
    ops = 0

    stack = [start]
    emitted: list[int] = []
    while stack:
        u = stack[-1]
        nbrs = graph.adj[u]
        ids = edge_ids[u]
        i = cursor[u]
        while i < len(nbrs) and visited[ids[i]]:
            i += 1
            ops += 1
        cursor[u] = i
        if i == len(nbrs):
            emitted.append(stack.pop())
        else:
            visited[ids[i]] = 1
            cursor[u] = i + 1
            ops += 1
            stack.append(nbrs[i])

    emitted.reverse()
    return EulerCircuit(emitted), ops


def hierholzer(graph: Graph, start: int | None = None) -> EulerCircuit:
    """Euler circuit of an Eulerian graph, deterministic per start vertex."""
    circuit, _ = hierholzer_ops(graph, start)
    return circuit
