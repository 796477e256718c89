"""Synthetic input tooling: power-law graph generation and eulerization.

The generator samples edges by recursive quadrant descent over the
adjacency matrix (vectorized with numpy), drops self-loops and duplicates,
and resamples until the requested edge count is reached, so the output is
a simple graph and deterministic for a fixed seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationFailure
from .graph import Graph, connected_components, from_edges

# Graph500 reference quadrant weights: heavy skew keeps the odd-degree
# fraction low, which keeps eulerization cheap on large inputs.
DEFAULT_PROBABILITIES = (0.57, 0.19, 0.19, 0.05)


@dataclass
class GeneratorConfig:
    vertex_count: int
    average_degree: float = 5.0
    probabilities: tuple[float, float, float, float] = DEFAULT_PROBABILITIES
    seed: int = 0

    def __post_init__(self):
        if self.vertex_count < 3:
            raise ValidationFailure("vertex_count must be at least 3")
        if self.average_degree < 2:
            raise ValidationFailure("average_degree must be at least 2")
        if abs(sum(self.probabilities) - 1.0) > 1e-9:
            raise ValidationFailure("quadrant probabilities must sum to 1")
        if any(p < 0 for p in self.probabilities):
            raise ValidationFailure("quadrant probabilities must be non-negative")

    @property
    def target_edges(self) -> int:
        return round(self.vertex_count * self.average_degree / 2)


def generate_power_law(config: GeneratorConfig) -> Graph:
    """Sample a simple undirected power-law graph of the configured size."""
    n = config.target_edges
    capacity = config.vertex_count * (config.vertex_count - 1) // 2
    if n > capacity:
        raise ValidationFailure(
            f"{n} edges requested but a simple graph on {config.vertex_count} "
            f"vertices holds at most {capacity}")

    bits = max(1, math.ceil(math.log2(config.vertex_count)))
    a, b, c, d = config.probabilities
    # Per bit, the quadrant choice fixes one bit of each endpoint.
    quadrant_probs = np.array([a, b, c, d])
    cumulative = np.cumsum(quadrant_probs)

    rng = np.random.default_rng(config.seed)
    chosen: set[int] = set()
    edges: list[tuple[int, int]] = []
    stalled = 0
    while len(edges) < n:
        batch = max(1024, 2 * (n - len(edges)))
        r = rng.random((batch, bits))
        quadrant = np.searchsorted(cumulative, r, side="right")
        u_bits = (quadrant >> 1) & 1
        v_bits = quadrant & 1
        weights = 1 << np.arange(bits)
        u = (u_bits * weights).sum(axis=1)
        v = (v_bits * weights).sum(axis=1)
        ok = (u < config.vertex_count) & (v < config.vertex_count) & (u != v)
        u, v = u[ok], v[ok]
        lo = np.minimum(u, v)
        hi = np.maximum(u, v)
        keys = lo * config.vertex_count + hi
        progressed = False
        for key, x, y in zip(keys.tolist(), lo.tolist(), hi.tolist()):
            if key in chosen:
                continue
            chosen.add(key)
            edges.append((x, y))
            progressed = True
            if len(edges) == n:
                break
        stalled = 0 if progressed else stalled + 1
        if stalled > 200:
            raise ValidationFailure(
                "edge sampling stalled; the probability matrix cannot reach "
                "enough distinct vertex pairs for the requested edge count")
    edges.sort()
    return from_edges(config.vertex_count, edges)


@dataclass
class EulerizeResult:
    graph: Graph
    added_edges: list[tuple[int, int]] = field(default_factory=list)
    bridge_edges: list[tuple[int, int]] = field(default_factory=list)

    @property
    def added_count(self) -> int:
        return len(self.added_edges) + len(self.bridge_edges)

    @property
    def bridge_endpoints(self) -> set[int]:
        return {v for e in self.bridge_edges for v in e}


def eulerize(graph: Graph, seed: int = 0) -> EulerizeResult:
    """Add edges so every degree is even and edge-bearing vertices connect.

    Odd vertices are shuffled and paired consecutively; a pair that is
    already adjacent is swapped with another pair when a bounded number of
    retries finds a swap that fixes it, otherwise the parallel edge stands.
    Disconnected components are first chained with parallel edge pairs
    (degree +2 at each endpoint keeps parity), preferring odd endpoints so
    even vertices keep their exact degree.
    """
    if graph.vertex_count == 0:
        raise ValidationFailure("cannot eulerize an empty graph")
    rng = np.random.default_rng(seed)

    edges = list(graph.edges())
    bridge_edges: list[tuple[int, int]] = []

    comps = connected_components(graph)
    if len(comps) > 1:
        degree = [graph.degree(v) for v in range(graph.vertex_count)]
        anchors = []
        for comp in comps:
            odd = [v for v in comp if degree[v] % 2 == 1]
            anchors.append(odd[0] if odd else comp[0])
        for left, right in zip(anchors, anchors[1:]):
            u, v = min(left, right), max(left, right)
            bridge_edges.extend([(u, v), (u, v)])
        edges.extend(bridge_edges)

    work = from_edges(graph.vertex_count, edges)
    odd = [v for v in range(work.vertex_count) if work.degree(v) % 2 == 1]
    order = rng.permutation(len(odd))
    odd = [odd[i] for i in order]

    adjacent = {(min(u, v), max(u, v)) for u, v in work.edges()}
    pairs = [[odd[i], odd[i + 1]] for i in range(0, len(odd), 2)]

    def is_clear(x, y):
        return (min(x, y), max(x, y)) not in adjacent

    for i, pair in enumerate(pairs):
        if is_clear(*pair) or len(pairs) < 2:
            continue
        for _ in range(8):
            j = int(rng.integers(len(pairs)))
            if j == i:
                continue
            other = pairs[j]
            if is_clear(pair[0], other[1]) and is_clear(other[0], pair[1]):
                pair[1], other[1] = other[1], pair[1]
                break

    added = [(min(u, v), max(u, v)) for u, v in pairs]
    edges.extend(added)
    return EulerizeResult(from_edges(graph.vertex_count, edges), added, bridge_edges)
