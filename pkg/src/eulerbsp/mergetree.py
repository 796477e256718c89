"""Static merge schedule built from the meta-graph.

Each level pairs partitions by greedy maximal weighted matching (heaviest
meta-edge first), the larger partition id of a pair becomes the parent, and
the meta-graph is rebuilt with summed weights until one vertex remains.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import StructuralError, ValidationFailure
from .partitioning import MetaGraph


@dataclass(frozen=True)
class MergePair:
    a: int
    b: int

    @property
    def parent(self) -> int:
        return max(self.a, self.b)

    @property
    def child(self) -> int:
        return min(self.a, self.b)


@dataclass
class MatchingResult:
    pairs: list[MergePair]
    virtual_pairs: list[MergePair]
    unmatched: list[int]

    @property
    def all_pairs(self) -> list[MergePair]:
        return self.pairs + self.virtual_pairs


@dataclass
class MergeLevel:
    index: int
    pairs: list[MergePair]
    virtual_pairs: list[MergePair] = field(default_factory=list)
    carried: list[int] = field(default_factory=list)

    @property
    def all_pairs(self) -> list[MergePair]:
        return self.pairs + self.virtual_pairs


@dataclass
class MergeTree:
    leaves: list[int]
    levels: list[MergeLevel]
    root: int

    @property
    def height(self) -> int:
        return len(self.levels)

    @property
    def predicted_supersteps(self) -> int:
        return self.height + 1

    def active_ancestor(self, leaf: int, level: int) -> int:
        """The merged partition containing ``leaf`` after ``level`` merges."""
        pid = leaf
        for lvl in self.levels[:level]:
            for pair in lvl.all_pairs:
                if pid in (pair.a, pair.b):
                    pid = pair.parent
                    break
        return pid

    def merge_level_of(self, a: int, b: int) -> int:
        """First level (1-based) at which two leaves share an ancestor."""
        for level in range(1, self.height + 1):
            if self.active_ancestor(a, level) == self.active_ancestor(b, level):
                return level
        raise StructuralError(f"leaves {a} and {b} never merge in this tree")

    def to_dict(self) -> dict:
        return {
            "leaves": self.leaves,
            "root": self.root,
            "predicted_supersteps": self.predicted_supersteps,
            "levels": [
                {
                    "level": lvl.index,
                    "pairs": [{"a": p.a, "b": p.b, "parent": p.parent}
                              for p in lvl.pairs],
                    "virtual_pairs": [{"a": p.a, "b": p.b, "parent": p.parent}
                                      for p in lvl.virtual_pairs],
                    "carried": lvl.carried,
                }
                for lvl in self.levels
            ],
        }

    def render(self) -> str:
        lines = [f"root: P{self.root}  ({self.predicted_supersteps} supersteps)"]
        for lvl in reversed(self.levels):
            parts = [f"P{p.a}+P{p.b}->P{p.parent}" for p in lvl.pairs]
            parts += [f"P{p.a}+P{p.b}->P{p.parent} (virtual)" for p in lvl.virtual_pairs]
            parts += [f"P{c} carried" for c in lvl.carried]
            lines.append(f"  level {lvl.index}: " + ", ".join(parts))
        return "\n".join(lines)


def maximal_matching(vertices, weights: dict[tuple[int, int], int]) -> MatchingResult:
    """Greedy maximal matching, heaviest edge first.

    Ties break on the lexicographically smaller vertex pair so the result
    is stable across runs.  Vertices left unmatched (the greedy result is
    maximal, so no surviving edge joins two of them) are paired with
    zero-weight virtual edges; with an odd count the vertex with the least
    total incident weight sits out.
    """
    vertices = sorted(vertices)
    order = sorted(weights.items(), key=lambda kv: (-kv[1], kv[0]))
    used: set[int] = set()
    pairs = []
    for (a, b), _ in order:
        if a not in used and b not in used:
            pairs.append(MergePair(a, b))
            used.add(a)
            used.add(b)

    leftover = [v for v in vertices if v not in used]
    virtual = []
    unmatched: list[int] = []
    if len(leftover) % 2 == 1:
        incident = {v: 0 for v in leftover}
        for (a, b), w in weights.items():
            if a in incident:
                incident[a] += w
            if b in incident:
                incident[b] += w
        skip = min(leftover, key=lambda v: (incident[v], v))
        leftover.remove(skip)
        unmatched.append(skip)
    for i in range(0, len(leftover), 2):
        virtual.append(MergePair(leftover[i], leftover[i + 1]))
    return MatchingResult(pairs, virtual, unmatched)


def rebuild_meta_graph(previous: MetaGraph, pairs: list[MergePair]) -> MetaGraph:
    """Collapse matched pairs into their parents, summing outside weights."""
    rename = {}
    for p in pairs:
        for v in (p.a, p.b):
            if v not in previous.vertices:
                raise StructuralError(f"pair references unknown meta-vertex {v}")
            rename[v] = p.parent
    vertices = {rename.get(v, v) for v in previous.vertices}
    weights: dict[tuple[int, int], int] = {}
    for (a, b), w in previous.weights.items():
        ra, rb = rename.get(a, a), rename.get(b, b)
        if ra == rb:
            continue
        key = (min(ra, rb), max(ra, rb))
        weights[key] = weights.get(key, 0) + w
    return MetaGraph(vertices, weights)


def generate_merge_tree(meta: MetaGraph) -> MergeTree:
    """Repeated matching until a single meta-vertex remains."""
    if not meta.vertices:
        raise ValidationFailure("meta-graph has no vertices")
    leaves = sorted(meta.vertices)
    levels = []
    current = meta
    index = 0
    while len(current.vertices) > 1:
        result = maximal_matching(current.vertices, current.weights)
        levels.append(MergeLevel(index, result.pairs, result.virtual_pairs,
                                 result.unmatched))
        current = rebuild_meta_graph(current, result.pairs + result.virtual_pairs)
        index += 1
    return MergeTree(leaves, levels, next(iter(current.vertices)))
