"""Euler circuit container, validation, and circuit file I/O."""

from __future__ import annotations

import struct
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import GraphFormatError
from .graph import Graph


@dataclass
class EulerCircuit:
    """A closed walk given as a vertex sequence v0, v1, ..., vm with v0 == vm."""

    walk: list[int]

    @property
    def edge_count(self) -> int:
        return max(len(self.walk) - 1, 0)

    def edges(self) -> Iterator[tuple[int, int]]:
        for a, b in zip(self.walk, self.walk[1:]):
            yield (a, b) if a <= b else (b, a)

    def edge_multiset(self) -> Counter:
        return Counter(self.edges())


@dataclass
class CircuitReport:
    passed: bool
    closed: bool
    missing: list[tuple[int, int]]
    duplicated: list[tuple[int, int]]
    not_edges: list[tuple[int, int]]

    def message(self) -> str:
        if self.passed:
            return "circuit is a valid Euler circuit"
        problems = []
        if not self.closed:
            problems.append("walk is not closed")
        if self.not_edges:
            problems.append(f"{len(self.not_edges)} steps are not graph edges")
        if self.duplicated:
            problems.append(f"{len(self.duplicated)} edges traversed more than once")
        if self.missing:
            problems.append(f"{len(self.missing)} edges never traversed")
        return "; ".join(problems)


def validate_circuit(graph: Graph, circuit: EulerCircuit) -> CircuitReport:
    """Check closure and exact undirected edge-multiset coverage."""
    walk = circuit.walk
    closed = len(walk) >= 1 and walk[0] == walk[-1]
    want = graph.edge_multiset()
    got = circuit.edge_multiset()
    missing = sorted((want - got).elements())
    extra = got - want
    # A surplus traversal of a real edge is a duplicate; of a non-edge, a
    # structural mistake. Report the two separately.
    duplicated = sorted(e for e, k in extra.items() for _ in range(k) if e in want)
    not_edges = sorted(e for e, k in extra.items() for _ in range(k) if e not in want)
    passed = closed and not missing and not duplicated and not not_edges
    return CircuitReport(passed, closed, missing, duplicated, not_edges)


def save_circuit_text(walk: Iterable[int], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for v in walk:
            fh.write(f"{v}\n")


def load_circuit_text(path) -> EulerCircuit:
    walk = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text:
                continue
            try:
                walk.append(int(text))
            except ValueError as exc:
                raise GraphFormatError(f"{path}:{lineno}: non-integer vertex id") from exc
    return EulerCircuit(walk)


_LEN = struct.Struct("<q")


def save_circuit_binary(walk: Iterable[int], path) -> None:
    """Length-prefixed little-endian int64 sequence."""
    data = list(walk)
    with open(path, "wb") as fh:
        fh.write(_LEN.pack(len(data)))
        fh.write(struct.pack(f"<{len(data)}q", *data))


def load_circuit_binary(path) -> EulerCircuit:
    with open(path, "rb") as fh:
        raw = fh.read(_LEN.size)
        if len(raw) != _LEN.size:
            raise GraphFormatError(f"{path}: truncated circuit header")
        (count,) = _LEN.unpack(raw)
        payload = fh.read(8 * count)
        if len(payload) != 8 * count:
            raise GraphFormatError(f"{path}: truncated circuit body")
        return EulerCircuit(list(struct.unpack(f"<{count}q", payload)))
