"""Reconstruction of the full circuit from spilled walk fragments.

The root partition's walk is expanded step by step.  A step that carries a
ref is replaced inline by the referenced lower-level walk, oriented to the
step's direction (undirected edges may be traversed backwards).  Whenever a
vertex is emitted, the occurrence index is consulted: an unconsumed entry
whose walk passes through that vertex is expanded there as a closed loop.

Such an entry may be buried under a chain of references (its vertex occurs
inside a path that a higher-level cycle consumed), in which case the whole
ancestor cycle is emitted rotated so that it starts and ends at the pivot:
second halves of the chain on the way out, wrap around the ancestor, first
halves on the way back in.  Everything runs on one explicit frame stack, so
deep merge chains cannot hit the interpreter recursion limit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .circuits import EulerCircuit
from .errors import CoverageError, StructuralError
from .phase1 import NO_REF, PathKind, Step
from .spill import SpillRecord, SpillStore


@dataclass
class UnrollStats:
    emitted_vertices: int = 0
    edge_count: int = 0
    pivot_expansions: int = 0
    rotations: int = 0
    max_stack_depth: int = 0
    max_resident_steps: int = 0


@dataclass
class _Frame:
    steps: list[Step]
    idx: int
    end: int


def _orient(record: SpillRecord, enter: int, leave: int) -> tuple[list[Step], bool]:
    """Steps of a referenced path, walked from ``enter`` to ``leave``."""
    if record.kind is not PathKind.PATH:
        raise StructuralError(
            f"entry {record.path_id} is {record.kind.name}, but only paths "
            f"can back a coarse edge")
    if record.source == enter and record.sink == leave:
        return list(record.steps), False
    if record.source == leave and record.sink == enter:
        verts = record.vertex_walk()
        refs = [r for _, r in record.steps]
        rev = list(zip(verts[-2::-1], refs[::-1]))
        return rev, True
    raise StructuralError(
        f"entry {record.path_id} joins {record.source}-{record.sink}, not "
        f"{enter}-{leave}")


class _Unroller:
    def __init__(self, root_ids: list[int], spill: SpillStore):
        self.spill = spill
        self.root_ids = list(root_ids)
        self.index = spill.occurrence_index()
        self.consumed: set[int] = set()
        self.stack: list[_Frame] = []
        self.stats = UnrollStats()
        self.cur = -1
        self._resident = 0

    # -- stack bookkeeping ------------------------------------------------

    def _push(self, steps: list[Step], start: int, end: int) -> None:
        if start > end:
            raise StructuralError("bad frame range")
        if start == end:
            return
        self.stack.append(_Frame(steps, start, end))
        self._resident += end - start
        self.stats.max_stack_depth = max(self.stats.max_stack_depth, len(self.stack))
        self.stats.max_resident_steps = max(self.stats.max_resident_steps, self._resident)

    # -- pivot machinery ---------------------------------------------------

    def _ascend(self, path_id: int) -> list[tuple[int, int]]:
        """Chain [(id, stored step pos of its ref in the parent), ...] top first.

        The bottom element's second slot is unused (filled with -1).
        """
        chain = [(path_id, -1)]
        cur = path_id
        while cur in self.spill.consumer:
            parent, pos = self.spill.consumer[cur]
            chain.insert(0, (parent, -1))
            chain[1] = (chain[1][0], pos)
            cur = parent
        return chain

    def _expand_rotated(self, chain: list[tuple[int, int]], deep_stored_pos: int) -> None:
        """Emit the top cycle of ``chain`` as a loop rotated at the pivot.

        ``chain`` runs top cycle first; each element's second slot is the
        stored step position inside its parent (unused for the top).  The
        pivot vertex sits at ``deep_stored_pos`` in the bottom entry's
        stored walk.
        """
        top = self.spill.read(chain[0][0])
        if top.kind is PathKind.PATH:
            raise StructuralError(
                f"entry {top.path_id} is an unconsumed path with no consumer")
        oriented: list[list[Step]] = [list(top.steps)]
        reversed_flags = [False]
        enter_verts = [top.source]
        link_steps: list[int] = []

        for depth in range(1, len(chain)):
            child_id = chain[depth][0]
            parent_steps = oriented[depth - 1]
            s = next(i for i, (_, r) in enumerate(parent_steps) if r == child_id)
            link_steps.append(s)
            before = enter_verts[depth - 1] if s == 0 else parent_steps[s - 1][0]
            after = parent_steps[s][0]
            child = self.spill.read(child_id)
            steps, rev = _orient(child, before, after)
            oriented.append(steps)
            reversed_flags.append(rev)
            enter_verts.append(before)

        deepest = len(chain) - 1
        pos = deep_stored_pos
        if reversed_flags[deepest]:
            pos = len(oriented[deepest]) - pos

        for entry_id, _ in chain:
            self.consumed.add(entry_id)
        self.stats.rotations += 1

        # Processing order: out of the chain from the pivot, around the top
        # cycle, back down to the pivot.  Pushed in reverse (LIFO).
        segments: list[tuple[list[Step], int, int]] = []
        segments.append((oriented[deepest], pos, len(oriented[deepest])))
        for depth in range(deepest - 1, -1, -1):
            s = link_steps[depth]
            segments.append((oriented[depth], s + 1, len(oriented[depth])))
        for depth in range(deepest):
            segments.append((oriented[depth], 0, link_steps[depth]))
        segments.append((oriented[deepest], 0, pos))
        for steps, a, b in reversed(segments):
            self._push(steps, a, b)

    def _check_pivots(self, v: int) -> None:
        for path_id, pos in self.index.get(v, ()):
            if path_id in self.consumed:
                continue
            chain = self._ascend(path_id)
            top_id = chain[0][0]
            if top_id in self.consumed:
                continue
            top = self.spill.read(top_id)
            if top.kind is PathKind.SINGLETON:
                self.consumed.add(top_id)
                continue
            self.stats.pivot_expansions += 1
            self._expand_rotated(chain, pos)
            # The inserted loop returns to v; remaining occurrences get
            # re-checked on that final emission.
            return

    # -- main loop ----------------------------------------------------------

    def _pick_primary(self, candidates: list[int]) -> tuple[int, int, int] | None:
        best: tuple[int, int, int] | None = None
        for path_id in sorted(candidates):
            record = self.spill.read(path_id)
            if not record.steps:
                continue
            for pos, v in enumerate(record.vertex_walk()):
                key = (v, path_id, pos)
                if best is None or key < best:
                    best = key
        return best

    def run(self) -> Iterator[int]:
        best = self._pick_primary(self.root_ids)
        if best is None:
            # The root walk can be empty when edgeless partitions pad the
            # tree with virtual merges; the circuit then lives in whichever
            # lower-level cycles were never referenced upward.
            tops = [pid for pid in self.spill.path_ids
                    if pid not in self.spill.consumer]
            best = self._pick_primary(tops)
        if best is None:
            raise StructuralError("no walk entries recorded; nothing to unroll")
        start, primary_id, start_pos = best
        primary = self.spill.read(primary_id)
        if primary.kind is PathKind.PATH:
            raise StructuralError("root entry is an open path; the run did not "
                                  "finish at a boundary-free root")
        if start_pos == len(primary.steps):
            start_pos = 0

        self._expand_rotated([(primary_id, -1)], start_pos)
        self.cur = start
        self.stats.emitted_vertices += 1
        yield start
        self._check_pivots(start)

        while self.stack:
            frame = self.stack[-1]
            if frame.idx == frame.end:
                self.stack.pop()
                continue
            v, ref = frame.steps[frame.idx]
            frame.idx += 1
            self._resident -= 1
            if ref != NO_REF:
                if ref in self.consumed:
                    raise StructuralError(f"entry {ref} consumed twice")
                child = self.spill.read(ref)
                steps, _ = _orient(child, self.cur, v)
                self.consumed.add(ref)
                self._push(steps, 0, len(steps))
                continue
            self.cur = v
            self.stats.emitted_vertices += 1
            self.stats.edge_count += 1
            yield v
            self._check_pivots(v)

        if self.cur != start:
            raise StructuralError(
                f"unrolled walk ended at {self.cur}, expected to close at {start}")
        missing = sorted(set(self.spill.path_ids) - self.consumed)
        if missing:
            raise CoverageError(
                f"{len(missing)} recorded entries were never reached "
                f"(first: {missing[:5]}); the input graph is disconnected "
                f"or the spill is corrupt", missing)


def unroll(root_ids: list[int], spill: SpillStore,
           stats: UnrollStats | None = None) -> Iterator[int]:
    """Stream the closed circuit vertex by vertex."""
    worker = _Unroller(root_ids, spill)
    if stats is not None:
        worker.stats = stats
    return worker.run()


def unroll_circuit(root_ids: list[int], spill: SpillStore,
                   ) -> tuple[EulerCircuit, UnrollStats]:
    """Materialize the full circuit (tests and small runs)."""
    stats = UnrollStats()
    walk = list(unroll(root_ids, spill, stats))
    return EulerCircuit(walk), stats
