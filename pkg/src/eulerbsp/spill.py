"""Disk store for discovered walk sequences, indexed for random access.

One file per (partition, level).  Each record is length-prefixed:

    int64 payload_bytes
    int64 path_id, kind, source, sink, step_count
    step_count x (int64 vertex, int64 ref)     ref == -1: original edge

The in-memory index keeps byte offsets per path id, the consumer link for
every referenced entry (which record's step stands for it), and, on demand,
the literal vertex-occurrence index the final unroll uses to find pivots.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass
from pathlib import Path

from .errors import StructuralError
from .phase1 import NO_REF, PathEntry, PathKind, Step

_HEADER = struct.Struct("<5q")
_LEN = struct.Struct("<q")

_KIND_CODE = {PathKind.PATH: 1, PathKind.CYCLE: 2, PathKind.SINGLETON: 3}
_CODE_KIND = {v: k for k, v in _KIND_CODE.items()}


@dataclass
class SpillRecord:
    path_id: int
    kind: PathKind
    source: int
    sink: int
    steps: list[Step]
    partition_id: int
    level: int

    def vertex_walk(self) -> list[int]:
        return [self.source] + [v for v, _ in self.steps]


@dataclass
class _Location:
    file: Path
    offset: int
    partition_id: int
    level: int


class SpillStore:
    """Writer plus random-access reader for spilled path entries."""

    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._index: dict[int, _Location] = {}
        self.consumer: dict[int, tuple[int, int]] = {}
        self._cache: dict[int, SpillRecord] = {}

    def __len__(self) -> int:
        return len(self._index)

    @property
    def path_ids(self) -> list[int]:
        return sorted(self._index)

    def file_for(self, partition_id: int, level: int) -> Path:
        return self.directory / f"spill_l{level}_p{partition_id}.bin"

    def write_entries(self, partition_id: int, level: int,
                      entries: list[PathEntry]) -> None:
        """Append one partition-level's entries and record consumer links."""
        path = self.file_for(partition_id, level)
        buf = io.BytesIO()
        offsets = {}
        for entry in entries:
            if entry.path_id in self._index:
                raise StructuralError(f"duplicate path id {entry.path_id}")
            if entry.steps is None:
                raise StructuralError(f"entry {entry.path_id} has no steps to spill")
            offsets[entry.path_id] = buf.tell()
            payload = _HEADER.pack(entry.path_id, _KIND_CODE[entry.kind],
                                   entry.source, entry.sink, len(entry.steps))
            flat = [x for step in entry.steps for x in step]
            payload += struct.pack(f"<{len(flat)}q", *flat)
            buf.write(_LEN.pack(len(payload)))
            buf.write(payload)
        base = path.stat().st_size if path.exists() else 0
        with open(path, "ab") as fh:
            fh.write(buf.getvalue())
        for entry in entries:
            self._index[entry.path_id] = _Location(
                path, base + offsets[entry.path_id], partition_id, level)
            for pos, (_, ref) in enumerate(entry.steps, start=1):
                if ref != NO_REF:
                    if ref in self.consumer:
                        raise StructuralError(f"path {ref} referenced twice")
                    self.consumer[ref] = (entry.path_id, pos)

    def read(self, path_id: int) -> SpillRecord:
        cached = self._cache.get(path_id)
        if cached is not None:
            return cached
        loc = self._index.get(path_id)
        if loc is None:
            raise StructuralError(f"unknown path id {path_id}")
        with open(loc.file, "rb") as fh:
            fh.seek(loc.offset)
            (size,) = _LEN.unpack(fh.read(_LEN.size))
            payload = fh.read(size)
        if len(payload) != size:
            raise StructuralError(f"truncated spill record for path {path_id}")
        pid, kind, source, sink, count = _HEADER.unpack_from(payload)
        if pid != path_id:
            raise StructuralError(f"spill index points at record {pid}, wanted {path_id}")
        flat = struct.unpack_from(f"<{2 * count}q", payload, _HEADER.size)
        steps = list(zip(flat[0::2], flat[1::2]))
        record = SpillRecord(pid, _CODE_KIND[kind], source, sink, steps,
                             loc.partition_id, loc.level)
        self._cache[record.path_id] = record
        if len(self._cache) > 64:
            self._cache.pop(next(iter(self._cache)))
        return record

    def metadata(self, path_id: int) -> tuple[int, int]:
        loc = self._index[path_id]
        return loc.partition_id, loc.level

    def occurrence_index(self) -> dict[int, list[tuple[int, int]]]:
        """vertex -> sorted (path_id, vertex position) across all records.

        Position 0 is the source; position k is the vertex reached by step k.
        """
        index: dict[int, list[tuple[int, int]]] = {}
        for path_id in self.path_ids:
            record = self.read(path_id)
            for pos, v in enumerate(record.vertex_walk()):
                index.setdefault(v, []).append((path_id, pos))
        for occurrences in index.values():
            occurrences.sort()
        return index
