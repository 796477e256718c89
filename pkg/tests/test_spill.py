import pytest

from eulerbsp import PathKind, SpillStore, StructuralError
from eulerbsp.phase1 import NO_REF, PathEntry


def entry(pid, kind, source, sink, steps):
    return PathEntry(pid, kind, source, sink, steps, len(steps))


def test_write_read_round_trip(tmp_path):
    store = SpillStore(tmp_path)
    entries = [
        entry(100, PathKind.PATH, 1, 3, [(2, NO_REF), (3, NO_REF)]),
        entry(101, PathKind.CYCLE, 4, 4, [(5, NO_REF), (4, 100)]),
        entry(102, PathKind.SINGLETON, 9, 9, []),
    ]
    store.write_entries(2, 0, entries)
    rec = store.read(100)
    assert rec.kind is PathKind.PATH
    assert rec.source == 1 and rec.sink == 3
    assert rec.steps == [(2, NO_REF), (3, NO_REF)]
    assert rec.vertex_walk() == [1, 2, 3]
    assert store.read(102).steps == []
    assert store.metadata(101) == (2, 0)
    assert len(store) == 3


def test_consumer_links_recorded(tmp_path):
    store = SpillStore(tmp_path)
    store.write_entries(0, 0, [entry(7, PathKind.PATH, 0, 1, [(1, NO_REF)])])
    store.write_entries(0, 1, [entry(8, PathKind.CYCLE, 0, 0,
                                     [(1, 7), (0, NO_REF)])])
    assert store.consumer == {7: (8, 1)}


def test_duplicate_path_id_rejected(tmp_path):
    store = SpillStore(tmp_path)
    store.write_entries(0, 0, [entry(7, PathKind.PATH, 0, 1, [(1, NO_REF)])])
    with pytest.raises(StructuralError):
        store.write_entries(1, 0, [entry(7, PathKind.PATH, 0, 1, [(1, NO_REF)])])


def test_double_reference_rejected(tmp_path):
    store = SpillStore(tmp_path)
    store.write_entries(0, 0, [entry(7, PathKind.PATH, 0, 1, [(1, NO_REF)])])
    with pytest.raises(StructuralError):
        store.write_entries(0, 1, [entry(8, PathKind.CYCLE, 0, 0,
                                         [(1, 7), (0, 7)])])


def test_unknown_id_rejected(tmp_path):
    store = SpillStore(tmp_path)
    with pytest.raises(StructuralError):
        store.read(404)


def test_one_file_per_partition_level(tmp_path):
    store = SpillStore(tmp_path)
    store.write_entries(3, 0, [entry(1, PathKind.PATH, 0, 1, [(1, NO_REF)])])
    store.write_entries(3, 1, [entry(2, PathKind.PATH, 0, 1, [(1, NO_REF)])])
    store.write_entries(5, 0, [entry(3, PathKind.PATH, 0, 1, [(1, NO_REF)])])
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["spill_l0_p3.bin", "spill_l0_p5.bin", "spill_l1_p3.bin"]


def test_occurrence_index_positions(tmp_path):
    store = SpillStore(tmp_path)
    store.write_entries(0, 0, [
        entry(10, PathKind.PATH, 5, 7, [(6, NO_REF), (7, NO_REF)]),
        entry(11, PathKind.CYCLE, 6, 6, [(8, NO_REF), (6, NO_REF)]),
    ])
    index = store.occurrence_index()
    assert index[6] == [(10, 1), (11, 0), (11, 2)]
    assert index[5] == [(10, 0)]
    assert index[8] == [(11, 1)]
