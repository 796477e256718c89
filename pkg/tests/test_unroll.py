import sys

import pytest

from eulerbsp import (CoverageError, PathKind, SpillStore, build_partitions,
                      from_edges, unroll_circuit, validate_circuit)
from eulerbsp.phase1 import NO_REF, PathEntry
from eulerbsp.unroll import _orient


def entry(pid, kind, source, sink, steps):
    return PathEntry(pid, kind, source, sink, steps, len(steps))


def store_with(tmp_path, groups):
    store = SpillStore(tmp_path)
    for (pid, level), entries in groups.items():
        store.write_entries(pid, level, entries)
    return store


def test_single_cycle_root_verbatim(tmp_path):
    store = store_with(tmp_path, {(0, 0): [
        entry(1, PathKind.CYCLE, 2, 2,
              [(5, NO_REF), (7, NO_REF), (2, NO_REF)]),
    ]})
    circuit, stats = unroll_circuit([1], store)
    assert circuit.walk == [2, 5, 7, 2]
    assert stats.edge_count == 3 and stats.rotations == 1


def test_root_rotated_to_smallest_vertex(tmp_path):
    store = store_with(tmp_path, {(0, 0): [
        entry(1, PathKind.CYCLE, 5, 5,
              [(2, NO_REF), (9, NO_REF), (5, NO_REF)]),
    ]})
    circuit, _ = unroll_circuit([1], store)
    assert circuit.walk == [2, 9, 5, 2]


def test_ref_expansion_forward_and_reversed(tmp_path):
    child = entry(10, PathKind.PATH, 1, 4, [(2, NO_REF), (3, NO_REF), (4, NO_REF)])
    # Root walks 4 -> 1 through the child (reversed), then 1 -> 4 directly.
    root = entry(20, PathKind.CYCLE, 4, 4, [(1, 10), (4, NO_REF)])
    store = store_with(tmp_path, {(0, 0): [child], (0, 1): [root]})
    circuit, _ = unroll_circuit([20], store)
    assert circuit.walk == [1, 4, 3, 2, 1]


def test_orient_helper_directions(tmp_path):
    store = store_with(tmp_path, {(0, 0): [
        entry(10, PathKind.PATH, 1, 4,
              [(2, 77), (3, NO_REF), (4, NO_REF)]),
    ]})
    rec = store.read(10)
    fwd, rev_flag = _orient(rec, 1, 4)
    assert fwd == [(2, 77), (3, NO_REF), (4, NO_REF)] and not rev_flag
    rev, rev_flag = _orient(rec, 4, 1)
    assert rev == [(3, NO_REF), (2, NO_REF), (1, 77)] and rev_flag


def test_anchored_cycle_expands_at_pivot(tmp_path):
    loop = entry(10, PathKind.CYCLE, 5, 5, [(8, NO_REF), (5, NO_REF)])
    root = entry(20, PathKind.CYCLE, 1, 1,
                 [(5, NO_REF), (6, NO_REF), (1, NO_REF)])
    store = store_with(tmp_path, {(0, 0): [loop], (0, 1): [root]})
    circuit, stats = unroll_circuit([20], store)
    assert circuit.walk == [1, 5, 8, 5, 6, 1]
    assert stats.pivot_expansions == 1


def test_singleton_consumed_without_emission(tmp_path):
    single = entry(10, PathKind.SINGLETON, 5, 5, [])
    root = entry(20, PathKind.CYCLE, 1, 1, [(5, NO_REF), (1, NO_REF)])
    store = store_with(tmp_path, {(0, 0): [single], (0, 1): [root]})
    circuit, _ = unroll_circuit([20], store)
    assert circuit.walk == [1, 5, 1]


def test_cycle_rotated_at_mid_sequence_pivot(tmp_path):
    # Cycle anchored at 7 but reached through 8.
    loop = entry(10, PathKind.CYCLE, 7, 7,
                 [(8, NO_REF), (9, NO_REF), (7, NO_REF)])
    root = entry(20, PathKind.CYCLE, 1, 1, [(8, NO_REF), (1, NO_REF)])
    store = store_with(tmp_path, {(0, 0): [loop], (0, 1): [root]})
    circuit, _ = unroll_circuit([20], store)
    assert circuit.walk == [1, 8, 9, 7, 8, 1]


def test_deep_rotation_through_reference_chain(tmp_path):
    """A stranded coarse cycle reachable only through a vertex inside one of
    the paths it references; mirrors the worked 14-vertex example."""
    groups = {
        (1, 0): [entry(100, PathKind.PATH, 1, 2, [(2, NO_REF)])],
        (2, 0): [entry(107, PathKind.CYCLE, 3, 3,
                       [(4, NO_REF), (5, NO_REF), (3, NO_REF)])],
        (3, 0): [entry(103, PathKind.PATH, 6, 9,
                       [(7, NO_REF), (8, NO_REF), (9, NO_REF)])],
        (4, 0): [entry(101, PathKind.PATH, 10, 11, [(12, NO_REF), (11, NO_REF)]),
                 entry(102, PathKind.PATH, 13, 14, [(12, NO_REF), (14, NO_REF)])],
        (2, 1): [entry(106, PathKind.PATH, 1, 3, [(2, 100), (3, NO_REF)])],
        (4, 1): [entry(104, PathKind.PATH, 13, 14, [(14, 102)]),
                 entry(105, PathKind.CYCLE, 6, 6,
                       [(9, 103), (10, NO_REF), (11, 101), (6, NO_REF)])],
        (4, 2): [entry(108, PathKind.CYCLE, 1, 1,
                       [(3, 106), (13, NO_REF), (14, 104), (1, NO_REF)])],
    }
    store = store_with(tmp_path, groups)
    circuit, stats = unroll_circuit([108], store)
    assert circuit.walk == [1, 2, 3, 4, 5, 3, 13, 12, 11, 6, 7, 8, 9, 10,
                            12, 14, 1]
    assert stats.edge_count == 16
    assert stats.rotations == 3

    graph = from_edges(15, [(1, 2), (3, 4), (4, 5), (3, 5), (6, 7), (7, 8),
                            (8, 9), (12, 13), (11, 12), (10, 12), (12, 14),
                            (2, 3), (3, 13), (6, 11), (9, 10), (1, 14)])
    assert validate_circuit(graph, circuit).passed


def test_empty_root_falls_back_to_unreferenced_cycle(tmp_path):
    # A partition holding only isolated vertices forces a virtual final
    # merge with no edges: the root path map is empty and the circuit is
    # the lower-level host cycle.
    from eulerbsp import (MergeStrategy, build_meta_graph, build_partitions,
                          generate_merge_tree, run_to_root)
    g = from_edges(4, [(0, 1), (1, 2), (2, 0)])
    partitions = build_partitions(g, [0, 0, 0, 1])
    tree = generate_merge_tree(build_meta_graph(partitions))
    result = run_to_root(partitions, tree, MergeStrategy.BASELINE,
                         tmp_path / "s")
    assert result.root_path_map.entries == []
    circuit, _ = unroll_circuit(result.root_entry_ids, result.spill)
    assert validate_circuit(g, circuit).passed
    assert circuit.walk == [0, 1, 2, 0]


def test_coverage_error_lists_unreached_entries(tmp_path):
    reachable = entry(1, PathKind.CYCLE, 0, 0, [(1, NO_REF), (0, NO_REF)])
    marooned = entry(2, PathKind.CYCLE, 7, 7, [(8, NO_REF), (7, NO_REF)])
    store = store_with(tmp_path, {(0, 0): [reachable, marooned]})
    with pytest.raises(CoverageError) as err:
        unroll_circuit([1], store)
    assert err.value.unconsumed == [2]


def test_explicit_stack_survives_deep_chains(tmp_path):
    depth = 3 * sys.getrecursionlimit()
    store = SpillStore(tmp_path)
    store.write_entries(0, 0, [
        entry(1, PathKind.PATH, 0, 1, [(1, NO_REF)])])
    for k in range(2, depth):
        store.write_entries(0, k - 1, [
            entry(k, PathKind.PATH, 0, 1, [(1, k - 1)])])
    store.write_entries(0, depth, [
        entry(depth, PathKind.CYCLE, 0, 0, [(1, depth - 1), (0, NO_REF)])])
    circuit, stats = unroll_circuit([depth], store)
    assert circuit.walk == [0, 1, 0]
    assert stats.max_stack_depth >= 100


def test_streaming_does_not_hold_all_entries(tmp_path, sample_graph,
                                             sample_assignment):
    from eulerbsp import (MergeStrategy, build_meta_graph, generate_merge_tree,
                          run_to_root)
    partitions = build_partitions(sample_graph, sample_assignment)
    tree = generate_merge_tree(build_meta_graph(partitions))
    result = run_to_root(partitions, tree, MergeStrategy.BASELINE,
                         tmp_path / "spill")
    circuit, stats = unroll_circuit(result.root_entry_ids, result.spill)
    total_steps = sum(result.spill.read(pid).steps != [] and
                      len(result.spill.read(pid).steps) or 0
                      for pid in result.spill.path_ids)
    assert stats.max_resident_steps < total_steps
    assert validate_circuit(sample_graph, circuit).passed
