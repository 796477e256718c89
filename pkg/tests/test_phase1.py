import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eulerbsp import (LocalGraph, PathKind, StructuralError, build_partitions,
                      do_phase1, find_euler_path, from_edges, hierholzer,
                      merge_into, partition_graph, run_phase1)
from eulerbsp.phase1 import (NO_REF, PathEntry, PathMap, TraversalState,
                             local_graph_from_partition)
from tests.conftest import make_eulerian


def get(parts, pid):
    return next(p for p in parts if p.partition_id == pid)


def test_walk_from_odd_boundary_crosses_partition(sample_partitions):
    p3 = get(sample_partitions, 3)
    local = local_graph_from_partition(p3)
    state = TraversalState(local)
    steps = find_euler_path(state, 6)
    assert [v for v, _ in steps] == [7, 8, 9]


def test_walk_from_even_boundary_closes(sample_partitions):
    p2 = get(sample_partitions, 2)
    local = local_graph_from_partition(p2)
    state = TraversalState(local)
    steps = find_euler_path(state, 3)
    assert [v for v, _ in steps] == [4, 5, 3]


def test_walk_rejects_foreign_vertex(sample_partitions):
    p2 = get(sample_partitions, 2)
    local = local_graph_from_partition(p2)
    with pytest.raises(Exception):
        find_euler_path(TraversalState(local), 99)


def test_singleton_for_isolated_even_boundary():
    # One vertex, no local edges, two remote arcs.
    g = from_edges(4, [(0, 1), (0, 1), (2, 3), (2, 3), (0, 2), (0, 2)])
    parts = build_partitions(g, [0, 0, 1, 1])
    # Vertex 0 has local degree 2 and two remote arcs; make a partition where
    # the boundary vertex has no local edges at all instead.
    g2 = from_edges(3, [(0, 1), (0, 1), (1, 2), (1, 2)])
    parts2 = build_partitions(g2, [0, 1, 2])
    middle = get(parts2, 1)
    pm = do_phase1(middle)
    assert [e.kind for e in pm.entries] == [PathKind.SINGLETON]
    assert pm.entries[0].source == 1
    assert pm.entries[0].step_count == 0


def test_sample_phase1_outputs(sample_partitions):
    pm1 = do_phase1(get(sample_partitions, 1))
    assert pm1.path_endpoints() == [(1, 2)]

    pm2 = do_phase1(get(sample_partitions, 2))
    kinds = [e.kind for e in pm2.entries]
    assert kinds == [PathKind.CYCLE]
    assert pm2.entries[0].vertex_walk() == [3, 4, 5, 3]

    pm3 = do_phase1(get(sample_partitions, 3))
    assert pm3.path_endpoints() == [(6, 9)]
    assert pm3.entries[0].vertex_walk() == [6, 7, 8, 9]

    pm4 = do_phase1(get(sample_partitions, 4))
    assert sorted(pm4.path_endpoints()) == [(10, 11), (13, 14)]


def test_path_count_is_half_odd_boundary(sample_partitions):
    for p in sample_partitions:
        pm = do_phase1(p)
        odd = sum(1 for v in p.boundary if p.local_degree(v) % 2 == 1)
        assert len(pm.paths()) == odd // 2


def test_one_entry_per_even_boundary(sample_partitions):
    for p in sample_partitions:
        pm = do_phase1(p)
        even = [v for v in p.boundary if p.local_degree(v) % 2 == 0]
        cycles = [e for e in pm.entries
                  if e.kind in (PathKind.CYCLE, PathKind.SINGLETON)
                  and e.source in even]
        assert len(cycles) == len(even)


def test_merge_into_splices_at_pivot():
    host = PathEntry(1, PathKind.PATH, 0, 2, [(1, NO_REF), (2, NO_REF)], 2)
    pm = PathMap(0, 0, [host], {})
    merge_into(pm, [1, 7, 8, 1])
    assert host.vertex_walk() == [0, 1, 7, 8, 1, 2]


def test_merge_into_rotates_cycle_to_pivot():
    host = PathEntry(1, PathKind.PATH, 0, 2, [(1, NO_REF), (2, NO_REF)], 2)
    pm = PathMap(0, 0, [host], {})
    # Cycle enters the host at vertex 1, stored anchored elsewhere.
    merge_into(pm, [8, 1, 7, 8])
    assert host.vertex_walk() == [0, 1, 7, 8, 1, 2]


def test_merge_into_prefers_lowest_path_id():
    a = PathEntry(1, PathKind.PATH, 0, 1, [(1, NO_REF)], 1)
    b = PathEntry(2, PathKind.PATH, 1, 2, [(2, NO_REF)], 1)
    pm = PathMap(0, 0, [a, b], {})
    merge_into(pm, [1, 5, 1])
    assert a.vertex_walk() == [0, 1, 5, 1]
    assert b.vertex_walk() == [1, 2]


def test_merge_into_errors_without_intersection():
    host = PathEntry(1, PathKind.PATH, 0, 1, [(1, NO_REF)], 1)
    pm = PathMap(0, 0, [host], {})
    with pytest.raises(StructuralError):
        merge_into(pm, [7, 8, 9, 7])


def test_full_partition_single_entry_matches_oracle():
    g = make_eulerian(40, seed=2)
    (p,) = build_partitions(g, [0] * g.vertex_count)
    pm = do_phase1(p)
    hosts = [e for e in pm.entries if e.step_count > 0]
    assert len(hosts) == 1
    assert hosts[0].kind is PathKind.CYCLE
    walk = hosts[0].vertex_walk()
    assert walk[0] == walk[-1]
    edges = sorted((min(a, b), max(a, b)) for a, b in zip(walk, walk[1:]))
    assert edges == sorted(g.edges())
    assert len(edges) == hierholzer(g).edge_count


def test_edge_census_against_brute_force():
    g = make_eulerian(40, seed=3)
    assignment = partition_graph(g, 2, seed=4)
    for p in build_partitions(g, assignment):
        pm = do_phase1(p)
        covered = []
        for e in pm.entries:
            walk = e.vertex_walk()
            covered += [(min(a, b), max(a, b)) for a, b in zip(walk, walk[1:])]
        assert sorted(covered) == sorted(p.local_edges())


def test_op_count_linear_bound():
    for seed in range(5):
        g = make_eulerian(200, seed=100 + seed)
        assignment = partition_graph(g, 4, seed=seed)
        for p in build_partitions(g, assignment):
            pm = do_phase1(p)
            budget = 3 * (pm.boundary_count + pm.internal_count
                          + pm.local_edge_count)
            assert pm.op_count <= budget


def test_stranded_cycle_becomes_standalone_entry():
    # Two coarse components, only one holding the boundary: the cycle on
    # 6,9,10,11 cannot splice into the 13-14 path and must survive on its own.
    local = LocalGraph(
        edges=[(6, 9, 103), (6, 11, NO_REF), (9, 10, NO_REF), (10, 11, 101),
               (13, 14, 102)],
        boundary={13, 14},
    )
    pm = run_phase1(local, partition_id=4, level=1, id_base=500)
    assert len(pm.stranded_ids) == 1
    stranded = pm.entry(pm.stranded_ids[0])
    assert stranded.kind is PathKind.CYCLE
    assert stranded.vertex_walk() == [6, 9, 10, 11, 6]
    assert not pm.connected


def test_pending_cycles_merge_transitively():
    # Ring of three cycles sharing single vertices; walks at 0 first, the
    # rest must chain into the host even when discovered disjointly.
    edges = [(0, 1, NO_REF), (1, 2, NO_REF), (2, 0, NO_REF),
             (2, 3, NO_REF), (3, 4, NO_REF), (4, 2, NO_REF),
             (4, 5, NO_REF), (5, 6, NO_REF), (6, 4, NO_REF)]
    local = LocalGraph(edges=edges, boundary=set())
    pm = run_phase1(local, 0, 0)
    assert pm.stranded_ids == []
    hosts = [e for e in pm.entries if e.step_count > 0]
    assert len(hosts) == 1
    assert hosts[0].step_count == 9


def test_ordering_odd_walks_before_cycles():
    g = make_eulerian(120, seed=44)
    assignment = partition_graph(g, 4, seed=45)
    for p in build_partitions(g, assignment):
        pm = do_phase1(p)
        seen_even = False
        for w in pm.walks:
            if w.start_class != "odd-boundary":
                seen_even = True
            else:
                assert not seen_even, "odd-boundary walk after a cycle walk"


@given(st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_lemma_properties_random_partitions(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(8, 80))
    g = make_eulerian(max(n, 8), seed=seed % 1000)
    parts_count = int(rng.integers(1, 5))
    if parts_count > g.vertex_count:
        parts_count = 1
    assignment = [int(rng.integers(0, parts_count))
                  for _ in range(g.vertex_count)]
    for p in build_partitions(g, assignment):
        odd = {v for v in p.boundary if p.local_degree(v) % 2 == 1}
        assert len(odd) % 2 == 0  # handshake
        pm = do_phase1(p)
        for w in pm.walks:
            if w.start_class == "odd-boundary":
                assert not w.closed and w.end != w.start and w.end in odd
            else:
                assert w.closed
        if pm.connected:
            assert pm.stranded_ids == []
