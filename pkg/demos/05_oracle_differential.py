"""Differential testing loop: pipeline vs sequential reference.

Hammers the engine with many small random inputs and cross-checks every
circuit two ways: the validator (closure + exact edge coverage) and the
reference implementation's edge multiset.
"""

import tempfile
import time

from eulerbsp import (GeneratorConfig, MergeStrategy, build_meta_graph,
                      build_partitions, eulerize, generate_merge_tree,
                      generate_power_law, hierholzer, partition_graph,
                      run_to_root, unroll_circuit, validate_circuit)

t0 = time.perf_counter()
checked = 0
for seed in range(40):
    size = 120 + 61 * seed
    parts = (2, 4, 8)[seed % 3]
    graph = generate_power_law(GeneratorConfig(size, 5.0, seed=seed))
    graph = eulerize(graph, seed=seed).graph
    assignment = partition_graph(graph, parts, seed=seed)
    partitions = build_partitions(graph, assignment)
    tree = generate_merge_tree(build_meta_graph(partitions))
    with tempfile.TemporaryDirectory() as spill:
        result = run_to_root(partitions, tree, MergeStrategy.DEDUP, spill)
        circuit, _ = unroll_circuit(result.root_entry_ids, result.spill)

    assert validate_circuit(graph, circuit).passed, (size, parts, seed)
    assert circuit.edge_multiset() == hierholzer(graph).edge_multiset()
    checked += 1

print(f"{checked} differential runs clean in "
      f"{time.perf_counter() - t0:.1f}s")
