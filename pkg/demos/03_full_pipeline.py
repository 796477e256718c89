"""Full pipeline on a generated graph, checked against the sequential oracle.

generate -> eulerize -> partition -> plan -> run -> unroll -> validate.
The distributed result and the oracle may walk the edges in different
orders; both must cover the exact same undirected edge multiset.
"""

import tempfile
import time

from eulerbsp import (GeneratorConfig, MergeStrategy, build_meta_graph,
                      build_partitions, eulerize, generate_merge_tree,
                      generate_power_law, hierholzer, partition_graph,
                      partition_stats, run_to_root, unroll_circuit,
                      validate_circuit)

graph = generate_power_law(GeneratorConfig(5000, 5.0, seed=11))
graph = eulerize(graph, seed=12).graph
print(f"input: |V|={graph.vertex_count} |E|={graph.edge_count}")

assignment = partition_graph(graph, parts=8, seed=13)
partitions = build_partitions(graph, assignment)
print("dataset stats:", partition_stats(graph, partitions))

tree = generate_merge_tree(build_meta_graph(partitions))
print(tree.render())

with tempfile.TemporaryDirectory() as spill:
    t0 = time.perf_counter()
    result = run_to_root(partitions, tree, MergeStrategy.BASELINE, spill,
                         workers=8)
    circuit, stats = unroll_circuit(result.root_entry_ids, result.spill)
    elapsed = time.perf_counter() - t0

report = validate_circuit(graph, circuit)
print(f"\npipeline: {result.supersteps} supersteps, "
      f"{circuit.edge_count} edges, {elapsed:.2f}s")
print("circuit valid:", report.passed)

print("\nper-level state (int64 counts):")
ledger = result.ledger
for level in ledger.levels():
    print(f"  level {level}: partitions={len(ledger.rows_at(level))} "
          f"cumulative={ledger.cumulative(level)} "
          f"average={ledger.average(level):.0f} "
          f"transferred={ledger.transferred_at(level)}")

oracle = hierholzer(graph)
print("\noracle edges:", oracle.edge_count)
print("edge multisets equal:", circuit.edge_multiset() == oracle.edge_multiset())
print("walks themselves differ:", circuit.walk != oracle.walk)
