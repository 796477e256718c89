"""The 14-vertex, 4-partition sample graph, one phase at a time.

Walks through everything the engine does on a graph small enough to check
by hand: vertex classification, the meta-graph, the merge tree, the local
walks each partition finds, and the final unrolled circuit.
"""

import tempfile

from eulerbsp import (MergeStrategy, build_meta_graph, build_partitions,
                      classify_vertices, from_edges, generate_merge_tree,
                      run_to_root, unroll_circuit, validate_circuit,
                      validate_eulerian)

# Sixteen undirected edges over vertices 1..14 (vertex 0 stays isolated so
# the labels can be used as-is), split into four partitions.
edges = [
    (1, 2),                                # partition 1
    (3, 4), (4, 5), (3, 5),                # partition 2
    (6, 7), (7, 8), (8, 9),                # partition 3
    (12, 13), (11, 12), (10, 12), (12, 14),  # partition 4
    (2, 3), (3, 13), (6, 11), (9, 10), (1, 14),  # remote edges
]
assignment_by_vertex = {1: 1, 2: 1, 3: 2, 4: 2, 5: 2, 6: 3, 7: 3, 8: 3,
                        9: 3, 10: 4, 11: 4, 12: 4, 13: 4, 14: 4}

graph = from_edges(15, edges)
print("Eulerian check:", validate_eulerian(graph).message())

# ---------------------------------------------------------------- partitions
assignment = [assignment_by_vertex.get(v, 1) for v in range(15)]
partitions = build_partitions(graph, assignment)
for p in partitions:
    classes = classify_vertices(p)
    named = {v: c.value for v, c in classes.items() if v != 0}
    print(f"P{p.partition_id}: internal={sorted(p.internal - {0})} "
          f"boundary={sorted(p.boundary)}")
    print(f"    classes: {named}")

# ---------------------------------------------------------------- meta-graph
meta = build_meta_graph(partitions)
print("meta-edge weights:", dict(sorted(meta.weights.items())))

# The heaviest pair merges first; ties break lexicographically.
tree = generate_merge_tree(meta)
print(tree.render())

# ---------------------------------------------------------------- execution
with tempfile.TemporaryDirectory() as spill:
    result = run_to_root(partitions, tree, MergeStrategy.BASELINE, spill)

    print("\nwalks found per level:")
    for (level, pid), pm in sorted(result.path_maps.items()):
        for entry in pm.entries:
            record = result.spill.read(entry.path_id)
            print(f"  level {level} P{pid}: {entry.kind.name.lower()} "
                  f"{record.vertex_walk()}")

    circuit, stats = unroll_circuit(result.root_entry_ids, result.spill)

print("\ncircuit:", circuit.walk)
print("edges traversed:", circuit.edge_count)
print("valid:", validate_circuit(graph, circuit).passed)
print("pivot expansions during unroll:", stats.pivot_expansions)
