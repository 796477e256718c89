import pytest

from eulerbsp import (GeneratorConfig, MergeStrategy, build_meta_graph,
                      build_partitions, eulerize, from_edges,
                      generate_merge_tree, generate_power_law,
                      partition_graph, run_to_root, unroll_circuit)

# 14-vertex sample graph from the worked example: four partitions, sixteen
# undirected edges, five of them remote.  Vertex 0 is an isolated extra so
# the labels 1..14 can be used directly.
SAMPLE_EDGES = [
    (1, 2),
    (3, 4), (4, 5), (3, 5),
    (6, 7), (7, 8), (8, 9),
    (12, 13), (11, 12), (10, 12), (12, 14),
    (2, 3), (3, 13), (6, 11), (9, 10), (1, 14),
]
SAMPLE_REMOTE = [(2, 3), (3, 13), (6, 11), (9, 10), (1, 14)]
SAMPLE_PARTS = {1: 1, 2: 1, 3: 2, 4: 2, 5: 2, 6: 3, 7: 3, 8: 3, 9: 3,
                10: 4, 11: 4, 12: 4, 13: 4, 14: 4}


@pytest.fixture
def sample_graph():
    return from_edges(15, SAMPLE_EDGES)


@pytest.fixture
def sample_assignment():
    return [SAMPLE_PARTS.get(v, 1) for v in range(15)]


@pytest.fixture
def sample_partitions(sample_graph, sample_assignment):
    return build_partitions(sample_graph, sample_assignment)


def make_eulerian(size: int, seed: int, degree: float = 5.0):
    graph = generate_power_law(GeneratorConfig(size, degree, seed=seed))
    return eulerize(graph, seed=seed + 1).graph


def run_pipeline(graph, parts: int, seed: int, spill_dir,
                 strategy: MergeStrategy = MergeStrategy.BASELINE):
    assignment = partition_graph(graph, parts, seed=seed)
    partitions = build_partitions(graph, assignment)
    tree = generate_merge_tree(build_meta_graph(partitions))
    result = run_to_root(partitions, tree, strategy, spill_dir)
    circuit, stats = unroll_circuit(result.root_entry_ids, result.spill)
    return result, circuit, stats
