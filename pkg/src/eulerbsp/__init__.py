"""Euler circuits on partitioned graphs via level-synchronous merging.

The pipeline: split an Eulerian graph into partitions, discover local paths
and cycles per partition in parallel, merge partition pairs level by level
along a greedy matching tree, then unroll the spilled walk fragments into
the full circuit.  A sequential Hierholzer implementation serves as the
reference for differential testing.
"""

from .circuits import (CircuitReport, EulerCircuit, load_circuit_binary,
                       load_circuit_text, save_circuit_binary,
                       save_circuit_text, validate_circuit)
from .errors import (CoverageError, EulerBspError, GraphFormatError,
                     StructuralError, ValidationFailure)
from .generator import (DEFAULT_PROBABILITIES, EulerizeResult,
                        GeneratorConfig, eulerize, generate_power_law)
from .graph import (EulerianReport, Graph, connected_components, from_edges,
                    load_edge_list, save_edge_list, validate_eulerian)
from .mergetree import (MatchingResult, MergeLevel, MergePair, MergeTree,
                        generate_merge_tree, maximal_matching,
                        rebuild_meta_graph)
from .oracle import hierholzer, hierholzer_ops
from .partitioning import (MetaGraph, Partition, VertexClass,
                           build_meta_graph, build_partitions,
                           classify_vertices, load_partition_file,
                           partition_graph, partition_stats,
                           save_partition_file)
from .phase1 import (NO_REF, LocalGraph, PathEntry, PathKind, PathMap,
                     TraversalState, do_phase1, find_euler_path,
                     local_graph_from_partition, merge_into, run_phase1)
from .runtime import (BspRuntime, MemoryLedger, MergeStrategy, PartitionState,
                      RunResult, StrategyComparison, count_state_ints,
                      run_level, run_to_root, strategy_ledger_compare)
from .spill import SpillRecord, SpillStore
from .unroll import UnrollStats, unroll, unroll_circuit

__version__ = "0.1.0"
