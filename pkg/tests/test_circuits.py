from eulerbsp import (EulerCircuit, from_edges, load_circuit_binary,
                      load_circuit_text, save_circuit_binary,
                      save_circuit_text, validate_circuit)


def triangle():
    return from_edges(4, [(1, 2), (2, 3), (1, 3)])


def test_valid_triangle_circuit():
    report = validate_circuit(triangle(), EulerCircuit([1, 2, 3, 1]))
    assert report.passed


def test_open_walk_fails():
    report = validate_circuit(triangle(), EulerCircuit([1, 2, 3]))
    assert not report.passed
    assert not report.closed
    assert "not closed" in report.message()


def test_missing_edge_reported():
    report = validate_circuit(triangle(), EulerCircuit([1, 2, 1]))
    assert not report.passed
    assert (1, 2) in report.duplicated
    assert (1, 3) in report.missing and (2, 3) in report.missing


def test_non_edge_step_reported():
    g = from_edges(5, [(1, 2), (2, 3), (3, 4), (4, 1)])
    report = validate_circuit(g, EulerCircuit([1, 2, 3, 1]))
    assert not report.passed
    assert (1, 3) in report.not_edges
    assert (3, 4) in report.missing and (1, 4) in report.missing


def test_multiplicity_must_match_exactly():
    g = from_edges(2, [(0, 1), (0, 1)])
    assert validate_circuit(g, EulerCircuit([0, 1, 0])).passed
    report = validate_circuit(g, EulerCircuit([0, 1, 0, 1, 0]))
    assert not report.passed and report.duplicated


def test_zero_edge_graph_accepts_single_vertex_walk():
    g = from_edges(1, [])
    assert validate_circuit(g, EulerCircuit([0])).passed


def test_text_round_trip(tmp_path):
    path = tmp_path / "c.txt"
    save_circuit_text([1, 2, 3, 1], path)
    assert load_circuit_text(path).walk == [1, 2, 3, 1]


def test_binary_round_trip(tmp_path):
    path = tmp_path / "c.bin"
    save_circuit_binary([5, 6, 7, 5], path)
    assert load_circuit_binary(path).walk == [5, 6, 7, 5]
