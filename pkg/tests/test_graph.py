import numpy as np
import pytest

from polarize import Graph, parse_edge_list, power_law_graph, random_graph, serialize_edge_list, two_community_graph
from polarize.errors import (
    DuplicateEdgeError,
    IndexOutOfRangeError,
    InvalidProbabilityError,
    InvalidRangeError,
    MalformedLineError,
    NegativeWeightError,
    SelfLoopError,
)


def test_parse_single_edge():
    g = parse_edge_list("n=2\n0,1,1.0\n")
    assert g.n == 2
    assert g.edges == ((0, 1, 1.0),)


def test_parse_empty_graph():
    g = parse_edge_list("n=3\n")
    assert g.n == 3
    assert g.edges == ()


def test_parse_accepts_tabs_comments_and_blank_lines():
    text = "# generated\nn=3\n\n0\t1\t0.5\n# middle comment\n1,2,2.0\n"
    g = parse_edge_list(text)
    assert g.edges == ((0, 1, 0.5), (1, 2, 2.0))


def test_parse_rejects_self_loop():
    with pytest.raises(SelfLoopError):
        parse_edge_list("n=2\n0,0,1.0\n")


def test_parse_rejects_negative_weight():
    with pytest.raises(NegativeWeightError):
        parse_edge_list("n=2\n0,1,-0.5\n")


def test_parse_rejects_duplicate_pair_either_orientation():
    with pytest.raises(DuplicateEdgeError):
        parse_edge_list("n=3\n0,1,1.0\n1,0,2.0\n")


def test_parse_rejects_out_of_range_index():
    with pytest.raises(IndexOutOfRangeError):
        parse_edge_list("n=2\n0,2,1.0\n")


def test_parse_rejects_missing_header_and_bad_fields():
    with pytest.raises(MalformedLineError):
        parse_edge_list("0,1,1.0\n")
    with pytest.raises(MalformedLineError):
        parse_edge_list("n=2\n0,1\n")
    with pytest.raises(MalformedLineError):
        parse_edge_list("n=2\n0,1,abc\n")


def test_construction_normalizes_orientation_and_drops_zero_weights():
    g = Graph(3, [(2, 0, 1.5), (1, 2, 0.0)])
    assert g.edges == ((0, 2, 1.5),)
    assert g.edge_count() == 1


def test_laplacian_k2(k2):
    assert np.array_equal(k2.laplacian(), np.array([[1.0, -1.0], [-1.0, 1.0]]))


def test_laplacian_empty_graph():
    g = Graph(3, [])
    assert np.array_equal(g.laplacian(), np.zeros((3, 3)))


def test_laplacian_triangle_weight_two():
    g = Graph(3, [(0, 1, 2.0), (0, 2, 2.0), (1, 2, 2.0)])
    lap = g.laplacian()
    assert np.array_equal(np.diag(lap), np.full(3, 4.0))
    off = lap[~np.eye(3, dtype=bool)]
    assert np.array_equal(off, np.full(6, -2.0))


def test_degrees_examples(k2, star4):
    assert np.array_equal(k2.degrees(), np.array([1.0, 1.0]))
    assert np.array_equal(Graph(4, []).degrees(), np.zeros(4))
    assert np.array_equal(star4.degrees(), np.array([3.0, 1.0, 1.0, 1.0]))


def test_edge_weight_lookup(star4):
    assert star4.edge_weight(0, 2) == 1.0
    assert star4.edge_weight(2, 0) == 1.0
    assert star4.edge_weight(1, 2) is None


def test_random_graph_p_zero_is_empty():
    assert random_graph(5, 0.0, 0.5, 1.5, seed=1).edges == ()


def test_random_graph_p_one_is_complete_unit():
    g = random_graph(4, 1.0, 1.0, 1.0, seed=1)
    assert g.edge_count() == 6
    assert all(w == 1.0 for _, _, w in g.edges)


def test_random_graph_deterministic():
    a = random_graph(50, 0.2, 0.5, 1.5, seed=7)
    b = random_graph(50, 0.2, 0.5, 1.5, seed=7)
    assert a.edges == b.edges


def test_random_graph_validates_inputs():
    with pytest.raises(InvalidProbabilityError):
        random_graph(5, 1.2, 0.5, 1.5, seed=1)
    with pytest.raises(InvalidRangeError):
        random_graph(5, 0.5, 2.0, 1.0, seed=1)


def test_generator_family_deterministic():
    assert (
        two_community_graph(20, 0.6, 0.1, 0.5, 1.5, seed=3).edges
        == two_community_graph(20, 0.6, 0.1, 0.5, 1.5, seed=3).edges
    )
    assert (
        power_law_graph(40, 2, 0.5, 1.5, seed=3).edges
        == power_law_graph(40, 2, 0.5, 1.5, seed=3).edges
    )


def test_power_law_graph_has_heavy_hub():
    g = power_law_graph(200, 2, 1.0, 1.0, seed=9)
    counts = g.neighbor_counts()
    # preferential attachment concentrates connections far above the mean
    assert counts.max() >= 4 * counts.mean()


def test_laplacian_row_sums_vanish():
    rng = np.random.default_rng(42)
    for _ in range(20):
        n = int(rng.integers(2, 40))
        g = random_graph(n, float(rng.uniform(0.1, 0.9)), 0.1, 2.0, seed=int(rng.integers(1 << 30)))
        lap = g.laplacian()
        bound = 1e-12 * n * max(1.0, float(np.max(np.abs(lap))))
        assert float(np.max(np.abs(lap.sum(axis=1)))) <= bound
        assert np.array_equal(lap, lap.T)


def test_laplacian_plus_adjacency_is_degree_diagonal():
    rng = np.random.default_rng(43)
    for _ in range(10):
        g = random_graph(15, 0.4, 0.5, 1.5, seed=int(rng.integers(1 << 30)))
        assert np.array_equal(g.laplacian() + g.adjacency(), np.diag(g.degrees()))


def test_laplacian_matvec_matches_dense():
    rng = np.random.default_rng(44)
    for _ in range(10):
        g = random_graph(25, 0.3, 0.5, 1.5, seed=int(rng.integers(1 << 30)))
        x = rng.normal(size=25)
        assert np.allclose(g.laplacian_matvec(x), g.laplacian() @ x, atol=1e-12)


def test_serialize_round_trip():
    rng = np.random.default_rng(45)
    for _ in range(10):
        g = random_graph(12, 0.5, 0.25, 3.0, seed=int(rng.integers(1 << 30)))
        assert parse_edge_list(serialize_edge_list(g)).edges == g.edges
