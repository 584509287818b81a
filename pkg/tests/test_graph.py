import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kuraduel.errors import (
    ConnectivityError,
    DegeneratePartitionError,
    DimensionError,
    EdgeListParseError,
    GraphSizeError,
)
from kuraduel.graph import (
    CrossNetwork,
    Graph,
    complete_kary_tree,
    cross_degrees,
    erdos_renyi,
    laplacian,
    leaf_matching_cross,
    partition_red,
    read_edge_list,
    tree_leaves,
    write_edge_list,
)


def path_graph(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n):
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


class TestTree:
    def test_4ary_depth2_has_21_nodes(self):
        g = complete_kary_tree(4, 2)
        assert (g.n, g.n_edges) == (21, 20)
        assert g.is_connected()

    def test_depth0_is_single_node(self):
        g = complete_kary_tree(4, 0)
        assert (g.n, g.n_edges) == (1, 0)

    def test_binary_depth2_leaves(self):
        g = complete_kary_tree(2, 2)
        assert g.n == 7
        assert tree_leaves(g) == [3, 4, 5, 6]

    @pytest.mark.parametrize("b", [1, 2, 3, 4])
    @pytest.mark.parametrize("d", [0, 1, 2, 3, 4])
    def test_counts_match_closed_form(self, b, d):
        g = complete_kary_tree(b, d)
        n = d + 1 if b == 1 else (b ** (d + 1) - 1) // (b - 1)
        assert g.n == n and g.n_edges == n - 1 and g.is_connected()

    def test_oversized_tree_rejected(self):
        with pytest.raises(GraphSizeError):
            complete_kary_tree(10, 9)

    def test_bad_branching(self):
        with pytest.raises(ValueError):
            complete_kary_tree(0, 2)


class TestErdosRenyi:
    def test_connected_21_nodes(self):
        g = erdos_renyi(21, 0.4, seed=2016)
        assert g.n == 21 and g.is_connected()

    def test_p_one_is_complete(self):
        g = erdos_renyi(5, 1.0, seed=3, require_connected=False)
        assert g.n_edges == 10

    def test_p_zero_is_empty(self):
        g = erdos_renyi(5, 0.0, seed=3, require_connected=False)
        assert g.n_edges == 0 and g.n_components() == 5

    def test_retry_cap(self):
        with pytest.raises(ConnectivityError):
            erdos_renyi(30, 0.01, seed=1, max_retries=5)

    @given(st.integers(0, 2**31), st.floats(0.05, 0.95))
    @settings(max_examples=30, deadline=None)
    def test_reproducible(self, seed, p):
        a = erdos_renyi(12, p, seed, require_connected=False)
        b = erdos_renyi(12, p, seed, require_connected=False)
        assert a == b

    def test_invalid_p(self):
        with pytest.raises(ValueError):
            erdos_renyi(5, 1.5, 0)


class TestLaplacian:
    def test_path3_spectrum(self):
        ev = np.linalg.eigvalsh(laplacian(path_graph(3)))
        assert np.allclose(ev, [0, 1, 3])

    def test_single_node(self):
        assert laplacian(Graph.from_edges(1, [])).tolist() == [[0.0]]

    def test_k5_spectrum(self):
        ev = np.linalg.eigvalsh(laplacian(complete_graph(5)))
        assert np.allclose(ev, [0, 5, 5, 5, 5])

    @given(st.integers(2, 14), st.floats(0.0, 1.0), st.integers(0, 10**6))
    @settings(max_examples=60, deadline=None)
    def test_laplacian_invariants(self, n, p, seed):
        g = erdos_renyi(n, p, seed, require_connected=False)
        lap = laplacian(g)
        assert np.array_equal(lap.sum(axis=1), np.zeros(n))
        assert np.array_equal(lap, lap.T)
        ev = np.linalg.eigvalsh(lap)
        assert ev.min() >= -1e-10
        assert np.count_nonzero(np.abs(ev) < 1e-9) == g.n_components()
        if g.is_connected():
            assert ev[1] > 1e-9


class TestCross:
    def test_tree_leaf_matching_total_16(self):
        blue = complete_kary_tree(4, 2)
        x = leaf_matching_cross(blue, erdos_renyi(21, 0.4, 2016))
        d_br, d_rb, total = cross_degrees(x)
        assert total == 16
        assert set(d_br.tolist()) <= {0, 1} and set(d_rb.tolist()) <= {0, 1}
        assert x.is_mutual

    def test_single_node_tree(self):
        x = leaf_matching_cross(complete_kary_tree(4, 0), Graph.from_edges(1, []))
        assert cross_degrees(x)[2] == 1

    def test_binary_depth1(self):
        x = leaf_matching_cross(complete_kary_tree(2, 1), path_graph(3))
        assert sorted(zip(*np.nonzero(x.a_br))) == [(1, 1), (2, 2)]

    def test_red_too_small(self):
        with pytest.raises(DimensionError):
            leaf_matching_cross(complete_kary_tree(4, 2), path_graph(10))

    def test_one_way_cross(self):
        x = leaf_matching_cross(complete_kary_tree(2, 1), path_graph(3), symmetric=False)
        assert x.a_rb.sum() == 0 and not x.is_mutual

    def test_zero_and_dense_blocks(self):
        z = CrossNetwork(np.zeros((2, 3), np.int8), np.zeros((3, 2), np.int8))
        d_br, d_rb, total = cross_degrees(z)
        assert total == 0 and not d_br.any() and not d_rb.any()
        d = CrossNetwork(np.ones((2, 3), np.int8), np.zeros((3, 2), np.int8))
        assert cross_degrees(d)[0].tolist() == [3, 3] and cross_degrees(d)[2] == 6


class TestPartition:
    def test_canonical_partition(self, canon):
        part = partition_red(canon.red, canon.cross)
        assert (part.m1, part.m2) == (16, 5)
        assert part.d_br2 == part.d_r2b == 0
        assert part.d_br1 == part.d_r1b == 16

    def test_all_linked_is_degenerate(self):
        red = path_graph(2)
        x = CrossNetwork(np.eye(2, dtype=np.int8), np.eye(2, dtype=np.int8))
        with pytest.raises(DegeneratePartitionError):
            partition_red(red, x)

    def test_path4_single_link(self):
        red = path_graph(4)
        a = np.zeros((1, 4), np.int8)
        a[0, 0] = 1
        part = partition_red(red, CrossNetwork(a, a.T.copy()))
        assert part.r1 == (0,) and part.r2 == (1, 2, 3) and part.d_r1r2 == 1

    def test_r1_nodes_have_links(self, canon):
        part = partition_red(canon.red, canon.cross)
        links = canon.cross.a_br.sum(axis=0) + canon.cross.a_rb.sum(axis=1)
        assert all(links[i] > 0 for i in part.r1)
        assert all(links[i] == 0 for i in part.r2)


class TestEdgeList:
    def test_read_path(self):
        assert read_edge_list("nodes 3\n0 1\n1 2") == path_graph(3)

    def test_write_k3(self):
        assert write_edge_list(complete_graph(3)) == "nodes 3\n0 1\n0 2\n1 2"

    def test_self_loop(self):
        with pytest.raises(EdgeListParseError, match="line 2"):
            read_edge_list("nodes 2\n0 0")

    def test_duplicate_and_range(self):
        with pytest.raises(EdgeListParseError, match="line 3"):
            read_edge_list("nodes 3\n0 1\n1 0")
        with pytest.raises(EdgeListParseError, match="line 2"):
            read_edge_list("nodes 3\n0 3")

    def test_comments_population_isolated(self):
        g = read_edge_list("# c\npopulation red\nnodes 4\n\n0 1  # edge\n")
        assert g.n == 4 and g.n_edges == 1 and g.n_components() == 3

    def test_missing_header(self):
        with pytest.raises(EdgeListParseError):
            read_edge_list("0 1")

    @given(st.integers(1, 15), st.floats(0, 1), st.integers(0, 10**6))
    @settings(max_examples=40, deadline=None)
    def test_round_trip(self, n, p, seed):
        g = erdos_renyi(n, p, seed, require_connected=False)
        assert read_edge_list(write_edge_list(g, "blue")) == g


def test_graph_rejects_asymmetric():
    a = np.zeros((2, 2), np.int8)
    a[0, 1] = 1
    with pytest.raises(ValueError):
        Graph(2, a)
