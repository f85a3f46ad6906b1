import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from specgraph import bfs_distance, build_graph, connected_components, diameter, hop_distances
from specgraph.errors import DuplicateEdge, IdOutOfRange, NonpositiveWeight, SelfLoopRejected
from specgraph.graph import format_edge_list, induced_subgraph, parse_edge_list

from _graphs import complete_graph, floyd_warshall_hops, random_graph


def _all_paths_shortest(g, i, j):
    """Brute force: enumerate simple paths from i and keep the shortest reaching j."""
    best = math.inf
    adj = {k: set() for k in range(g.n)}
    for u, v, _ in g.edges:
        adj[u].add(v)
        adj[v].add(u)

    def walk(node, seen):
        nonlocal best
        if node == j:
            best = min(best, len(seen) - 1)
            return
        for nxt in adj[node]:
            if nxt not in seen:
                walk(nxt, seen + [nxt])

    walk(i, [i])
    return best


class TestBuildGraph:
    def test_example_degrees(self, example_graph):
        np.testing.assert_array_equal(example_graph.degrees, [2, 2, 2, 4, 2])

    def test_single_node(self):
        g = build_graph(1, [])
        np.testing.assert_array_equal(g.degrees, [0])
        assert g.num_edges == 0

    def test_default_weight_is_one(self):
        g = build_graph(3, [(0, 1), (1, 2, 2.5)])
        assert g.edges == ((0, 1, 1.0), (1, 2, 2.5))
        assert not g.is_unweighted

    def test_edges_normalized_and_sorted(self):
        g = build_graph(4, [(3, 2), (1, 0)])
        assert g.edges == ((0, 1, 1.0), (2, 3, 1.0))

    @pytest.mark.parametrize("n, edges, exc", [
        (3, [(0, 3)], IdOutOfRange),
        (3, [(-1, 0)], IdOutOfRange),
        (0, [], IdOutOfRange),
        (3, [(1, 1)], SelfLoopRejected),
        (3, [(0, 1), (1, 0)], DuplicateEdge),
        (3, [(0, 1, 0.0)], NonpositiveWeight),
        (3, [(0, 1, -2.0)], NonpositiveWeight),
        (3, [(0, 1, float("nan"))], NonpositiveWeight),
    ])
    def test_rejects(self, n, edges, exc):
        with pytest.raises(exc):
            build_graph(n, edges)

    def test_immutable(self, example_graph):
        with pytest.raises(ValueError):
            example_graph.degrees[0] = 7.0
        with pytest.raises(ValueError):
            example_graph.adjacency.data[0] = 7.0

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 64), st.integers(0, 2**32 - 1))
    def test_symmetric_and_degree_row_sums(self, n, seed):
        g = random_graph(np.random.default_rng(seed), n, weighted=True)
        a = g.dense_adjacency()
        assert np.array_equal(a, a.T)
        assert np.all(a[a != 0] > 0)
        # correctly rounded row sums are order independent
        np.testing.assert_array_equal(g.degrees, [math.fsum(row) for row in a])


class TestDistances:
    def test_example_distance_matches_path_enumeration(self, example_graph):
        expected = _all_paths_shortest(example_graph, 0, 2)
        assert expected == 2
        assert bfs_distance(example_graph, 0, 2) == expected

    def test_self_distance(self, example_graph):
        assert all(bfs_distance(example_graph, i, i) == 0 for i in range(5))

    def test_unreachable(self):
        g = build_graph(4, [(0, 1), (2, 3)])
        assert bfs_distance(g, 0, 2) is None

    def test_bad_id(self, example_graph):
        with pytest.raises(IdOutOfRange):
            bfs_distance(example_graph, 0, 5)

    def test_example_diameter_brute_force(self, example_graph):
        pairs = [(i, j) for i in range(5) for j in range(i + 1, 5)]
        assert len(pairs) == 10
        assert diameter(example_graph) == max(_all_paths_shortest(example_graph, i, j) for i, j in pairs) == 2

    def test_diameter_small_cases(self):
        assert diameter(complete_graph(3)) == 1
        assert diameter(build_graph(1, [])) == 0
        assert diameter(build_graph(4, [(0, 1), (2, 3)])) == math.inf

    @pytest.mark.parametrize("seed", range(12))
    def test_metric_axioms(self, seed):
        rng = np.random.default_rng(seed)
        g = random_graph(rng, int(rng.integers(2, 17)))
        d = hop_distances(g)
        n = g.n
        assert np.array_equal(d, d.T)
        for i in range(n):
            for j in range(n):
                assert (d[i, j] == 0) == (i == j)
                if np.isfinite(d[i, j]):
                    assert np.all(d[i, j] <= d[i, :] + d[:, j])

    @pytest.mark.parametrize("seed", range(10))
    def test_diameter_against_floyd_warshall(self, seed):
        rng = np.random.default_rng(100 + seed)
        g = random_graph(rng, int(rng.integers(1, 33)), p=rng.uniform(0.05, 0.5))
        fw = floyd_warshall_hops(g)
        np.testing.assert_array_equal(hop_distances(g), fw)
        expected = fw.max()
        assert diameter(g) == (math.inf if np.isinf(expected) else int(expected))


class TestComponents:
    def test_counts(self, example_graph):
        assert connected_components(example_graph).component_count == 1
        assert connected_components(build_graph(4, [(0, 1), (2, 3)])).component_count == 2
        assert connected_components(build_graph(3, [])).component_count == 3

    @pytest.mark.parametrize("seed", range(8))
    def test_labels_match_reachability(self, seed):
        rng = np.random.default_rng(seed)
        g = random_graph(rng, 20)
        part = connected_components(g)
        assert sorted(set(part.component_id.tolist())) == list(range(part.component_count))
        d = hop_distances(g)
        same = part.component_id[:, None] == part.component_id[None, :]
        np.testing.assert_array_equal(same, np.isfinite(d))

    def test_induced_subgraph(self, example_graph):
        sub, ids = induced_subgraph(example_graph, [3, 2, 4])
        assert sub.n == 3
        assert sub.edges == ((0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0))
        np.testing.assert_array_equal(ids, [3, 2, 4])


class TestEdgeListFile:
    def test_roundtrip(self, rng):
        g = random_graph(rng, 12, weighted=True)
        back = parse_edge_list(format_edge_list(g))
        assert back.labels is None
        assert back.graph.edges == g.edges and back.graph.n == g.n

    def test_comments_header_and_isolated(self):
        text = "# example\nn=6\n0\t1\n1\t2\t0.5\n"
        data = parse_edge_list(text)
        assert data.graph.n == 6
        assert data.graph.edges == ((0, 1, 1.0), (1, 2, 0.5))

    def test_inferred_node_count(self):
        assert parse_edge_list("0\t4\n").graph.n == 5

    def test_label_remapping(self):
        data = parse_edge_list("alice\tbob\nbob\tcarol\n")
        assert data.labels == ("alice", "bob", "carol")
        assert data.graph.edges == ((0, 1, 1.0), (1, 2, 1.0))

    def test_bad_lines(self):
        with pytest.raises(ValueError):
            parse_edge_list("0\t1\t2\t3\n")
        with pytest.raises(IdOutOfRange):
            parse_edge_list("n=2\n0\t3\n")
