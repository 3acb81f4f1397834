import numpy as np
import pytest

from sbmlab.graph import (Graph, read_edgelist, read_labels, write_edgelist,
                          write_labels)

from conftest import random_graph


def test_directed_edge_structure():
    g = Graph(4, [[0, 1], [1, 2], [0, 2], [2, 3]])
    assert g.num_edges == 4
    assert g.num_directed_edges == 8
    # twin is an involution pairing (u,w) with (w,u)
    assert np.array_equal(g.twin[g.twin], np.arange(8))
    for e in range(8):
        t = g.twin[e]
        assert g.tails[e] == g.indices[t] and g.indices[e] == g.tails[t]
        assert g.undirected_id[e] == g.undirected_id[t]
    assert set(g.undirected_id) == {0, 1, 2, 3}
    # CSR order is lexicographic on (tail, head)
    keys = g.tails * g.n + g.indices
    assert np.all(np.diff(keys) > 0)


def test_neighbors_sorted_and_lookup(rng):
    g = random_graph(rng, 12, 3.0)
    for v in range(g.n):
        nb = g.neighbors(v)
        assert np.all(np.diff(nb) > 0)
        for w in nb:
            e = g.directed_edge_index(v, int(w))
            assert g.tails[e] == v and g.indices[e] == w
            assert g.has_edge(v, int(w)) and g.has_edge(int(w), v)
    with pytest.raises(KeyError):
        g.directed_edge_index(0, 0)


def test_rejects_self_loops_and_parallel_edges():
    with pytest.raises(ValueError):
        Graph(3, [[0, 0]])
    with pytest.raises(ValueError):
        Graph(3, [[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        Graph(2, [[0, 5]])


def test_immutability():
    g = Graph(2, [[0, 1]])
    with pytest.raises(AttributeError):
        g.n = 5


def test_edgelist_round_trip(tmp_path, rng):
    g = random_graph(rng, 15, 3.0)
    path = tmp_path / "g.edges"
    write_edgelist(g, path)
    text = path.read_bytes().decode()
    lines = text.splitlines()
    # "u v" with u < v, sorted, LF-only
    assert b"\r" not in path.read_bytes()
    pairs = [tuple(map(int, ln.split())) for ln in lines]
    assert all(u < v for u, v in pairs)
    assert pairs == sorted(pairs)
    g2 = read_edgelist(path, n=g.n)
    assert np.array_equal(g2.indices, g.indices)
    assert np.array_equal(g2.indptr, g.indptr)


def test_labels_round_trip(tmp_path):
    labels = np.array([0, 2, 1, 1, 0])
    path = tmp_path / "labels.txt"
    write_labels(labels, path)
    assert path.read_text() == "0\n2\n1\n1\n0\n"
    assert np.array_equal(read_labels(path), labels)
