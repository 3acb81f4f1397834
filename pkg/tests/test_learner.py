import networkx as nx
import numpy as np
import pytest

from sbmlab.graph import Graph
from sbmlab.learner import (count_cycles, estimate_params,
                            expected_cycle_count, nb_closed_walks_total)
from sbmlab.model import SymmetricSbm, sample

from conftest import random_graph

TRIANGLE = [[0, 1], [1, 2], [0, 2]]


def test_count_cycles_examples():
    tri = Graph(3, TRIANGLE)
    assert count_cycles(tri, 3) == 1
    k4 = Graph(4, [[u, v] for u in range(4) for v in range(u + 1, 4)])
    assert count_cycles(k4, 3) == 4
    assert count_cycles(k4, 4) == 3
    path = Graph(5, [[0, 1], [1, 2], [2, 3], [3, 4]])
    for m in (3, 4, 5):
        assert count_cycles(path, m) == 0
    with pytest.raises(ValueError):
        count_cycles(tri, 2)


def test_count_cycles_matches_networkx(rng):
    for _ in range(20):
        g = random_graph(rng, int(rng.integers(4, 11)), 3.0)
        G = nx.Graph([tuple(e) for e in g.edge_array()])
        G.add_nodes_from(range(g.n))
        by_len = {}
        for cyc in nx.simple_cycles(G, length_bound=7):
            by_len[len(cyc)] = by_len.get(len(cyc), 0) + 1
        for m in range(3, 8):
            assert count_cycles(g, m) == by_len.get(m, 0)


def test_nb_closed_walks_examples():
    tri = Graph(3, TRIANGLE)
    assert nb_closed_walks_total(tri, 3) == 6
    square = Graph(4, [[0, 1], [1, 2], [2, 3], [0, 3]])
    assert nb_closed_walks_total(square, 4) == 8
    path = Graph(5, [[0, 1], [1, 2], [2, 3], [3, 4]])
    for m in (3, 4, 5, 6):
        assert nb_closed_walks_total(path, m) == 0


def _cycles_far_apart(g, m):
    """All simple cycles pairwise further than m apart (no interaction
    within closed walks of length <= m)."""
    G = nx.Graph([tuple(e) for e in g.edge_array()])
    G.add_nodes_from(range(g.n))
    cycles = list(nx.simple_cycles(G))
    for i in range(len(cycles)):
        for j in range(i + 1, len(cycles)):
            dmin = min(
                nx.shortest_path_length(G, u, v) if nx.has_path(G, u, v) else m + 1
                for u in cycles[i] for v in cycles[j])
            if dmin <= m:
                return False
    return True


def test_walk_totals_equal_cycle_windings(rng):
    # on graphs whose cycles are far apart, the length-m walk total is the
    # winding sum 2r' * (cycles of length r') over r' dividing m; when no
    # shorter cycle length divides m this is exactly 2m * count_cycles(m)
    checked = 0
    while checked < 100:
        g = random_graph(rng, int(rng.integers(4, 13)), 2.5)
        if not _cycles_far_apart(g, 6):
            continue
        for m in range(3, 7):
            want = sum(2 * rp * count_cycles(g, rp)
                       for rp in range(3, m + 1) if m % rp == 0)
            assert nb_closed_walks_total(g, m) == want
            if all(count_cycles(g, rp) == 0
                   for rp in range(3, m) if m % rp == 0):
                assert nb_closed_walks_total(g, m) == 2 * m * count_cycles(g, m)
        checked += 1


def test_expected_cycle_count_oracle():
    params = SymmetricSbm(100, 2, 3.0, 1.0).to_params()
    # eigenvalues 2 and 1: (1/6)(2^3 + 1^3) = 1.5
    assert expected_cycle_count(params, 3) == pytest.approx(1.5, abs=1e-12)


def test_estimate_params_guards():
    g = Graph(4, np.zeros((0, 2), dtype=np.int64))
    with pytest.raises(ValueError):
        estimate_params(g)
    tri = Graph(3, TRIANGLE)
    with pytest.raises(ValueError):
        estimate_params(tri, m_max=4)
    with pytest.raises(ValueError):
        estimate_params(tri, k_max=1)


def test_inversion_consistency_and_determinism():
    n = 20000
    params = SymmetricSbm(n, 2, 5.0, 1.0).to_params()
    _, g = sample(params, n, 0)
    r1 = estimate_params(g)
    r2 = estimate_params(g)
    assert r1 == r2
    assert abs((r1.a_hat + (r1.k_hat - 1) * r1.b_hat) / r1.k_hat - r1.d_hat) < 1e-12


def test_no_signal_on_erdos_renyi():
    # the flag is a noisy statistic (a handful of O(1)-mean cycle counts);
    # this instance is deterministic and well inside the flagged region
    n = 30000
    params = SymmetricSbm(n, 2, 3.0, 3.0).to_params()
    _, g = sample(params, n, 0)
    res = estimate_params(g)
    assert res.no_signal
    assert abs(res.mu_hat) < 0.5


def test_estimate_recovers_midscale():
    n = 50000
    params = SymmetricSbm(n, 2, 5.0, 1.0).to_params()
    _, g = sample(params, n, 2)
    res = estimate_params(g)
    assert res.k_hat == 2
    assert abs(res.mu_hat - 2.0) < 0.6
    assert not res.no_signal
