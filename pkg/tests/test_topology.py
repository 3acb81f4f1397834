import numpy as np
import pytest

from sbmlab.graph import Graph
from sbmlab.model import SymmetricSbm, sample
from sbmlab.topology import component_stats, predicted_fractions, tau_j
from sbmlab.typicality import tau


def test_two_paths_example():
    # forest of two 3-paths: both are isolated trees; the "giant" is one of
    # them and strips down to its center (2 edges removed)
    g = Graph(6, [[0, 1], [1, 2], [3, 4], [4, 5]])
    st = component_stats(g)
    assert st.T == 2
    assert st.M == 4
    assert st.giant_size == 3
    assert st.F == 2
    assert st.T_j[3] == 2


def test_no_giant_warns():
    g = Graph(300, [[0, 1]])
    with pytest.warns(RuntimeWarning):
        component_stats(g)


def test_complete_graph_example():
    g = Graph(5, [[u, v] for u in range(5) for v in range(u + 1, 5)])
    st = component_stats(g)
    assert st.T == 0 and st.M == 0
    assert st.giant_size == 5
    assert st.F == 0


def test_isolated_vertex_plus_triangle():
    g = Graph(4, [[1, 2], [2, 3], [1, 3]])
    st = component_stats(g)
    assert st.T == 1 and st.T_j[1] == 1
    assert st.M == 0
    assert st.giant_size == 3
    assert st.F == 0


def test_tree_edge_invariant(rng):
    for seed in range(5):
        params = SymmetricSbm(3000, 2, 4.0, 1.0).to_params()
        _, g = sample(params, 3000, seed)
        st = component_stats(g, j_max=3000)
        assert st.M == sum((j - 1) * st.T_j[j] for j in range(1, len(st.T_j)))
        assert st.giant_size <= g.n


def test_predicted_fractions_values():
    with pytest.raises(ValueError):
        predicted_fractions(1.0, 1.0, 2)
    # d -> 1+ makes the giant vanish
    pred = predicted_fractions(1.001, 1.001, 2)
    assert pred.giant_frac < 0.01
    # d = 2: giant fraction 1 - tau/d with tau(2) ~ 0.40638
    pred = predicted_fractions(2.0, 2.0, 2)
    assert pred.giant_frac == pytest.approx(1 - 0.4063757399599 / 2, abs=1e-9)


def test_tau_j_series_identities():
    # 200 terms: at d = 1.5 the term ratio is ~0.91 and 60 terms still
    # leave a few-1e-6 tail in the j-weighted sum
    for d in (1.5, 2.0, 3.0):
        t = tau(d)
        s0 = sum(tau_j(j, d) for j in range(1, 201))
        s1 = sum(j * tau_j(j, d) for j in range(1, 201))
        s2 = sum((j - 1) * tau_j(j, d) for j in range(1, 201))
        assert s0 == pytest.approx(t - t * t / 2, abs=1e-6)
        assert s1 == pytest.approx(t, abs=1e-6)
        assert s2 == pytest.approx(t * t / 2, abs=1e-6)


def test_fractions_concentrate_small():
    # quick mid-scale check; the acceptance suite re-runs this at n = 1e5
    n = 30000
    params = SymmetricSbm(n, 2, 5.0, 1.0).to_params()
    pred = predicted_fractions(5.0, 1.0, 2)
    obs = np.zeros(4)
    for seed in range(3):
        _, g = sample(params, n, seed)
        st = component_stats(g)
        obs += np.array([st.T, st.M, st.giant_size, st.F]) / n
    obs /= 3
    assert obs[0] == pytest.approx(pred.tree_frac, abs=0.02)
    assert obs[1] == pytest.approx(pred.tree_edge_frac, abs=0.02)
    assert obs[2] == pytest.approx(pred.giant_frac, abs=0.02)
    assert obs[3] == pytest.approx(pred.planted_edge_frac, abs=0.03)
