import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from expander_listdec.graphs import (
    GraphError,
    double_cover,
    from_neighbors,
    mixing_discrepancy,
    random_regular_bipartite,
    read_graph,
    robust_neighbor_set,
    robust_size_bound,
    second_singular_value,
    write_graph,
)


def test_k22_is_the_only_2_regular_graph_on_2_plus_2():
    g = random_regular_bipartite(2, 2, 123)
    g.check_invariants()
    assert g.lam == pytest.approx(0, abs=1e-9)


def test_triangle_cover_is_hexagon(hexagon):
    hexagon.check_invariants()
    assert hexagon.lam == pytest.approx(1, abs=1e-9)


def test_k4_cover():
    g = double_cover(4, [(a, b) for a in range(4) for b in range(a + 1, 4)])
    assert (g.n, g.d) == (4, 3)
    assert g.lam == pytest.approx(1, abs=1e-9)


def test_double_cover_rejects_irregular_input():
    with pytest.raises(GraphError):
        double_cover(1, [])
    with pytest.raises(GraphError):
        double_cover(3, [(0, 1), (1, 2)])


def test_two_disjoint_k22_repeat_top_singular_value():
    g = from_neighbors([[0, 1], [0, 1], [2, 3], [2, 3]])
    assert second_singular_value(g) == pytest.approx(2, abs=1e-6)


def test_random_graph_n64_d8():
    g = random_regular_bipartite(64, 8, 1)
    g.check_invariants()
    assert 0 < g.lam < 8


def test_power_iteration_agrees_with_dense():
    g = random_regular_bipartite(80, 6, 5)
    dense = np.linalg.svd(g.biadjacency().toarray(), compute_uv=False)[1]
    assert g.lam == pytest.approx(dense, rel=1e-5)


@pytest.mark.parametrize("n,d", [(27, 7), (9, 8), (5, 5), (6, 5), (2, 1), (300, 4)])
def test_random_graph_invariants(n, d):
    g = random_regular_bipartite(n, d, n * d)
    g.check_invariants()


def test_random_graph_is_seeded():
    a, b = random_regular_bipartite(20, 4, 9), random_regular_bipartite(20, 4, 9)
    assert np.array_equal(a.nbrs, b.nbrs)


def test_rejects_bad_degree():
    with pytest.raises(GraphError):
        random_regular_bipartite(3, 4, 0)
    with pytest.raises(GraphError):
        random_regular_bipartite(3, 0, 0)


def test_from_neighbors_rejects_parallel_edges():
    with pytest.raises(GraphError):
        from_neighbors([[0, 0], [1, 1]])


def test_ports_are_mutually_inverse():
    g = random_regular_bipartite(12, 3, 0)
    for u in range(g.n):
        for i in range(g.d):
            assert g.right_port_to_left(*g.port(u, i)) == (u, i)


def test_mixing_examples(k22, hexagon):
    assert mixing_discrepancy(k22, [0], [0]) == pytest.approx((0, 0))
    assert mixing_discrepancy(hexagon, [], [0, 1]) == (0.0, 0.0)
    disc, bound = mixing_discrepancy(hexagon, [0, 1], [0])
    assert disc <= bound + 1e-9


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_mixing_lemma_random_sets(seed):
    rng = np.random.default_rng(seed)
    g = random_regular_bipartite(16, 4, seed % 7)
    disc, bound = mixing_discrepancy(g, rng.random(16) < 0.5, rng.random(16) < 0.5)
    assert disc <= bound + 1e-9


def test_robust_neighbors_trivial_cases():
    g = random_regular_bipartite(5, 5, 0)
    assert len(robust_neighbor_set(g, [0, 1], 0.4, 0.1)) == 5
    h = random_regular_bipartite(10, 3, 0)
    assert len(robust_neighbor_set(h, np.arange(10), 1.0, 0.3)) == 10


def test_robust_neighbors_on_hexagon(hexagon):
    S = robust_neighbor_set(hexagon, [0, 1], 2 / 3, 1 / 6)
    counts = [sum(int(v) in (0, 1) for v in hexagon.nbrs[u]) for u in range(3)]
    want = [u for u in range(3) if counts[u] >= (2 / 3 - 1 / 6) * 2]
    assert S.tolist() == want
    assert len(S) > robust_size_bound(hexagon, 1 / 6)


def test_roundtrip(tmp_path):
    g = random_regular_bipartite(10, 3, 4)
    write_graph(g, tmp_path / "g.txt")
    h = read_graph(tmp_path / "g.txt")
    assert np.array_equal(g.nbrs, h.nbrs)
    assert h.lam == pytest.approx(g.lam)
