import itertools

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from expander_listdec.graphs import random_regular_bipartite
from expander_listdec.regularity import (
    EnumerationCapExceeded,
    build_factor,
    conditional_average,
    cut_norm_residual,
    default_p_max,
    enumerate_measurable,
    exact_cut_oracle,
    heuristic_cut_oracle,
    measurable_count,
    min_concentration,
    weak_regularity_decompose,
)


def brute_cut_value(M):
    n, m = M.shape
    best = 0.0
    for s in itertools.product([0, 1], repeat=n):
        r = np.asarray(s) @ M
        best = max(best, r[r > 0].sum(), -r[r < 0].sum())
    return best


def edge_function(g, rng, keep=0.5):
    mask = rng.random(g.num_edges) < keep
    return sp.csr_matrix((np.ones(int(mask.sum())), (g.edge_left[mask], g.edge_right[mask])), shape=(g.n, g.n))


def test_exact_oracle_examples():
    assert exact_cut_oracle(np.ones((2, 2)))[2] == 4
    assert exact_cut_oracle(np.zeros((3, 3)))[2] == 0
    S, T, val = exact_cut_oracle(np.array([[1.0, -1.0], [-1.0, 1.0]]))
    assert val == 1
    assert abs(S.astype(float) @ np.array([[1.0, -1.0], [-1.0, 1.0]]) @ T.astype(float)) == 1


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 7), st.integers(0, 2**32 - 1))
def test_exact_oracle_matches_brute_force(n, seed):
    M = np.random.default_rng(seed).normal(size=(n, n))
    S, T, val = exact_cut_oracle(M)
    assert val == pytest.approx(brute_cut_value(M))
    assert abs(S.astype(float) @ M @ T.astype(float)) == pytest.approx(val)


def test_heuristic_agrees_on_random_8x8():
    rng = np.random.default_rng(0)
    agree = 0
    for i in range(100):
        M = rng.normal(size=(8, 8))
        agree += heuristic_cut_oracle(M, seed=i)[2] == pytest.approx(exact_cut_oracle(M)[2])
    assert agree >= 95


def test_heuristic_trivial_cases():
    assert heuristic_cut_oracle(np.ones((2, 2)))[2] == 4
    assert heuristic_cut_oracle(np.zeros((4, 4)))[2] == 0


def test_complete_graph_decomposes_in_one_step():
    g = random_regular_bipartite(5, 5, 0)
    dec = weak_regularity_decompose(g.biadjacency(), 0.2, g.num_edges)
    assert dec.p == 1 and dec.certified_residual == 0
    k, S, T = dec.terms[0]
    assert k == 1 and S.all() and T.all()


def test_zero_function():
    dec = weak_regularity_decompose(sp.csr_matrix((6, 6)), 0.2, 12)
    assert dec.p == 0 and dec.certified_residual == 0


def test_random_function_residual_certified():
    g = random_regular_bipartite(10, 4, 1)
    gm = edge_function(g, np.random.default_rng(1))
    dec = weak_regularity_decompose(gm, 0.2, g.num_edges)
    assert dec.certified_exact and dec.certified_residual <= 0.2 * 40
    assert cut_norm_residual(gm, dec) == pytest.approx(dec.certified_residual)
    assert dec.p <= default_p_max(0.2)


def test_energy_decreases():
    g = random_regular_bipartite(12, 4, 2)
    gm = edge_function(g, np.random.default_rng(2), 0.7)
    dec = weak_regularity_decompose(gm, 0.1, g.num_edges, oracle="heuristic")
    e = dec.energies
    assert all(b <= a + 1e-9 for a, b in zip(e, e[1:]))
    assert len(e) == dec.p + 1


def test_decomposition_is_seeded():
    g = random_regular_bipartite(30, 4, 3)
    gm = edge_function(g, np.random.default_rng(3))
    a = weak_regularity_decompose(gm, 0.15, g.num_edges, oracle="heuristic", seed=5)
    b = weak_regularity_decompose(gm, 0.15, g.num_edges, oracle="heuristic", seed=5)
    assert a.dump() == b.dump()


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        weak_regularity_decompose(sp.csr_matrix(np.ones((2, 2))), 0.2, 3)
    with pytest.raises(ValueError):
        weak_regularity_decompose(sp.csr_matrix((30, 30)), 0.2, 30, oracle="exact")


def test_factor_examples():
    assert build_factor(4, []).num_atoms == 1
    assert build_factor(4, [[0, 1]]).partition() == {frozenset({0, 1}), frozenset({2, 3})}
    assert build_factor(4, [[0, 1], [1, 2]]).num_atoms == 4


def test_atoms_ordered_by_smallest_element():
    f = build_factor(5, [[3, 4], [1]])
    assert [int(a[0]) for a in f.atoms] == sorted(int(a[0]) for a in f.atoms)


def test_conditional_average():
    f = build_factor(4, [[0, 1]])
    assert conditional_average(np.array([1.0, 3, 5, 7]), f).tolist() == [2, 2, 6, 6]
    assert conditional_average(np.full(4, 2.5), f).tolist() == [2.5] * 4


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 30), st.integers(0, 4), st.integers(0, 2**32 - 1))
def test_measurable_inner_product(n, cuts, seed):
    rng = np.random.default_rng(seed)
    B = build_factor(n, [rng.random(n) < 0.5 for _ in range(cuts)])
    h = rng.normal(size=B.num_atoms)[B.atom_of]
    f = rng.normal(size=n)
    assert h @ f == pytest.approx(h @ conditional_average(f, B), abs=1e-9)


def test_min_concentration_examples():
    f = build_factor(4, [[0, 1]])
    assert min_concentration(np.array([0, 0, 1, 1]), f)[0] == 0
    eta, plur = min_concentration(np.array([1, 2, 1, 1]), f)
    assert eta == 0.25 and plur[0] == 1
    eta, plur = min_concentration(np.array([1, 2, 3, 4]), build_factor(4, []))
    assert eta == 0.75 and plur[0] == 1


def test_restricted_factor():
    f = build_factor(6, [[0, 1, 2]]).restrict([1, 2, 3])
    assert f.partition() == {frozenset({1, 2}), frozenset({3})}


def test_measurable_enumeration_counts():
    two = build_factor(4, [[0, 1]])
    assert len(list(enumerate_measurable(two, 3))) == 9
    three = build_factor(3, [[0], [1]])
    assert measurable_count(three, 2) == 8
    empty = build_factor(0, [])
    assert len(list(enumerate_measurable(empty, 5))) == 1


def test_measurable_assignments_are_constant_on_atoms():
    f = build_factor(5, [[0, 1], [1, 4]])
    seen = set()
    for x in enumerate_measurable(f, 2):
        for atom in f.atoms:
            assert len(set(np.asarray(x)[atom].tolist())) == 1
        seen.add(tuple(np.asarray(x).tolist()))
    assert len(seen) == 2 ** f.num_atoms


def test_enumeration_cap():
    f = build_factor(6, [[i] for i in range(6)])
    with pytest.raises(EnumerationCapExceeded):
        list(enumerate_measurable(f, 4, cap=100))
