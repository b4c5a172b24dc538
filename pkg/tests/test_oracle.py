import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from expander_listdec.csp import build_ael_csp, build_tanner_csp
from expander_listdec.oracle import (
    EDGE,
    FOLDED,
    brute_force_list_decode,
    check_concentration,
    compare,
    folded_mismatch,
    full_agreement_value,
    permute_within,
    rank_shift,
)
from expander_listdec.regularity import build_factor, min_concentration, weak_regularity_decompose

from conftest import rows

REP4 = np.array([[0, 0, 0, 0], [1, 1, 1, 1]])


def test_ball_of_radius_two_holds_both_repetition_words():
    assert rows(brute_force_list_decode(REP4, [0, 0, 1, 1], 2)) == [(0, 0, 0, 0), (1, 1, 1, 1)]


def test_ball_of_radius_one_is_empty():
    assert brute_force_list_decode(REP4, [0, 0, 1, 1], 1) == []


def test_codeword_center_radius_zero():
    assert rows(brute_force_list_decode(REP4, [1, 1, 1, 1], 0)) == [(1, 1, 1, 1)]


def test_folded_distance_counts_right_vertices(k22):
    # edge 0 is (u0,v0); flipping it changes only v0's view
    words = np.array([[0, 0, 0, 0]])
    assert len(brute_force_list_decode(words, [1, 0, 0, 0], 0, FOLDED, k22)) == 0
    assert len(brute_force_list_decode(words, [1, 0, 0, 0], 1, FOLDED, k22)) == 1
    assert folded_mismatch(k22, [1, 0, 0, 0], [0, 0, 0, 0]).tolist() == [True, False]


def test_folded_needs_graph():
    with pytest.raises(ValueError):
        brute_force_list_decode(REP4, [0, 0, 0, 0], 1, FOLDED)


def test_unknown_mode():
    with pytest.raises(ValueError):
        brute_force_list_decode(REP4, [0, 0, 0, 0], 1, "hamming")


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(0, 2), min_size=5, max_size=5), min_size=1, max_size=12),
       st.lists(st.integers(0, 2), min_size=5, max_size=5), st.integers(0, 5))
def test_matches_direct_definition(words, center, radius):
    got = rows(brute_force_list_decode(words, center, radius, EDGE))
    want = sorted(tuple(w) for w in words if sum(a != b for a, b in zip(w, center)) <= radius)
    assert got == want


def test_compare_reports_missing_and_spurious():
    rep = compare([[0, 0], [1, 1]], [[1, 1], [0, 1]])
    assert rep.missing == [(0, 0)] and rep.spurious == [(0, 1)]
    assert not rep.sound and not rep.complete
    assert rep.to_dict()["oracle_size"] == 2


def test_compare_ignores_order_and_duplicates():
    rep = compare([[1, 1], [0, 0]], [[0, 0], [1, 1], [0, 0]])
    assert rep.sound and rep.complete


def test_full_agreement_on_codeword(tiny_ael, k22_tanner):
    y = np.ones(4, dtype=np.int64)
    inst = build_ael_csp(tiny_ael.inner, tiny_ael.graph, y, 2)
    val, edges = full_agreement_value(inst, y, y, 0.5)
    assert val == edges == 4
    inst = build_tanner_csp(k22_tanner.local, k22_tanner.graph, np.zeros(4, dtype=np.int64), 2)
    val, edges = full_agreement_value(inst, np.zeros(4, dtype=np.int64), np.zeros(4, dtype=np.int64), 0.5)
    assert val == edges == 4


def test_concentration_of_codeword_is_zero_on_k22(k22_tanner):
    y = np.zeros(4, dtype=np.int64)
    inst = build_tanner_csp(k22_tanner.local, k22_tanner.graph, y, 2)
    decs = [weak_regularity_decompose(inst.g_alpha(a, b), 0.25, 4) for a in range(2) for b in range(2)]
    chk = check_concentration(inst, decs, y, y, 0.5, 0.25)
    assert chk.precondition_ok and chk.passed and chk.eta_measured == 0.0


def test_concentration_rejects_non_codeword(k22_tanner):
    inst = build_tanner_csp(k22_tanner.local, k22_tanner.graph, np.zeros(4, dtype=np.int64), 2)
    chk = check_concentration(inst, [], [1, 0, 0, 0], np.zeros(4), 0.5, 0.25, is_codeword=False)
    assert not chk.precondition_ok and not chk.passed


def test_permute_within_keeps_atom_multisets():
    rng = np.random.default_rng(3)
    vals = np.arange(10)
    groups = [np.array([0, 3, 5]), np.array([1, 2]), np.array([9])]
    out = permute_within(vals, groups, rng)
    for grp in groups:
        assert sorted(out[grp]) == sorted(vals[grp])
    assert np.array_equal(out[[4, 6, 7, 8]], vals[[4, 6, 7, 8]])


def test_rank_shift_moves_minorities_only():
    factor = build_factor(4, [[0, 1]])
    x = np.array([0, 1, 0, 0])
    _, plur = min_concentration(x, factor)
    out = rank_shift(x, factor.atoms, plur, 3)
    assert out.tolist() == [0, 2, 0, 0]
