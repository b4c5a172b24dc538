import numpy as np
import pytest

from expander_listdec.codes import CodeError, make_linear_code
from expander_listdec.graphs import random_regular_bipartite
from expander_listdec.tanner import (
    EnumerationTooLarge,
    build_tanner,
    design_distance_edges,
    left_views,
    measured_distance,
    rate_lower_bound,
    read_edge_word,
    right_views,
    tanner_enumerate,
    tanner_membership,
    unique_radius_edges,
    write_edge_word,
)

from conftest import rows


def test_k22_design_distance(k22_tanner):
    assert k22_tanner.design_distance == pytest.approx(1.0)


def test_hexagon_design_distance(hexagon, rep2):
    assert build_tanner(hexagon, rep2).design_distance == pytest.approx(0.5)


def test_block_length_mismatch(k22):
    with pytest.raises(CodeError):
        build_tanner(k22, make_linear_code(2, [[1, 1, 1]]))


def test_membership(k22_tanner):
    assert tanner_membership(k22_tanner, [0, 0, 0, 0])
    assert tanner_membership(k22_tanner, [1, 1, 1, 1])
    assert not tanner_membership(k22_tanner, [1, 0, 0, 0])


def test_k22_enumeration(k22_tanner):
    assert rows(tanner_enumerate(k22_tanner)) == [(0, 0, 0, 0), (1, 1, 1, 1)]
    assert k22_tanner.rate == pytest.approx(0.25)
    assert measured_distance(k22_tanner) == 4


def test_views_are_consistent(k22):
    w = np.array([0, 1, 1, 0])
    assert left_views(k22, w).tolist() == [[0, 1], [1, 0]]
    assert right_views(k22, w).tolist() == [[0, 1], [1, 0]]


def test_single_flip_breaks_membership(c5):
    g = random_regular_bipartite(6, 5, 6)
    tc = build_tanner(g, c5)
    for w in tanner_enumerate(tc):
        assert tanner_membership(tc, w)
        bad = w.copy()
        bad[7] ^= 1
        assert not tanner_membership(tc, bad)
    assert np.any(np.all(tanner_enumerate(tc) == 0, axis=1))


def test_measured_distance_dominates_design():
    g = random_regular_bipartite(6, 6, 0)
    tc = build_tanner(g, make_linear_code(2, [[1] * 6]))
    assert measured_distance(tc) >= design_distance_edges(tc) - 1e-9
    assert tc.rate >= rate_lower_bound(tc) - 1e-12
    assert unique_radius_edges(tc) == (measured_distance(tc) - 1) // 2


def test_degenerate_design_is_flagged(c5):
    g = random_regular_bipartite(8, 5, 3)
    with pytest.warns(UserWarning):
        tc = build_tanner(g, c5)
    assert tc.degenerate and tc.design_distance == 0.0


def test_large_codes_refuse_dense_enumeration(c5):
    tc = build_tanner(random_regular_bipartite(256, 5, 0), c5)
    with pytest.raises(EnumerationTooLarge):
        tanner_enumerate(tc)


def test_edge_word_roundtrip(tmp_path):
    w = np.array([0, 2, 1, 1, 0])
    write_edge_word(w, tmp_path / "w.txt")
    assert read_edge_word(tmp_path / "w.txt").tolist() == w.tolist()
