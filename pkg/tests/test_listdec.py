import numpy as np
import pytest

from expander_listdec.ael import ael_encode, ael_enumerate, build_ael, folded_distance
from expander_listdec.codes import make_linear_code, make_rs_code, rs_encode
from expander_listdec.graphs import random_regular_bipartite
from expander_listdec.listdec import (
    DecodeParams,
    ael_list_decode,
    custom_decode,
    tanner_list_decode,
    tanner_unique_decode,
)
from expander_listdec.oracle import FOLDED, brute_force_list_decode, compare
from expander_listdec.tanner import build_tanner, tanner_enumerate, tanner_membership

from conftest import rows


@pytest.fixture
def c5_tanner(c5):
    return build_tanner(random_regular_bipartite(6, 5, 6), c5)


def small_ael(seed=1):
    g = random_regular_bipartite(5, 3, seed)
    return build_ael(make_linear_code(5, [[1, 1, 1]]), make_rs_code(5, 5, 2), g)


def test_unique_decoder_on_k22(k22_tanner):
    assert tanner_unique_decode(k22_tanner, [1, 0, 0, 0]).tolist() == [0, 0, 0, 0]
    assert tanner_unique_decode(k22_tanner, [1, 1, 1, 1]).tolist() == [1, 1, 1, 1]
    assert tanner_unique_decode(k22_tanner, [1, 1, 0, 0]) is None


def test_tanner_k22_one_error(k22_tanner):
    rep = tanner_list_decode(k22_tanner, [0, 0, 0, 1], DecodeParams(eps=0.1, ell=2))
    assert (0, 0, 0, 0) in rows(rep.words)
    assert len(rep.words) <= rep.list_bound


def test_tanner_codeword_is_listed(c5_tanner):
    z = tanner_enumerate(c5_tanner)[2]
    rep = tanner_list_decode(c5_tanner, z, DecodeParams(eps=0.2, ell=2, gamma=0.05))
    assert tuple(z.tolist()) in rows(rep.words)


def test_tanner_outputs_are_sound_and_match_oracle(c5_tanner):
    rng = np.random.default_rng(4)
    W = tanner_enumerate(c5_tanner)
    for t in range(3):
        y = W[rng.integers(len(W))].copy()
        y[rng.choice(30, size=2, replace=False)] ^= 1
        rep = tanner_list_decode(c5_tanner, y, DecodeParams(eps=0.2, ell=2, gamma=0.05, seed=t))
        for w in rep.words:
            assert tanner_membership(c5_tanner, w)
            assert np.count_nonzero(w != y) <= rep.radius
        assert compare(brute_force_list_decode(W, y, rep.radius), rep.words).sound


def test_custom_decode_contains_codeword(c5_tanner):
    z = tanner_enumerate(c5_tanner)[1]
    out = custom_decode(c5_tanner, z, DecodeParams(eps=0.2, ell=2, gamma=0.05))
    assert tuple(z.tolist()) in rows(out)
    assert all(tanner_membership(c5_tanner, w) for w in out)


def test_ael_tiny_right_vertex_corruption(tiny_ael):
    z, _ = ael_encode(tiny_ael, [1, 1])
    y = z.copy()
    y[tiny_ael.graph.right_edges[0]] = 0
    rep = ael_list_decode(tiny_ael, y, DecodeParams(eps=0.5, ell=2))
    oracle = brute_force_list_decode(ael_enumerate(tiny_ael), y, rep.radius, FOLDED, tiny_ael.graph)
    assert rows(rep.words) == rows(oracle)


def test_ael_uncorrupted_codeword():
    code = small_ael()
    z, _ = ael_encode(code, rs_encode(code.outer, [3, 1]))
    rep = ael_list_decode(code, z, DecodeParams(eps=1 / 3, ell=5))
    assert tuple(z.tolist()) in rows(rep.words)


def test_ael_outputs_within_radius():
    code = small_ael(2)
    y = np.random.default_rng(0).integers(0, 5, code.length)
    rep = ael_list_decode(code, y, DecodeParams(eps=1 / 3, ell=5, gamma=0.2))
    for w in rep.words:
        assert folded_distance(code.graph, w, y) <= rep.radius


def test_decoding_is_deterministic(c5_tanner):
    y = tanner_enumerate(c5_tanner)[3].copy()
    y[[0, 11]] ^= 1
    p = DecodeParams(eps=0.2, ell=2, gamma=0.05, oracle="heuristic", seed=9)
    a = tanner_list_decode(c5_tanner, y, p).to_dict(timings=False)
    b = tanner_list_decode(c5_tanner, y, p).to_dict(timings=False)
    assert a == b


def test_report_flags_out_of_regime(c5_tanner):
    rep = tanner_list_decode(c5_tanner, np.zeros(30, dtype=np.int64), DecodeParams(eps=0.2, ell=2, gamma=0.05))
    assert rep.preconditions["lambda_over_d"] == pytest.approx(c5_tanner.graph.lam / 5)
    assert not rep.in_regime
    assert rep.to_dict()["flags"]["all_certified_exact"]


def test_params_validation(c5_tanner):
    with pytest.raises(ValueError):
        tanner_list_decode(c5_tanner, np.zeros(30, dtype=np.int64), DecodeParams(eps=0.9, ell=2))
