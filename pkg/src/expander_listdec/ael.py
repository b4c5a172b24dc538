"""AEL distance-amplified codes ``C(C_in, C_out, G)``.

Outer symbols map to inner codewords by lexicographic rank.  The code lives
on edges; distance is counted per right vertex on the folded views.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path

import numpy as np

from .codes import CodeError, LocalCode, RSCode, make_rs_code, read_code, rs_encode, rs_is_codeword, word_keys
from .graphs import BipartiteExpander, read_graph
from .tanner import left_views, right_views


@dataclass(frozen=True)
class FoldedViews:
    left: np.ndarray
    right: np.ndarray


@dataclass(eq=False)
class AELCode:
    inner: LocalCode
    outer: RSCode
    graph: BipartiteExpander
    design_distance: float = field(init=False)
    _sorted_keys: np.ndarray | None = field(default=None, init=False, repr=False)
    _key_rank: np.ndarray | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        g = self.graph
        if self.inner.block_len != g.d:
            raise CodeError(f"inner block length {self.inner.block_len} != d={g.d}")
        if self.outer.n != g.n:
            raise CodeError(f"outer block length {self.outer.n} != n={g.n}")
        if self.inner.size != self.outer.q:
            raise CodeError(
                f"|C_in| = {self.inner.q}^{self.inner.dim} = {self.inner.size} != q_out = {self.outer.q}"
            )
        self.design_distance = self.inner.rel_distance - (g.lam / g.d) / self.outer.rel_distance

    @property
    def length(self) -> int:
        return self.graph.num_edges

    @property
    def rate(self) -> float:
        return self.inner.rate * self.outer.rate

    def ranks(self, views: np.ndarray) -> np.ndarray:
        """Inner-codeword rank of each row, ``-1`` when a row is not a codeword."""
        if self._sorted_keys is None:
            keys = word_keys(self.inner.table, self.inner.q)
            order = np.argsort(keys)
            self._sorted_keys, self._key_rank = keys[order], order
        k = word_keys(np.atleast_2d(views), self.inner.q)
        pos = np.minimum(np.searchsorted(self._sorted_keys, k), len(self._sorted_keys) - 1)
        hit = self._sorted_keys[pos] == k
        return np.where(hit, self._key_rank[pos], -1)


def build_ael(inner: LocalCode, outer: RSCode, graph: BipartiteExpander) -> AELCode:
    return AELCode(inner, outer, graph)


def fold(graph: BipartiteExpander, word) -> FoldedViews:
    word = np.asarray(word, dtype=np.int64)
    return FoldedViews(left_views(graph, word).copy(), right_views(graph, word).copy())


def refold(graph: BipartiteExpander, views: FoldedViews) -> np.ndarray:
    """Edge word from folded views; both sides must describe the same word."""
    word = views.left.reshape(-1).copy()
    if not np.array_equal(right_views(graph, word), views.right):
        raise CodeError("left and right folded views disagree")
    return word


def edge_word_from_outer(code: AELCode, x) -> np.ndarray:
    return code.inner.table[np.asarray(x, dtype=np.int64)].reshape(-1)


def ael_encode(code: AELCode, x) -> tuple[np.ndarray, FoldedViews]:
    x = np.asarray(x, dtype=np.int64)
    if not rs_is_codeword(code.outer, x):
        raise CodeError("input is not an outer codeword")
    word = edge_word_from_outer(code, x)
    return word, fold(code.graph, word)


def enc_inverse(code: AELCode, left) -> np.ndarray:
    r = code.ranks(np.asarray(left).reshape(code.graph.n, code.graph.d))
    if np.any(r < 0):
        raise CodeError(f"left view of vertex {int(np.nonzero(r < 0)[0][0])} is not an inner codeword")
    return r


def folded_distance(graph: BipartiteExpander, a, b) -> int:
    """Number of right vertices whose views differ."""
    ra, rb = right_views(graph, a), right_views(graph, b)
    return int(np.count_nonzero(np.any(ra != rb, axis=1)))


def ael_enumerate(code: AELCode, cap: int = 1 << 16) -> np.ndarray:
    """All codewords as edge words (rows), ordered by outer message."""
    rs = code.outer
    if rs.q**rs.k > cap:
        raise CodeError(f"{rs.q}^{rs.k} outer codewords exceed cap {cap}")
    msgs = np.array(list(product(range(rs.q), repeat=rs.k)), dtype=np.int64)
    return np.array([edge_word_from_outer(code, rs_encode(rs, m)) for m in msgs])


def measured_distance(code: AELCode) -> int:
    """Minimum folded right-vertex distance over all pairs of codewords.

    The rank bijection is not linear, so the code need not be linear either.
    """
    words = ael_enumerate(code)
    keys = np.stack([word_keys(right_views(code.graph, w), code.inner.q) for w in words])
    best = code.graph.n
    for i in range(len(keys) - 1):
        dist = np.count_nonzero(keys[i + 1 :] != keys[i], axis=1)
        if dist.size:
            best = min(best, int(dist.min()))
    return best


def load_ael_config(path) -> AELCode:
    """JSON config: ``{"graph": file, "inner": file, "rs": [q_out, n, k]}`` (paths relative to config)."""
    path = Path(path)
    cfg = json.loads(path.read_text())
    base = path.parent
    graph = read_graph(base / cfg["graph"])
    inner = read_code(base / cfg["inner"])
    q_out, n, k = cfg["rs"]
    return build_ael(inner, make_rs_code(q_out, n, k), graph)
