"""Tanner codes ``C(C_0, G)``: every vertex view lies in the local code."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path

import numpy as np

from .codes import CodeError, LocalCode, word_keys
from .graphs import BipartiteExpander

ENUM_CAP = 1 << 20
ENUM_MAX_EDGES = 1024


class EnumerationTooLarge(CodeError):
    pass


def left_views(graph: BipartiteExpander, word: np.ndarray) -> np.ndarray:
    """``(n, d)`` array; row u is the view of left vertex u in port order."""
    return np.asarray(word).reshape(graph.n, graph.d)


def right_views(graph: BipartiteExpander, word: np.ndarray) -> np.ndarray:
    return np.asarray(word)[graph.right_edges]


def read_edge_word(path) -> np.ndarray:
    return np.array(Path(path).read_text().split(), dtype=np.int64)


def write_edge_word(word, path) -> None:
    Path(path).write_text(" ".join(map(str, np.asarray(word).tolist())) + "\n")


@dataclass(eq=False)
class TannerCode:
    graph: BipartiteExpander
    local: LocalCode
    design_distance: float = field(init=False)
    degenerate: bool = field(init=False, default=False)
    _basis: np.ndarray | None = field(default=None, init=False, repr=False)
    _codewords: np.ndarray | None = field(default=None, init=False, repr=False)
    _keys: np.ndarray | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        if self.local.block_len != self.graph.d:
            raise CodeError(
                f"local block length {self.local.block_len} != graph degree {self.graph.d}"
            )
        d0 = self.local.rel_distance
        gap = d0 - self.graph.lam / self.graph.d
        if gap <= 0:
            self.degenerate = True
            warnings.warn("lambda/d >= delta_0; design distance clamped to 0", stacklevel=3)
        self.design_distance = d0 * max(gap, 0.0)

    @property
    def q(self) -> int:
        return self.local.q

    @property
    def length(self) -> int:
        return self.graph.num_edges

    def _local_keys(self) -> np.ndarray:
        if self._keys is None:
            self._keys = np.sort(word_keys(self.local.table, self.q))
        return self._keys

    def parity_checks(self) -> np.ndarray:
        """Stacked local parity checks, one block of ``d - k`` rows per vertex."""
        H0 = self.local.parity_check()
        g = self.graph
        r = H0.shape[0]
        H = np.zeros((2 * g.n * r, g.num_edges), dtype=np.int64)
        for u in range(g.n):
            H[u * r : (u + 1) * r, u * g.d + np.arange(g.d)] = H0
        base = g.n * r
        for v in range(g.n):
            H[base + v * r : base + (v + 1) * r, g.right_edges[v]] = H0
        return H

    def basis(self) -> np.ndarray:
        if self._basis is None:
            if self.length > ENUM_MAX_EDGES:
                raise EnumerationTooLarge(f"nd={self.length} too large for dense null space")
            self._basis = self.local.gf.nullspace(self.parity_checks())
        return self._basis

    @property
    def dim(self) -> int:
        return self.basis().shape[0]

    @property
    def rate(self) -> float:
        return self.dim / self.length


def build_tanner(graph: BipartiteExpander, local: LocalCode) -> TannerCode:
    return TannerCode(graph, local)


def tanner_membership(code: TannerCode, word) -> bool:
    word = np.asarray(word, dtype=np.int64)
    if word.shape != (code.length,):
        raise CodeError(f"word length {word.shape} != nd={code.length}")
    keys = code._local_keys()
    for views in (left_views(code.graph, word), right_views(code.graph, word)):
        k = word_keys(views, code.q)
        pos = np.searchsorted(keys, k)
        pos = np.minimum(pos, len(keys) - 1)
        if not np.all(keys[pos] == k):
            return False
    return True


def tanner_enumerate(code: TannerCode, cap: int = ENUM_CAP) -> np.ndarray:
    """All codewords (rows) in lexicographic order."""
    if code._codewords is None:
        B = code.basis()
        count = code.q ** B.shape[0]
        if count > cap:
            raise EnumerationTooLarge(f"{count} codewords exceed cap {cap}")
        coeffs = np.array(list(product(range(code.q), repeat=B.shape[0])), dtype=np.int64)
        if B.shape[0] == 0:
            words = np.zeros((1, code.length), dtype=np.int64)
        else:
            words = code.local.gf.matmul(coeffs, B)
        code._codewords = words[np.lexsort(words.T[::-1])]
    return code._codewords


def is_enumerable(code: TannerCode, cap: int = ENUM_CAP) -> bool:
    try:
        return code.q ** code.dim <= cap
    except EnumerationTooLarge:
        return False


def measured_distance(code: TannerCode) -> int:
    """Exact minimum distance in edges (``nd`` if the code is trivial)."""
    words = tanner_enumerate(code)
    w = np.count_nonzero(words, axis=1)
    return int(w[w > 0].min()) if np.any(w > 0) else code.length


def rate_lower_bound(code: TannerCode) -> float:
    return 2 * code.local.rate - 1


def design_distance_edges(code: TannerCode) -> float:
    return code.design_distance * code.length


def unique_radius_edges(code: TannerCode) -> int:
    """``floor((D - 1) / 2)`` with D the measured distance when enumerable, else design."""
    if is_enumerable(code):
        D = measured_distance(code)
    else:
        D = design_distance_edges(code)
    return max(0, math.floor((D - 1) / 2))
