"""Agreement 2-CSPs built from local candidate lists.

Domain values are 0-based: value ``i`` selects the ``i``-th candidate of a
vertex.  Candidate lists hold ranks into the local code's lexicographic
table: the decoded list in lexicographic order, padded with the smallest
remaining codewords.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

from .codes import LocalCode
from .graphs import BipartiteExpander, as_mask
from .tanner import left_views, right_views

AEL = "ael"
TANNER = "tanner"


class CSPError(ValueError):
    pass


class Assignment(NamedTuple):
    left: np.ndarray
    right: np.ndarray


@dataclass(eq=False)
class CSPInstance:
    graph: BipartiteExpander
    ell: int
    flavor: str
    local: LocalCode
    cand_left: np.ndarray  # (n, ell) ranks
    cand_right: np.ndarray  # (n, ell) ranks; dummy zeros for AEL
    allowed: np.ndarray  # (nd, ell, ell) bool
    list_sizes_left: np.ndarray
    list_sizes_right: np.ndarray
    truncated: bool = False

    def g_alpha(self, a: int, b: int) -> sp.csr_matrix:
        """0/1 matrix on ``[n]^2`` marking edges whose constraint allows ``(a, b)``."""
        g = self.graph
        mask = self.allowed[:, a, b]
        return sp.csr_matrix(
            (np.ones(int(mask.sum())), (g.edge_left[mask], g.edge_right[mask])), shape=(g.n, g.n)
        )

    def left_symbol(self, values: np.ndarray) -> np.ndarray:
        """Edge word ``z'_{u,v} = c^{x(u)}_{u,v}`` assembled from left candidates."""
        g = self.graph
        ranks = self.cand_left[np.arange(g.n), values]
        return self.local.table[ranks].reshape(-1)

    def right_symbol(self, values: np.ndarray) -> np.ndarray:
        """Edge word ``z_{u,v} = c^{x(v)}_{v,u}`` assembled from right candidates."""
        g = self.graph
        ranks = self.cand_right[np.arange(g.n), values]
        word = np.empty(g.num_edges, dtype=np.int64)
        word[g.right_edges.reshape(-1)] = self.local.table[ranks].reshape(-1)
        return word


def _candidates(local: LocalCode, views: np.ndarray, radius: int, ell: int, side: str,
                truncate: bool) -> tuple[np.ndarray, np.ndarray, bool]:
    if ell > local.size:
        raise CSPError(f"ell={ell} exceeds the number of local codewords {local.size}")
    within = local.distances(views) <= radius
    sizes = within.sum(axis=1)
    over = np.nonzero(sizes > ell)[0]
    if over.size and not truncate:
        w = int(over[0])
        raise CSPError(f"ell={ell} too small: {side} vertex {w} has {int(sizes[w])} local candidates")
    cand = np.empty((views.shape[0], ell), dtype=np.int64)
    for w in range(views.shape[0]):
        hits = np.nonzero(within[w])[0][:ell]
        pad = np.nonzero(~within[w])[0][: ell - hits.size]
        if hits.size < ell and pad.size < ell - hits.size:
            pad = np.setdiff1d(np.arange(local.size), hits)[: ell - hits.size]
        cand[w] = np.concatenate([hits, pad])
    return cand, sizes, bool(over.size)


def local_radius(local: LocalCode) -> int:
    """``floor(delta * d)`` with ``delta = min_dist / d``: the minimum distance itself."""
    return local.min_dist


def build_ael_csp(local: LocalCode, graph: BipartiteExpander, ytilde, ell: int,
                  truncate: bool = False) -> CSPInstance:
    """Constraint on edge ``(u, v)``: candidate ``x(u)`` agrees with ``ytilde`` there."""
    y = np.asarray(ytilde, dtype=np.int64)
    if y.shape != (graph.num_edges,):
        raise CSPError("received word has wrong length")
    cand, sizes, trunc = _candidates(local, left_views(graph, y), local_radius(local), ell, "left", truncate)
    sym = local.table[cand]  # (n, ell, d)
    ok = sym.transpose(0, 2, 1).reshape(graph.num_edges, ell) == y[:, None]
    allowed = np.repeat(ok[:, :, None], ell, axis=2)
    dummy = np.zeros((graph.n, ell), dtype=np.int64)
    return CSPInstance(graph, ell, AEL, local, cand, dummy, allowed, sizes,
                       np.zeros(graph.n, dtype=np.int64), trunc)


def build_tanner_csp(local: LocalCode, graph: BipartiteExpander, ytilde, ell: int,
                     truncate: bool = False) -> CSPInstance:
    """Constraint on edge ``(u, v)``: the two endpoint candidates agree on the edge."""
    y = np.asarray(ytilde, dtype=np.int64)
    if y.shape != (graph.num_edges,):
        raise CSPError("received word has wrong length")
    r = local_radius(local)
    cl, sl, tl = _candidates(local, left_views(graph, y), r, ell, "left", truncate)
    cr, sr, tr = _candidates(local, right_views(graph, y), r, ell, "right", truncate)
    left_sym = local.table[cl].transpose(0, 2, 1).reshape(graph.num_edges, ell)
    right_sym = np.empty((graph.num_edges, ell), dtype=np.int64)
    right_sym[graph.right_edges.reshape(-1)] = local.table[cr].transpose(0, 2, 1).reshape(-1, ell)
    allowed = left_sym[:, :, None] == right_sym[:, None, :]
    return CSPInstance(graph, ell, TANNER, local, cl, cr, allowed, sl, sr, tl or tr)


def csp_value(inst: CSPInstance, x: Assignment, S=None, T=None) -> int:
    """Satisfied constraints among edges of ``E(S, T)``."""
    g = inst.graph
    s, t = as_mask(S, g.n), as_mask(T, g.n)
    el, er = g.edge_left, g.edge_right
    xl = np.asarray(x.left)[el]
    xr = np.asarray(x.right)[er]
    sat = inst.allowed[np.arange(g.num_edges), xl, xr]
    return int(np.count_nonzero(sat & s[el] & t[er]))


# analysis constructs (tests and harnesses only) -----------------------------


@dataclass(frozen=True)
class AgreementSets:
    S: np.ndarray
    T: np.ndarray
    S_star: np.ndarray | None
    T_star: np.ndarray | None
    x: Assignment


def _assign(inst: CSPInstance, z: np.ndarray, S: np.ndarray, T: np.ndarray) -> Assignment:
    """``x_z``: index of ``z_w`` in the candidate list on S (left) / T (right), else 0."""
    g, table = inst.graph, inst.local.table
    xl = np.zeros(g.n, dtype=np.int64)
    xr = np.zeros(g.n, dtype=np.int64)
    for side, views, cand, mask, out in (
        ("left", left_views(g, z), inst.cand_left, S, xl),
        ("right", right_views(g, z), inst.cand_right, T, xr),
    ):
        if side == "right" and inst.flavor == AEL:
            continue
        for w in np.nonzero(mask)[0]:
            hit = np.nonzero(np.all(table[cand[w]] == views[w], axis=1))[0]
            if hit.size == 0:
                raise CSPError(f"{side} view of vertex {w} is not among its candidates")
            out[w] = hit[0]
    return Assignment(xl, xr)


def ael_agreement_sets(inst: CSPInstance, z, ytilde, eps: float, slack: float = 0.5) -> AgreementSets:
    """``T_z`` (right views equal), ``S_z*`` (left views within radius), ``S_z``.

    ``S_z`` keeps vertices of ``S_z*`` with at most ``(delta - slack*eps) d``
    neighbors outside ``T_z``.
    """
    g = inst.graph
    z, y = np.asarray(z), np.asarray(ytilde)
    d = g.d
    delta = inst.local.rel_distance
    T = np.all(right_views(g, z) == right_views(g, y), axis=1)
    S_star = np.count_nonzero(left_views(g, z) != left_views(g, y), axis=1) <= local_radius(inst.local)
    outside = (~T)[g.nbrs].sum(axis=1)
    S = S_star & (outside <= (delta - slack * eps) * d + 1e-9)
    return AgreementSets(S, T, S_star, None, _assign(inst, z, S, np.zeros(g.n, dtype=bool)))


def tanner_agreement_sets(inst: CSPInstance, z, ytilde, eps: float, slack: float = 0.5) -> AgreementSets:
    """``S_z`` (left views within radius), ``T_z*`` likewise on the right, ``T_z``."""
    g = inst.graph
    z, y = np.asarray(z), np.asarray(ytilde)
    delta = inst.local.rel_distance
    r = local_radius(inst.local)
    S = np.count_nonzero(left_views(g, z) != left_views(g, y), axis=1) <= r
    T_star = np.count_nonzero(right_views(g, z) != right_views(g, y), axis=1) <= r
    left_of_right = g.edge_left[g.right_edges]  # (n, d)
    outside = (~S)[left_of_right].sum(axis=1)
    T = T_star & (outside <= (delta - slack * eps) * g.d + 1e-9)
    return AgreementSets(S, T, None, T_star, _assign(inst, z, S, T))
