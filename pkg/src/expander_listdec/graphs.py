"""Port-indexed d-regular bipartite expanders and their spectral primitives."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

DENSE_SPECTRUM_MAX_N = 64


class GraphError(ValueError):
    """Structural problem with a graph (irregular, parallel edges, bad subset)."""


class ConvergenceError(RuntimeError):
    """Power iteration did not reach the requested tolerance."""


def as_mask(subset, n: int) -> np.ndarray:
    """Boolean membership mask of length n from a mask or an iterable of indices."""
    if subset is None:
        return np.ones(n, dtype=bool)
    arr = np.asarray(subset)
    if arr.dtype == bool:
        if arr.shape != (n,):
            raise GraphError(f"mask has shape {arr.shape}, expected ({n},)")
        return arr.copy()
    idx = np.asarray(list(subset) if not isinstance(subset, np.ndarray) else subset, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise GraphError(f"subset indices must lie in [0, {n})")
    mask = np.zeros(n, dtype=bool)
    mask[idx] = True
    return mask


@dataclass(frozen=True, eq=False)
class BipartiteExpander:
    """A simple d-regular bipartite graph on ``n + n`` vertices.

    ``nbrs[u, i]`` is the right endpoint of left port ``i`` of ``u``; edge
    ``(u, i)`` has id ``u * d + i``.  Right ports are ordered by ascending
    edge id, so ``right_edges[v, j]`` is the edge at port ``j`` of ``v``.
    """

    n: int
    d: int
    nbrs: np.ndarray
    right_edges: np.ndarray = field(repr=False)
    right_port: np.ndarray = field(repr=False)
    lam: float

    @property
    def num_edges(self) -> int:
        return self.n * self.d

    @property
    def edge_left(self) -> np.ndarray:
        return np.repeat(np.arange(self.n), self.d)

    @property
    def edge_right(self) -> np.ndarray:
        return self.nbrs.reshape(-1)

    def port(self, u: int, i: int) -> tuple[int, int]:
        """Map left port ``(u, i)`` to right port ``(v, j)``."""
        e = u * self.d + i
        return int(self.nbrs[u, i]), int(self.right_port[e])

    def right_port_to_left(self, v: int, j: int) -> tuple[int, int]:
        e = int(self.right_edges[v, j])
        return divmod(e, self.d)

    def biadjacency(self) -> sp.csr_matrix:
        data = np.ones(self.num_edges)
        return sp.csr_matrix((data, (self.edge_left, self.edge_right)), shape=(self.n, self.n))

    def edge_count(self, S, T) -> int:
        """Number of edges with left end in S and right end in T."""
        s, t = as_mask(S, self.n), as_mask(T, self.n)
        return int(np.count_nonzero(s[self.edge_left] & t[self.edge_right]))

    def check_invariants(self) -> None:
        n, d = self.n, self.d
        if self.nbrs.shape != (n, d):
            raise GraphError("port table has wrong shape")
        right_deg = np.bincount(self.edge_right, minlength=n)
        if np.any(right_deg != d):
            raise GraphError("right side is not d-regular")
        for u in range(n):
            if len(set(self.nbrs[u].tolist())) != d:
                raise GraphError(f"parallel edges at left vertex {u}")
        for u in range(n):
            for i in range(d):
                v, j = self.port(u, i)
                if self.right_port_to_left(v, j) != (u, i):
                    raise GraphError("port maps are not mutually inverse")
        if not (-1e-9 <= self.lam <= d + 1e-9):
            raise GraphError(f"lambda={self.lam} outside [0, d]")


def from_neighbors(nbrs: Sequence[Sequence[int]], lam: float | None = None) -> BipartiteExpander:
    """Build a graph from left-vertex neighbor lists given in port order."""
    arr = np.asarray(nbrs, dtype=np.int64)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise GraphError("neighbor table must be a non-empty n x d array")
    n, d = arr.shape
    if arr.min() < 0 or arr.max() >= n:
        raise GraphError("right vertex index out of range")
    for u in range(n):
        if len(set(arr[u].tolist())) != d:
            raise GraphError(f"parallel edges at left vertex {u}")
    flat = arr.reshape(-1)
    if np.any(np.bincount(flat, minlength=n) != d):
        raise GraphError("graph is not d-regular on the right")
    order = np.argsort(flat, kind="stable")
    right_edges = order.reshape(n, d)
    right_port = np.empty(n * d, dtype=np.int64)
    right_port[right_edges.reshape(-1)] = np.tile(np.arange(d), n)
    g = BipartiteExpander(n, d, arr, right_edges, right_port, 0.0)
    if lam is None:
        lam = second_singular_value(g)
    object.__setattr__(g, "lam", float(lam))
    return g


def _repaired_matching(prev: np.ndarray, rng: np.random.Generator, rounds: int) -> np.ndarray | None:
    """Random perfect matching avoiding the edges in ``prev``; clashes are fixed by random swaps."""
    n = prev.shape[0]
    perm = rng.permutation(n)
    for _ in range(rounds):
        bad = np.nonzero((prev == perm[:, None]).any(axis=1))[0]
        if bad.size == 0:
            return perm
        for u in bad:
            w = int(rng.integers(n))
            if not (prev[u] == perm[w]).any() and not (prev[w] == perm[u]).any():
                perm[u], perm[w] = perm[w], perm[u]
    return None


def random_regular_bipartite(n: int, d: int, seed: int, max_retries: int = 1000) -> BipartiteExpander:
    """Union of d random perfect matchings; a matching that repeats an edge is repaired by swaps."""
    if not (1 <= d <= n):
        raise GraphError(f"need n >= d >= 1, got n={n}, d={d}")
    rng = np.random.default_rng(seed)
    if d == n:
        # K_{n,n}; random matchings almost never tile it
        shift = rng.permutation(n)
        nbrs = (np.arange(n)[:, None] + shift[None, :]) % n
        return from_neighbors(nbrs)
    if 2 * d > n:
        # dense case: sample the sparse complement and keep the other edges
        comp = random_regular_bipartite(n, n - d, seed, max_retries).nbrs
        keep = np.ones((n, n), dtype=bool)
        keep[np.arange(n)[:, None], comp] = False
        nbrs = np.array([rng.permutation(np.nonzero(row)[0]) for row in keep])
        return from_neighbors(nbrs)
    nbrs = np.empty((n, d), dtype=np.int64)
    for j in range(d):
        perm = _repaired_matching(nbrs[:, :j], rng, max_retries)
        if perm is None:
            raise GraphError(f"no simple {d}-regular bipartite graph on n={n} after {max_retries} repair rounds")
        nbrs[:, j] = perm
    return from_neighbors(nbrs)


def double_cover(n: int, edges: Iterable[tuple[int, int]]) -> BipartiteExpander:
    """Bipartite double cover of a d-regular undirected graph on ``n`` vertices.

    Each edge ``{a, b}`` contributes ``(a_L, b_R)`` and ``(b_L, a_R)``.
    """
    edges = [(int(a), int(b)) for a, b in edges]
    if n < 1 or not edges:
        raise GraphError("double cover needs a non-empty regular graph")
    adj: list[list[int]] = [[] for _ in range(n)]
    for a, b in edges:
        if not (0 <= a < n and 0 <= b < n):
            raise GraphError(f"edge ({a}, {b}) out of range")
        adj[a].append(b)
        adj[b].append(a)
    degs = {len(x) for x in adj}
    if len(degs) != 1 or 0 in degs:
        raise GraphError(f"input graph is not regular (degrees {sorted(degs)})")
    return from_neighbors(adj)


def second_singular_value(graph: BipartiteExpander, tol: float = 1e-9, max_iters: int | None = None,
                          seed: int = 0) -> float:
    """Second largest singular value of the biadjacency matrix.

    Dense SVD for ``n <= 64``; otherwise power iteration on ``B^T B`` with the
    known top pair (value ``d``, uniform vectors) projected out.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = graph.n
    if n == 1:
        return 0.0
    if n <= DENSE_SPECTRUM_MAX_N:
        s = np.linalg.svd(graph.biadjacency().toarray(), compute_uv=False)
        return float(max(s[1], 0.0))
    if max_iters is None:
        max_iters = int(10 * n * math.log(n)) + 1000
    B = graph.biadjacency()
    Bt = B.T.tocsr()
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    x -= x.mean()
    x /= np.linalg.norm(x)
    sigma = 0.0
    for _ in range(max_iters):
        y = Bt @ (B @ x)
        y -= y.mean()
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return 0.0
        new_sigma = math.sqrt(max(float(x @ y), 0.0))
        x = y / norm
        # residual of the eigenpair bounds the distance to some eigenvalue
        resid = np.linalg.norm(Bt @ (B @ x) - (x @ (Bt @ (B @ x))) * x)
        if abs(new_sigma - sigma) < tol and resid < max(tol * max(new_sigma, 1.0), 1e-7):
            return new_sigma
        sigma = new_sigma
    raise ConvergenceError(f"power iteration did not converge in {max_iters} iterations")


def mixing_discrepancy(graph: BipartiteExpander, S, T) -> tuple[float, float]:
    """``(|E(S,T) - d|S||T|/n|, lambda * sqrt(|S||T|))``."""
    s, t = as_mask(S, graph.n), as_mask(T, graph.n)
    ns, nt = int(s.sum()), int(t.sum())
    disc = abs(graph.edge_count(s, t) - graph.d * ns * nt / graph.n)
    return float(disc), float(graph.lam * math.sqrt(ns * nt))


def robust_neighbor_set(graph: BipartiteExpander, T, alpha: float, eps: float) -> np.ndarray:
    """Left vertices with at least ``(alpha - eps) d`` neighbors in T."""
    t = as_mask(T, graph.n)
    if not (0 < eps <= alpha):
        raise GraphError(f"need 0 < eps <= alpha, got eps={eps}, alpha={alpha}")
    if t.sum() < alpha * graph.n - 1e-12:
        raise GraphError(f"|T|={int(t.sum())} < alpha*n={alpha * graph.n}")
    counts = t[graph.nbrs].sum(axis=1)
    return np.nonzero(counts >= (alpha - eps) * graph.d - 1e-12)[0]


def robust_size_bound(graph: BipartiteExpander, eps: float) -> float:
    """Lower bound ``(1 - (lambda/d)^2 / eps^2) n`` on the robust neighbor set."""
    return (1.0 - (graph.lam / graph.d) ** 2 / eps**2) * graph.n


def write_graph(graph: BipartiteExpander, path) -> None:
    lines = [f"{graph.n} {graph.d}"]
    lines += [" ".join(map(str, row)) for row in graph.nbrs.tolist()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_graph(path) -> BipartiteExpander:
    tokens = Path(path).read_text().split()
    if len(tokens) < 2:
        raise GraphError("graph file is empty")
    n, d = int(tokens[0]), int(tokens[1])
    body = tokens[2:]
    if len(body) != n * d:
        raise GraphError(f"expected {n * d} neighbor entries, found {len(body)}")
    return from_neighbors(np.array(body, dtype=np.int64).reshape(n, d))
