"""Weak regularity cut decompositions, cut-norm oracles and factors.

A decomposition approximates a 0/1 edge function ``g`` on ``[n]^2`` by
``h = sum_t k_t 1_{S_t} (x) 1_{T_t}`` so that every cut test
``<g - h, 1_S (x) 1_T>`` is at most ``gamma * nd`` in absolute value.  It is
found by Frieze-Kannan iteration: ask a cut oracle for the worst cut, add it
with the energy-optimal coefficient, repeat.
"""

from __future__ import annotations

import hashlib
import math
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator, svds

from .graphs import as_mask

EXACT_MAX_N = 20
ENUM_CAP = 1 << 24
_ZERO = 1e-12


class EnumerationCapExceeded(RuntimeError):
    def __init__(self, count: int, cap: int):
        super().__init__(f"{count} measurable assignments exceed cap {cap}")
        self.count = count
        self.cap = cap


# residual operator ----------------------------------------------------------


class Residual:
    """``g - h`` for sparse ``g`` and low-rank ``h``.

    Small matrices are kept dense and updated in place; large ones are
    applied lazily from the sparse part and the terms.
    """

    DENSE_MAX_N = 256

    def __init__(self, g: sp.csr_matrix, terms: Sequence[tuple[float, np.ndarray, np.ndarray]] = ()):
        self.g = sp.csr_matrix(g, dtype=float)
        self.n = self.g.shape[0]
        self.D = self.g.toarray() if self.n <= self.DENSE_MAX_N else None
        self.gt = self.g.T.tocsr()
        self._ks: list[float] = []
        self._S: list[np.ndarray] = []
        self._T: list[np.ndarray] = []
        self._stacked = None
        for k, S, T in terms:
            self.push(k, S, T)

    def push(self, k: float, S: np.ndarray, T: np.ndarray) -> None:
        S, T = np.asarray(S, dtype=bool), np.asarray(T, dtype=bool)
        if self.D is not None:
            self.D[np.ix_(S, T)] -= k
        else:
            self._ks.append(k)
            self._S.append(S.astype(float))
            self._T.append(T.astype(float))
            self._stacked = None

    def _terms(self):
        if self._stacked is None:
            self._stacked = (np.array(self._ks), np.array(self._S), np.array(self._T))
        return self._stacked

    def row_combo(self, X: np.ndarray) -> np.ndarray:
        """``X @ M`` for a batch of left vectors ``X`` (rows)."""
        X = np.atleast_2d(X).astype(float)
        if self.D is not None:
            return X @ self.D
        out = (self.gt @ X.T).T
        if self._ks:
            ks, Sm, Tm = self._terms()
            out -= ((X @ Sm.T) * ks) @ Tm
        return out

    def col_combo(self, Y: np.ndarray) -> np.ndarray:
        """``M @ y`` for a batch of right vectors ``Y`` (rows), returned as rows."""
        Y = np.atleast_2d(Y).astype(float)
        if self.D is not None:
            return Y @ self.D.T
        out = (self.g @ Y.T).T
        if self._ks:
            ks, Sm, Tm = self._terms()
            out -= ((Y @ Tm.T) * ks) @ Sm
        return out

    def value(self, S: np.ndarray, T: np.ndarray) -> float:
        if self.D is not None:
            return float(self.D[np.ix_(np.asarray(S, bool), np.asarray(T, bool))].sum())
        return float(self.row_combo(S.astype(float))[0] @ T.astype(float))

    def dense(self) -> np.ndarray:
        if self.D is not None:
            return self.D
        M = self.g.toarray()
        if self._ks:
            ks, Sm, Tm = self._terms()
            M -= (Sm.T * ks) @ Tm
        return M


def _as_residual(M) -> Residual:
    if isinstance(M, Residual):
        return M
    if sp.issparse(M):
        return Residual(M)
    return Residual(sp.csr_matrix(np.asarray(M, dtype=float)))


# cut oracles ----------------------------------------------------------------


@lru_cache(maxsize=None)
def _subset_rows(n: int) -> np.ndarray:
    """Indicator rows of all subsets of ``[min(n, 14)]`` padded to width n, by bitmask."""
    m = min(n, 14)
    masks = np.arange(1 << m)
    X = np.zeros((1 << m, n))
    X[:, :m] = (masks[:, None] >> np.arange(m)) & 1
    X.setflags(write=False)
    return X


def exact_cut_oracle(M) -> tuple[np.ndarray, np.ndarray, float]:
    """Exact ``max |1_S^T M 1_T|`` by enumerating every S.

    For fixed S the best T takes the columns of one sign.  Ties go to the
    smallest S bitmask (element i is bit i), then to the positive sign.
    """
    D = M.dense() if isinstance(M, Residual) else (M.toarray() if sp.issparse(M) else np.asarray(M, dtype=float))
    n = D.shape[0]
    if n > EXACT_MAX_N:
        raise ValueError(f"exact cut oracle supports n <= {EXACT_MAX_N}, got {n}")
    best_val, best_mask, best_sign = -1.0, 0, 1
    bits = np.arange(n)
    chunk = 1 << min(n, 14)
    for start in range(0, 1 << n, chunk):
        masks = np.arange(start, min(start + chunk, 1 << n))
        X = _subset_rows(n)[masks - start] if n > 14 else _subset_rows(n)
        if n > 14:
            X = X + 0.0
            X[:, 14:] = ((masks[:, None] >> bits[14:]) & 1)
        R = X @ D
        pos = np.where(R > _ZERO, R, 0.0).sum(axis=1)
        neg = -np.where(R < -_ZERO, R, 0.0).sum(axis=1)
        vals = np.maximum(pos, neg)
        i = int(np.argmax(vals))
        if vals[i] > best_val + 1e-9:
            best_val = float(vals[i])
            best_mask = int(masks[i])
            best_sign = 1 if pos[i] >= neg[i] else -1
    S = ((best_mask >> bits) & 1).astype(bool)
    r = S.astype(float) @ D
    T = r > _ZERO if best_sign > 0 else r < -_ZERO
    return S, T, max(0.0, best_val)


def _alternate(R: Residual, S0: np.ndarray, sign: float, sweeps: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Batched alternating maximization of ``sign * 1_S^T M 1_T`` from starts ``S0``."""
    S = S0.astype(bool)
    T = np.zeros_like(S)
    for _ in range(sweeps):
        r = sign * R.row_combo(S)
        T_new = r > _ZERO
        c = sign * R.col_combo(T_new)
        S_new = c > _ZERO
        done = np.array_equal(S_new, S) and np.array_equal(T_new, T)
        S, T = S_new, T_new
        if done:
            break
    vals = sign * np.einsum("ij,ij->i", R.row_combo(S), T.astype(float))
    return S, T, vals


def _top_singular_pair(R: Residual, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    n = R.n
    if n <= 64:
        U, _, Vt = np.linalg.svd(R.dense())
        return U[:, 0], Vt[0]
    op = LinearOperator(
        (n, n),
        matvec=lambda y: R.col_combo(np.ravel(y))[0],
        rmatvec=lambda x: R.row_combo(np.ravel(x))[0],
        dtype=float,
    )
    try:
        u, _, vt = svds(op, k=1, v0=rng.standard_normal(n), maxiter=200)
        return u[:, 0], vt[0]
    except Exception:  # ARPACK non-convergence: fall back to random signs
        return rng.standard_normal(n), rng.standard_normal(n)


def heuristic_cut_oracle(M, restarts: int = 32, seed: int = 0, sweeps: int = 100) -> tuple[np.ndarray, np.ndarray, float]:
    """Best of alternating maximization from random starts and rounded top singular vectors.

    The returned value is attained by the returned ``(S, T)``.
    """
    R = _as_residual(M)
    n = R.n
    rng = np.random.default_rng(seed)
    starts = [rng.random((restarts, n)) < 0.5] if restarts > 0 else []
    u, v = _top_singular_pair(R, rng)
    svd_starts = np.array([u > 0, u < 0])
    best = (np.zeros(n, bool), np.zeros(n, bool), 0.0)
    for sign in (1.0, -1.0):
        for S0 in starts + [svd_starts]:
            S, T, vals = _alternate(R, S0, sign, sweeps)
            i = int(np.argmax(vals))
            if vals[i] > best[2] + 1e-12:
                best = (S[i].copy(), T[i].copy(), float(vals[i]))
        # direct sign rounding of the singular pair, without polishing
        for Sc in (u > 0, u < 0):
            for Tc in (v > 0, v < 0):
                val = sign * R.value(Sc, Tc)
                if val > best[2] + 1e-12:
                    best = (Sc.copy(), Tc.copy(), float(val))
    return best


# decomposition --------------------------------------------------------------


@dataclass
class CutDecomposition:
    n: int
    num_edges: int
    gamma: float
    terms: list[tuple[float, np.ndarray, np.ndarray]] = field(default_factory=list)
    certified_residual: float = 0.0
    certified_exact: bool = False
    hit_cap: bool = False
    energies: list[float] = field(default_factory=list)

    @property
    def p(self) -> int:
        return len(self.terms)

    @property
    def threshold(self) -> float:
        return self.gamma * self.num_edges

    def h_dense(self) -> np.ndarray:
        h = np.zeros((self.n, self.n))
        for k, S, T in self.terms:
            h += k * np.outer(S, T)
        return h

    def h_at(self, u: int, v: int) -> float:
        return float(sum(k for k, S, T in self.terms if S[u] and T[v]))

    def stats(self) -> dict:
        return {
            "p": self.p,
            "gamma": self.gamma,
            "residual": self.certified_residual,
            "certified_exact": self.certified_exact,
            "hit_cap": self.hit_cap,
        }

    def dump(self) -> str:
        lines = [f"{self.p} {self.gamma!r} {int(self.certified_exact)} {self.certified_residual!r}"]
        for k, S, T in self.terms:
            s_idx, t_idx = np.nonzero(S)[0], np.nonzero(T)[0]
            members = " ".join(map(str, s_idx.tolist())) + " | " + " ".join(map(str, t_idx.tolist()))
            lines.append(f"{k!r} {s_idx.size} {t_idx.size} {members}")
        return "\n".join(lines) + "\n"


def default_p_max(gamma: float) -> int:
    return math.ceil(64 / gamma**2)


def weak_regularity_decompose(
    g,
    gamma: float,
    num_edges: int,
    oracle: str = "exact",
    p_max: int | None = None,
    seed: int = 0,
    restarts: int = 32,
    certify_exact_max_n: int = EXACT_MAX_N,
) -> CutDecomposition:
    """Frieze-Kannan iteration until the oracle finds no cut above ``gamma * num_edges``.

    With ``n <= certify_exact_max_n`` the stopping point is re-checked by the
    exact oracle; any violating cut it finds is added and iteration continues
    with the exact oracle.
    """
    if not (0 < gamma < 1):
        raise ValueError("gamma must lie in (0, 1)")
    if oracle not in ("exact", "heuristic"):
        raise ValueError(f"unknown oracle {oracle!r}")
    g = sp.csr_matrix(g, dtype=float)
    n = g.shape[0]
    energy = float(g.multiply(g).sum())
    if energy > num_edges + 1e-9:
        raise ValueError(f"<g,g>={energy} exceeds |E|={num_edges}")
    p_max = default_p_max(gamma) if p_max is None else p_max
    can_certify = n <= certify_exact_max_n
    current = oracle
    if current == "exact" and not can_certify:
        raise ValueError(f"exact oracle requested for n={n} > {certify_exact_max_n}")
    R = Residual(g)
    dec = CutDecomposition(n, num_edges, gamma, energies=[energy])
    thr = gamma * num_edges
    it = 0
    while True:
        if current == "exact":
            S, T, val = exact_cut_oracle(R)
        else:
            S, T, val = heuristic_cut_oracle(R, restarts=restarts, seed=seed + 7919 * it)
        it += 1
        if val <= thr:
            if current == "heuristic" and can_certify:
                S, T, val = exact_cut_oracle(R)
                current = "exact"
                if val > thr and dec.p < p_max:
                    pass  # fall through and add the exact witness
                else:
                    dec.certified_residual, dec.certified_exact = val, True
                    dec.hit_cap = val > thr
                    return dec
            else:
                dec.certified_residual, dec.certified_exact = val, current == "exact"
                return dec
        if dec.p >= p_max:
            dec.hit_cap = True
            if can_certify:
                dec.certified_residual = exact_cut_oracle(R)[2]
                dec.certified_exact = True
            else:
                dec.certified_residual = val
            return dec
        size = float(S.sum() * T.sum())
        inner = R.value(S, T)
        k = inner / size
        R.push(k, S, T)
        dec.terms.append((k, S.copy(), T.copy()))
        energy -= inner * inner / size
        dec.energies.append(energy)


def cut_norm_residual(g, dec: CutDecomposition) -> float:
    """Exact ``max_{S,T} |<g - h, 1_S (x) 1_T>|`` (small n only)."""
    return exact_cut_oracle(Residual(sp.csr_matrix(g, dtype=float), dec.terms))[2]


def g_fingerprint(g: sp.csr_matrix) -> str:
    g = sp.csr_matrix(g)
    g.sort_indices()
    h = hashlib.sha256()
    h.update(np.asarray(g.shape, dtype=np.int64).tobytes())
    h.update(g.indptr.astype(np.int64).tobytes())
    h.update(g.indices.astype(np.int64).tobytes())
    return h.hexdigest()


# factors --------------------------------------------------------------------


@dataclass(eq=False)
class Factor:
    """Partition of ``[n]`` into atoms; ``atom_of[x] == -1`` marks elements outside the domain."""

    n: int
    cuts: list[np.ndarray]
    atom_of: np.ndarray
    atoms: list[np.ndarray]

    @property
    def num_atoms(self) -> int:
        return len(self.atoms)

    @property
    def domain(self) -> np.ndarray:
        return self.atom_of >= 0

    def restrict(self, W) -> "Factor":
        w = _mask(W, self.n)
        return _factor_from_patterns(self.n, self.cuts, self.atom_of, w & self.domain)

    def partition(self) -> set[frozenset[int]]:
        return {frozenset(a.tolist()) for a in self.atoms}


def _mask(W, n: int) -> np.ndarray:
    if isinstance(W, np.ndarray) and W.dtype == bool and W.shape == (n,):
        return W
    return as_mask(W, n)


def _factor_from_patterns(n: int, cuts, labels: np.ndarray, domain: np.ndarray) -> Factor:
    atom_of = np.full(n, -1, dtype=np.int64)
    atoms: list[np.ndarray] = []
    seen: dict[int, int] = {}
    for x in np.nonzero(domain)[0]:
        lab = int(labels[x])
        if lab not in seen:
            seen[lab] = len(atoms)
            atoms.append([])
        atom_of[x] = seen[lab]
        atoms[seen[lab]].append(x)
    return Factor(n, list(cuts), atom_of, [np.array(a, dtype=np.int64) for a in atoms])


def build_factor(n: int, cuts: Sequence, domain=None) -> Factor:
    """Atoms are the nonempty classes of equal membership pattern across ``cuts``.

    Atoms are numbered by their smallest element.
    """
    masks = [_mask(c, n) for c in cuts]
    if masks:
        _, labels = np.unique(np.array(masks).T, axis=0, return_inverse=True)
        labels = labels.reshape(-1)
    else:
        labels = np.zeros(n, dtype=np.int64)
    dom = np.ones(n, dtype=bool) if domain is None else _mask(domain, n)
    return _factor_from_patterns(n, masks, labels, dom)


def conditional_average(f, factor: Factor) -> np.ndarray:
    """``E[f | B](x)``: mean of f over the atom of x (0 outside the factor's domain)."""
    f = np.asarray(f, dtype=float)
    out = np.zeros(factor.n)
    for atom in factor.atoms:
        out[atom] = f[atom].mean()
    return out


def min_concentration(x, factor: Factor, W=None) -> tuple[float, dict[int, int]]:
    """Plurality value per atom of the factor restricted to W, and the mismatch fraction.

    Ties go to the smallest value.  The fraction is over the factor's domain.
    """
    x = np.asarray(x, dtype=np.int64)
    sub = factor if W is None else factor.restrict(W)
    plurality: dict[int, int] = {}
    bad = 0
    for a, atom in enumerate(sub.atoms):
        vals, counts = np.unique(x[atom], return_counts=True)
        top = int(vals[np.argmax(counts)])  # np.unique sorts, argmax takes first max
        plurality[a] = top
        bad += int(np.count_nonzero(x[atom] != top))
    size = int(factor.domain.sum())
    return (bad / size if size else 0.0), plurality


def measurable_count(factor: Factor, ell: int) -> int:
    return ell**factor.num_atoms


def measurable_batches(factor: Factor, ell: int, cap: int = ENUM_CAP, truncate: bool = False,
                       batch: int = 4096) -> Iterator[np.ndarray]:
    """All functions constant on atoms as ``(m, n)`` blocks, lexicographic in atom values.

    The first atom is the most significant digit.  Elements outside the
    factor's domain get value 0.  When ``ell^atoms`` exceeds ``cap`` this
    raises, or with ``truncate`` stops after the first ``cap``.
    """
    count = measurable_count(factor, ell)
    if count > cap and not truncate:
        raise EnumerationCapExceeded(count, cap)
    total = min(count, cap)
    A = factor.num_atoms
    idx = factor.atom_of
    inside = idx >= 0
    weights = np.array([ell ** (A - 1 - a) for a in range(A)], dtype=object)
    small = count < (1 << 62)
    for start in range(0, total, batch):
        stop = min(start + batch, total)
        if small:
            ids = np.arange(start, stop, dtype=np.int64)
            digits = (ids[:, None] // weights.astype(np.int64)[None, :]) % ell if A else np.zeros((stop - start, 0), np.int64)
        else:
            digits = np.array([[(i // int(w)) % ell for w in weights] for i in range(start, stop)], dtype=np.int64)
        out = np.zeros((stop - start, factor.n), dtype=np.int64)
        if A:
            out[:, inside] = digits[:, idx[inside]]
        yield out


def enumerate_measurable(factor: Factor, ell: int, cap: int = ENUM_CAP,
                         truncate: bool = False) -> Iterator[np.ndarray]:
    """One assignment at a time, in the order of :func:`measurable_batches`."""
    for block in measurable_batches(factor, ell, cap, truncate):
        yield from block
