"""Constant-length linear codes, GV-style random search and Reed-Solomon.

Decoders return ``None`` for REJECT.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path

import numpy as np

from .gf import GF, field as get_field, prime_power

TABLE_CAP = 1 << 20
_CHUNK_ELEMS = 1 << 22


class CodeError(ValueError):
    pass


class TableCapExceeded(CodeError):
    pass


class GVSearchFailed(CodeError):
    def __init__(self, msg: str, best: "LocalCode | None"):
        super().__init__(msg)
        self.best = best


def _lex_sort_rows(rows: np.ndarray) -> np.ndarray:
    if rows.shape[0] == 0:
        return rows
    order = np.lexsort(rows.T[::-1])
    return rows[order]


def word_keys(words: np.ndarray, q: int) -> np.ndarray:
    """Base-q integer key of each row (little-endian); needs ``q**d < 2**63``."""
    words = np.atleast_2d(words)
    pows = q ** np.arange(words.shape[1], dtype=np.int64)
    return words.astype(np.int64) @ pows


@dataclass(eq=False)
class LocalCode:
    """A ``[d, k]_q`` linear code with cached codeword table and distance."""

    q: int
    generator: np.ndarray
    table_cap: int = TABLE_CAP
    gf: GF = field(init=False, repr=False)
    _table: np.ndarray | None = field(default=None, init=False, repr=False)
    _min_dist: int | None = field(default=None, init=False, repr=False)
    _index: dict | None = field(default=None, init=False, repr=False)
    _decode_lut: np.ndarray | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        self.gf = get_field(self.q)

    @property
    def dim(self) -> int:
        return self.generator.shape[0]

    @property
    def block_len(self) -> int:
        return self.generator.shape[1]

    @property
    def size(self) -> int:
        return self.q**self.dim

    @property
    def rate(self) -> float:
        return self.dim / self.block_len

    @property
    def rel_distance(self) -> float:
        return self.min_dist / self.block_len

    @property
    def table(self) -> np.ndarray:
        """All codewords, lexicographically sorted (row index = codeword rank)."""
        if self._table is None:
            if self.size > self.table_cap:
                raise TableCapExceeded(f"q^k={self.size} exceeds table cap {self.table_cap}")
            msgs = np.array(list(product(range(self.q), repeat=self.dim)), dtype=np.int64)
            self._table = _lex_sort_rows(self.gf.matmul(msgs, self.generator))
        return self._table

    @property
    def min_dist(self) -> int:
        if self._min_dist is None:
            w = np.count_nonzero(self.table, axis=1)
            self._min_dist = int(w[w > 0].min()) if np.any(w > 0) else self.block_len
        return self._min_dist

    def rank_of(self, word) -> int:
        """Lexicographic rank of a codeword; ``KeyError`` if not a codeword."""
        if self._index is None:
            self._index = {tuple(r): i for i, r in enumerate(self.table.tolist())}
        return self._index[tuple(int(x) for x in word)]

    def contains(self, word) -> bool:
        try:
            self.rank_of(word)
            return True
        except KeyError:
            return False

    def parity_check(self) -> np.ndarray:
        """Rows spanning the dual code (``d - k`` rows)."""
        return self.gf.nullspace(self.generator)

    def distances(self, words: np.ndarray) -> np.ndarray:
        """Hamming distance of each word (rows) to each codeword, shape ``(m, |C|)``."""
        words = np.atleast_2d(np.asarray(words, dtype=np.int64))
        table = self.table
        step = max(1, _CHUNK_ELEMS // max(1, table.size))
        out = np.empty((words.shape[0], table.shape[0]), dtype=np.int32)
        for s in range(0, words.shape[0], step):
            chunk = words[s : s + step]
            out[s : s + step] = (chunk[:, None, :] != table[None, :, :]).sum(axis=2)
        return out

    def unique_radius(self) -> int:
        return (self.min_dist - 1) // 2

    def decode_lut(self) -> np.ndarray | None:
        """Word key -> codeword rank (or -1) lookup, when ``q^d`` is small."""
        if self._decode_lut is None:
            if self.q**self.block_len > TABLE_CAP:
                return None
            words = np.array(list(product(range(self.q), repeat=self.block_len)), dtype=np.int64)
            words = words[:, ::-1]  # row i has key i
            dist = self.distances(words)
            best = dist.argmin(axis=1)
            ok = dist[np.arange(len(words)), best] <= self.unique_radius()
            self._decode_lut = np.where(ok, best, -1)
        return self._decode_lut

    def unique_decode_many(self, words: np.ndarray) -> np.ndarray:
        """Codeword rank within the unique radius for each row, ``-1`` for REJECT."""
        words = np.atleast_2d(np.asarray(words, dtype=np.int64))
        lut = self.decode_lut()
        if lut is not None:
            return lut[word_keys(words, self.q)]
        dist = self.distances(words)
        best = dist.argmin(axis=1)
        ok = dist[np.arange(len(words)), best] <= self.unique_radius()
        return np.where(ok, best, -1)


def make_linear_code(q: int, generator, table_cap: int = TABLE_CAP) -> LocalCode:
    """Validate a generator matrix; dependent rows are dropped."""
    if prime_power(q) is None:
        raise CodeError(f"q={q} is not a prime power")
    G = np.atleast_2d(np.asarray(generator, dtype=np.int64))
    if G.size == 0 or np.any(G < 0) or np.any(G >= q):
        raise CodeError(f"generator entries must lie in [0, {q})")
    gf = get_field(q)
    keep: list[int] = []
    for i in range(G.shape[0]):
        if gf.rank(G[keep + [i]]) == len(keep) + 1:
            keep.append(i)
    if not keep:
        raise CodeError("generator has rank 0")
    code = LocalCode(q, G[keep].copy(), table_cap=table_cap)
    return code


def encode_message(code: LocalCode, msg) -> np.ndarray:
    msg = np.asarray(msg, dtype=np.int64)
    if msg.shape != (code.dim,):
        raise CodeError(f"message length {msg.shape} != dim {code.dim}")
    return code.gf.matmul(msg[None, :], code.generator)[0]


def min_distance(code: LocalCode) -> int:
    return code.min_dist


def list_decode_local(code: LocalCode, word, radius: int) -> list[np.ndarray]:
    """All codewords within ``radius`` of ``word`` in lexicographic order."""
    word = np.asarray(word, dtype=np.int64)
    if word.shape != (code.block_len,):
        raise CodeError("word length does not match block length")
    dist = code.distances(word[None, :])[0]
    return [code.table[i] for i in np.nonzero(dist <= radius)[0]]


def unique_decode_local(code: LocalCode, word) -> np.ndarray | None:
    word = np.asarray(word, dtype=np.int64)
    if word.shape != (code.block_len,):
        raise CodeError("word length does not match block length")
    r = int(code.unique_decode_many(word[None, :])[0])
    return None if r < 0 else code.table[r].copy()


def max_list_size(code: LocalCode, radius: int, centers: np.ndarray | None = None,
                  rng: np.random.Generator | None = None, samples: int = 10_000) -> int:
    """Largest list at ``radius`` over all centers (or random ones if ``q^d`` is large)."""
    if centers is None:
        if code.q**code.block_len <= TABLE_CAP:
            centers = np.array(list(product(range(code.q), repeat=code.block_len)), dtype=np.int64)
        else:
            rng = rng or np.random.default_rng(0)
            centers = rng.integers(0, code.q, size=(samples, code.block_len))
    return int((code.distances(centers) <= radius).sum(axis=1).max())


def q_entropy(x: float, q: int) -> float:
    """q-ary entropy, saturating at 1 for ``x >= 1 - 1/q``."""
    if x <= 0:
        return 0.0
    if x >= 1 - 1 / q:
        return 1.0
    lg = lambda t: math.log(t, q)  # noqa: E731
    return x * lg(q - 1) - x * lg(x) - (1 - x) * lg(1 - x)


def gv_search(q: int, d: int, delta0: float, ell: int, trials: int, seed: int,
              eps0: float = 0.1) -> LocalCode:
    """Random linear code with distance ``>= ceil(delta0 d)`` and lists ``<= ell``."""
    if not (0 < delta0 <= 1):
        raise CodeError(f"delta0 must lie in (0, 1], got {delta0}")
    if prime_power(q) is None:
        raise CodeError(f"q={q} is not a prime power")
    k = max(1, math.floor((1 - q_entropy(delta0, q) - eps0) * d))
    need = math.ceil(delta0 * d - 1e-12)
    radius = math.floor(delta0 * d + 1e-12)
    rng = np.random.default_rng(seed)
    best, best_key = None, None
    for _ in range(trials):
        G = rng.integers(0, q, size=(k, d))
        if get_field(q).rank(G) < k:
            continue
        code = make_linear_code(q, G)
        dist = code.min_dist
        lsize = max_list_size(code, radius, rng=rng)
        if dist >= need and lsize <= ell:
            return code
        key = (dist >= need, -max(lsize - ell, 0), dist)
        if best_key is None or key > best_key:
            best, best_key = code, key
    raise GVSearchFailed(f"no [{d},{k}]_{q} code met distance {need} and list size {ell}", best)


# Reed-Solomon ---------------------------------------------------------------


@dataclass(eq=False)
class RSCode:
    q: int
    n: int
    k: int
    points: np.ndarray
    gf: GF = field(repr=False)

    @property
    def min_dist(self) -> int:
        return self.n - self.k + 1

    @property
    def rel_distance(self) -> float:
        return self.min_dist / self.n

    @property
    def radius(self) -> int:
        return (self.n - self.k) // 2

    @property
    def rel_decoding_radius(self) -> float:
        return self.radius / self.n

    @property
    def rate(self) -> float:
        return self.k / self.n


def make_rs_code(q_out: int, n: int, k: int) -> RSCode:
    """Evaluation code of degree < k polynomials at the first n nonzero elements.

    When ``n == q_out`` the point ``0`` is appended as the last evaluation point.
    """
    if prime_power(q_out) is None:
        raise CodeError(f"q_out={q_out} is not a prime power")
    if not (q_out >= n > k >= 1):
        raise CodeError(f"need q_out >= n > k >= 1, got q_out={q_out}, n={n}, k={k}")
    gf = get_field(q_out)
    pts = list(range(1, min(n, q_out - 1) + 1))
    if n == q_out:
        pts.append(0)
    return RSCode(q_out, n, k, np.array(pts, dtype=np.int64), gf)


def rs_encode(rs: RSCode, msg) -> np.ndarray:
    msg = np.asarray(msg, dtype=np.int64)
    if msg.shape != (rs.k,) or np.any(msg < 0) or np.any(msg >= rs.q):
        raise CodeError(f"message must be {rs.k} symbols in [0, {rs.q})")
    return rs.gf.poly_eval(msg, rs.points)


def _poly_divmod(gf: GF, num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    num = list(num)
    while den and den[-1] == 0:
        den = den[:-1]
    inv_lead = int(gf.inv(den[-1]))
    quot = [0] * max(len(num) - len(den) + 1, 1)
    for i in range(len(num) - len(den), -1, -1):
        c = int(gf.mul(num[i + len(den) - 1], inv_lead))
        quot[i] = c
        if c:
            for j, dj in enumerate(den):
                num[i + j] = int(gf.sub(num[i + j], gf.mul(c, dj)))
    rem = num[: len(den) - 1]
    return quot, rem


def rs_unique_decode(rs: RSCode, word) -> np.ndarray | None:
    """Berlekamp-Welch: message within ``floor((n-k)/2)`` errors, else ``None``."""
    gf = rs.gf
    y = np.asarray(word, dtype=np.int64)
    if y.shape != (rs.n,) or np.any(y < 0) or np.any(y >= rs.q):
        raise CodeError(f"word must be {rs.n} symbols in [0, {rs.q})")
    e = rs.radius
    a = rs.points
    # columns: Q_0..Q_{e+k-1}, E_0..E_{e-1}; E monic of degree e
    vand = np.ones((rs.n, e + rs.k), dtype=np.int64)
    for j in range(1, e + rs.k):
        vand[:, j] = gf.mul(vand[:, j - 1], a)
    A = np.hstack([vand, gf.neg(gf.mul(y[:, None], vand[:, :e]))])
    b = gf.mul(y, vand[:, e])
    sol = gf.solve(A, b)
    if sol is None:
        return None
    Q = [int(c) for c in sol[: e + rs.k]]
    E = [int(c) for c in sol[e + rs.k :]] + [1]
    P, rem = _poly_divmod(gf, Q, E)
    if any(rem):
        return None
    P = (P + [0] * rs.k)[: rs.k] if all(c == 0 for c in P[rs.k :]) else None
    if P is None:
        return None
    msg = np.array(P, dtype=np.int64)
    if np.count_nonzero(rs_encode(rs, msg) != y) > e:
        return None
    return msg


def rs_is_codeword(rs: RSCode, word) -> bool:
    msg = rs_unique_decode(rs, word)
    return msg is not None and np.array_equal(rs_encode(rs, msg), np.asarray(word))


# serialization --------------------------------------------------------------


def write_code(code: LocalCode | RSCode, path) -> None:
    if isinstance(code, RSCode):
        Path(path).write_text(f"RS {code.q} {code.n} {code.k}\n")
        return
    lines = [f"{code.q} {code.dim} {code.block_len}"]
    lines += [" ".join(map(str, r)) for r in code.generator.tolist()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_code(path) -> LocalCode | RSCode:
    tokens = Path(path).read_text().split()
    if not tokens:
        raise CodeError("empty code file")
    if tokens[0] == "RS":
        return make_rs_code(int(tokens[1]), int(tokens[2]), int(tokens[3]))
    q, k, d = map(int, tokens[:3])
    body = tokens[3:]
    if len(body) != k * d:
        raise CodeError(f"expected {k * d} generator entries, found {len(body)}")
    return make_linear_code(q, np.array(body, dtype=np.int64).reshape(k, d))
