"""Finite field arithmetic over GF(p^m) with log/antilog tables.

Elements are integers in ``[0, q)``.  For ``m > 1`` an element encodes the
polynomial ``sum(c_i x^i)`` with base-``p`` digits ``c_i``.  All operations
accept numpy arrays and broadcast.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np

MAX_FIELD = 1 << 16


def prime_power(q: int) -> tuple[int, int] | None:
    """Return ``(p, m)`` with ``q == p**m`` or ``None`` if q is not a prime power."""
    if q < 2:
        return None
    p = next(f for f in range(2, q + 1) if q % f == 0)
    m, r = 0, q
    while r % p == 0:
        r //= p
        m += 1
    return (p, m) if r == 1 else None


def _poly_mulx_mod(digits: list[int], modulus: list[int], p: int) -> list[int]:
    # digits: length m, low degree first; modulus monic, length m+1
    m = len(digits)
    top = digits[-1]
    shifted = [0] + digits[:-1]
    return [(shifted[i] - top * modulus[i]) % p for i in range(m)]


def _find_primitive_poly(p: int, m: int) -> list[int]:
    q = p**m
    for tail in product(range(p), repeat=m):
        if tail[0] == 0:
            continue
        modulus = list(tail) + [1]
        cur = [1] + [0] * (m - 1)
        seen = set()
        ok = True
        for _ in range(q - 1):
            key = tuple(cur)
            if key in seen:
                ok = False
                break
            seen.add(key)
            cur = _poly_mulx_mod(cur, modulus, p)
        if ok and cur == [1] + [0] * (m - 1):
            return modulus
    raise ValueError(f"no primitive polynomial found for GF({p}^{m})")


class GF:
    """The field with ``q`` elements."""

    def __init__(self, q: int):
        pm = prime_power(q)
        if pm is None:
            raise ValueError(f"q={q} is not a prime power")
        if q > MAX_FIELD:
            raise ValueError(f"q={q} exceeds supported field size {MAX_FIELD}")
        self.q = q
        self.p, self.m = pm
        p, m = self.p, self.m
        self._pows = p ** np.arange(m, dtype=np.int64)
        self.digits = (np.arange(q, dtype=np.int64)[:, None] // self._pows) % p

        exp = np.zeros(2 * q, dtype=np.int64)
        if m == 1:
            g = next(
                g for g in range(1, p) if len({pow(g, e, p) for e in range(p - 1)}) == p - 1
            ) if p > 2 else 1
            cur = 1
            for e in range(q - 1):
                exp[e] = cur
                cur = cur * g % p
        else:
            modulus = _find_primitive_poly(p, m)
            self.modulus = modulus
            cur = [1] + [0] * (m - 1)
            for e in range(q - 1):
                exp[e] = int(np.dot(cur, self._pows))
                cur = _poly_mulx_mod(cur, modulus, p)
        exp[q - 1 : 2 * (q - 1)] = exp[: q - 1]
        log = np.full(q, -1, dtype=np.int64)
        log[exp[: q - 1]] = np.arange(q - 1)
        self.exp, self.log = exp, log
        self.neg_table = self._from_digits((-self.digits) % p)

    def __repr__(self) -> str:
        return f"GF({self.q})"

    def _from_digits(self, d: np.ndarray) -> np.ndarray:
        return (d * self._pows).sum(axis=-1)

    def add(self, a, b):
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return a ^ b
        if self.m == 1:
            return (a + b) % self.p
        return self._from_digits((self.digits[a] + self.digits[b]) % self.p)

    def neg(self, a):
        return self.neg_table[np.asarray(a, dtype=np.int64)]

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self.m == 1:
            return (a * b) % self.p
        a, b = np.broadcast_arrays(a, b)
        out = self.exp[(self.log[a] + self.log[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, out)

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero in " + repr(self))
        return self.exp[(-self.log[a]) % (self.q - 1)]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def dot(self, a, b) -> int:
        """Inner product of two 1-d vectors."""
        acc = 0
        for x in np.atleast_1d(self.mul(a, b)):
            acc = int(self.add(acc, x))
        return acc

    def matmul(self, A, B) -> np.ndarray:
        A = np.atleast_2d(np.asarray(A, dtype=np.int64))
        B = np.atleast_2d(np.asarray(B, dtype=np.int64))
        if self.m == 1:
            return (A @ B) % self.p
        out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
        for j in range(A.shape[1]):
            out = self.add(out, self.mul(A[:, j : j + 1], B[j : j + 1, :]))
        return out

    def poly_eval(self, coeffs, x):
        """Evaluate ``sum(coeffs[i] * x**i)`` by Horner's rule."""
        x = np.asarray(x, dtype=np.int64)
        acc = np.zeros_like(x)
        for c in reversed(list(coeffs)):
            acc = self.add(self.mul(acc, x), int(c))
        return acc

    # linear algebra -------------------------------------------------------

    def rref(self, A) -> tuple[np.ndarray, list[int]]:
        """Reduced row echelon form and pivot columns."""
        M = np.array(A, dtype=np.int64, copy=True)
        if M.ndim != 2:
            M = np.atleast_2d(M)
        rows, cols = M.shape
        pivots: list[int] = []
        r = 0
        for c in range(cols):
            if r == rows:
                break
            nz = np.nonzero(M[r:, c])[0]
            if nz.size == 0:
                continue
            pr = r + int(nz[0])
            if pr != r:
                M[[r, pr]] = M[[pr, r]]
            M[r] = self.mul(M[r], self.inv(M[r, c]))
            col = M[:, c].copy()
            col[r] = 0
            others = np.nonzero(col)[0]
            if others.size:
                M[others] = self.sub(M[others], self.mul(col[others, None], M[r][None, :]))
            pivots.append(c)
            r += 1
        return M[:r], pivots

    def rank(self, A) -> int:
        return len(self.rref(A)[1])

    def nullspace(self, A) -> np.ndarray:
        """Basis (as rows) of ``{x : A x = 0}``."""
        A = np.atleast_2d(np.asarray(A, dtype=np.int64))
        cols = A.shape[1]
        R, pivots = self.rref(A)
        free = [c for c in range(cols) if c not in set(pivots)]
        basis = np.zeros((len(free), cols), dtype=np.int64)
        for i, f in enumerate(free):
            basis[i, f] = 1
            for r, pc in enumerate(pivots):
                basis[i, pc] = int(self.neg(R[r, f]))
        return basis

    def solve(self, A, b) -> np.ndarray | None:
        """One solution of ``A x = b`` or ``None`` when inconsistent."""
        A = np.atleast_2d(np.asarray(A, dtype=np.int64))
        b = np.asarray(b, dtype=np.int64).reshape(-1, 1)
        R, pivots = self.rref(np.hstack([A, b]))
        cols = A.shape[1]
        if cols in pivots:
            return None
        x = np.zeros(cols, dtype=np.int64)
        for r, pc in enumerate(pivots):
            x[pc] = R[r, cols]
        return x


@lru_cache(maxsize=None)
def field(q: int) -> GF:
    """Shared field instance for ``q``."""
    return GF(q)
