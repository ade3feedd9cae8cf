"""Dense linear algebra over a prime field F_p.

Everything downstream (normalized chains, homology, syzygies, Tor) reduces to
ranks, kernels and quotients of small weight-homogeneous blocks, so a dense
numpy representation is enough.  Pivoting is deterministic: columns are scanned
left to right and the first row carrying a nonzero entry becomes the pivot row.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "FpMatrix",
    "is_prime",
    "inverse_mod",
    "rref",
    "rank",
    "kernel_basis",
    "quotient_basis",
    "solve",
    "NoSolution",
    "independent_columns",
    "extend_basis",
]

MAX_PRIME = 1 << 16


@lru_cache(maxsize=None)
def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def inverse_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError(f"0 has no inverse mod {p}")
    return pow(a, p - 2, p)


def _check_prime(p: int) -> None:
    if not is_prime(p) or p >= MAX_PRIME:
        raise ValueError(f"p must be prime and < 2^16, got {p}")


@dataclass(frozen=True, eq=False)
class FpMatrix:
    """A rows x cols matrix with entries in [0, p)."""

    a: np.ndarray
    p: int

    def __post_init__(self):
        _check_prime(self.p)
        arr = np.asarray(self.a, dtype=np.int64)
        if arr.ndim != 2:
            raise ValueError("FpMatrix needs a 2d array")
        arr = np.mod(arr, self.p)
        arr.setflags(write=False)
        object.__setattr__(self, "a", arr)

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int) -> "FpMatrix":
        return cls(np.zeros((rows, cols), dtype=np.int64), p)

    @classmethod
    def identity(cls, n: int, p: int) -> "FpMatrix":
        return cls(np.eye(n, dtype=np.int64), p)

    @classmethod
    def from_columns(cls, cols, dim: int, p: int) -> "FpMatrix":
        cols = list(cols)
        a = np.zeros((dim, len(cols)), dtype=np.int64)
        for j, c in enumerate(cols):
            a[:, j] = np.asarray(c, dtype=np.int64)
        return cls(a, p)

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def shape(self):
        return self.a.shape

    def __matmul__(self, other):
        if isinstance(other, FpMatrix):
            if other.p != self.p:
                raise ValueError("moduli differ")
            return FpMatrix(_matmul(self.a, other.a, self.p), self.p)
        v = np.asarray(other, dtype=np.int64)
        return _matmul(self.a, v.reshape(-1, 1), self.p).reshape(-1)

    def __add__(self, other: "FpMatrix") -> "FpMatrix":
        return FpMatrix(self.a + other.a, self.p)

    def __sub__(self, other: "FpMatrix") -> "FpMatrix":
        return FpMatrix(self.a - other.a, self.p)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FpMatrix):
            return NotImplemented
        return self.p == other.p and self.a.shape == other.a.shape and bool(np.all(self.a == other.a))

    def __hash__(self):
        return hash((self.p, self.a.shape, self.a.tobytes()))

    def is_zero(self) -> bool:
        return not self.a.any()

    def __repr__(self):
        return f"FpMatrix(p={self.p}, shape={self.a.shape})"


def _matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    if a.shape[1] == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    # (p-1)^2 * k stays below 2^63 for p < 2^16 and k < 2^31
    return np.mod(a @ b, p)


def _as_array(M) -> tuple[np.ndarray, int]:
    if isinstance(M, FpMatrix):
        return M.a, M.p
    raise TypeError("expected FpMatrix")


def _rref_gf2(a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    # rows packed into bytes so one XOR clears a bit column across a row
    rows, cols = a.shape
    P = np.packbits(a.astype(np.uint8) & 1, axis=1)
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        byte, mask = c >> 3, np.uint8(0x80 >> (c & 7))
        nz = np.flatnonzero(P[r:, byte] & mask)
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            P[[r, piv]] = P[[piv, r]]
        hit = np.flatnonzero(P[:, byte] & mask)
        hit = hit[hit != r]
        if hit.size:
            P[hit] ^= P[r]
        pivots.append(c)
        r += 1
    R = np.unpackbits(P[:r], axis=1, count=cols).astype(np.int64)
    return R, pivots


def rref(M: FpMatrix) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    a, p = _as_array(M)
    if p == 2 and a.size:
        return _rref_gf2(a)
    R = np.array(a, dtype=np.int64, copy=True)
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            R[[r, piv]] = R[[piv, r]]
        inv = inverse_mod(int(R[r, c]), p)
        if inv != 1:
            R[r] = (R[r] * inv) % p
        col = R[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            R[hit] = (R[hit] - np.outer(col[hit], R[r])) % p
        pivots.append(c)
        r += 1
    return R[:r], pivots


def rank(M: FpMatrix) -> int:
    if M.rows == 0 or M.cols == 0:
        return 0
    return len(rref(M)[1])


def kernel_basis(M: FpMatrix) -> list[np.ndarray]:
    """Basis of {v : Mv = 0}, one vector per free column (free entry set to 1)."""
    p = M.p
    n = M.cols
    if M.rows == 0:
        return [np.eye(n, dtype=np.int64)[j] for j in range(n)]
    R, pivots = rref(M)
    pivset = set(pivots)
    basis = []
    for f in range(n):
        if f in pivset:
            continue
        v = np.zeros(n, dtype=np.int64)
        v[f] = 1
        for i, c in enumerate(pivots):
            v[c] = (-R[i, f]) % p
        basis.append(v)
    return basis


def quotient_basis(sub, ambient_dim: int, p: int) -> tuple[FpMatrix, list[int]]:
    """Quotient of F_p^ambient_dim by span(sub).

    Returns (projection, kept) where ``kept`` lists the standard basis vectors
    that survive as a basis of the quotient (the non-pivot coordinates of the
    echelonized subspace) and ``projection`` is the matrix F^ambient -> F^q
    expressing any vector in that basis.  Its kernel is exactly span(sub).
    """
    _check_prime(p)
    sub = [np.asarray(v, dtype=np.int64) for v in sub]
    for v in sub:
        if v.shape != (ambient_dim,):
            raise ValueError("vector length differs from ambient_dim")
    if not sub:
        return FpMatrix.identity(ambient_dim, p), list(range(ambient_dim))
    S = FpMatrix(np.stack(sub), p)
    R, pivots = rref(S)
    pivset = set(pivots)
    kept = [j for j in range(ambient_dim) if j not in pivset]
    col_of = {j: i for i, j in enumerate(kept)}
    P = np.zeros((len(kept), ambient_dim), dtype=np.int64)
    for j in kept:
        P[col_of[j], j] = 1
    # e_c for a pivot c equals e_c - row_i (a combination of kept coords) mod span
    for i, c in enumerate(pivots):
        row = R[i]
        for j in kept:
            if row[j]:
                P[col_of[j], c] = (-row[j]) % p
    return FpMatrix(P, p), kept


class NoSolution(ValueError):
    """Raised by :func:`solve` when b is not in the image of M."""


def solve(M: FpMatrix, b) -> np.ndarray:
    """x with Mx = b; pivot variables solved, free variables set to 0."""
    p = M.p
    b = np.mod(np.asarray(b, dtype=np.int64), p)
    if b.shape != (M.rows,):
        raise ValueError("b has wrong length")
    if M.cols == 0:
        if b.any():
            raise NoSolution("b is not in the image")
        return np.zeros(0, dtype=np.int64)
    aug = FpMatrix(np.hstack([M.a, b.reshape(-1, 1)]), p)
    R, pivots = rref(aug)
    if pivots and pivots[-1] == M.cols:
        raise NoSolution("b is not in the image")
    x = np.zeros(M.cols, dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c] = R[i, M.cols]
    return x


def independent_columns(M: FpMatrix) -> list[int]:
    """Greedy left-to-right maximal independent set of columns (the pivots)."""
    if M.rows == 0 or M.cols == 0:
        return []
    return rref(M)[1]


def extend_basis(span, candidates, dim: int, p: int) -> list[int]:
    """Indices of ``candidates`` that extend span(span) greedily, in order."""
    span = list(span)
    candidates = list(candidates)
    if not candidates:
        return []
    M = FpMatrix.from_columns(span + candidates, dim, p)
    k = len(span)
    return [c - k for c in independent_columns(M) if c >= k]
