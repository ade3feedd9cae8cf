"""Truncated simplicial F_p-vector spaces, normalized chains and homotopy.

A degenerate simplex of a free object is indexed by a surjection
sigma: [m] -> [k] stored as the nondecreasing tuple (sigma(0), ..., sigma(m)).
The helpers below compose such surjections with cofaces and codegeneracies.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

from .fp import FpMatrix, extend_basis, kernel_basis, quotient_basis, rank

__all__ = [
    "surjections",
    "face_of_surjection",
    "degeneracy_of_surjection",
    "SimplicialIdentityError",
    "SimplicialVectorSpace",
    "ChainComplex",
    "GradedDims",
    "normalized_complex",
    "homotopy_groups",
    "eilenberg_maclane",
    "check_simplicial_identities",
]


@lru_cache(maxsize=None)
def surjections(m: int, k: int) -> tuple[tuple[int, ...], ...]:
    """All order-preserving surjections [m] -> [k], in lexicographic order."""
    if k > m or k < 0:
        return ()
    out = []
    # a surjection is determined by the k positions (among 1..m) where it steps up
    for steps in combinations(range(1, m + 1), k):
        sig, v = [], 0
        st = set(steps)
        for t in range(m + 1):
            if t in st:
                v += 1
            sig.append(v)
        out.append(tuple(sig))
    return tuple(out)


@lru_cache(maxsize=None)
def face_of_surjection(sigma: tuple[int, ...], i: int):
    """Factor sigma . delta_i = delta_j . eps.

    Returns (j, eps) where j is None when sigma . delta_i is still surjective
    (and eps is that composite), or the single value j of [k] that is missed.
    """
    rest = sigma[:i] + sigma[i + 1:]
    k = sigma[-1]
    present = set(rest)
    if len(present) == k + 1:
        return None, rest
    (j,) = [v for v in range(k + 1) if v not in present]
    eps = tuple(v - 1 if v > j else v for v in rest)
    return j, eps


@lru_cache(maxsize=None)
def degeneracy_of_surjection(sigma: tuple[int, ...], j: int) -> tuple[int, ...]:
    """sigma . sigma_j: repeat the j-th entry."""
    return sigma[: j + 1] + sigma[j:]


class SimplicialIdentityError(ValueError):
    """A face/degeneracy family that violates the simplicial identities."""


@dataclass
class SimplicialVectorSpace:
    """Levels 0..N of a simplicial vector space with weight-tagged bases.

    faces[(n, i)] : level n -> level n-1 (0 <= i <= n, n >= 1)
    degens[(n, j)]: level n -> level n+1 (0 <= j <= n, n < N)
    """

    p: int
    N: int
    weights: list[list[int]]
    faces: dict
    degens: dict
    names: list[list[str]] | None = None

    def dim(self, n: int) -> int:
        return len(self.weights[n])

    def weight_indices(self, n: int, w: int) -> list[int]:
        return [i for i, x in enumerate(self.weights[n]) if x == w]

    def all_weights(self) -> list[int]:
        return sorted({w for lev in self.weights for w in lev})

    def validate(self) -> None:
        check_simplicial_identities(self)
        for (n, i), M in self.faces.items():
            _check_weight_preserving(M, self.weights[n], self.weights[n - 1], f"d_{i} on level {n}")
        for (n, j), M in self.degens.items():
            _check_weight_preserving(M, self.weights[n], self.weights[n + 1], f"s_{j} on level {n}")


def _check_weight_preserving(M: FpMatrix, src_w, dst_w, what: str) -> None:
    rows, cols = np.nonzero(M.a)
    for r, c in zip(rows, cols):
        if dst_w[r] != src_w[c]:
            raise SimplicialIdentityError(f"{what} does not preserve weight")


def check_simplicial_identities(V: SimplicialVectorSpace) -> None:
    """Raise SimplicialIdentityError unless every identity holds within range."""
    d, s, N = V.faces, V.degens, V.N

    def need(lhs, rhs, label):
        if lhs != rhs:
            raise SimplicialIdentityError(label)

    for n in range(2, N + 1):
        for j in range(n + 1):
            for i in range(j):
                need(d[(n - 1, i)] @ d[(n, j)], d[(n - 1, j - 1)] @ d[(n, i)],
                     f"d_{i} d_{j} != d_{j-1} d_{i} on level {n}")
    for n in range(0, N - 1):
        for j in range(n + 1):
            for i in range(j + 1):
                need(s[(n + 1, i)] @ s[(n, j)], s[(n + 1, j + 1)] @ s[(n, i)],
                     f"s_{i} s_{j} != s_{j+1} s_{i} on level {n}")
    for n in range(0, N):
        ident = FpMatrix.identity(V.dim(n), V.p)
        for j in range(n + 1):
            for i in range(n + 2):
                lhs = d[(n + 1, i)] @ s[(n, j)]
                if i < j:
                    rhs = s[(n - 1, j - 1)] @ d[(n, i)]
                elif i in (j, j + 1):
                    rhs = ident
                else:
                    rhs = s[(n - 1, j)] @ d[(n, i - 1)]
                need(lhs, rhs, f"d_{i} s_{j} identity fails on level {n}")


@dataclass
class ChainComplex:
    """Degrees 0..N, boundary[n]: degree n -> degree n-1 for n >= 1."""

    p: int
    N: int
    weights: list[list[int]]
    boundary: dict
    names: list[list[str]] | None = None

    def dim(self, n: int) -> int:
        return len(self.weights[n])

    def check(self) -> None:
        for n in range(2, self.N + 1):
            if not (self.boundary[n - 1] @ self.boundary[n]).is_zero():
                raise SimplicialIdentityError(f"boundary squares to nonzero at degree {n}")

    def block(self, n: int, w: int) -> FpMatrix:
        """Weight-w part of the boundary out of degree n."""
        src = [i for i, x in enumerate(self.weights[n]) if x == w]
        dst = [i for i, x in enumerate(self.weights[n - 1]) if x == w]
        return FpMatrix(self.boundary[n].a[np.ix_(dst, src)], self.p)


@dataclass
class GradedDims:
    """dim pi_s in weight w, for 0 <= s <= N and 0 <= w <= W.

    ``top_uncertain`` lists homotopy degrees whose reported value is only an
    upper bound (the boundary into them lies beyond the truncation).
    ``reps`` optionally holds cycle representatives keyed by (s, w).
    """

    N: int
    W: int
    dims: dict = field(default_factory=dict)
    top_uncertain: tuple = ()
    reps: dict = field(default_factory=dict, repr=False)

    def get(self, s: int, w: int) -> int:
        return self.dims.get((s, w), 0)

    def degree(self, s: int) -> int:
        return sum(v for (t, _), v in self.dims.items() if t == s)

    def by_weight(self, s: int) -> dict:
        return {w: v for (t, w), v in sorted(self.dims.items()) if t == s and v}

    def certified_degrees(self) -> list[int]:
        return [s for s in range(self.N + 1) if s not in self.top_uncertain]

    def table(self) -> dict:
        return {s: self.by_weight(s) for s in range(self.N + 1)}


def normalized_complex(V: SimplicialVectorSpace, check: bool = True) -> ChainComplex:
    """Moore normalization: V_n modulo Im s_0 + ... + Im s_{n-1}."""
    if check:
        check_simplicial_identities(V)
    p = V.p
    proj, kept = [], []
    for n in range(V.N + 1):
        sub = []
        for j in range(n):
            S = V.degens[(n - 1, j)].a
            sub.extend(S[:, c] for c in range(S.shape[1]))
        P, k = quotient_basis(sub, V.dim(n), p)
        proj.append(P)
        kept.append(k)
    bd = {}
    for n in range(1, V.N + 1):
        D = sum((V.faces[(n, i)].a * (-1) ** i for i in range(n + 1)),
                np.zeros((V.dim(n - 1), V.dim(n)), dtype=np.int64))
        section = D[:, kept[n]]
        bd[n] = proj[n - 1] @ FpMatrix(section, p)
    weights = [[V.weights[n][i] for i in kept[n]] for n in range(V.N + 1)]
    names = None
    if V.names is not None:
        names = [[V.names[n][i] for i in kept[n]] for n in range(V.N + 1)]
    C = ChainComplex(p, V.N, weights, bd, names)
    C.check()
    return C


def homotopy_groups(C: ChainComplex, with_reps: bool = False) -> GradedDims:
    """H_n of a weight-graded chain complex, per weight block."""
    allw = sorted({w for lev in C.weights for w in lev})
    W = max(allw, default=0)
    out = GradedDims(C.N, W, top_uncertain=(C.N,) if C.N >= 0 else ())
    for w in allw:
        for n in range(C.N + 1):
            idx = [i for i, x in enumerate(C.weights[n]) if x == w]
            if not idx:
                continue
            if n >= 1:
                Dn = C.block(n, w)
                ker = kernel_basis(Dn)
            else:
                ker = [np.eye(len(idx), dtype=np.int64)[j] for j in range(len(idx))]
            if n < C.N:
                Dup = C.block(n + 1, w)
                img = [Dup.a[:, c] for c in range(Dup.cols)]
            else:
                img = []
            r = rank(FpMatrix.from_columns(img, len(idx), C.p)) if img else 0
            h = len(ker) - r
            if h:
                out.dims[(n, w)] = h
                if with_reps:
                    chosen = extend_basis(img, ker, len(idx), C.p)
                    reps = []
                    for c in chosen:
                        full = np.zeros(C.dim(n), dtype=np.int64)
                        full[idx] = ker[c]
                        reps.append(full)
                    out.reps[(n, w)] = reps
    return out


def eilenberg_maclane(dimV: int, weights, n: int, N: int, p: int = 2) -> SimplicialVectorSpace:
    """K(V, n) truncated at level N, via the inverse Dold-Kan construction.

    Level m has basis {(v, sigma) : v basis of V, sigma: [m] ->> [n]}; a face
    sends (v, sigma) to (v, sigma.delta_i) when that is still surjective and to
    0 otherwise; degeneracies compose with codegeneracies.
    """
    if n < 0 or N < n:
        raise ValueError("need 0 <= n <= N")
    weights = list(weights) if weights is not None else [1] * dimV
    if len(weights) != dimV:
        raise ValueError("one weight per basis vector of V")
    bases = [[(v, sig) for v in range(dimV) for sig in surjections(m, n)] for m in range(N + 1)]
    index = [{b: i for i, b in enumerate(lev)} for lev in bases]
    faces, degens = {}, {}
    for m in range(1, N + 1):
        for i in range(m + 1):
            a = np.zeros((len(bases[m - 1]), len(bases[m])), dtype=np.int64)
            for c, (v, sig) in enumerate(bases[m]):
                j, eps = face_of_surjection(sig, i)
                if j is None:
                    a[index[m - 1][(v, eps)], c] = 1
            faces[(m, i)] = FpMatrix(a, p)
    for m in range(N):
        for j in range(m + 1):
            a = np.zeros((len(bases[m + 1]), len(bases[m])), dtype=np.int64)
            for c, (v, sig) in enumerate(bases[m]):
                a[index[m + 1][(v, degeneracy_of_surjection(sig, j))], c] = 1
            degens[(m, j)] = FpMatrix(a, p)
    wts = [[weights[v] for v, _ in lev] for lev in bases]
    names = [[f"e{v}{''.join(map(str, sig))}" for v, sig in lev] for lev in bases]
    return SimplicialVectorSpace(p, N, wts, faces, degens, names)
