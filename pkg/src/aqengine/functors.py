"""Sym^w, Lambda^w and Gamma^w applied levelwise to K(V, n).

Each functor takes the permutation basis of K(V, n)_m to a monomial basis on
which faces act by relabelling up to a scalar, so normalized chains are spanned
by the non-degenerate basis monomials.  Decalage identifies

    Sym^w K(V, n)   ~  Lambda^w K(V, n-1) [w]  ~  Gamma^w K(V, n-2) [2w],

so the weight-w homotopy of S(V, n) can be read off any of the three.  The
smaller complexes make high homotopy degrees affordable, and agreement between
routes is a consistency check on the chain engine.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations, combinations_with_replacement
from math import comb

import numpy as np

from .fp import FpMatrix, kernel_basis, rank
from .simplicial import face_of_surjection, surjections

__all__ = ["functor_homotopy", "sphere_weight_homotopy", "FUNCTORS"]

FUNCTORS = ("sym", "ext", "gamma")


def _steps(sig) -> int:
    mask = 0
    for t in range(1, len(sig)):
        if sig[t] != sig[t - 1]:
            mask |= 1 << t
    return mask


class _FunctorOfEM:
    def __init__(self, kind: str, q: int, n: int, w: int, p: int):
        if kind not in FUNCTORS:
            raise ValueError(f"unknown functor {kind}")
        self.kind, self.q, self.n, self.w, self.p = kind, q, n, w, p
        self._basis: dict = {}
        self._bd: dict = {}

    def k_basis(self, m: int):
        return sorted((v, sig) for v in range(self.q) for sig in surjections(m, self.n))

    def basis(self, m: int) -> list:
        """Non-degenerate basis monomials at level m (tuples of K-basis elements)."""
        if m in self._basis:
            return self._basis[m]
        kb = self.k_basis(m)
        full = (1 << (m + 1)) - 2
        if self.kind == "ext":
            it = combinations(kb, self.w)
        else:
            it = combinations_with_replacement(kb, self.w)
        out = []
        for mono in it:
            cover = 0
            for _, sig in mono:
                cover |= _steps(sig)
            if cover == full:
                out.append(mono)
        self._basis[m] = out
        return out

    def _face_mono(self, mono, i):
        imgs = []
        for v, sig in mono:
            j, eps = face_of_surjection(sig, i)
            if j is not None:
                return None, 0
            imgs.append((v, eps))
        p = self.p
        if self.kind == "sym":
            return tuple(sorted(imgs)), 1
        if self.kind == "ext":
            if len(set(imgs)) < len(imgs):
                return None, 0
            # sign of the sorting permutation
            sign = 1
            arr = list(imgs)
            for a in range(len(arr)):
                for b in range(a + 1, len(arr)):
                    if arr[a] > arr[b]:
                        sign = -sign
            return tuple(sorted(imgs)), sign % p
        # divided powers: group the source exponents by image
        src: dict = {}
        for x in mono:
            src[x] = src.get(x, 0) + 1
        tgt: dict = {}
        for (v, sig), e in src.items():
            j, eps = face_of_surjection(sig, i)
            tgt.setdefault((v, eps), []).append(e)
        coef = 1
        for es in tgt.values():
            tot = 0
            for e in es:
                tot += e
                coef = coef * comb(tot, e) % p
        if coef == 0:
            return None, 0
        return tuple(sorted(imgs)), coef

    def boundary(self, m: int) -> FpMatrix:
        if m in self._bd:
            return self._bd[m]
        src, dst = self.basis(m), self.basis(m - 1)
        index = {x: r for r, x in enumerate(dst)}
        a = np.zeros((len(dst), len(src)), dtype=np.int64)
        for c, x in enumerate(src):
            for i in range(m + 1):
                y, v = self._face_mono(x, i)
                if y is None:
                    continue
                r = index.get(y)
                if r is not None:
                    a[r, c] = (a[r, c] + (-1) ** i * v) % self.p
        M = FpMatrix(a, self.p)
        self._bd[m] = M
        return M

    def homology(self, s: int) -> int:
        b = self.basis(s)
        if not b:
            return 0
        z = len(kernel_basis(self.boundary(s))) if s >= 1 else len(b)
        return z - rank(self.boundary(s + 1))


@lru_cache(maxsize=None)
def functor_homotopy(kind: str, q: int, n: int, w: int, p: int, smax: int) -> tuple:
    """(dim pi_0, ..., dim pi_smax) of F^w K(F^q, n); every entry certified."""
    F = _FunctorOfEM(kind, q, n, w, p)
    return tuple(F.homology(s) for s in range(smax + 1))


def sphere_weight_homotopy(q: int, n: int, w: int, p: int, smax: int, route: str = "auto") -> tuple:
    """Weight-w part of pi_0..pi_smax of S(F^q, n) by the chosen chain route."""
    if route == "auto":
        route = "gamma" if n >= 2 else ("ext" if n >= 1 else "sym")
    shift = {"sym": 0, "ext": w, "gamma": 2 * w}[route]
    base_n = {"sym": n, "ext": n - 1, "gamma": n - 2}[route]
    if base_n < 0:
        raise ValueError(f"route {route} needs n >= {n - base_n}")
    if w == 0:
        return tuple(1 if s == 0 else 0 for s in range(smax + 1))
    lo = smax - shift
    vals = functor_homotopy(route, q, base_n, w, p, lo) if lo >= 0 else ()
    out = [0] * (smax + 1)
    for s, v in enumerate(vals):
        out[s + shift] = v
    return tuple(out)
