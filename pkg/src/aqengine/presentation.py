"""Finitely presented, positively weighted augmented F_p-algebras.

A polynomial in the presentation's variables is a dict mapping exponent tuples
(aligned with ``variables``) to coefficients in [0, p).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fp import FpMatrix, is_prime, quotient_basis

__all__ = [
    "Presentation",
    "PresentationError",
    "monomials_of_weight",
    "pmul",
    "padd",
    "format_poly",
]


class PresentationError(ValueError):
    """Domain error in a presentation (bad prime, constant term, ...)."""


def monomials_of_weight(weights, w: int) -> list[tuple]:
    """Exponent vectors of total weight exactly w, in lexicographic order."""
    k = len(weights)
    out = []

    def rec(i, rem, acc):
        if i == k:
            if rem == 0:
                out.append(tuple(acc))
            return
        e = 0
        while e * weights[i] <= rem:
            acc.append(e)
            rec(i + 1, rem - e * weights[i], acc)
            acc.pop()
            e += 1

    if k == 0:
        return [()] if w == 0 else []
    rec(0, w, [])
    return sorted(out)


def pmul(f: dict, g: dict, p: int) -> dict:
    out: dict = {}
    for a, c in f.items():
        for b, d in g.items():
            m = tuple(x + y for x, y in zip(a, b))
            v = (out.get(m, 0) + c * d) % p
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def padd(f: dict, g: dict, p: int, scale: int = 1) -> dict:
    out = dict(f)
    for m, c in g.items():
        v = (out.get(m, 0) + scale * c) % p
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def format_poly(f: dict, names) -> str:
    if not f:
        return "0"
    terms = []
    for m, c in sorted(f.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True):
        fac = [n if e == 1 else f"{n}^{e}" for n, e in zip(names, m) if e]
        mono = "*".join(fac)
        if not mono:
            terms.append(str(c))
        elif c == 1:
            terms.append(mono)
        else:
            terms.append(f"{c}*{mono}")
    return " + ".join(terms)


@dataclass
class Presentation:
    p: int
    variables: list  # [(name, weight)]
    relations: list = field(default_factory=list)  # [dict exponent-tuple -> coef]

    def __post_init__(self):
        if not is_prime(self.p) or self.p >= 1 << 16:
            raise PresentationError("p must be prime")
        names = [v for v, _ in self.variables]
        if len(set(names)) != len(names):
            raise PresentationError("duplicate variable name")
        for _, w in self.variables:
            if int(w) < 1:
                raise PresentationError("variable weights must be positive")
        k = len(self.variables)
        rels = []
        for r in self.relations:
            r = {tuple(m): c % self.p for m, c in r.items() if c % self.p}
            for m in r:
                if len(m) != k:
                    raise PresentationError("relation has the wrong number of exponents")
            if () in r or tuple([0] * k) in r:
                raise PresentationError("relation has nonzero constant term")
            ws = {self.mono_weight(m) for m in r}
            if len(ws) > 1:
                raise PresentationError("relation is not weight-homogeneous")
            rels.append(r)
        self.relations = rels

    @property
    def names(self) -> list:
        return [v for v, _ in self.variables]

    @property
    def weights(self) -> list:
        return [int(w) for _, w in self.variables]

    def mono_weight(self, m) -> int:
        return sum(e * w for e, w in zip(m, self.weights))

    def relation_weight(self, r: dict) -> int:
        return self.mono_weight(next(iter(r))) if r else 0

    def max_relation_weight(self) -> int:
        return max((self.relation_weight(r) for r in self.relations if r), default=0)

    def nonzero_relations(self) -> list:
        return [r for r in self.relations if r]

    def with_relations(self, rels) -> "Presentation":
        return Presentation(self.p, list(self.variables), list(rels))

    def var_poly(self, i: int) -> dict:
        m = [0] * len(self.variables)
        m[i] = 1
        return {tuple(m): 1}

    def format(self) -> str:
        vs = ", ".join(f"{n}:{w}" for n, w in self.variables)
        rs = ", ".join(format_poly(r, self.names) for r in self.relations)
        return f"p={self.p}; vars: {vs}; rels: {rs}"

    # -- the algebra A = F[x]/I in each weight ------------------------------
    def ideal_span(self, w: int) -> list[np.ndarray]:
        """Vectors spanning I_w inside F[x]_w (monomials_of_weight order)."""
        basis = monomials_of_weight(self.weights, w)
        index = {m: i for i, m in enumerate(basis)}
        out = []
        for r in self.nonzero_relations():
            rw = self.relation_weight(r)
            if rw > w:
                continue
            for m in monomials_of_weight(self.weights, w - rw):
                v = np.zeros(len(basis), dtype=np.int64)
                for a, c in r.items():
                    v[index[tuple(x + y for x, y in zip(a, m))]] = c
                out.append(v)
        return out

    def quotient_map(self, w: int) -> tuple[FpMatrix, list]:
        """Projection F[x]_w -> A_w and the monomial basis of F[x]_w."""
        key = w
        cache = self.__dict__.setdefault("_qcache", {})
        if key not in cache:
            basis = monomials_of_weight(self.weights, w)
            P, kept = quotient_basis(self.ideal_span(w), len(basis), self.p)
            cache[key] = (P, basis, kept)
        return cache[key][:2]

    def standard_monomials(self, w: int) -> list:
        """Monomials whose classes form the basis of A_w used by quotient_map."""
        self.quotient_map(w)
        _, basis, kept = self._qcache[w]
        return [basis[i] for i in kept]

    def dim(self, w: int) -> int:
        return self.quotient_map(w)[0].rows

    def hilbert(self, W: int) -> list[int]:
        return [self.dim(w) for w in range(W + 1)]
