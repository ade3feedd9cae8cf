"""Closed-form low-degree invariants used to cross-check the simplicial engine.

For A = F[x]/I with I inside the square of the maximal ideal m:

    H^Q_0 = m/m^2             (the variables)
    H^Q_1 = I/mI              (minimal generators of I)
    H^Q_2 = Syz/(Kos + m Syz) (syzygies of a minimal generating set modulo
                               Koszul syzygies and m times syzygies)

Everything is weight graded, so each statement is a finite rank computation
in one weight at a time.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .fp import FpMatrix, inverse_mod, kernel_basis, rank
from .presentation import Presentation, monomials_of_weight, padd, pmul
from .simplicial import GradedDims

__all__ = [
    "MinimalPresentation",
    "minimalize",
    "minimal_generators",
    "hq01",
    "hq2_ls",
    "SyzygyModule",
    "syzygies",
    "tor_poly",
    "ci_check",
    "CIVerdict",
]


@dataclass
class MinimalPresentation:
    presentation: Presentation
    eliminated: list = field(default_factory=list)  # [(name, substituted polynomial text)]

    @property
    def p(self) -> int:
        return self.presentation.p


def _linear_part(P: Presentation, r: dict) -> dict:
    out = {}
    for m, c in r.items():
        if sum(m) == 1:
            out[m.index(1)] = c
    return out


def _substitute(P: Presentation, r: dict, i: int, g: dict) -> dict:
    """Replace variable i by g (a polynomial not involving i) in r."""
    p = P.p
    out: dict = {}
    for m, c in r.items():
        e = m[i]
        rest = list(m)
        rest[i] = 0
        term = {tuple(rest): c}
        for _ in range(e):
            term = pmul(term, g, p)
        out = padd(out, term, p)
    return out


def minimalize(P: Presentation) -> MinimalPresentation:
    """Eliminate variables through relations with a nonzero linear part."""
    from .presentation import format_poly

    cur = P
    eliminated = []
    while True:
        pick = None
        for k, r in enumerate(cur.relations):
            lin = _linear_part(cur, r)
            if lin:
                pick = (k, max(lin), lin[max(lin)])
                break
        if pick is None:
            break
        k, i, c = pick
        r = cur.relations[k]
        # r = c x_i + g; weight homogeneity keeps x_i out of g
        unit = tuple(1 if j == i else 0 for j in range(len(cur.variables)))
        g = {m: (-v * inverse_mod(c, cur.p)) % cur.p for m, v in r.items() if m != unit}
        g = {m: v for m, v in g.items() if v}
        eliminated.append((cur.variables[i][0], format_poly(g, cur.names)))
        rels = [_substitute(cur, s, i, g) for j, s in enumerate(cur.relations) if j != k]
        keep = [j for j in range(len(cur.variables)) if j != i]
        rels = [{tuple(m[j] for j in keep): v for m, v in s.items()} for s in rels]
        cur = Presentation(cur.p, [cur.variables[j] for j in keep], [s for s in rels if s])
    return MinimalPresentation(cur, eliminated)


def _vec(poly: dict, index: dict, n: int) -> np.ndarray:
    v = np.zeros(n, dtype=np.int64)
    for m, c in poly.items():
        v[index[m]] = c
    return v


def _m_times_ideal(P: Presentation, w: int) -> list:
    """Spanning vectors of (m I)_w in F[x]_w."""
    basis = monomials_of_weight(P.weights, w)
    index = {m: i for i, m in enumerate(basis)}
    out = []
    for r in P.nonzero_relations():
        rw = P.relation_weight(r)
        if rw >= w:
            continue
        for m in monomials_of_weight(P.weights, w - rw):
            out.append(_vec(pmul(r, {m: 1}, P.p), index, len(basis)))
    return out


def minimal_generators(P: Presentation, W: int) -> list:
    """Indices of relations forming a minimal generating set of I in weight <= W."""
    chosen = []
    by_weight = {}
    for k, r in enumerate(P.relations):
        if r:
            by_weight.setdefault(P.relation_weight(r), []).append(k)
    for w in sorted(by_weight):
        if w > W:
            break
        basis = monomials_of_weight(P.weights, w)
        index = {m: i for i, m in enumerate(basis)}
        span = _m_times_ideal(P, w)
        for k in by_weight[w]:
            v = _vec(P.relations[k], index, len(basis))
            before = rank(FpMatrix.from_columns(span, len(basis), P.p)) if span else 0
            if rank(FpMatrix.from_columns(span + [v], len(basis), P.p)) > before:
                chosen.append(k)
                span.append(v)
    return chosen


def hq01(MP: MinimalPresentation, W: int | None = None) -> tuple[dict, dict]:
    """(dim H^Q_0, dim H^Q_1) as {weight: dim}."""
    P = MP.presentation
    W = max([P.max_relation_weight()] + P.weights + [0]) if W is None else W
    h0: dict = {}
    for _, w in P.variables:
        if w <= W:
            h0[int(w)] = h0.get(int(w), 0) + 1
    h1: dict = {}
    for k in minimal_generators(P, W):
        w = P.relation_weight(P.relations[k])
        h1[w] = h1.get(w, 0) + 1
    return h0, h1


@dataclass
class SyzygyModule:
    """Syzygies of (f_1..f_r) by weight, with the Koszul part alongside."""

    presentation: Presentation
    relations: list  # the f_i (a minimal generating set)
    W: int
    syz: dict  # weight -> list of coefficient vectors (concatenated a_i blocks)
    koszul: dict  # weight -> spanning vectors of the Koszul submodule
    blocks: dict  # weight -> list of (relation index, monomial basis of a_i)

    def as_polys(self, w: int, v) -> list:
        out = []
        pos = 0
        for _, basis in self.blocks[w]:
            out.append({m: int(c) for m, c in zip(basis, v[pos:pos + len(basis)]) if c})
            pos += len(basis)
        return out


def _syz_blocks(P: Presentation, rels: list, w: int):
    blocks = []
    for k, f in enumerate(rels):
        fw = P.relation_weight(f)
        blocks.append((k, monomials_of_weight(P.weights, w - fw) if fw <= w else []))
    return blocks


def syzygies(MP: MinimalPresentation, W: int) -> SyzygyModule:
    P = MP.presentation
    p = P.p
    rels = [P.relations[k] for k in minimal_generators(P, W)]
    syz, kos, blocks = {}, {}, {}
    for w in range(1, W + 1):
        bl = _syz_blocks(P, rels, w)
        blocks[w] = bl
        total = sum(len(b) for _, b in bl)
        if total == 0:
            continue
        target = monomials_of_weight(P.weights, w)
        tindex = {m: i for i, m in enumerate(target)}
        a = np.zeros((len(target), total), dtype=np.int64)
        col = 0
        offsets = []
        for k, basis in bl:
            offsets.append(col)
            for m in basis:
                for mm, c in pmul(rels[k], {m: 1}, p).items():
                    a[tindex[mm], col] = (a[tindex[mm], col] + c) % p
                col += 1
        syz[w] = kernel_basis(FpMatrix(a, p)) if len(target) else [
            np.eye(total, dtype=np.int64)[j] for j in range(total)]
        # Koszul syzygies f_j e_i - f_i e_j, times monomials
        kv = []
        for i, j in combinations(range(len(rels)), 2):
            wi, wj = P.relation_weight(rels[i]), P.relation_weight(rels[j])
            if wi + wj > w:
                continue
            for m in monomials_of_weight(P.weights, w - wi - wj):
                v = np.zeros(total, dtype=np.int64)
                idx_i = {mm: t for t, mm in enumerate(bl[i][1])}
                idx_j = {mm: t for t, mm in enumerate(bl[j][1])}
                for mm, c in pmul(rels[j], {m: 1}, p).items():
                    v[offsets[i] + idx_i[mm]] = (v[offsets[i] + idx_i[mm]] + c) % p
                for mm, c in pmul(rels[i], {m: 1}, p).items():
                    v[offsets[j] + idx_j[mm]] = (v[offsets[j] + idx_j[mm]] - c) % p
                kv.append(v)
        kos[w] = kv
    return SyzygyModule(P, rels, W, syz, kos, blocks)


def _m_times_syz(S: SyzygyModule, w: int) -> list:
    """Spanning vectors of (m Syz)_w."""
    P, p = S.presentation, S.presentation.p
    out = []
    bl = S.blocks[w]
    index = [{m: t for t, m in enumerate(b)} for _, b in bl]
    offs = np.cumsum([0] + [len(b) for _, b in bl])
    total = int(offs[-1])
    for i, (_, wx) in enumerate(P.variables):
        src = w - int(wx)
        if src < 1 or src not in S.syz:
            continue
        xi = tuple(1 if j == i else 0 for j in range(len(P.variables)))
        for v in S.syz[src]:
            u = np.zeros(total, dtype=np.int64)
            for k, poly in enumerate(S.as_polys(src, v)):
                for m, c in poly.items():
                    mm = tuple(a + b for a, b in zip(m, xi))
                    u[offs[k] + index[k][mm]] = c
            out.append(u)
    return out


def hq2_ls(MP: MinimalPresentation, W: int) -> dict:
    """dim H^Q_2 by weight: syzygies modulo Koszul and m * syzygies."""
    S = syzygies(MP, W)
    p = MP.p
    out = {}
    if len(S.relations) > 1 and not any(S.syz.get(w) for w in S.syz):
        warnings.warn(f"no syzygies of weight <= {W}; range may be too small", stacklevel=2)
    for w in sorted(S.syz):
        Z = S.syz[w]
        if not Z:
            continue
        total = len(Z[0])
        sub = S.koszul.get(w, []) + _m_times_syz(S, w)
        # Koszul containment is an exact invariant
        if S.koszul.get(w):
            r_z = rank(FpMatrix.from_columns(Z, total, p))
            if rank(FpMatrix.from_columns(Z + S.koszul[w], total, p)) != r_z:
                raise AssertionError(f"Koszul syzygy outside the syzygy module in weight {w}")
        r_sub = rank(FpMatrix.from_columns(sub, total, p)) if sub else 0
        h = len(Z) - r_sub
        if h:
            out[w] = h
    return out


def tor_poly(weights, target: Presentation, s_max: int, W: int, images=None) -> GradedDims:
    """Tor^{F[y]}_s(F, A) via the Koszul complex on y tensored with A.

    ``images[i]`` is the polynomial in the target variables that y_i acts by;
    by default y_i acts by the i-th target variable.
    """
    p = target.p
    k = len(weights)
    if images is None:
        images = [target.var_poly(i) for i in range(k)]
    out = GradedDims(s_max, W)
    # basis of A_w: the kept monomials of the quotient map
    for w in range(W + 1):
        def chain_basis(s):
            out_ = []
            for S in combinations(range(k), s):
                rest = w - sum(weights[i] for i in S)
                if rest < 0:
                    continue
                for t in range(target.dim(rest)):
                    out_.append((S, rest, t))
            return out_

        def boundary(s):
            src, dst = chain_basis(s), chain_basis(s - 1)
            index = {x: i for i, x in enumerate(dst)}
            a = np.zeros((len(dst), len(src)), dtype=np.int64)
            for c, (S, rest, t) in enumerate(src):
                section = _section(target, rest)
                elem = section[t]
                for pos, i in enumerate(S):
                    sign = -1 if pos % 2 else 1
                    T = tuple(j for j in S if j != i)
                    prod = pmul(elem, images[i], p)
                    rw = rest + weights[i]
                    Q2, fb2 = target.quotient_map(rw)
                    v = _vec(prod, {m: r for r, m in enumerate(fb2)}, len(fb2))
                    img = (Q2.a @ v) % p
                    for r, val in enumerate(img):
                        if val:
                            row = index[(T, rw, r)]
                            a[row, c] = (a[row, c] + sign * val) % p
            return FpMatrix(a, p)

        for s in range(min(s_max, k) + 1):
            n = len(chain_basis(s))
            if not n:
                continue
            z = n if s == 0 else len(kernel_basis(boundary(s)))
            b = rank(boundary(s + 1)) if s + 1 <= k else 0
            if z - b:
                out.dims[(s, w)] = z - b
    return out


def _section(P: Presentation, w: int) -> list:
    return [{m: 1} for m in P.standard_monomials(w)]


@dataclass
class CIVerdict:
    ci: bool | str  # True, False or "inconclusive"
    N: int
    W: int
    oracle: dict  # s -> {weight: dim} for s = 0, 1, 2
    engine: dict  # s -> {weight: dim} for certified s
    agree: bool
    witness: tuple | None  # (2, weight) of the lowest nonzero H^Q_2
    simplicial_dimension: int | None  # max s < N with H^Q_s != 0
    eliminated: list
    notes: list = field(default_factory=list)


def ci_check(P: Presentation, N: int, W: int) -> CIVerdict:
    """Complete intersection within range: H^Q_2 = 0 by both oracle and engine."""
    from .resolutions import RangeError, aq_homology, resolve

    if N < 2:
        raise RangeError("ci-check needs N >= 2")
    MP = minimalize(P)
    h0, h1 = hq01(MP, W)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        h2 = hq2_ls(MP, W)
    oracle = {0: h0, 1: h1, 2: h2}
    R = resolve(P, N, W)
    hq = aq_homology(R)
    top = N - 1
    engine = {s: hq.by_weight(s) for s in range(min(top, 3) + 1)}
    agree = all(engine.get(s, {}) == oracle[s] for s in range(min(top, 2) + 1))
    notes = []
    if top < 2:
        notes.append("H^Q_2 not certified by the engine at this N")
    dims = [s for s in range(top + 1) if hq.by_weight(s)]
    sdim = max(dims) if dims else None
    w2 = sorted(h2)
    witness = (2, w2[0]) if w2 else None
    if not agree:
        verdict = "inconclusive"
        notes.append("oracle and engine disagree")
    else:
        verdict = not h2
    return CIVerdict(verdict, N, W, oracle, engine, agree, witness, sdim, MP.eliminated, notes)
