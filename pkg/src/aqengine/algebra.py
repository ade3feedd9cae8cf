"""Weight-truncated almost-free simplicial commutative algebras.

An :class:`AlmostFreeAlgebra` is levelwise a polynomial algebra.  Its level-m
generators are pairs ``(gid, sigma)``: a non-degenerate generator ``gid`` of
degree k together with a surjection sigma: [m] ->> [k] recording which
degeneracy produced it.  Faces d_i with i >= 1 vanish on non-degenerate
generators, so they act on level generators by relabelling (or by zero);
d_0 of a non-degenerate generator is an explicit polynomial one level down.

Polynomials are plain dicts ``{monomial: coefficient}`` and a monomial is a
sorted tuple of ``((gid, sigma), exponent)`` pairs; ``()`` is the unit.
Everything is weight-homogeneous, so weight truncation at W never mixes blocks.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .fp import FpMatrix, extend_basis, kernel_basis, rank
from .simplicial import (
    GradedDims,
    SimplicialVectorSpace,
    degeneracy_of_surjection,
    face_of_surjection,
    surjections,
)

__all__ = [
    "Generator",
    "AlmostFreeAlgebra",
    "WeightOverflow",
    "BlockTooLarge",
    "sphere",
    "unit_algebra",
    "tensor",
    "indecomposables",
    "evaluate_face",
    "poly_add",
    "poly_mul",
    "poly_scale",
]

UNIT = ()


class WeightOverflow(ValueError):
    """An element of weight above the truncation W was handed to the engine."""


class BlockTooLarge(ValueError):
    """A dense chain block would exceed MAX_BLOCK_ENTRIES; shrink N or W."""


MAX_BLOCK_ENTRIES = 60_000_000


# -- polynomial arithmetic -------------------------------------------------

def mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for g, e in b:
        d[g] = d.get(g, 0) + e
    return tuple(sorted(d.items()))


def poly_add(f: dict, g: dict, p: int, scale: int = 1) -> dict:
    out = dict(f)
    for m, c in g.items():
        v = (out.get(m, 0) + scale * c) % p
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def poly_scale(f: dict, c: int, p: int) -> dict:
    c %= p
    if not c:
        return {}
    return {m: (v * c) % p for m, v in f.items()}


def poly_mul(f: dict, g: dict, p: int) -> dict:
    out: dict = {}
    for m1, c1 in f.items():
        for m2, c2 in g.items():
            m = mono_mul(m1, m2)
            v = (out.get(m, 0) + c1 * c2) % p
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def poly_pow(f: dict, e: int, p: int) -> dict:
    out = {UNIT: 1}
    base = f
    while e:
        if e & 1:
            out = poly_mul(out, base, p)
        e >>= 1
        if e:
            base = poly_mul(base, base, p)
    return out


def _steps(sigma) -> int:
    """Bitmask of positions t in 1..m where sigma steps up."""
    mask = 0
    for t in range(1, len(sigma)):
        if sigma[t] != sigma[t - 1]:
            mask |= 1 << t
    return mask


@dataclass(frozen=True)
class Generator:
    gid: int
    name: str
    degree: int
    weight: int
    d0: tuple = ()  # frozen polynomial: tuple of (monomial, coef) at level degree-1

    def d0_poly(self) -> dict:
        return dict(self.d0)


def _freeze(poly: dict) -> tuple:
    return tuple(sorted(poly.items()))


@dataclass
class AlmostFreeAlgebra:
    p: int
    N: int
    W: int
    generators: list = field(default_factory=list)

    def __post_init__(self):
        self._cache: dict = {}

    # -- construction ------------------------------------------------------
    def add_generator(self, name: str, degree: int, weight: int, d0: dict | None = None) -> Generator:
        if weight < 1:
            raise ValueError("generators need positive weight")
        if degree < 0 or degree > self.N:
            raise ValueError("generator degree outside 0..N")
        if any(g.name == name for g in self.generators):
            raise ValueError(f"duplicate generator name {name}")
        d0 = {m: c % self.p for m, c in (d0 or {}).items() if c % self.p}
        if degree == 0 and d0:
            raise ValueError("degree-0 generators have no faces")
        for m in d0:
            if self.mono_weight(m) != weight:
                raise ValueError(f"d0 of {name} is not homogeneous of weight {weight}")
        g = Generator(len(self.generators), name, degree, weight, _freeze(d0))
        self.generators.append(g)
        self._invalidate(weight)
        return g

    def _invalidate(self, weight: int) -> None:
        # a new generator of weight w only changes blocks of weight >= w
        for key in list(self._cache):
            kind = key[0]
            if kind in ("gens", "pi") or (kind in ("mono", "bd") and key[2] >= weight):
                del self._cache[key]

    def copy(self) -> "AlmostFreeAlgebra":
        X = AlmostFreeAlgebra(self.p, self.N, self.W)
        X.generators = list(self.generators)
        return X

    def gen_by_name(self, name: str) -> Generator:
        for g in self.generators:
            if g.name == name:
                return g
        raise KeyError(name)

    # -- bookkeeping -------------------------------------------------------
    def mono_weight(self, m) -> int:
        return sum(self.generators[g[0]].weight * e for g, e in m)

    def poly_weight(self, f: dict):
        ws = {self.mono_weight(m) for m in f}
        return ws.pop() if len(ws) == 1 else (None if not ws else ws)

    def level_generators(self, m: int) -> list:
        key = ("gens", m)
        if key not in self._cache:
            out = []
            for g in self.generators:
                for sig in surjections(m, g.degree):
                    out.append((g.gid, sig))
            out.sort()
            self._cache[key] = out
        return self._cache[key]

    def generators_in_degree(self, k: int) -> list:
        return [g for g in self.generators if g.degree == k]

    def nondegenerate_generator(self, g: Generator):
        return (g.gid, tuple(range(g.degree + 1)))

    def gen_label(self, lg) -> str:
        gid, sig = lg
        g = self.generators[gid]
        if sig == tuple(range(g.degree + 1)):
            return g.name
        return f"{g.name}[{''.join(map(str, sig))}]"

    def mono_label(self, m) -> str:
        if not m:
            return "1"
        return "*".join(self.gen_label(g) + (f"^{e}" if e > 1 else "") for g, e in m)

    def poly_label(self, f: dict) -> str:
        if not f:
            return "0"
        return " + ".join((f"{c}*" if c != 1 else "") + self.mono_label(m) for m, c in sorted(f.items()))

    # -- structure maps ----------------------------------------------------
    def gen_face(self, i: int, lg) -> dict:
        """d_i of a level generator, as a polynomial one level down."""
        key = ("face", i, lg)
        c = self._cache.get(key)
        if c is not None:
            return c
        gid, sig = lg
        j, eps = face_of_surjection(sig, i)
        if j is None:
            out = {(((gid, eps), 1),): 1}
        elif j == 0:
            out = self._degenerate_poly(self.generators[gid].d0_poly(), eps)
        else:
            out = {}
        self._cache[key] = out
        return out

    @staticmethod
    def _degenerate_poly(f: dict, eps) -> dict:
        """Apply the degeneracy operator eps^* to a polynomial."""
        out = {}
        for m, c in f.items():
            nm = tuple(sorted(((gid, tuple(tau[e] for e in eps)), x) for (gid, tau), x in m))
            out[nm] = c
        return out

    def face(self, i: int, f: dict) -> dict:
        out: dict = {}
        p = self.p
        for m, c in f.items():
            term = {UNIT: c}
            for lg, e in m:
                img = self.gen_face(i, lg)
                if not img:
                    term = {}
                    break
                term = poly_mul(term, poly_pow(img, e, p) if e > 1 else img, p)
            out = poly_add(out, term, p)
        return out

    def degeneracy(self, j: int, f: dict) -> dict:
        out = {}
        for m, c in f.items():
            nm = tuple(sorted(((gid, degeneracy_of_surjection(sig, j)), e) for (gid, sig), e in m))
            out[nm] = c
        return out

    # -- monomial bases ----------------------------------------------------
    def monomials(self, m: int, w: int, nondegenerate: bool = False) -> list:
        """Monomials of weight exactly w at level m (optionally non-degenerate only)."""
        key = ("mono", m, w, nondegenerate)
        if key in self._cache:
            return self._cache[key]
        if w > self.W:
            raise WeightOverflow(f"weight {w} above truncation {self.W}")
        gens = [lg for lg in self.level_generators(m) if self.generators[lg[0]].weight <= w]
        full = (1 << (m + 1)) - 2  # bits 1..m
        wt = [self.generators[lg[0]].weight for lg in gens]
        st = [_steps(lg[1]) for lg in gens]
        # suffix bound on how many step positions one unit of weight can cover
        ratio = 0.0
        for lg, x in zip(gens, wt):
            ratio = max(ratio, self.generators[lg[0]].degree / x)
        out = []

        def rec(start, rem, cover, acc):
            if rem == 0:
                if not nondegenerate or cover == full:
                    out.append(tuple(acc))
                return
            if nondegenerate and bin(full & ~cover).count("1") > rem * ratio + 1e-9:
                return
            for k in range(start, len(gens)):
                gw = wt[k]
                if gw > rem:
                    continue
                e = 1
                while e * gw <= rem:
                    acc.append((gens[k], e))
                    rec(k + 1, rem - e * gw, cover | st[k], acc)
                    acc.pop()
                    e += 1

        if w == 0:
            if not nondegenerate or m == 0:
                out.append(UNIT)
        else:
            rec(0, w, 0, [])
        out.sort()
        self._cache[key] = out
        return out

    def is_degenerate(self, mono, m: int) -> bool:
        full = (1 << (m + 1)) - 2
        cover = 0
        for (gid, sig), _ in mono:
            cover |= _steps(sig)
        return cover != full

    # -- normalized chains and homotopy -------------------------------------
    def normalized_boundary(self, m: int, w: int) -> FpMatrix:
        """Sum (-1)^i d_i : N_m -> N_{m-1} in weight w on non-degenerate monomials."""
        key = ("bd", m, w)
        if key in self._cache:
            return self._cache[key]
        src = self.monomials(m, w, True)
        dst = self.monomials(m - 1, w, True)
        if len(src) * len(dst) > MAX_BLOCK_ENTRIES:
            raise BlockTooLarge(
                f"chain block {len(dst)}x{len(src)} at level {m}, weight {w} is too large")
        index = {x: r for r, x in enumerate(dst)}
        a = np.zeros((len(dst), len(src)), dtype=np.int64)
        p = self.p
        for c, x in enumerate(src):
            col = {}
            for i in range(m + 1):
                col = poly_add(col, self.face(i, {x: 1}), p, (-1) ** i)
            for y, v in col.items():
                r = index.get(y)
                if r is not None:
                    a[r, c] = v
        M = FpMatrix(a, p)
        self._cache[key] = M
        return M

    def homotopy(self, W: int | None = None, N: int | None = None, with_reps: bool = False,
                 degrees=None) -> GradedDims:
        """pi_s in weight <= W for s <= N; degree N is reported as uncertain."""
        W = self.W if W is None else W
        N = self.N if N is None else N
        key = ("pi", W, N, with_reps, None if degrees is None else tuple(degrees))
        if key in self._cache:
            return self._cache[key]
        out = GradedDims(N, W, top_uncertain=(N,))
        degs = range(N + 1) if degrees is None else degrees
        for w in range(W + 1):
            for s in degs:
                h, reps = self._homology_block(s, w, N, with_reps)
                if h:
                    out.dims[(s, w)] = h
                    if with_reps:
                        out.reps[(s, w)] = reps
        self._cache[key] = out
        return out

    def _homology_block(self, s: int, w: int, N: int, with_reps: bool):
        basis = self.monomials(s, w, True)
        if not basis:
            return 0, []
        if s >= 1:
            ker = kernel_basis(self.normalized_boundary(s, w))
        else:
            ker = [np.eye(len(basis), dtype=np.int64)[j] for j in range(len(basis))]
        if s < N:
            up = self.normalized_boundary(s + 1, w)
            img = [up.a[:, c] for c in range(up.cols)]
        else:
            img = []
        r = rank(FpMatrix.from_columns(img, len(basis), self.p)) if img else 0
        h = len(ker) - r
        reps = []
        if with_reps and h:
            for c in extend_basis(img, ker, len(basis), self.p):
                reps.append({basis[t]: int(v) for t, v in enumerate(ker[c]) if v})
        return h, reps

    def moore_representative(self, f: dict, m: int) -> dict:
        """Project an element of level m into the Moore complex (ker d_1..d_m).

        Uses P = (1 - s_{m-1} d_m) ... (1 - s_0 d_1), applied right to left, which
        fixes Moore elements and changes f only by degenerate terms.
        """
        p = self.p
        out = dict(f)
        for j in range(m):
            corr = self.degeneracy(j, self.face(j + 1, out))
            out = poly_add(out, corr, p, -1)
        return out

    # -- explicit matrices (for checks on small ranges) --------------------
    def level_matrices(self, L: int, w: int) -> SimplicialVectorSpace:
        """Weight-w block of levels 0..L as an explicit SimplicialVectorSpace."""
        p = self.p
        bases = [self.monomials(m, w) for m in range(L + 1)]
        index = [{x: i for i, x in enumerate(b)} for b in bases]
        faces, degens = {}, {}
        for m in range(1, L + 1):
            for i in range(m + 1):
                a = np.zeros((len(bases[m - 1]), len(bases[m])), dtype=np.int64)
                for c, x in enumerate(bases[m]):
                    for y, v in self.face(i, {x: 1}).items():
                        a[index[m - 1][y], c] = v
                faces[(m, i)] = FpMatrix(a, p)
        for m in range(L):
            for j in range(m + 1):
                a = np.zeros((len(bases[m + 1]), len(bases[m])), dtype=np.int64)
                for c, x in enumerate(bases[m]):
                    for y, v in self.degeneracy(j, {x: 1}).items():
                        a[index[m + 1][y], c] = v
                degens[(m, j)] = FpMatrix(a, p)
        weights = [[w] * len(b) for b in bases]
        names = [[self.mono_label(x) for x in b] for b in bases]
        return SimplicialVectorSpace(p, L, weights, faces, degens, names)

    def check_attachment(self, g: Generator) -> None:
        """Every face of d_0 g must vanish, else d_0 d_j g = d_{j-1} d_0 g fails."""
        if g.degree == 0:
            return
        z = g.d0_poly()
        for i in range(g.degree):
            if self.face(i, z):
                from .simplicial import SimplicialIdentityError
                raise SimplicialIdentityError(
                    f"attaching {g.name}: d_{i} of its d_0 value is nonzero")

    def q_boundary(self, k: int) -> tuple[FpMatrix, list, list]:
        """Boundary of the normalized indecomposables out of degree k."""
        src = self.generators_in_degree(k)
        dst = self.generators_in_degree(k - 1)
        index = {self.nondegenerate_generator(g): r for r, g in enumerate(dst)}
        a = np.zeros((len(dst), len(src)), dtype=np.int64)
        for c, g in enumerate(src):
            for mono, v in g.d0:
                if len(mono) == 1 and mono[0][1] == 1:
                    r = index.get(mono[0][0])
                    if r is not None:
                        a[r, c] = v
        return FpMatrix(a, self.p), dst, src

    def aq_dims(self, N: int | None = None, with_reps: bool = False) -> GradedDims:
        """pi_* of the normalized indecomposables (generator-level chains)."""
        N = self.N if N is None else N
        out = GradedDims(N, self.W, top_uncertain=(N,))
        weights = sorted({g.weight for g in self.generators})
        for w in weights:
            for s in range(N + 1):
                gens = [g for g in self.generators_in_degree(s) if g.weight == w]
                if not gens:
                    continue
                allg = self.generators_in_degree(s)
                idx = [allg.index(g) for g in gens]
                if s >= 1:
                    D, dst, _ = self.q_boundary(s)
                    rows = [r for r, g in enumerate(dst) if g.weight == w]
                    ker = kernel_basis(FpMatrix(D.a[np.ix_(rows, idx)], self.p))
                else:
                    ker = [np.eye(len(gens), dtype=np.int64)[j] for j in range(len(gens))]
                img = []
                if s < N:
                    U, _, src = self.q_boundary(s + 1)
                    cols = [c for c, g in enumerate(src) if g.weight == w]
                    img = [U.a[idx, c] for c in cols]
                r = rank(FpMatrix.from_columns(img, len(gens), self.p)) if img else 0
                h = len(ker) - r
                if h:
                    out.dims[(s, w)] = h
                    if with_reps:
                        chosen = extend_basis(img, ker, len(gens), self.p)
                        out.reps[(s, w)] = [
                            {gens[t].name: int(v) for t, v in enumerate(ker[c]) if v} for c in chosen]
        return out


def unit_algebra(p: int, N: int, W: int) -> AlmostFreeAlgebra:
    """The ground field F as a constant simplicial algebra."""
    return AlmostFreeAlgebra(p, N, W)


def sphere(dimV: int, weights, n: int, N: int, W: int, p: int = 2, prefix: str = "u") -> AlmostFreeAlgebra:
    """S(V, n) = S(K(V, n)): one degree-n generator per basis vector, all faces zero."""
    if n < 0:
        raise ValueError("sphere degree must be >= 0")
    weights = list(weights) if weights is not None else [1] * dimV
    if len(weights) != dimV:
        raise ValueError("one weight per basis vector")
    X = AlmostFreeAlgebra(p, N, W)
    for v, w in enumerate(weights):
        X.add_generator(f"{prefix}{v}", n, w)
    return X


def tensor(X: AlmostFreeAlgebra, Y: AlmostFreeAlgebra) -> AlmostFreeAlgebra:
    """Coproduct: disjoint union of generating spaces."""
    if (X.p, X.N, X.W) != (Y.p, Y.N, Y.W):
        raise ValueError("tensor factors need the same p, N, W")
    Z = X.copy()
    shift = len(X.generators)
    clash = {g.name for g in X.generators}
    for g in Y.generators:
        d0 = {}
        for mono, c in g.d0:
            d0[tuple((( gid + shift, sig), e) for (gid, sig), e in mono)] = c
        name = g.name if g.name not in clash else f"{g.name}'"
        Z.add_generator(name, g.degree, g.weight, d0)
    return Z


def indecomposables(X: AlmostFreeAlgebra, L: int | None = None) -> SimplicialVectorSpace:
    """QX = I/I^2 levelwise: basis the level generators, faces = linear parts."""
    L = X.N if L is None else L
    p = X.p
    bases = [X.level_generators(m) for m in range(L + 1)]
    index = [{g: i for i, g in enumerate(b)} for b in bases]
    faces, degens = {}, {}
    for m in range(1, L + 1):
        for i in range(m + 1):
            a = np.zeros((len(bases[m - 1]), len(bases[m])), dtype=np.int64)
            for c, lg in enumerate(bases[m]):
                for mono, v in X.gen_face(i, lg).items():
                    if len(mono) == 1 and mono[0][1] == 1:
                        a[index[m - 1][mono[0][0]], c] = v
            faces[(m, i)] = FpMatrix(a, p)
    for m in range(L):
        for j in range(m + 1):
            a = np.zeros((len(bases[m + 1]), len(bases[m])), dtype=np.int64)
            for c, (gid, sig) in enumerate(bases[m]):
                a[index[m + 1][(gid, degeneracy_of_surjection(sig, j))], c] = 1
            degens[(m, j)] = FpMatrix(a, p)
    weights = [[X.generators[g[0]].weight for g in b] for b in bases]
    names = [[X.gen_label(g) for g in b] for b in bases]
    return SimplicialVectorSpace(p, L, weights, faces, degens, names)


def evaluate_face(X: AlmostFreeAlgebra, i: int, level: int, element: dict) -> dict:
    """d_i of a level element, extended multiplicatively."""
    if not 0 <= i <= level or level < 1:
        raise ValueError("face index out of range")
    for m in element:
        if X.mono_weight(m) > X.W:
            raise WeightOverflow(f"monomial {X.mono_label(m)} exceeds W={X.W}")
    return X.face(i, element)


def level_dimension(X: AlmostFreeAlgebra, m: int, w: int) -> int:
    return len(X.monomials(m, w))


def sym_dimension(ngens: int, w: int) -> int:
    return comb(ngens + w - 1, w)
