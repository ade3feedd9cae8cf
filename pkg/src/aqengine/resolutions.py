"""Step-by-step almost-free resolutions, cofibers and Postnikov envelopes.

A resolution of a discrete target A is built by a kill loop.  Stage 0 adjoins
degree-0 generators mapping onto the variables; stage k+1 computes the
offending homotopy in degree k one weight at a time (the kernel of
pi_0 X -> A when k = 0, pi_k X afterwards) and attaches one degree-(k+1)
cell per basis class, with d_0 a Moore representative and the other faces 0.
Weights are processed in increasing order because a cell of weight w only
changes blocks of weight >= w.

Completion plays no role: everything is positively weighted and truncated at
W, so all statements are made in the weight-complete range (N, W).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import AlmostFreeAlgebra, Generator, poly_add
from .fp import FpMatrix, NoSolution, extend_basis, kernel_basis, rank, solve
from .presentation import Presentation, PresentationError, pmul
from .simplicial import GradedDims, SimplicialIdentityError

__all__ = [
    "Resolution",
    "CofibrationSequenceRecord",
    "InvariantViolation",
    "RangeError",
    "resolve",
    "relative_resolve",
    "aq_homology",
    "suspension",
    "build_fn",
    "postnikov_envelope",
    "recognize_sphere",
    "SphereVerdict",
    "cofiber_by_deletion",
    "cone_off",
    "les_exactness",
    "LESReport",
    "FnMap",
    "EnvelopeStep",
    "verify_resolution",
]


class InvariantViolation(AssertionError):
    """A computed object fails one of its defining invariants."""


class RangeError(PresentationError):
    """The requested (N, W) range cannot certify the input."""


@dataclass
class Resolution:
    """X -> target with pi_0 X = A and pi_s X = 0 for 1 <= s <= N-1 (weight <= W).

    ``aug`` sends the name of each degree-0 generator to a polynomial in the
    target variables (Presentation targets) and is None for algebra targets.
    """

    X: AlmostFreeAlgebra
    target: object
    aug: dict | None
    N: int
    W: int
    pi: GradedDims | None = field(default=None, repr=False)

    @property
    def p(self) -> int:
        return self.X.p

    def homotopy(self) -> GradedDims:
        if self.pi is None:
            self.pi = self.X.homotopy()
        return self.pi


@dataclass
class CofibrationSequenceRecord:
    """B -> Z -> M with M = Z with B's generators deleted."""

    base: AlmostFreeAlgebra
    total: AlmostFreeAlgebra
    cofiber: AlmostFreeAlgebra
    base_gids: tuple
    N: int
    W: int
    # an algebra weakly equivalent to Z by construction; its pi is used for Z
    total_model: AlmostFreeAlgebra | None = field(default=None, repr=False)
    _pi: dict = field(default_factory=dict, repr=False)

    def _homotopy(self, which: str) -> GradedDims:
        if which not in self._pi:
            X = getattr(self, which)
            if which == "total" and self.total_model is not None:
                X = self.total_model
            self._pi[which] = X.homotopy()
        return self._pi[which]

    @property
    def pi_base(self) -> GradedDims:
        return self._homotopy("base")

    @property
    def pi_total(self) -> GradedDims:
        return self._homotopy("total")

    @property
    def pi_cofiber(self) -> GradedDims:
        return self._homotopy("cofiber")

    @property
    def hq_base(self) -> GradedDims:
        return self.base.aq_dims()

    @property
    def hq_total(self) -> GradedDims:
        return self.total.aq_dims()

    @property
    def hq_cofiber(self) -> GradedDims:
        return self.cofiber.aq_dims()

    def les_exactness(self) -> "LESReport":
        return les_exactness(self)


# -- helpers ---------------------------------------------------------------

def _level0_monomials_to_target(X: AlmostFreeAlgebra, P: Presentation, aug: dict, w: int):
    """Matrix of X_0 (weight w) -> A_w induced by the augmentation."""
    basis = X.monomials(0, w)
    Q, fbasis = P.quotient_map(w)
    index = {m: i for i, m in enumerate(fbasis)}
    cols = []
    images = {g.gid: aug[g.name] for g in X.generators if g.degree == 0}
    for mono in basis:
        img = {tuple([0] * len(P.variables)): 1}
        for (gid, _), e in mono:
            img = pmul(img, _ppow(images[gid], e, P.p), P.p)
        v = np.zeros(len(fbasis), dtype=np.int64)
        for m, c in img.items():
            v[index[m]] = c
        cols.append(v)
    A = FpMatrix.from_columns(cols, len(fbasis), P.p) if cols else FpMatrix.zeros(len(fbasis), 0, P.p)
    return Q @ A, basis


def _ppow(f: dict, e: int, p: int) -> dict:
    k = len(next(iter(f))) if f else 0
    out = {tuple([0] * k): 1}
    for _ in range(e):
        out = pmul(out, f, p)
    return out


def _attach(X: AlmostFreeAlgebra, name: str, degree: int, weight: int, z: dict) -> Generator:
    z = X.moore_representative(z, degree - 1) if degree >= 2 else z
    g = X.add_generator(name, degree, weight, z)
    try:
        X.check_attachment(g)
    except SimplicialIdentityError:
        X.generators.pop()
        X._cache.clear()
        raise
    return g


def _fresh(X: AlmostFreeAlgebra, stem: str) -> str:
    taken = {g.name for g in X.generators}
    i = 0
    while f"{stem}{i}" in taken:
        i += 1
    return f"{stem}{i}"


def _kill_stage0(X: AlmostFreeAlgebra, P: Presentation, aug: dict, W: int) -> None:
    """Attach degree-1 cells until pi_0 X -> A is injective in weight <= W."""
    p = X.p
    for w in range(1, W + 1):
        E, basis = _level0_monomials_to_target(X, P, aug, w)
        if not basis:
            continue
        ker = kernel_basis(E) if E.rows else [np.eye(len(basis), dtype=np.int64)[j] for j in range(len(basis))]
        if not ker:
            continue
        if X.N >= 1:
            B = X.normalized_boundary(1, w)
            img = [B.a[:, c] for c in range(B.cols)]
        else:
            img = []
        for c in extend_basis(img, ker, len(basis), p):
            z = {basis[t]: int(v) for t, v in enumerate(ker[c]) if v}
            _attach(X, _fresh(X, "r"), 1, w, z)


def _kill_stage(X: AlmostFreeAlgebra, k: int, W: int, wmin: int = 1) -> None:
    """Attach degree-(k+1) cells killing pi_k X in weights wmin..W."""
    for w in range(wmin, W + 1):
        h, reps = X._homology_block(k, w, X.N, True)
        for z in reps:
            _attach(X, _fresh(X, f"c{k + 1}_"), k + 1, w, z)


def _check_range(P: Presentation, N: int, W: int) -> None:
    if N < 1:
        raise RangeError("need N >= 1")
    if P.max_relation_weight() > W:
        raise RangeError(f"relation weight {P.max_relation_weight()} exceeds W={W}")


def resolve(target: Presentation, N: int, W: int, verify: bool = True) -> Resolution:
    """Almost-free resolution of a presented algebra, certified in (N, W)."""
    _check_range(target, N, W)
    X = AlmostFreeAlgebra(target.p, N, W)
    aug = {}
    for i, (name, wt) in enumerate(target.variables):
        X.add_generator(name, 0, int(wt))
        aug[name] = target.var_poly(i)
    _kill_stage0(X, target, aug, W)
    for k in range(1, N):
        _kill_stage(X, k, W)
    R = Resolution(X, target, aug, N, W)
    if verify:
        verify_resolution(R)
    return R


def verify_resolution(R: Resolution) -> None:
    """Trivial-fibration contract: pi_0 X = A and pi_s X = 0 for 1 <= s < N."""
    pi = R.homotopy()
    if isinstance(R.target, Presentation):
        for w in range(R.W + 1):
            if pi.get(0, w) != R.target.dim(w):
                raise InvariantViolation(
                    f"pi_0 X has dim {pi.get(0, w)} in weight {w}, target has {R.target.dim(w)}")
    for (s, w), v in pi.dims.items():
        if 1 <= s < R.N and v:
            raise InvariantViolation(f"pi_{s} X nonzero in weight {w}")


def aq_homology(R: Resolution) -> GradedDims:
    """H^Q_s = pi_s QX; degree N is reported as truncation-uncertain."""
    return R.X.aq_dims(R.N)


# -- relative resolutions and cofibers --------------------------------------

def cofiber_by_deletion(Z: AlmostFreeAlgebra, base_gids) -> AlmostFreeAlgebra:
    """Z modulo the ideal generated by the listed generators."""
    drop = set(base_gids)
    M = AlmostFreeAlgebra(Z.p, Z.N, Z.W)
    remap = {}
    for g in Z.generators:
        if g.gid in drop:
            continue
        d0 = {}
        for mono, c in g.d0:
            if any(gid in drop for (gid, _), _ in mono):
                continue
            d0[tuple(((remap[gid], sig), e) for (gid, sig), e in mono)] = c
        remap[g.gid] = M.add_generator(g.name, g.degree, g.weight, d0).gid
    return M


def _target_presentation(target, p):
    if target is None:
        return Presentation(p, [], [])
    return target


def relative_resolve(base: AlmostFreeAlgebra, f: dict, target, N: int | None = None,
                     W: int | None = None, verify: bool = True) -> CofibrationSequenceRecord:
    """Factor base -> target as base >-> Z -> target with Z ~ target in range.

    For a Presentation target, ``f`` sends each degree-0 generator name of the
    base to a polynomial in the target variables; higher generators go to 0.
    For an AlmostFreeAlgebra target, the base must have generators with
    vanishing faces (a sphere) and ``f`` sends each of them to a Moore cycle
    of the target; Z is the target with the base glued in and coned off.
    """
    N = base.N if N is None else N
    W = base.W if W is None else W
    if (base.N, base.W) != (N, W):
        base = _rerange(base, N, W)
    if isinstance(target, AlmostFreeAlgebra):
        return _relative_to_algebra(base, f, target, N, W)
    P = _target_presentation(target, base.p)
    if P.p != base.p:
        raise PresentationError("base and target have different primes")
    _check_range(P, N, W)
    Z = base.copy()
    aug = {}
    for g in base.generators:
        if g.degree == 0:
            if g.name not in f:
                raise PresentationError(f"no image given for generator {g.name}")
            img = {tuple(m): c % P.p for m, c in f[g.name].items() if c % P.p}
            for m in img:
                if P.mono_weight(m) != g.weight:
                    raise PresentationError(f"image of {g.name} has the wrong weight")
            aug[g.name] = img
    # compatibility: d_0 of a degree-1 base generator must map to 0 in A
    for g in base.generators:
        if g.degree == 1 and g.d0:
            E, basis = _level0_monomials_to_target(Z, P, aug, g.weight)
            v = np.zeros(len(basis), dtype=np.int64)
            idx = {m: i for i, m in enumerate(basis)}
            for mono, c in g.d0:
                v[idx[mono]] = c
            if E.rows and np.any((E.a @ v) % P.p):
                raise PresentationError(f"map does not kill d_0 of {g.name}")
    # adjoin the target variables that the base does not already hit
    for i, (name, wt) in enumerate(P.variables):
        v = P.var_poly(i)
        if any(img == v for img in aug.values()):
            continue
        nm = name if name not in {g.name for g in Z.generators} else _fresh(Z, name + "_")
        Z.add_generator(nm, 0, int(wt))
        aug[nm] = v
    _kill_stage0(Z, P, aug, W)
    for k in range(1, N):
        _kill_stage(Z, k, W)
    base_gids = tuple(range(len(base.generators)))
    rec = CofibrationSequenceRecord(base, Z, cofiber_by_deletion(Z, base_gids), base_gids, N, W)
    if verify:
        verify_resolution(Resolution(Z, P, aug, N, W, pi=rec.pi_total))
    return rec


def _rerange(X: AlmostFreeAlgebra, N: int, W: int) -> AlmostFreeAlgebra:
    Y = AlmostFreeAlgebra(X.p, N, W)
    for g in X.generators:
        if g.degree > N or g.weight > W:
            raise RangeError(f"generator {g.name} lies outside the range (N={N}, W={W})")
        Y.add_generator(g.name, g.degree, g.weight, dict(g.d0))
    return Y


def _relative_to_algebra(base, f, X, N, W) -> CofibrationSequenceRecord:
    if (X.N, X.W) != (N, W):
        X = _rerange(X, N, W)
    p = X.p
    Z = X.copy()
    base_gids = []
    for g in base.generators:
        if g.d0:
            raise PresentationError("cell attachment over a base needs vanishing faces")
        if g.degree + 1 > N:
            raise RangeError(f"cone on {g.name} needs degree {g.degree + 1} > N")
        z = {m: c % p for m, c in f.get(g.name, {}).items() if c % p}
        for i in range(g.degree + 1 if g.degree >= 1 else 0):
            if X.face(i, z):
                raise SimplicialIdentityError(f"image of {g.name} is not a Moore cycle")
        nm = g.name if g.name not in {h.name for h in Z.generators} else _fresh(Z, g.name + "_")
        u = Z.add_generator(nm, g.degree, g.weight)
        base_gids.append(u.gid)
        ulev = ((((u.gid, tuple(range(g.degree + 1))), 1),))
        _attach(Z, _fresh(Z, "e"), g.degree + 1, g.weight, poly_add({ulev: 1}, z, p, -1))
    # Z = X tensor cones on u - f(u), so Z ~ X; pi of the much larger Z is read off X
    rec = CofibrationSequenceRecord(base, Z, cofiber_by_deletion(Z, base_gids), tuple(base_gids), N, W,
                                    total_model=X)
    return rec


# -- transitivity sequence ---------------------------------------------------

@dataclass
class LESReport:
    holds: bool
    rows: list  # dicts per (weight, degree) with the homology dims and ranks

    def first_failure(self):
        for r in self.rows:
            if not r["exact"]:
                return r
        return None


def _rank_mod(vectors, sub, dim, p) -> int:
    """rank of span(vectors) + span(sub) minus rank of span(sub)."""
    allv = list(vectors) + list(sub)
    if not allv or dim == 0:
        return 0
    r_all = rank(FpMatrix.from_columns(allv, dim, p))
    r_sub = rank(FpMatrix.from_columns(sub, dim, p)) if sub else 0
    return r_all - r_sub


def _kernel_cols(D: np.ndarray, n: int, p: int) -> list:
    if D.shape[0] == 0:
        return [np.eye(n, dtype=np.int64)[j] for j in range(n)]
    return kernel_basis(FpMatrix(D, p))


def les_exactness(rec: CofibrationSequenceRecord) -> LESReport:
    """Exactness of H^Q(B) -> H^Q(Z) -> H^Q(M) -> H^Q_{s-1}(B) per weight block.

    The Q-chains of Z contain those of B as the generators in ``base_gids`` and
    project onto those of M; the three connecting ranks must split every
    homology dimension, which fails if the generator bookkeeping is wrong.
    """
    Z, p, N = rec.total, rec.total.p, rec.N
    base = set(rec.base_gids)
    rows, ok = [], True
    top = N - 1
    for w in sorted({g.weight for g in Z.generators}):
        gens = {s: [g for g in Z.generators_in_degree(s) if g.weight == w] for s in range(N + 1)}
        D = {}
        for s in range(1, N + 1):
            full, dst, src = Z.q_boundary(s)
            ri = [dst.index(g) for g in gens[s - 1]]
            ci = [src.index(g) for g in gens[s]]
            D[s] = full.a[np.ix_(ri, ci)] if ri and ci else np.zeros((len(ri), len(ci)), dtype=np.int64)
        bidx = {s: [i for i, g in enumerate(gens[s]) if g.gid in base] for s in gens}
        midx = {s: [i for i, g in enumerate(gens[s]) if g.gid not in base] for s in gens}
        # B must be a subcomplex
        for s in range(1, N + 1):
            if D[s].size and np.any(D[s][np.ix_(midx[s - 1], bidx[s])] % p):
                raise InvariantViolation("base generators are not a subcomplex of the Q-chains")

        def blk(s, rows_, cols_):
            return D[s][np.ix_(rows_, cols_)] if rows_ and cols_ else np.zeros((len(rows_), len(cols_)), dtype=np.int64)

        def data(s, idx):
            """cycles and boundaries of a subcomplex in degree s (sub-coordinates)."""
            n = len(idx[s])
            if n == 0:
                return [], [], 0
            cyc = _kernel_cols(blk(s, idx[s - 1], idx[s]) if s >= 1 else np.zeros((0, n), dtype=np.int64), n, p)
            if s + 1 <= N:
                U = blk(s + 1, idx[s], idx[s + 1])
                bd = [U[:, c] for c in range(U.shape[1])]
            else:
                bd = []
            h = len(cyc) - (rank(FpMatrix.from_columns(bd, n, p)) if bd else 0)
            return cyc, bd, h

        allidx = {s: list(range(len(gens[s]))) for s in gens}
        ri_prev = 0
        for s in range(0, top + 1):
            cB, bB, hB = data(s, bidx)
            cZ, bZ, hZ = data(s, allidx)
            cM, bM, hM = data(s, midx)
            nZ, nM = len(gens[s]), len(midx[s])
            embed = []
            for v in cB:
                x = np.zeros(nZ, dtype=np.int64)
                x[bidx[s]] = v
                embed.append(x)
            r_i = _rank_mod(embed, bZ, nZ, p)
            r_j = _rank_mod([v[midx[s]] for v in cZ], bM, nM, p)
            if s >= 1:
                _, bB1, hB1 = data(s - 1, bidx)
                nB1 = len(bidx[s - 1])
                dl = []
                for v in cM:
                    x = np.zeros(nZ, dtype=np.int64)
                    x[midx[s]] = v
                    y = (D[s] @ x) % p if D[s].size else np.zeros(len(gens[s - 1]), dtype=np.int64)
                    dl.append(y[bidx[s - 1]])
                r_d = _rank_mod(dl, bB1, nB1, p)
            else:
                r_d, hB1 = 0, 0
            exact = hZ == r_i + r_j and hM == r_j + r_d and (s == 0 or hB1 == r_d + ri_prev)
            ok &= exact
            rows.append({"weight": w, "degree": s, "hB": hB, "hZ": hZ, "hM": hM,
                         "rank_i": r_i, "rank_j": r_j, "rank_delta": r_d, "exact": exact})
            ri_prev = r_i
    return LESReport(ok, rows)


# -- suspension, f_n, envelopes, recognition --------------------------------

def cone_off(X: AlmostFreeAlgebra, upto: int | None = None) -> CofibrationSequenceRecord:
    """X >-> Z ~ F by coning off each generator of degree <= upto in turn.

    Generators are handled in (degree, weight) order.  When g is reached the
    part of Z built so far is contractible, so z = d_0 g bounds: solve
    dw = z there, replace w by its Moore projection, and attach e_g with
    d_0 e_g = g - w.  Only the level deg(g) block in weight wt(g) is needed,
    which is what makes this cheaper than a kill loop on Z.
    """
    upto = X.N - 1 if upto is None else upto
    p = X.p
    Z = AlmostFreeAlgebra(p, X.N, X.W)
    remap = {}
    order = sorted(X.generators, key=lambda g: (g.degree, g.weight, g.gid))

    def moved(poly):
        return {tuple(((remap[gid], sig), e) for (gid, sig), e in mono): c for mono, c in poly.items()}

    late = []
    for g in order:
        if g.degree > upto:
            late.append(g)
            continue
        k = g.degree
        z = moved(g.d0_poly())
        w_poly = {}
        if k >= 1 and z:
            tgt = Z.monomials(k - 1, g.weight, True)
            idx = {m: i for i, m in enumerate(tgt)}
            b = np.zeros(len(tgt), dtype=np.int64)
            for m, c in z.items():
                if m in idx:
                    b[idx[m]] = c
            B = Z.normalized_boundary(k, g.weight)
            try:
                x = solve(B, b)
            except NoSolution:
                raise InvariantViolation(f"d_0 {g.name} does not bound in the coned part") from None
            src = Z.monomials(k, g.weight, True)
            w_poly = Z.moore_representative({src[t]: int(v) for t, v in enumerate(x) if v}, k)
        u = Z.add_generator(g.name, k, g.weight, z)
        remap[g.gid] = u.gid
        ulev = (((u.gid, tuple(range(k + 1))), 1),)
        _attach(Z, _fresh(Z, "s_" + g.name + "_"), k + 1, g.weight, poly_add({ulev: 1}, w_poly, p, -1))
    for g in late:
        remap[g.gid] = Z.add_generator(g.name, g.degree, g.weight, moved(g.d0_poly())).gid
    base = tuple(sorted(remap.values()))
    return CofibrationSequenceRecord(X, Z, cofiber_by_deletion(Z, base), base, X.N, X.W)


def suspension(A, N: int | None = None, W: int | None = None, method: str = "cone"):
    """Sigma A as the cofiber of A -> F; returns (Resolution, record).

    ``method="kill"`` runs the generic relative kill loop instead, which
    also certifies Z ~ F directly but is far more expensive.
    """
    if isinstance(A, Presentation):
        if N is None or W is None:
            raise RangeError("a presentation needs an explicit range")
        A = resolve(A, N, W)
    X = A.X if isinstance(A, Resolution) else A
    N = X.N if N is None else N
    W = X.W if W is None else W
    if (X.N, X.W) != (N, W):
        X = _rerange(X, N, W)
    if method == "cone":
        rec = cone_off(X)
    elif method == "kill":
        f = {g.name: {} for g in X.generators if g.degree == 0}
        rec = relative_resolve(X, f, Presentation(X.p, [], []), N, W)
    else:
        raise ValueError(f"unknown suspension method {method}")
    return Resolution(rec.cofiber, None, None, N, W), rec


@dataclass
class FnMap:
    """f_n: S(H^Q_n, n) -> X, generators sent to Moore cycle representatives."""

    n: int
    sphere: AlmostFreeAlgebra
    images: dict  # sphere generator name -> polynomial in X (level n)
    hurewicz_rank: int
    hq_dim: int


def _connectivity_failure(pi: GradedDims, n: int, N: int):
    for (s, w), v in sorted(pi.dims.items()):
        if v and (s == 0 and w > 0 or 1 <= s < n) and s < N:
            return s, w
    return None


def _linear_part(X: AlmostFreeAlgebra, z: dict, k: int) -> dict:
    """Image of a level-k element in the normalized indecomposables (by gid)."""
    out = {}
    for mono, c in z.items():
        if len(mono) == 1 and mono[0][1] == 1:
            gid, sig = mono[0][0]
            if sig == tuple(range(k + 1)):
                out[gid] = (out.get(gid, 0) + c) % X.p
    return {g: c for g, c in out.items() if c}


def build_fn(R, n: int, prefix: str = "u") -> FnMap:
    """The map S(H^Q_n, n) -> X inducing an isomorphism on pi_n and H^Q_n."""
    X = R.X if isinstance(R, Resolution) else R
    N, W, p = X.N, X.W, X.p
    if n < 0 or n >= N:
        raise RangeError(f"f_{n} needs 0 <= n < N={N}")
    S = AlmostFreeAlgebra(p, N, W)
    images = {}
    if n == 0:
        hq = X.aq_dims(N, with_reps=True)
        k = 0
        for w in range(W + 1):
            for rep in hq.reps.get((0, w), []):
                u = S.add_generator(f"{prefix}{k}", 0, w)
                images[u.name] = {(((X.gen_by_name(nm).gid, (0,)), 1),): c for nm, c in rep.items()}
                k += 1
        return FnMap(0, S, images, k, k)
    pi = X.homotopy(with_reps=True)
    bad = _connectivity_failure(pi, n, N)
    if bad is not None:
        raise RangeError(f"X is not {n - 1}-connected in range: pi_{bad[0]} nonzero in weight {bad[1]}")
    hq = X.aq_dims(N)
    k, total_rank, total_hq = 0, 0, 0
    for w in range(W + 1):
        reps = pi.reps.get((n, w), [])
        # Hurewicz images modulo Q-boundaries must be a basis of H^Q_n in this weight
        gens = [g for g in X.generators_in_degree(n) if g.weight == w]
        pos = {g.gid: i for i, g in enumerate(gens)}
        cols = []
        moore = []
        for z in reps:
            mz = X.moore_representative(z, n)
            moore.append(mz)
            v = np.zeros(len(gens), dtype=np.int64)
            for gid, c in _linear_part(X, mz, n).items():
                v[pos[gid]] = c
            cols.append(v)
        bd = []
        if n + 1 <= N:
            U, dst, src = X.q_boundary(n + 1)
            rows = [dst.index(g) for g in gens]
            for c, g in enumerate(src):
                if g.weight == w:
                    bd.append(U.a[rows, c])
        r = _rank_mod(cols, bd, len(gens), p)
        h = hq.get(n, w)
        if len(reps) != h or r != h:
            raise InvariantViolation(
                f"Hurewicz fails in weight {w}: dim pi_{n} = {len(reps)}, dim H^Q_{n} = {h}, rank {r}")
        total_rank += r
        total_hq += h
        for mz in moore:
            u = S.add_generator(f"{prefix}{k}", n, w)
            images[u.name] = mz
            k += 1
    return FnMap(n, S, images, total_rank, total_hq)


@dataclass
class EnvelopeStep:
    n: int
    fn: FnMap
    record: CofibrationSequenceRecord
    next: Resolution
    connectivity_ok: bool
    hq_shift_ok: bool


def postnikov_envelope(R, n: int) -> EnvelopeStep:
    """A(n) -> A(n+1): cone off f_n and check the cofiber is n-connected."""
    X = R.X if isinstance(R, Resolution) else R
    fn = build_fn(X, n)
    rec = relative_resolve(fn.sphere, fn.images, X, X.N, X.W)
    M = rec.cofiber
    nxt = Resolution(M, None, None, X.N, X.W)
    pi = nxt.homotopy()
    top = X.N - 1
    conn = _connectivity_failure(pi, n + 1, X.N) is None
    hq_a, hq_m = X.aq_dims(), M.aq_dims()
    # H^Q_n(M) = 0 and H^Q_s(M) = H^Q_s(A) for n < s < N
    shift = all(hq_m.get(n, w) == 0 for w in range(X.W + 1))
    for s in range(n + 1, top + 1):
        for w in range(X.W + 1):
            shift &= hq_m.get(s, w) == hq_a.get(s, w)
    return EnvelopeStep(n, fn, rec, nxt, conn, shift)


@dataclass
class SphereVerdict:
    concentrated: bool
    n: int | None
    dim: int
    weights: dict
    matches: bool | None
    detail: str


def recognize_sphere(R) -> SphereVerdict:
    """If H^Q sits in one degree n > 0, compare pi_* with that of S(H^Q_n, n)."""
    X = R.X if isinstance(R, Resolution) else R
    N, W = X.N, X.W
    hq = X.aq_dims(N)
    pi = X.homotopy()
    if any(pi.get(0, w) for w in range(1, W + 1)):
        return SphereVerdict(False, None, 0, {}, None, "not connected")
    degs = sorted({s for (s, w), v in hq.dims.items() if v and s < N})
    if len(degs) != 1 or degs[0] == 0:
        return SphereVerdict(False, None, 0, {}, None,
                             "not concentrated" + (f" (H^Q in degrees {degs})" if degs else " (H^Q vanishes)"))
    n = degs[0]
    wts = hq.by_weight(n)
    flat = [w for w, v in sorted(wts.items()) for _ in range(v)]
    S = AlmostFreeAlgebra(X.p, N, W)
    for i, w in enumerate(flat):
        S.add_generator(f"v{i}", n, w)
    spi = S.homotopy()
    diff = [(s, w) for s in range(N) for w in range(W + 1) if pi.get(s, w) != spi.get(s, w)]
    if diff:
        return SphereVerdict(True, n, len(flat), wts, False, f"pi differs at (degree, weight) {diff[0]}")
    return SphereVerdict(True, n, len(flat), wts, True,
                         f"pi_* agrees with S(H^Q_{n}, {n}) for degree < {N}, weight <= {W}")
