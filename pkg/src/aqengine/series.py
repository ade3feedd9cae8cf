"""Exact truncated Poincare series and the Eilenberg-MacLane product formula.

theta(A, t) = sum_n dim pi_n(A) t^n.  For S(V, n) with dim V = q the series is
the mod-p homology Poincare series of K(Z^q, n), which Cartan and Serre give as
a free graded-commutative algebra on operations applied to the fundamental
class.  Here words are parametrized by their "gaps", which makes the excess
condition a bound on a sum and keeps enumeration finite:

  p = 2:   I = (i_1, ..., i_k), a_j = i_j - 2 i_{j+1} >= 0, a_k = i_k >= 2,
           excess e(I) = sum a_j, degree |I| = sum a_j (2^j - 1).
  p odd:   I = (e_0, s_1, e_1, ..., s_k, e_k), e_k = 0, s_k >= 1,
           a_j = s_j - p s_{j+1} - e_j >= 0,
           excess e(I) = e_0 + sum_j (2 a_j + e_j),
           degree |I| = sum 2 (p-1) s_j + sum e_j.

A word contributes a generator of degree n + |I| when e(I) < n (or, for odd
p, e(I) = n with a leading Bockstein).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product as iproduct

from .simplicial import GradedDims

__all__ = [
    "TruncatedIntegerSeries",
    "AdmissibleWord",
    "admissible_words",
    "em_generator_degrees",
    "theta",
    "cartan_theta",
    "sphere_theta_from_chains",
    "phi",
    "PhiResult",
    "asymptotic_check",
    "AsymptoticReport",
    "serre_inequality_check",
    "SerreReport",
    "SerreViolation",
    "bigraded_product",
]


class SerreViolation(AssertionError):
    """theta(B) <= theta(A) theta(C) failed: an engine defect, never tolerated."""


@dataclass(frozen=True)
class TruncatedIntegerSeries:
    """c_0 + c_1 t + ... + c_T t^T with exact integer coefficients."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        if not self.coeffs:
            raise ValueError("series needs at least c_0")

    @property
    def T(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def one(cls, T: int) -> "TruncatedIntegerSeries":
        return cls((1,) + (0,) * T)

    @classmethod
    def geometric(cls, d: int, T: int) -> "TruncatedIntegerSeries":
        """1 / (1 - t^d) truncated at T."""
        return cls(tuple(1 if k % d == 0 else 0 for k in range(T + 1)))

    @classmethod
    def binomial(cls, d: int, T: int) -> "TruncatedIntegerSeries":
        """1 + t^d truncated at T."""
        return cls(tuple(1 if k == 0 or k == d else 0 for k in range(T + 1)))

    def truncate(self, T: int) -> "TruncatedIntegerSeries":
        if T > self.T:
            raise ValueError(f"series only known to order {self.T}")
        return TruncatedIntegerSeries(self.coeffs[: T + 1])

    def __mul__(self, other: "TruncatedIntegerSeries") -> "TruncatedIntegerSeries":
        T = min(self.T, other.T)
        a, b = self.coeffs, other.coeffs
        out = [0] * (T + 1)
        for i in range(T + 1):
            if a[i]:
                for j in range(T + 1 - i):
                    out[i + j] += a[i] * b[j]
        return TruncatedIntegerSeries(tuple(out))

    def __pow__(self, k: int) -> "TruncatedIntegerSeries":
        out = TruncatedIntegerSeries.one(self.T)
        for _ in range(k):
            out = out * self
        return out

    def __le__(self, other: "TruncatedIntegerSeries") -> bool:
        return leq(self, other)

    def evaluate(self, t: float) -> float:
        return sum(c * t ** k for k, c in enumerate(self.coeffs))

    def __str__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if k == 0 else (f"{c if c != 1 else ''}t" + (f"^{k}" if k > 1 else "")))
        return " + ".join(terms) + f" + O(t^{self.T + 1})" if terms else f"O(t^{self.T + 1})"


def mul(f: TruncatedIntegerSeries, g: TruncatedIntegerSeries) -> TruncatedIntegerSeries:
    if f.T != g.T:
        raise ValueError("mul needs a common truncation order")
    return f * g


def leq(f: TruncatedIntegerSeries, g: TruncatedIntegerSeries) -> bool:
    """Coefficientwise a_i <= b_i, over the common order."""
    if f.T != g.T:
        raise ValueError("leq needs a common truncation order")
    return all(a <= b for a, b in zip(f.coeffs, g.coeffs))


# -- admissible words ------------------------------------------------------

@dataclass(frozen=True)
class AdmissibleWord:
    """A Steenrod word in standard form.

    For p = 2, ``entries`` is (i_1, ..., i_k).  For odd p it is
    (e_0, s_1, e_1, ..., s_k, e_k).
    """

    p: int
    entries: tuple

    @property
    def degree(self) -> int:
        if self.p == 2:
            return sum(self.entries)
        eps = self.entries[0::2]
        ss = self.entries[1::2]
        return sum(2 * (self.p - 1) * s for s in ss) + sum(eps)

    @property
    def excess(self) -> int:
        e = self.entries
        if self.p == 2:
            return e[0] - sum(e[1:]) if e else 0
        if not e:
            return 0
        rest = AdmissibleWord(self.p, (0,) + e[2:]).degree if len(e) > 2 else 0
        return 2 * e[1] + e[0] - rest if len(e) > 1 else e[0]

    def is_admissible(self) -> bool:
        e = self.entries
        if self.p == 2:
            return all(e[j] >= 2 * e[j + 1] for j in range(len(e) - 1))
        ss, eps = e[1::2], e[0::2]
        return all(ss[j] >= self.p * ss[j + 1] + eps[j + 1] for j in range(len(ss) - 1))


def _compositions(total_max: int, k: int, last_min: int):
    """Tuples (a_1..a_k), a_j >= 0, a_k >= last_min, sum <= total_max."""
    if k == 0:
        yield ()
        return

    def rec(j, left, acc):
        if j == k - 1:
            for a in range(last_min, left + 1):
                yield tuple(acc + [a])
            return
        for a in range(left + 1):
            yield from rec(j + 1, left - a, acc + [a])

    yield from rec(0, total_max, [])


def admissible_words(p: int, n: int, max_len: int):
    """All words of length <= max_len giving generators of H_*(K(Z, n); F_p), n >= 2."""
    if n < 2:
        raise ValueError("admissible-word description needs n >= 2")
    out = [AdmissibleWord(p, ())]
    if p == 2:
        for k in range(1, max_len + 1):
            for a in _compositions(n - 1, k, 2):
                ent = [0] * k
                acc = 0
                for j in range(k - 1, -1, -1):
                    acc = a[j] + 2 * acc
                    ent[j] = acc
                out.append(AdmissibleWord(2, tuple(ent)))
        return out
    # odd p: excess e_0 + sum(2 a_j + e_j) <= n, with equality only if e_0 = 1
    for k in range(1, max_len + 1):
        for eps in iproduct((0, 1), repeat=k):  # e_0..e_{k-1}; e_k = 0
            base = eps[0] + sum(eps[1:])
            budget = n - base
            if budget < 2:
                continue
            for a in _compositions(budget // 2, k, 1):
                e = base + 2 * sum(a)
                if not (e < n or (e == n and eps[0] == 1)):
                    continue
                ss = [0] * (k + 2)
                for j in range(k, 0, -1):
                    e_j = eps[j] if j < k else 0
                    ss[j] = a[j - 1] + p * ss[j + 1] + e_j
                ent = [eps[0]]
                for j in range(1, k + 1):
                    ent += [ss[j], eps[j] if j < k else 0]
                out.append(AdmissibleWord(p, tuple(ent)))
    return out


def _min_degree_of_length(p: int, n: int, k: int) -> int:
    """Lower bound on n + |I| for words of length k."""
    if k == 0:
        return n
    if p == 2:
        return n + 2 * (2 ** k - 1)
    return n + 2 * (p ** k - 1)


def em_generator_degrees(p: int, n: int, T: int) -> list[int]:
    """Degrees <= T of the free graded-commutative generators for K(Z, n)."""
    k = 0
    while _min_degree_of_length(p, n, k + 1) <= T:
        k += 1
    degs = [n + w.degree for w in admissible_words(p, n, k)]
    return sorted(d for d in degs if d <= T)


def cartan_theta(p: int, q: int, n: int, T: int) -> TruncatedIntegerSeries:
    """theta(S(F_p^q, n)) to order T from the Cartan-Serre generators."""
    if n < 1:
        raise ValueError("cartan_theta needs n >= 1")
    if q < 1:
        raise ValueError("cartan_theta needs q >= 1")
    if n == 1:
        one = TruncatedIntegerSeries.binomial(1, T)
        return one ** q
    s = TruncatedIntegerSeries.one(T)
    for d in em_generator_degrees(p, n, T):
        if p != 2 and d % 2 == 1:
            s = s * TruncatedIntegerSeries.binomial(d, T)
        else:
            s = s * TruncatedIntegerSeries.geometric(d, T)
    return s ** q


# -- theta of computed homotopy --------------------------------------------

def theta(dims: GradedDims, T: int, weight_complete: bool = True) -> TruncatedIntegerSeries:
    """Series of total dimensions; every degree <= T must be certified.

    ``weight_complete`` is the caller's certificate that no class of weight
    above dims.W lives in degree <= T.
    """
    cert = [s for s in dims.certified_degrees()]
    if any(s not in cert for s in range(T + 1)):
        raise ValueError(f"homotopy certified only through degree {max(cert, default=-1)}, need {T}")
    if not weight_complete:
        raise ValueError("weight range not certified sufficient for this order")
    return TruncatedIntegerSeries(tuple(dims.degree(s) for s in range(T + 1)))


def sphere_theta_from_chains(p: int, q: int, n: int, T: int, route: str = "auto",
                             W: int | None = None) -> TruncatedIntegerSeries:
    """theta(S(F^q, n)) from chain computations, weights 1..W (default W = T).

    Weight-w classes of S(V, n) sit in degree >= w, so W = T is sufficient.
    """
    from .functors import sphere_weight_homotopy

    W = T if W is None else W
    total = [0] * (T + 1)
    total[0] = 1
    for w in range(1, W + 1):
        for s, v in enumerate(sphere_weight_homotopy(q, n, w, p, T, route)):
            total[s] += v
    return TruncatedIntegerSeries(tuple(total))


# -- phi -------------------------------------------------------------------

@dataclass
class PhiResult:
    value: float
    T_auto: int
    tail_bound: float
    generators_used: int


def _log_factors(p: int, n: int, x: float, tol: float, max_len: int = 64):
    """Sum of log-factors of the single-class product at t = x, with tail bound.

    Every word of length <= K is included exactly.  Words of length k > K have
    degree >= d_k = min degree, their count is at most C(n + k, k) * 2^(k+1),
    and each contributes at most x^d/(1 - x^d) <= x^{d_k}/(1 - x^{d_k})
    (both -log(1 - y) and log(1 + y) are <= y/(1 - y)).  K grows until the
    summed bound over all k > K falls below tol.
    """
    def bound_from(K):
        tot = 0.0
        for k in range(K + 1, K + 200):
            d = _min_degree_of_length(p, n, k)
            y = x ** d
            term = math.comb(n + k, k) * 2 ** (k + 1) * y / (1 - y)
            tot += term
            if term < 1e-30:
                break
        return tot

    K = 0
    while bound_from(K) >= tol:
        K += 1
        if K > max_len:
            raise ValueError("tail bound unachievable within resource limit")
    total = 0.0
    top = 0
    words = admissible_words(p, n, K)
    for w in words:
        d = n + w.degree
        top = max(top, d)
        y = x ** d
        if p != 2 and d % 2 == 1:
            total += math.log1p(y)
        else:
            total += -math.log1p(-y)
    return total, top, bound_from(K), len(words)


def phi(p: int, q: int, n: int, tau: float, tol: float = 1e-6) -> PhiResult:
    """phi(V, n, tau) = log_p theta(V, n, 1 - p^-tau) with |error| < tol."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    x = 1.0 - p ** (-tau)
    if n == 1:
        return PhiResult(q * math.log(1 + x) / math.log(p), 1, 0.0, 1)
    # error in log_p is (error in ln) * q / ln p
    ln_tol = tol * math.log(p) / q
    s, top, bound, count = _log_factors(p, n, x, ln_tol)
    return PhiResult(q * s / math.log(p), top, q * bound / math.log(p), count)


@dataclass
class AsymptoticReport:
    p: int
    q: int
    n: int
    taus: list
    phis: list
    ratios: list
    tolerance: float
    converged: bool
    increasing: bool


def asymptotic_check(p: int, q: int, n: int, taus, tolerance: float = 0.12) -> AsymptoticReport:
    """Ratio phi(tau) / (q tau^(n-1) / (n-1)!) along increasing tau."""
    if n < 2:
        raise ValueError("asymptotic check needs n >= 2")
    taus = list(taus)
    if any(b <= a for a, b in zip(taus, taus[1:])):
        raise ValueError("tau list must be increasing")
    phis = [phi(p, q, n, t).value for t in taus]
    ratios = [f / (q * t ** (n - 1) / math.factorial(n - 1)) for f, t in zip(phis, taus)]
    inc = all(b > a for a, b in zip(ratios, ratios[1:]))
    return AsymptoticReport(p, q, n, taus, phis, ratios, tolerance,
                            abs(ratios[-1] - 1) < tolerance, inc)


# -- Serre inequality ------------------------------------------------------

def bigraded_product(a: GradedDims, c: GradedDims, S: int, W: int) -> dict:
    """Coefficients of theta(A) theta(C) in (degree <= S, weight <= W)."""
    out: dict = {}
    for (s1, w1), v1 in a.dims.items():
        for (s2, w2), v2 in c.dims.items():
            s, w = s1 + s2, w1 + w2
            if s <= S and w <= W:
                out[(s, w)] = out.get((s, w), 0) + v1 * v2
    return out


@dataclass
class SerreReport:
    T: int
    W: int
    lhs: list
    rhs: list
    holds: bool
    equal: bool
    bigraded_holds: bool
    bigraded_equal: bool
    witness: tuple | None = None


def serre_inequality_check(seq, T: int, W: int | None = None, strict: bool = True) -> SerreReport:
    """theta(B) <= theta(A) theta(C) for a cofibration sequence A -> B -> C.

    ``seq`` provides ``pi_base``, ``pi_total`` and ``pi_cofiber`` (GradedDims).
    The check runs per (degree, weight) block, which is the sharper statement
    because the spectral sequence respects weight.
    """
    A, B, C = seq.pi_base, seq.pi_total, seq.pi_cofiber
    W = min(A.W, B.W, C.W) if W is None else W
    for d in (A, B, C):
        if T > d.N - 1:
            raise ValueError(f"homotopy certified only to degree {d.N - 1}, need {T}")
    rhs2 = bigraded_product(A, C, T, W)
    lhs2 = {k: v for k, v in B.dims.items() if k[0] <= T and k[1] <= W}
    keys = set(rhs2) | set(lhs2)
    bad = sorted(k for k in keys if lhs2.get(k, 0) > rhs2.get(k, 0))
    beq = all(lhs2.get(k, 0) == rhs2.get(k, 0) for k in keys)
    lhs = [sum(v for (s, _), v in lhs2.items() if s == t) for t in range(T + 1)]
    rhs = [sum(v for (s, _), v in rhs2.items() if s == t) for t in range(T + 1)]
    holds = all(a <= b for a, b in zip(lhs, rhs))
    rep = SerreReport(T, W, lhs, rhs, holds, lhs == rhs, not bad, beq, bad[0] if bad else None)
    if strict and not (holds and not bad):
        raise SerreViolation(f"Serre inequality fails at {rep.witness}: {lhs} vs {rhs}")
    return rep
