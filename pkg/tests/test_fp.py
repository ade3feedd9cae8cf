import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from aqengine.fp import (
    FpMatrix,
    NoSolution,
    extend_basis,
    inverse_mod,
    is_prime,
    kernel_basis,
    quotient_basis,
    rank,
    rref,
    solve,
)

PRIMES = [2, 3, 5, 7, 65521]


@st.composite
def matrices(draw, max_dim=7):
    p = draw(st.sampled_from(PRIMES))
    r = draw(st.integers(0, max_dim))
    c = draw(st.integers(0, max_dim))
    vals = draw(st.lists(st.integers(0, p - 1), min_size=r * c, max_size=r * c))
    return FpMatrix(np.array(vals, dtype=np.int64).reshape(r, c), p)


def _generic_rref(a, p):
    R = a.copy()
    rows, cols = R.shape
    piv, r = [], 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        R[[r, k]] = R[[k, r]]
        R[r] = R[r] * inverse_mod(int(R[r, c]), p) % p
        col = R[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        R[hit] = (R[hit] - np.outer(col[hit], R[r])) % p
        piv.append(c)
        r += 1
    return R[:r], piv


def test_primes():
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]
    with pytest.raises(ValueError):
        FpMatrix.zeros(2, 2, 4)


def test_inverse():
    for p in (3, 7, 65521):
        for a in (1, 2, p - 1):
            assert a * inverse_mod(a, p) % p == 1


@given(matrices())
def test_rank_nullity(M):
    assert rank(M) + len(kernel_basis(M)) == M.cols


@given(matrices())
def test_kernel_vectors_are_killed(M):
    for v in kernel_basis(M):
        assert not ((M.a @ v) % M.p).any()


@given(matrices())
def test_rref_is_idempotent(M):
    R, piv = rref(M)
    R2, piv2 = rref(FpMatrix(R, M.p))
    assert piv == piv2
    assert (R == R2).all()


@settings(max_examples=60)
@given(st.integers(1, 40), st.integers(1, 40), st.floats(0.05, 0.9), st.integers(0, 2 ** 31))
def test_packed_gf2_matches_generic(r, c, dens, seed):
    a = (np.random.default_rng(seed).random((r, c)) < dens).astype(np.int64)
    R1, p1 = rref(FpMatrix(a, 2))
    R2, p2 = _generic_rref(a, 2)
    assert p1 == p2
    assert (R1 == R2).all()


@given(matrices())
def test_solve_roundtrip(M):
    x0 = np.arange(M.cols, dtype=np.int64) % M.p
    b = (M.a @ x0) % M.p
    x = solve(M, b)
    assert ((M.a @ x - b) % M.p == 0).all()


def test_solve_rejects():
    M = FpMatrix(np.array([[1, 0], [0, 0]]), 5)
    with pytest.raises(NoSolution):
        solve(M, [0, 1])


@given(matrices())
def test_quotient_kernel_is_span(M):
    sub = [M.a[:, j] for j in range(M.cols)]
    P, kept = quotient_basis(sub, M.rows, M.p)
    assert P.rows == M.rows - rank(M)
    for v in sub:
        assert not ((P.a @ v) % M.p).any()
    # kept coordinates map to unit vectors
    for i, j in enumerate(kept):
        e = np.zeros(M.rows, dtype=np.int64)
        e[j] = 1
        assert list((P.a @ e) % M.p) == [int(k == i) for k in range(P.rows)]


def test_extend_basis():
    span = [np.array([1, 0, 0])]
    cands = [np.array([2, 0, 0]), np.array([0, 1, 0]), np.array([1, 1, 0])]
    assert extend_basis(span, cands, 3, 3) == [1]


def test_matrix_ops():
    A = FpMatrix(np.array([[1, 2], [3, 4]]), 5)
    I = FpMatrix.identity(2, 5)
    assert A @ I == A
    assert (A - A).is_zero()
    assert (A + A) == FpMatrix(np.array([[2, 4], [1, 3]]), 5)
