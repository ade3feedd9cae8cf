import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from aqengine.fp import FpMatrix
from aqengine.simplicial import (
    SimplicialIdentityError,
    check_simplicial_identities,
    degeneracy_of_surjection,
    eilenberg_maclane,
    face_of_surjection,
    homotopy_groups,
    normalized_complex,
    surjections,
)
from math import comb


@given(st.integers(0, 7), st.integers(0, 7))
def test_surjection_count(m, k):
    assert len(surjections(m, k)) == (comb(m, k) if k <= m else 0)


@settings(max_examples=50)
@given(st.integers(1, 6), st.data())
def test_face_factorization(m, data):
    k = data.draw(st.integers(0, m))
    sig = data.draw(st.sampled_from(surjections(m, k)))
    i = data.draw(st.integers(0, m))
    j, eps = face_of_surjection(sig, i)
    comp = sig[:i] + sig[i + 1:]
    if j is None:
        assert eps == comp
    else:
        # sigma . delta_i = delta_j . eps
        assert tuple(v + (v >= j) for v in eps) == comp
        assert sorted(set(eps)) == list(range(k))


def test_degeneracy_repeats():
    assert degeneracy_of_surjection((0, 1, 1), 0) == (0, 0, 1, 1)


@pytest.mark.parametrize("q,n,N,p", [(1, 1, 4, 2), (2, 2, 5, 2), (1, 3, 6, 3), (1, 0, 3, 5)])
def test_em_space_homotopy(q, n, N, p):
    V = eilenberg_maclane(q, None, n, N, p)
    V.validate()
    pi = homotopy_groups(normalized_complex(V))
    for s in range(N):
        assert pi.degree(s) == (q if s == n else 0)


def test_corrupted_face_is_caught():
    V = eilenberg_maclane(1, None, 1, 3, 2)
    a = np.array(V.faces[(2, 0)].a)
    a[0, 0] ^= 1
    V.faces[(2, 0)] = FpMatrix(a, 2)
    with pytest.raises(SimplicialIdentityError):
        check_simplicial_identities(V)


def test_uncertain_top_degree_flagged():
    V = eilenberg_maclane(1, None, 2, 4, 2)
    pi = homotopy_groups(normalized_complex(V))
    assert pi.top_uncertain == (4,)
    assert 4 not in pi.certified_degrees()


def test_reps_are_cycles():
    V = eilenberg_maclane(2, [1, 2], 2, 4, 3)
    C = normalized_complex(V)
    pi = homotopy_groups(C, with_reps=True)
    for (s, w), reps in pi.reps.items():
        for v in reps:
            if s >= 1:
                assert not ((C.boundary[s].a @ v) % 3).any()
    assert pi.by_weight(2) == {1: 1, 2: 1}
