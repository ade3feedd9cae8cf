import pytest
from hypothesis import given, settings, strategies as st

from aqengine.algebra import (
    AlmostFreeAlgebra,
    WeightOverflow,
    evaluate_face,
    indecomposables,
    sphere,
    tensor,
)
from aqengine.functors import functor_homotopy, sphere_weight_homotopy
from aqengine.series import bigraded_product
from aqengine.simplicial import SimplicialIdentityError, homotopy_groups, normalized_complex


def degrees(X, N=None):
    pi = X.homotopy(N=N)
    return [pi.degree(s) for s in range(pi.N)]


@pytest.mark.parametrize("p,n,N,W,expected", [
    (2, 1, 5, 5, [1, 1, 0, 0, 0]),
    (2, 2, 7, 4, [1, 0, 1, 0, 1, 0, 1]),
    (3, 1, 4, 4, [1, 1, 0, 0]),
    (3, 2, 5, 3, [1, 0, 1, 0, 1]),
])
def test_sphere_homotopy(p, n, N, W, expected):
    # n = 1: exterior on a degree-1 class; n = 2: divided powers in even degrees
    X = sphere(1, [1], n, N, W, p)
    assert degrees(X) == expected


def test_two_generator_sphere():
    X = sphere(2, [1, 1], 2, 7, 3, 2)
    assert degrees(X) == [1, 0, 2, 0, 3, 0, 4]


@pytest.mark.parametrize("p", [2, 3])
def test_identities_on_explicit_blocks(p):
    X = sphere(1, [1], 1, 3, 3, p)
    u = X.generators[0]
    X.add_generator("c", 2, 2, {(((u.gid, (0, 1)), 2),): 1})
    for w in range(1, 4):
        X.level_matrices(3, w).validate()


def test_attachment_needs_moore_cycle():
    X = sphere(1, [1], 1, 3, 3, 2)
    u = X.generators[0]
    # u itself at level 1 is a cycle; d_0 of a 2-cell equal to u is fine
    X.add_generator("c", 2, 1, {(((u.gid, (0, 1)), 1),): 1})
    X.check_attachment(X.generators[-1])
    # a degenerate element at level 1 has nonzero faces
    Y = sphere(1, [1], 0, 3, 3, 2)
    Y.add_generator("c", 2, 1, {(((0, (0, 0)), 1),): 1})
    with pytest.raises(SimplicialIdentityError):
        Y.check_attachment(Y.generators[-1])


@settings(max_examples=12, deadline=None)
@given(st.sampled_from([2, 3]), st.integers(0, 2), st.lists(st.integers(1, 2), min_size=1, max_size=2))
def test_aq_dims_matches_indecomposables_route(p, n, weights):
    X = sphere(len(weights), weights, n, n + 2, 4, p)
    fast = X.aq_dims()
    slow = homotopy_groups(normalized_complex(indecomposables(X)))
    for s in range(n + 2):
        assert fast.by_weight(s) == slow.by_weight(s)


def test_tensor_kunneth():
    A = sphere(1, [1], 1, 4, 4, 2, prefix="a")
    B = sphere(1, [1], 2, 4, 4, 2, prefix="b")
    C = tensor(A, B)
    prod = bigraded_product(A.homotopy(), B.homotopy(), 3, 4)
    pc = C.homotopy()
    for s in range(4):
        for w in range(5):
            assert pc.get(s, w) == prod.get((s, w), 0)


def test_weight_overflow():
    X = sphere(1, [3], 1, 2, 4, 2)
    mono = (((0, (0, 1)), 2),)
    with pytest.raises(WeightOverflow):
        evaluate_face(X, 0, 1, {mono: 1})


def test_duplicate_and_bad_generators():
    X = AlmostFreeAlgebra(2, 3, 3)
    X.add_generator("x", 0, 1)
    with pytest.raises(ValueError):
        X.add_generator("x", 0, 1)
    with pytest.raises(ValueError):
        X.add_generator("y", 0, 0)
    with pytest.raises(ValueError):
        X.add_generator("z", 1, 1, {(((0, (0,)), 2),): 1})  # weight 2, not 1


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("w", [1, 2, 3])
def test_decalage_routes_agree_with_engine(p, n, w):
    smax = 6
    X = sphere(1, [1], n, smax + 1, w, p)
    pi = X.homotopy()
    direct = tuple(pi.get(s, w) for s in range(smax + 1))
    assert sphere_weight_homotopy(1, n, w, p, smax, "sym") == direct
    assert sphere_weight_homotopy(1, n, w, p, smax, "ext") == direct
    if n >= 2:
        assert sphere_weight_homotopy(1, n, w, p, smax, "gamma") == direct


def test_functor_unknown():
    with pytest.raises(ValueError):
        functor_homotopy("tensor", 1, 1, 1, 2, 3)
