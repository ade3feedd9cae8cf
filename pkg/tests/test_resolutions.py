import pytest
from hypothesis import given, settings, strategies as st

from aqengine.algebra import AlmostFreeAlgebra, sphere, tensor
from aqengine.cli import parse_presentation
from aqengine.oracles import tor_poly
from aqengine.presentation import Presentation
from aqengine.resolutions import (
    InvariantViolation,
    RangeError,
    Resolution,
    aq_homology,
    build_fn,
    cofiber_by_deletion,
    les_exactness,
    postnikov_envelope,
    recognize_sphere,
    relative_resolve,
    resolve,
    suspension,
    verify_resolution,
)
from aqengine.series import bigraded_product

X2 = "p=2; vars: x:1; rels: x^2"
M2 = "p=2; vars: x:1, y:1; rels: x^2, x*y, y^2"


def P(text):
    return parse_presentation(text)


def gens(X):
    return sorted((g.degree, g.weight) for g in X.generators)


def certified(pi):
    ok = set(pi.certified_degrees())
    return {k: v for k, v in pi.dims.items() if v and k[0] in ok}


def pi_list(X):
    pi = X.homotopy()
    return [pi.degree(s) for s in range(pi.N)]


# -- resolve ---------------------------------------------------------------

def test_resolve_field():
    R = resolve(Presentation(2, [], []), 3, 4)
    assert R.X.generators == []
    assert aq_homology(R).dims == {}


def test_resolve_x2():
    R = resolve(P(X2), 3, 6)
    assert gens(R.X) == [(0, 1), (1, 2)]
    (r,) = R.X.generators_in_degree(1)
    assert r.d0_poly() == {(((0, (0,)), 2),): 1}
    pi = R.homotopy()
    assert all(pi.get(s, w) == 0 for s in (1, 2) for w in range(7))


def test_resolve_m2_generators():
    R = resolve(P(M2), 2, 4)
    assert [(d, w) for d, w in gens(R.X) if d == 1] == [(1, 2)] * 3
    assert [(d, w) for d, w in gens(R.X) if d == 2] == [(2, 3)] * 2


def test_aq_examples():
    hq = aq_homology(resolve(P(X2), 3, 8))
    assert hq.by_weight(0) == {1: 1} and hq.by_weight(1) == {2: 1} and hq.by_weight(2) == {}
    hq = aq_homology(resolve(P(M2), 3, 5))
    assert hq.degree(0) == 2 and hq.degree(1) == 3 and hq.by_weight(2).get(3, 0) > 0


def test_resolve_discrete_sphere():
    # S(V, 0) is a polynomial ring; H^Q is V in degree 0 only
    hq = aq_homology(resolve(P("p=3; vars: a:1, b:2"), 4, 6))
    assert hq.dims == {(0, 1): 1, (0, 2): 1}


def test_resolve_range_errors():
    with pytest.raises(RangeError):
        resolve(P(X2), 0, 4)
    with pytest.raises(RangeError):
        resolve(P("p=2; vars: x:1; rels: x^5"), 3, 4)


def test_verify_detects_broken_resolution():
    R = resolve(P(X2), 3, 4)
    verify_resolution(R)
    (r,) = R.X.generators_in_degree(1)
    broken = Resolution(cofiber_by_deletion(R.X, [r.gid]), R.target, R.aug, 3, 4)
    with pytest.raises(InvariantViolation):
        verify_resolution(broken)


rel_pool = ["x^2", "x*y", "y^2", "x^3 + y^3", "x^2*y"]


@settings(max_examples=10, deadline=None)
@given(st.permutations(rel_pool[:3]), st.booleans())
def test_permutation_invariance(rels, swap):
    names = ["y", "x"] if swap else ["x", "y"]
    text = f"p=2; vars: {names[0]}:1, {names[1]}:1; rels: " + ", ".join(rels)
    a = aq_homology(resolve(P(text), 3, 5)).dims
    b = aq_homology(resolve(P(M2), 3, 5)).dims
    assert a == b


# -- relative resolve and cofibers -----------------------------------------

def test_relative_over_empty_base():
    base = AlmostFreeAlgebra(2, 3, 4)
    rec = relative_resolve(base, {}, P(X2), 3, 4)
    assert gens(rec.cofiber) == gens(rec.total) == gens(resolve(P(X2), 3, 4).X)


def test_relative_over_discrete_sphere():
    rec = relative_resolve(sphere(1, [1], 0, 3, 6, 2, prefix="x"), {"x0": {(1,): 1}}, P(X2))
    assert rec.pi_cofiber.dims == {(0, 0): 1, (1, 2): 1}
    assert les_exactness(rec).holds


def test_relative_identity_has_trivial_cofiber():
    R = resolve(P(X2), 3, 4)
    rec = relative_resolve(R.X, {"x": {(1,): 1}}, P(X2))
    assert rec.pi_cofiber.dims == {(0, 0): 1}


@pytest.mark.parametrize("text,weights", [
    (X2, [1]),
    (M2, [1, 1]),
    ("p=3; vars: x:1, y:1; rels: x^2, y^3", [1, 1]),
    ("p=2; vars: x:1, y:2; rels: x^4 + y^2", [1, 2]),
])
def test_cofiber_matches_tor_oracle(text, weights):
    A = P(text)
    base = sphere(len(weights), weights, 0, 3, 6, A.p, prefix="t")
    f = {f"t{i}": A.var_poly(i) for i in range(len(weights))}
    rec = relative_resolve(base, f, A)
    tor = tor_poly(weights, A, 2, 6)
    for s in range(3):
        assert rec.pi_cofiber.by_weight(s) == tor.by_weight(s)


def test_relative_rejects_bad_map():
    base = sphere(1, [1], 0, 3, 4, 2, prefix="t")
    with pytest.raises(ValueError):
        relative_resolve(base, {}, P(X2))


# -- suspension ------------------------------------------------------------

def test_suspension_examples():
    R, rec = suspension(Presentation(2, [], []), 3, 4)
    assert R.homotopy().dims == {(0, 0): 1}
    R, rec = suspension(P("p=2; vars: x:1"), 4, 4)
    assert pi_list(R.X) == [1, 1, 0, 0]


@pytest.mark.parametrize("text", [X2, "p=2; vars: x:1", "p=3; vars: x:1; rels: x^3", "p=2; vars: x:1, y:1; rels: x^2, y^2"])
def test_suspension_cone_equals_kill(text):
    _, a = suspension(P(text), 3, 4, method="cone")
    _, b = suspension(P(text), 3, 4, method="kill")
    assert a.pi_cofiber.dims == b.pi_cofiber.dims
    assert les_exactness(a).holds and les_exactness(b).holds


def test_suspension_shifts_hq():
    A = resolve(P(X2), 4, 6)
    R, rec = suspension(A)
    hA, hS = A.X.aq_dims(), R.X.aq_dims()
    for s in range(1, 3):
        assert hS.by_weight(s) == hA.by_weight(s - 1)
    assert hS.by_weight(0) == {}


# -- f_n, envelope, recognition ---------------------------------------------

def test_f0_hits_variables():
    fn = build_fn(resolve(P(X2), 3, 6), 0)
    assert fn.images == {"u0": {(((0, (0,)), 1),): 1}}


def test_envelope_x2():
    R = resolve(P(X2), 4, 6)
    st0 = postnikov_envelope(R, 0)
    assert st0.connectivity_ok and st0.hq_shift_ok
    A1 = st0.next
    assert pi_list(A1.X) == [1, 1, 0, 0]
    v = recognize_sphere(A1)
    assert (v.concentrated, v.n, v.dim, v.matches) == (True, 1, 1, True)
    fn = build_fn(A1, 1)
    assert fn.hurewicz_rank == fn.hq_dim == 1
    assert [g.weight for g in fn.sphere.generators] == [2]
    for rec in (st0.record,):
        assert les_exactness(rec).holds


def test_total_model_has_same_homotopy():
    R = resolve(P(X2), 3, 4)
    rec = postnikov_envelope(R, 0).record
    assert certified(rec.total.homotopy()) == certified(rec.total_model.homotopy())


def test_envelope_polynomial_is_trivial():
    st0 = postnikov_envelope(resolve(P("p=2; vars: x:1"), 3, 5), 0)
    assert certified(st0.next.homotopy()) == {(0, 0): 1}


def test_envelope_m2_not_concentrated():
    st0 = postnikov_envelope(resolve(P(M2), 4, 5), 0)
    v = recognize_sphere(st0.next)
    assert not v.concentrated and v.detail.startswith("not concentrated")


def test_recognize_sphere_data():
    v = recognize_sphere(sphere(2, [1, 2], 2, 5, 4, 3))
    assert (v.n, v.dim, v.matches) == (2, 2, True)
    assert recognize_sphere(sphere(1, [1], 0, 3, 3, 2)).detail == "not connected"


def test_build_fn_rejects_unconnected():
    with pytest.raises(RangeError):
        build_fn(resolve(P(X2), 4, 6), 1)


def test_build_fn_zero_hq():
    fn = build_fn(sphere(1, [1], 2, 4, 4, 2), 1)
    assert fn.sphere.generators == [] and fn.hq_dim == 0


# -- simple 2-extensions split on series -------------------------------------

@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("d0", ["prod", "mixed"])
def test_simple_two_extension_series_splits(p, d0):
    N, W = 5, 4
    X = sphere(2, [1, 1], 1, N, W, p)
    u1, u2 = ((0, (0, 1)), 1), ((1, (0, 1)), 1)
    z = {(u1, u2): 1} if d0 == "prod" else {(u1, u2): 1, (((0, (0, 1)), 2),): p - 1}
    X.add_generator("v", 2, 2, z)
    X.check_attachment(X.generators[-1])
    hq = X.aq_dims()
    assert hq.dims == {(1, 1): 2, (2, 2): 1}
    low = sphere(2, [1, 1], 1, N, W, p)
    high = sphere(1, [2], 2, N, W, p, prefix="v")
    prod = bigraded_product(low.homotopy(), high.homotopy(), N - 1, W)
    pi = X.homotopy()
    assert {k: v for k, v in pi.dims.items() if v and k[0] < N} == {k: v for k, v in prod.items() if v}
    assert tensor(low, high).homotopy().dims == pi.dims
