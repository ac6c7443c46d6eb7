import pytest
from hypothesis import given
from hypothesis import strategies as st

from qmv.errors import InvalidCutError, InvalidWeightError, NoCutError, NonBijectiveError, ValidationError
from qmv.oracle import count_points
from qmv.quiver import Arrow, DimVector, Quiver, StabilityParam, slope
from qmv.translation import (
    FRAME,
    Localization,
    PathSum,
    Potential,
    TranslationQuiver,
    WeightMap,
    change_cut_sign,
    cyclic_derivative,
    ell_arrow,
    frame,
    jacobian_potential,
    localize,
    mesh_relation,
    pullback_theta,
    pushforward_dim,
    repetition,
    stabilize_framed,
    twisted_double,
)

A1 = Quiver([1])
A2 = Quiver([1, 2], [Arrow("a", 1, 2)])
A3 = Quiver([1, 2, 3], [Arrow("a", 1, 2), Arrow("b", 3, 2)])
JORDAN = Quiver([0], [Arrow("a", 0, 0)])


def xy_quiver():
    return TranslationQuiver(Quiver(["x", "y"]), {"x": "y", "y": "x"}, {}, cut=set())


def assert_translation_axioms(gamma, arrows):
    for a in arrows:
        b = gamma.sigma(a)
        if b is None:
            continue
        assert b.target == a.source
        assert b.source == gamma.tau(a.target)
        assert gamma.sigma_inv(b) == a


def test_double_of_a2():
    g = twisted_double(A2)
    assert {(a.id, a.source, a.target) for a in g.arrows} == {("a", 1, 2), ("a*", 2, 1)}
    assert g.cut == {"a"}
    assert_translation_axioms(g, g.arrows)


def test_double_without_arrows():
    g = twisted_double(A1)
    assert not g.arrows and g.cut == frozenset()


def test_repetition_window():
    zq = repetition(A2)
    w = zq.materialize(zq.window(0, 1))
    ids = {a.id for a in w.arrows}
    assert {("a", 0), ("a", 1), ("a*", 1)} <= ids
    assert zq.arrow(("a*", 1)) == Arrow(("a*", 1), (2, 0), (1, 1))
    # sigma(a*_n) = a_{n-1}, so tau(a_n) = a_{n-1}
    assert zq.sigma(zq.arrow(("a*", 1))).id == ("a", 0)
    assert zq.sigma(zq.sigma(zq.arrow(("a", 1)))).id == ("a", 0)


def test_repetition_of_point_has_no_arrows():
    zq = repetition(A1)
    assert not zq.materialize(zq.window(-3, 3)).arrows


@pytest.mark.parametrize("Q", [A2, A3, JORDAN])
def test_repetition_is_localized_double(Q):
    g = twisted_double(Q)
    loc = localize(g, WeightMap(g, 1, cut_value=0))
    zq = repetition(Q)
    verts = [(i, n) for i in Q.vertices for n in range(-3, 4)]
    left = loc.materialize(verts)
    right = zq.materialize(verts)
    # arrow (b, n) of the localization is b_n in ZQ for both plain and starred names
    rename = {(a.id[0], a.id[1]): a.id for a in right.arrows}
    assert {(a.source, a.target) for a in left.arrows} == {(a.source, a.target) for a in right.arrows}
    for a in left.arrows:
        assert rename[a.id] == a.id
        assert left.in_cut(a) == right.in_cut(right.arrow(a.id))
    assert_translation_axioms(loc, left.arrows)


def test_localization_rejects_bad_weights():
    g = twisted_double(A2)
    with pytest.raises(InvalidWeightError):
        WeightMap(g, 2, weights={"a": 1, "a*": 0})


def test_iterated_localization_total_weight():
    g = twisted_double(JORDAN)
    loc = localize(g, WeightMap(g, 3, cut_value=1))
    lifted = WeightMap(loc, 3, lift_of=loc.weights)
    loc2 = Localization(loc, lifted)
    for a in loc.arrows_in((0, 0)):
        assert lifted(a) + lifted(loc.sigma(a)) == 3
    assert loc2.e == 3
    assert_translation_axioms(loc2, loc2.arrows_in(((0, 0), 0)))


def test_localization_tau():
    g = twisted_double(JORDAN)
    loc = localize(g, WeightMap(g, 3, cut_value=1))
    assert loc.tau((0, 5)) == (0, 2)
    assert_translation_axioms(loc, loc.arrows_in((0, 0)))


def test_frame_zero_is_isolated_vertex():
    g = twisted_double(A2)
    f = frame(g, {})
    assert FRAME in f.vertices
    assert not f.arrows_in(FRAME) and not f.arrows_out(FRAME)


def test_frame_xy():
    f = frame(xy_quiver(), {"y": 1})
    arrows = {(a.source, a.target) for a in f.arrows}
    assert arrows == {("x", FRAME), (FRAME, "y")}
    a = next(a for a in f.arrows if a.source == FRAME)
    assert f.sigma(a).source == "x"
    assert f.tau(FRAME) is None


def test_stabilize_xy_alternates():
    s = stabilize_framed(xy_quiver(), {"y": 1})
    verts = ["x", "y"] + [(FRAME, n) for n in range(-4, 5)]
    window = s.materialize(verts)
    for n in range(-4, 5):
        out = [a for a in window.arrows if a.source == (FRAME, n)]
        assert len(out) == 1
        assert out[0].target == ("y" if n % 2 == 0 else "x")
    assert_translation_axioms(s, window.arrows)


def test_stabilize_restricts_to_frame():
    base = xy_quiver()
    s = stabilize_framed(base, {"y": 1})
    window = s.materialize(["x", "y", (FRAME, 0)])
    f = frame(base, {"y": 1})
    rename = lambda v: FRAME if v == (FRAME, 0) else v
    assert {(rename(a.source), rename(a.target)) for a in window.arrows} == {
        (a.source, a.target) for a in f.arrows
    }


def test_stabilize_without_framing():
    s = stabilize_framed(twisted_double(A2), {})
    window = s.materialize([1, 2, (FRAME, 0), (FRAME, 1)])
    assert all(FRAME not in (a.source[0] if isinstance(a.source, tuple) else a.source,) for a in window.arrows)
    assert len(window.arrows) == 2


def test_mesh_relation_no_arrows():
    g = twisted_double(A1)
    assert all(not rel for _, rel in mesh_relation(g))


def test_mesh_relation_jordan():
    g = twisted_double(JORDAN)
    [(pair, rel)] = mesh_relation(g)
    assert pair == (0, 0)
    assert rel == PathSum([(1, ("a", "a*")), (-1, ("a*", "a"))])


def test_mesh_relation_bipartite_signs():
    zq = repetition(A3)
    w = zq.materialize(zq.window(0, 1))
    for (j, _), rel in mesh_relation(w):
        if j[0] == 2:  # sink of the cut
            assert all(c == 1 for c, _ in rel.items())


def test_mesh_relation_needs_cut():
    g = TranslationQuiver(Quiver(["x"]), {"x": "x"}, {})
    with pytest.raises(NoCutError):
        mesh_relation(g)


def test_cyclic_derivative_examples():
    W = Potential([(1, ("l", "a", "a*"))])
    assert cyclic_derivative(W, "l") == PathSum([(1, ("a", "a*"))])
    assert cyclic_derivative(W, "zzz") == PathSum()


def test_potential_rotation_invariance():
    assert Potential([(1, ("a", "b", "c"))]) == Potential([(1, ("b", "c", "a"))])


@pytest.mark.parametrize("Q", [A2, JORDAN, A3])
def test_potential_derivative_is_mesh_relation(Q):
    g = twisted_double(Q)
    _, W = jacobian_potential(g)
    mesh = dict(mesh_relation(g))
    for j in g.vertices:
        assert cyclic_derivative(W, ell_arrow(j)) == mesh[(j, g.tau(j))]


def test_change_cut_identity_and_swap():
    g = twisted_double(JORDAN)
    assert change_cut_sign(g, {"a"}) == {"a": 1, "a*": 1}
    eta = change_cut_sign(g, {"a*"})
    for a in g.arrows:
        b = g.sigma(a)
        eps = 1 if a.id == "a" else -1
        eps_new = 1 if a.id == "a*" else -1
        assert eta[a.id] * eta[b.id] == eps * eps_new
    with pytest.raises(InvalidCutError):
        change_cut_sign(g, {"a", "a*"})


@pytest.mark.parametrize("dims", [{1: 1, 2: 1}, {1: 2, 2: 1}, {1: 1, 2: 2}])
def test_mesh_solutions_independent_of_cut(dims):
    g = twisted_double(A2)
    other = g.with_cut({"a*"})
    rel_a = [rel for _, rel in mesh_relation(g)]
    rel_b = [rel for _, rel in mesh_relation(other)]
    for q in (2, 3):
        assert count_points(g.quiver, rel_a, DimVector(dims), q) == count_points(
            g.quiver, rel_b, DimVector(dims), q)


def test_translation_quiver_validation():
    Q = Quiver(["x", "y"], [Arrow("p", "x", "y")])
    with pytest.raises(NonBijectiveError):
        TranslationQuiver(Q, {"x": "x", "y": "x"}, {})
    with pytest.raises((NonBijectiveError, ValidationError)):
        TranslationQuiver(Q, {"x": "x", "y": "y"}, {})


fiber_vecs = st.dictionaries(st.tuples(st.sampled_from([1, 2]), st.integers(-3, 3)),
                             st.integers(0, 3), min_size=1).map(DimVector)


@given(fiber_vecs, st.integers(-5, 5))
def test_pushforward_shift_and_slope(vt, shift):
    if vt.is_zero():
        return
    moved = vt.relabel(lambda x: (x[0], x[1] + shift))
    assert pushforward_dim(moved) == pushforward_dim(vt)
    theta = StabilityParam({1: 3, 2: -1})
    assert slope(theta, pushforward_dim(vt)) == slope(pullback_theta(theta), vt)


def test_pushforward_single_point():
    assert pushforward_dim(DimVector({(2, 7): 1})) == DimVector({2: 1})
