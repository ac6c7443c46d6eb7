import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qmv.errors import UnsupportedQuiverError
from qmv.oracle import ainfinity_window, count_mesh_points, hom_dim_explicit, interval_rep
from qmv.quiver import Arrow, DimVector, Quiver
from qmv.ring import MotiveClass, gl_motive, LaurentPoly
from qmv.stackmotive import (
    LocalizedDouble,
    aut_class,
    enumerate_interval_multisets,
    hom_dim_interval,
    mesh_rep_class,
    multiset_dimensions,
    r_tau_class,
    stack_class,
)
from qmv.translation import WeightMap, localize, repetition, twisted_double

A1 = Quiver([1])
A2 = Quiver([1, 2], [Arrow("a", 1, 2)])
JORDAN = Quiver([0], [Arrow("a", 0, 0)])
ZA2 = repetition(A2)

za2_vecs = st.dictionaries(
    st.tuples(st.sampled_from([1, 2]), st.integers(-1, 1)), st.integers(0, 2), min_size=1
).filter(lambda d: 0 < sum(d.values()) <= 3).map(DimVector)


def test_hom_examples():
    assert hom_dim_interval((0, 1), (0, 1)) == 1
    assert hom_dim_interval((0, 0), (3, 4)) == 0
    assert hom_dim_interval((0, 1), (1, 1)) == 1
    assert hom_dim_interval((0, 1), (0, 0)) == 0


def test_hom_closed_form_matches_linear_solve():
    window = ainfinity_window(-3, 3)
    intervals = [(p, q) for p in range(-3, 4) for q in range(p, 4)]
    reps = {iv: interval_rep(window, *iv) for iv in intervals}
    for I, J in itertools.product(intervals, repeat=2):
        assert hom_dim_interval(I, J) == hom_dim_explicit(reps[I], reps[J]), (I, J)


def test_interval_multiset_examples():
    assert list(enumerate_interval_multisets({0: 1})) == [(((0, 0), 1),)]
    assert sorted(enumerate_interval_multisets({0: 1, 1: 1})) == [
        (((0, 0), 1), ((1, 1), 1)), (((0, 1), 1),)]
    assert list(enumerate_interval_multisets({0: 2})) == [(((0, 0), 2),)]


def _brute_multisets(column):
    lo, hi = min(column), max(column)
    intervals = [(p, q) for p in range(lo, hi + 1) for q in range(p, hi + 1)]
    cap = max(column.values())
    out = set()
    for mults in itertools.product(range(cap + 1), repeat=len(intervals)):
        ms = tuple((iv, n) for iv, n in zip(intervals, mults) if n)
        if multiset_dimensions(ms) == {m: c for m, c in column.items() if c}:
            out.add(ms)
    return out


@given(st.lists(st.integers(0, 2), min_size=1, max_size=3))
def test_interval_multisets_match_brute_force(entries):
    column = {m: c for m, c in enumerate(entries) if c}
    if not column:
        return
    got = list(enumerate_interval_multisets(column))
    assert len(got) == len(set(got))
    assert set(got) == _brute_multisets(column)


def test_aut_class_examples():
    I = ((0, 0), 1)
    assert aut_class((I,)) == LaurentPoly({1: 1, 0: -1})
    assert aut_class((((0, 0), 2),)) == gl_motive(2)
    lm1 = LaurentPoly({1: 1, 0: -1})
    assert aut_class((((0, 0), 1), ((5, 5), 1))) == lm1 * lm1


@pytest.mark.parametrize("n", [1, 2, 3])
def test_aut_of_direct_sum_is_gl(n):
    assert aut_class((((0, 2), n),)) == gl_motive(n)


def test_r_tau_no_arrows():
    assert r_tau_class(A1, {}, 1, DimVector({(1, 0): 1, (1, 1): 1})).value == LaurentPoly({1: 1})
    assert r_tau_class(A1, {}, 1, DimVector()).value == 1


@given(st.dictionaries(st.integers(-2, 2), st.integers(0, 3), max_size=4), st.sampled_from([1, 2, -1]))
def test_r_tau_point_quiver_power(column, e):
    v = DimVector({(1, n): c for n, c in column.items()})
    expected = sum(c * column.get(n - e, 0) for n, c in column.items())
    assert r_tau_class(A1, {}, e, v).value == LaurentPoly({expected: 1})


def test_mesh_rep_trivial_cases():
    g = LocalizedDouble(A1, None, 1)
    assert mesh_rep_class(g, DimVector({(1, 0): 2, (1, 1): 3})).value == 1
    assert mesh_rep_class(ZA2, DimVector({(1, 0): 2})).value == 1


def test_mesh_rep_za2_matches_count():
    v = DimVector({(1, 0): 1, (2, 0): 1})
    value = mesh_rep_class(ZA2, v).value
    assert value.evaluate(2) == count_mesh_points(ZA2, v, 2)


@given(za2_vecs)
def test_mesh_rep_za2_oracle(v):
    value = mesh_rep_class(ZA2, v).value
    assert value.is_laurent()
    assert value.evaluate(2) == count_mesh_points(ZA2, v, 2)


@pytest.mark.parametrize("v", [
    {(0, 0): 1, (0, 1): 1},
    {(0, 0): 1, (0, 1): 1, (0, 2): 1},
    {(0, 0): 2, (0, 1): 1},
    {(0, 0): 1, (0, 2): 1},
])
def test_mesh_rep_localized_jordan_oracle(v):
    g = twisted_double(JORDAN)
    loc = localize(g, WeightMap(g, 2, cut_value=1))
    v = DimVector(v)
    value = mesh_rep_class(loc, v).value
    for q in (2, 3):
        assert value.evaluate(q) == count_mesh_points(loc, v, q)


def test_stack_examples():
    assert stack_class(ZA2, DimVector({(1, 0): 1})).value == MotiveClass(1, (1,))
    assert stack_class(ZA2, DimVector()).value == 1


def test_stack_factorizes_on_far_apart_support():
    a = DimVector({(1, 0): 1})
    b = DimVector({(2, 5): 1})
    assert stack_class(ZA2, a + b).value == stack_class(ZA2, a).value * stack_class(ZA2, b).value


def test_unsupported_quiver():
    with pytest.raises(UnsupportedQuiverError):
        stack_class(twisted_double(A2), DimVector({1: 1}))
    with pytest.raises(UnsupportedQuiverError):
        LocalizedDouble(A2, None, 0)


def test_negative_total_weight_reflects():
    ld = LocalizedDouble(JORDAN, {"a": -1}, -2)
    v = DimVector({(0, 0): 1, (0, -1): 1})
    value = mesh_rep_class(ld, v).value
    assert value == mesh_rep_class(ld.reflected(), DimVector({(0, 0): 1, (0, 1): 1})).value
    for q in (2, 3):
        assert value.evaluate(q) == count_mesh_points(ld.translation_quiver(), v, q)
