import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qmv.errors import CapExceededError, ValidationError
from qmv.oracle import (
    ExplicitRep,
    ainfinity_window,
    count_gl,
    count_mesh_points,
    count_points,
    count_quotients,
    hom_dim_explicit,
    interval_rep,
    random_rep,
    rank,
)
from qmv.quiver import Arrow, DimVector, Quiver
from qmv.ring import gl_motive, grassmannian_motive
from qmv.translation import PathSum, repetition

LOOP = Quiver([0], [Arrow("x", 0, 0)])
A2 = Quiver([1, 2], [Arrow("a", 1, 2)])

matrices = st.integers(1, 4).flatmap(
    lambda c: st.lists(st.lists(st.integers(-3, 3), min_size=c, max_size=c), min_size=1, max_size=4))


def test_count_without_arrows():
    assert count_points(Quiver([1, 2]), [], DimVector({1: 2, 2: 1}), 2) == 1


def test_count_loop():
    assert count_points(LOOP, [], DimVector({0: 1}), 3) == 3


def test_commuting_variety_count():
    # pairs of commuting 1x1 matrices: q^2; x*x = 0 for 2x2 over F_2: nilpotent matrices, q^2 of them
    two = Quiver([0], [Arrow("x", 0, 0), Arrow("y", 0, 0)])
    rel = PathSum([(1, ("x", "y")), (-1, ("y", "x"))])
    assert count_points(two, [rel], DimVector({0: 1}), 3) == 9
    nil = PathSum([(1, ("x", "x"))])
    assert count_points(LOOP, [nil], DimVector({0: 2}), 2) == 4


def test_cap():
    with pytest.raises(CapExceededError):
        count_points(LOOP, [], DimVector({0: 4}), 3)


def test_unknown_vertex():
    with pytest.raises(ValidationError):
        count_points(LOOP, [], DimVector({5: 1}), 2)


def test_gl_counts_match_motive():
    for n in range(3):
        for q in (2, 3):
            assert count_gl(n, q) == gl_motive(n).evaluate(q)


@pytest.mark.parametrize("n,r", [(2, 1), (3, 1), (3, 2), (2, 2), (1, 2)])
def test_quotients_match_grassmannian(n, r):
    assert count_quotients(n, r, 2) == grassmannian_motive(n, r).evaluate(2)


def test_hom_simple_and_disjoint():
    S1 = ExplicitRep(A2, {1: 1}, {})
    S2 = ExplicitRep(A2, {2: 1}, {})
    assert hom_dim_explicit(S1, S1) == 1
    assert hom_dim_explicit(S1, S2) == 0


def test_shape_check():
    with pytest.raises(ValidationError):
        ExplicitRep(A2, {1: 1, 2: 1}, {"a": [[1, 1]]})


@given(st.dictionaries(st.sampled_from([1, 2]), st.integers(0, 2)), st.integers(0, 10**6))
def test_endomorphisms_nonzero(dims, seed):
    if not any(dims.values()):
        return
    M = random_rep(A2, dims, random.Random(seed))
    assert hom_dim_explicit(M, M) >= 1


@given(matrices)
def test_rank_transpose(rows):
    cols = [list(c) for c in zip(*rows)]
    r = rank(rows)
    assert r == rank(cols)
    assert r <= min(len(rows), len(rows[0]))


def test_interval_reps():
    window = ainfinity_window(-1, 1)
    M = interval_rep(window, -1, 1)
    assert M.dimension_vector == DimVector({-1: 1, 0: 1, 1: 1})
    assert hom_dim_explicit(M, M) == 1


def test_mesh_count_za2():
    zq = repetition(A2)
    assert count_mesh_points(zq, DimVector({(1, 0): 1, (2, 0): 1}), 3) == 3
