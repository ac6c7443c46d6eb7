"""Acceptance suite: one PASS/FAIL line per criterion.

Runs under pytest (lines are printed past output capture) or directly:
``python3 tests/test_acceptance.py``.
"""

import itertools
import json
import sys
import time
from pathlib import Path

import pytest

from qmv.cli import Problem
from qmv.nakajima import (
    dim_framed,
    fermionic_class,
    fermionic_nilpotent_class,
    framed_class_bb,
    framed_class_recursion,
    nilpotent_class_bb,
)
from qmv.oracle import ainfinity_window, count_mesh_points, hom_dim_explicit, interval_rep
from qmv.quiver import Arrow, DimVector, Quiver, StabilityParam
from qmv.ring import LaurentPoly, MotiveClass, gl_motive, grassmannian_motive
from qmv.stackmotive import aut_class, hom_dim_interval, mesh_rep_class, stack_class
from qmv.translation import (
    cyclic_derivative,
    ell_arrow,
    jacobian_potential,
    mesh_relation,
    pullback_theta,
    repetition,
    twisted_double,
)
from qmv.wallcross import WallCrossing, forward_stack_class

GOLDEN_MESH = Path(__file__).parent / "data" / "golden" / "mesh.json"

JORDAN = twisted_double(Quiver([0], [Arrow("a", 0, 0)]))
A1 = twisted_double(Quiver([1]))
A2 = Quiver([1, 2], [Arrow("a", 1, 2)])


def partition_cells(n):
    """Independent count: one cell L^(n + parts) per partition of n."""
    out = {}
    for parts in itertools.product(range(n + 1), repeat=n):
        if sum(parts) == n and all(a >= b for a, b in zip(parts, parts[1:])):
            k = n + sum(1 for p in parts if p)
            out[k] = out.get(k, 0) + 1
    return LaurentPoly(out)


def criterion_1():
    w = DimVector({0: 1})
    for n in range(1, 5):
        v = DimVector({0: n})
        expected = partition_cells(n)
        fer = fermionic_class(JORDAN, v, w).value
        bb = framed_class_bb(JORDAN, v, w).value
        if not (fer == expected == bb):
            return False, f"n={n}: fermionic {fer}, bb {bb}, cells {expected}"
    return True, "Jordan w=1, n <= 4"


def _a1_instances():
    for w in range(1, 4):
        for v in range(w + 1):
            yield DimVector({1: v}), DimVector({1: w})


def _jordan_instances():
    for n in range(1, 5):
        yield DimVector({0: n}), DimVector({0: 1})


def criterion_2():
    fewest = 3
    for v, w in _a1_instances():
        expected = MotiveClass(grassmannian_motive(w[1], v[1])).shift(v[1] * (w[1] - v[1]))
        got = {
            "fermionic": fermionic_class(A1, v, w).value,
            "bb": framed_class_bb(A1, v, w).value,
            "recursion": framed_class_recursion(A1, v, w).value,
        }
        agreeing = [k for k, val in got.items() if val == expected]
        if len(agreeing) < 2:
            return False, f"v={v[1]}, w={w[1]}: {got}"
        fewest = min(fewest, len(agreeing))
    return True, f"A1, w <= 3, at least {fewest} of 3 algorithms agree"


def _pairs():
    for v, w in _jordan_instances():
        yield JORDAN, v, w
    for v, w in _a1_instances():
        yield A1, v, w


def criterion_3():
    for gamma, v, w in _pairs():
        dim = dim_framed(gamma, v, w)
        m = fermionic_class(gamma, v, w).value
        for nil in (fermionic_nilpotent_class(gamma, v, w).value,
                    nilpotent_class_bb(gamma, v, w).value):
            if nil.dual() != m.shift(-dim):
                return False, f"v={v.render()} w={w.render()}"
    return True, "criteria 1-2 instances"


def criterion_4():
    for gamma, v, w in _pairs():
        dim = dim_framed(gamma, v, w)
        m = framed_class_bb(gamma, v, w).value
        if not m.is_laurent():
            return False, f"v={v.render()}: not Laurent"
        poly = m.to_laurent()
        if poly.low_degree < 0 or poly.degree != dim or any(c < 0 for _, c in poly.terms()):
            return False, f"v={v.render()} w={w.render()}: {poly} vs dim {dim}"
    return True, "lowest degree >= 0, top degree = dim"


def criterion_5():
    cases = json.loads(GOLDEN_MESH.read_text())
    checked = 0
    for case in cases:
        problem = Problem(case["quiver"])
        if problem.v.total > 3:
            continue
        value = mesh_rep_class(problem.built, problem.v).value
        for q in (2, 3):
            count = count_mesh_points(problem.built, problem.v, q)
            if count != value.evaluate(q) or count != case["expect"][f"count_q{q}"]:
                return False, f"{case['name']} q={q}: count {count}, class {value}"
        checked += 1
    if checked < 10:
        return False, f"only {checked} golden instances"
    return True, f"{checked} golden instances at q = 2, 3"


def criterion_6():
    za2 = repetition(A2)
    theta = pullback_theta(StabilityParam({1: 1, 2: 0}))
    box = [(1, 0), (2, 0), (1, 1), (2, 1)]
    wc = WallCrossing(za2, theta, DimVector(dict.fromkeys(box, 2)))
    checked = 0
    for entries in itertools.product(range(3), repeat=4):
        v = DimVector(dict(zip(box, entries)))
        if v.is_zero():
            continue
        if forward_stack_class(za2, theta, v, wc.semistable_vec) != stack_class(za2, v).value:
            return False, f"v={v.render()}"
        checked += 1
    return True, f"{checked} vectors <= (2,2,2,2)"


def criterion_7():
    window = ainfinity_window(-3, 3)
    intervals = [(p, q) for p in range(-3, 4) for q in range(p, 4)]
    reps = {iv: interval_rep(window, *iv) for iv in intervals}
    for I, J in itertools.product(intervals, repeat=2):
        if hom_dim_interval(I, J) != hom_dim_explicit(reps[I], reps[J]):
            return False, f"{I} -> {J}"
    return True, f"{len(intervals) ** 2} interval pairs"


def criterion_8():
    for name, Q in (("A2", A2), ("Jordan", Quiver([0], [Arrow("a", 0, 0)]))):
        gamma = twisted_double(Q)
        _, W = jacobian_potential(gamma)
        mesh = dict(mesh_relation(gamma))
        for j in gamma.vertices:
            if cyclic_derivative(W, ell_arrow(j)) != mesh[(j, gamma.tau(j))]:
                return False, f"{name} at {j}"
    return True, "doubles of A2 and Jordan"


def criterion_9():
    for n in range(1, 4):
        if aut_class((((0, 0), n),)) != gl_motive(n):
            return False, f"n={n}"
    return True, "n <= 3"


CRITERIA = [
    (1, "Hilbert-scheme series", criterion_1, 30),
    (2, "cotangent Grassmannians", criterion_2, 60),
    (3, "duality", criterion_3, None),
    (4, "purity and degree", criterion_4, None),
    (5, "point-count oracle", criterion_5, 120),
    (6, "wall-crossing round trip", criterion_6, None),
    (7, "interval hom rule", criterion_7, 5),
    (8, "mesh relation from potential", criterion_8, None),
    (9, "automorphism class", criterion_9, None),
]


def evaluate_criterion(number, title, fn, budget):
    start = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - start
    if budget is not None and elapsed >= budget:
        ok, detail = False, f"{detail}; took {elapsed:.1f}s, target {budget}s"
    status = "PASS" if ok else "FAIL"
    return ok, f"{status} criterion {number} ({title}): {detail} [{elapsed:.2f}s]"


@pytest.mark.parametrize("number,title,fn,budget", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, title, fn, budget, capsys):
    ok, line = evaluate_criterion(number, title, fn, budget)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate_criterion(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
