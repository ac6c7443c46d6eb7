"""Slopes, genericity and the wall-crossing recursion.

The semistable stack class is

    [M_theta(v)] = sum over v_1 + ... + v_n = v with
                   mu(v_1 + ... + v_k) > mu(v) for all k < n
                   of (-1)^(n-1) L^(sum_{i<j} nu(v_i, v_j)) prod [M(v_i)]

with nu(u, v) = -chi(v, u) - chi(u, v^tau).  The sign is what inverting the
Harder-Narasimhan identity produces; it is checked against the forward
formula in the tests.  The sum over decompositions is organised as a
dynamic program over the partial sums s_k = v_1 + ... + v_k, using that nu
is bilinear: sum_{i<j} nu(v_i, v_j) = sum_j nu(s_{j-1}, v_j).
"""

from __future__ import annotations

import itertools
import threading
from collections import defaultdict
from fractions import Fraction

from .errors import GenericityError, NonReductionError, PreconditionError, TauAsymmetryError
from .quiver import DimVector, StabilityParam, slope, vertex_key
from .report import ClassReport, fingerprint
from .ring import ONE, ZERO, LaurentPoly, MotiveClass
from .stackmotive import as_localized_double, stack_class

__all__ = [
    "NuForm",
    "slope",
    "is_generic",
    "check_tau_invariant",
    "subvectors",
    "enumerate_decompositions",
    "WallCrossing",
    "semistable_stack_class",
    "stable_variety_class",
    "forward_stack_class",
]


class NuForm:
    """nu(u, v) = -chi(v, u) - chi(u, v^tau) on a localized double quiver."""

    def __init__(self, gamma):
        self.gamma = as_localized_double(gamma)

    def __call__(self, u, v):
        g = self.gamma
        return -g.cut_euler(v, u) - g.cut_euler(u, g.tau_twist(v))

    def matrix(self, support):
        """Values on pairs of unit vectors, for fast bilinear evaluation."""
        units = [DimVector({x: 1}) for x in support]
        return [[self(a, b) for b in units] for a in units]


def _as_theta(theta):
    if isinstance(theta, StabilityParam):
        return theta
    if callable(theta):
        return StabilityParam(func=theta)
    return StabilityParam(theta)


def subvectors(v, proper=False):
    """All u with 0 < u <= v (or 0 < u < v), ordered by total then lexicographically."""
    v = DimVector(v)
    keys = list(v)
    out = []
    for combo in itertools.product(*(range(v[k] + 1) for k in keys)):
        total = sum(combo)
        if total == 0 or (proper and total == v.total):
            continue
        out.append((total, combo))
    out.sort()
    return [DimVector(dict(zip(keys, combo))) for _, combo in out]


def is_generic(theta, v):
    """mu(u) != mu(v) for every 0 < u < v."""
    theta = _as_theta(theta)
    v = DimVector(v)
    if v.total <= 1:
        return True
    target = slope(theta, v)
    return all(slope(theta, u) != target for u in subvectors(v, proper=True))


def check_tau_invariant(gamma, theta, vertices):
    """Raise unless theta(tau x) = theta(x) on the given vertices."""
    ld = as_localized_double(gamma)
    theta = _as_theta(theta)
    for x in vertices:
        for y in (ld.tau(x), ld.tau_inv(x)):
            if theta(y) != theta(x):
                raise TauAsymmetryError(
                    f"theta is not tau-invariant: theta({x!r}) = {theta(x)}, theta({y!r}) = {theta(y)}"
                )


def enumerate_decompositions(v, predicate=None):
    """Ordered tuples of nonzero vectors summing to v.

    ``predicate(parts)`` is called on every prefix (including the complete
    tuple); a false answer prunes that prefix.  Order: depth first, parts
    chosen in the order of :func:`subvectors`.
    """
    v = DimVector(v)
    if v.is_zero():
        if predicate is None or predicate(()):
            yield ()
        return

    def rec(remaining, parts):
        for u in subvectors(remaining):
            nxt = parts + (u,)
            if predicate is not None and not predicate(nxt):
                continue
            rest = remaining - u
            if rest.is_zero():
                yield nxt
            else:
                yield from rec(rest, nxt)

    yield from rec(v, ())


def _class_sum(terms):
    """Sum of MotiveClasses, grouping equal denominators before combining."""
    groups = defaultdict(LaurentPoly)
    for t in terms:
        groups[t.den] = groups[t.den] + t.num
    total = ZERO
    for den in sorted(groups, key=lambda d: (len(d), d)):
        if not groups[den].is_zero():
            total = total + MotiveClass(groups[den], den)
    return total


class WallCrossing:
    """Memoized stack and semistable classes for sub-vectors of one top vector.

    The tables are filled with pure values; concurrent fills of the same key
    compute identical results, so a lock only guards the dict insertions.
    """

    def __init__(self, gamma, theta, top, stack=None):
        self.gamma = as_localized_double(gamma)
        self.theta = _as_theta(theta)
        self.top = DimVector(top)
        self.gamma.check_vertices(self.top)
        self.keys = list(self.top)
        check_tau_invariant(self.gamma, self.theta, self.keys)
        self._stack_fn = stack or (lambda u: stack_class(self.gamma, u).value)
        nu = NuForm(self.gamma).matrix(self.keys)
        self._nu = nu
        self._theta_vals = [self.theta(x) for x in self.keys]
        self._stack = {}
        self._semi = {}
        self._lock = threading.Lock()

    def _tuple(self, u):
        return tuple(u[k] for k in self.keys)

    def _vec(self, t):
        return DimVector(dict(zip(self.keys, t)))

    def nu(self, a, b):
        return sum(
            a[i] * b[j] * self._nu[i][j]
            for i in range(len(a)) if a[i]
            for j in range(len(b)) if b[j]
        )

    def _slope(self, t):
        return sum((c * th for c, th in zip(t, self._theta_vals)), Fraction(0)) / sum(t)

    def stack(self, t):
        val = self._stack.get(t)
        if val is None:
            val = ONE if not any(t) else self._stack_fn(self._vec(t))
            with self._lock:
                self._stack.setdefault(t, val)
        return val

    def _boxes(self, t):
        out = [c for c in itertools.product(*(range(x + 1) for x in t))]
        out.sort(key=lambda c: (sum(c), c))
        return out

    def semistable(self, t):
        """[M_theta(v)] for the tuple t over ``self.keys``."""
        t = tuple(t)
        val = self._semi.get(t)
        if val is not None:
            return val
        if not any(t):
            return ONE
        target = self._slope(t)
        width = len(t)
        zero = (0,) * width
        # D(s): signed sum over chains 0 = s_0 < ... < s_k = s, all slopes above target
        prefix = {zero: ONE}
        for s in self._boxes(t):
            if s == zero or s == t or self._slope(s) <= target:
                continue
            terms = []
            for s0, d0 in prefix.items():
                if s0 == s or any(a > b for a, b in zip(s0, s)):
                    continue
                step = tuple(b - a for a, b in zip(s0, s))
                terms.append(-(d0 * self.stack(step)).shift(self.nu(s0, step)))
            prefix[s] = _class_sum(terms)
        terms = []
        for s0, d0 in prefix.items():
            step = tuple(b - a for a, b in zip(s0, t))
            terms.append((d0 * self.stack(step)).shift(self.nu(s0, step)))
        val = _class_sum(terms)
        with self._lock:
            self._semi.setdefault(t, val)
        return val

    def semistable_vec(self, u):
        return self.semistable(self._tuple(u))


def semistable_stack_class(gamma, theta, v, stack=None):
    v = DimVector(v)
    wc = WallCrossing(gamma, theta, v, stack)
    value = wc.semistable_vec(v)
    fp = dict(wc.gamma.fingerprint(), v=v.render(),
              theta=fingerprint(theta={x: wc.theta(x) for x in wc.keys})["theta"])
    return ClassReport(value, "wallcross-semistable", fp)


def stable_variety_class(gamma, theta, v, stack=None):
    """[M^s_theta(v)] = (L - 1) [M_theta(v)] for v-generic theta."""
    v = DimVector(v)
    theta = _as_theta(theta)
    if v.is_zero():
        return ClassReport(ONE, "wallcross", {"v": ""})
    if not is_generic(theta, v):
        raise GenericityError(f"theta is not generic for v = {v.render()}")
    semi = semistable_stack_class(gamma, theta, v, stack)
    value = MotiveClass(semi.value.num.times_cyclotomic_factor(1), semi.value.den)
    if not value.is_laurent():
        raise NonReductionError(f"stable moduli class kept denominator {value.den}")
    return ClassReport(value, "wallcross", semi.fingerprint)


def forward_stack_class(gamma, theta, v, semistable):
    """Reassemble [M(v)] = sum over mu(v_1) > ... > mu(v_n) of L^nu prod [M_theta(v_i)].

    ``semistable`` maps a DimVector to its semistable class.
    """
    ld = as_localized_double(gamma)
    theta = _as_theta(theta)
    v = DimVector(v)
    if v.is_zero():
        return ONE
    nu = NuForm(ld)

    def decreasing(parts):
        if len(parts) < 2:
            return True
        return slope(theta, parts[-2]) > slope(theta, parts[-1])

    terms = []
    for parts in enumerate_decompositions(v, decreasing):
        exponent = 0
        acc = DimVector()
        for p in parts:
            exponent += nu(acc, p)
            acc = acc + p
        term = ONE
        for p in parts:
            term = term * semistable(p)
        terms.append(term.shift(exponent))
    return _class_sum(terms)

