"""Stack classes of mesh-algebra representations on localized double quivers.

The localized double of a finite quiver Q (with trivial twist) has vertices
(i, n) and, for each arrow a: i -> j of weight d_a, arrows
(i, n - d_a) -> (j, n); tau moves (i, n) to (i, n - e).  Representations
of the cut together with maps M_x -> M_{tau x} are counted column by column:
for fixed (i, k) with 0 <= k < e, the spaces at (i, m*e + k) form a
representation of the linear quiver ... -> m+1 -> m -> ..., which splits into
interval modules I_{p,q}.  Summing the resulting Hom/Aut data over all
interval decompositions gives the class of the representation space, and
Euler-form twists convert that to the mesh algebra.
"""

from __future__ import annotations

import itertools
from collections import defaultdict

from .errors import NonReductionError, UnknownVertexError, UnsupportedQuiverError
from .quiver import DimVector, Quiver, render_id
from .report import ClassReport, fingerprint, quiver_hash
from .ring import ONE_POLY, LaurentPoly, MotiveClass, gl_motive, pochhammer_inv
from .translation import Localization, Repetition, TranslationQuiver, WeightMap, twisted_double


class LocalizedDouble:
    """Localization of the (untwisted) double of ``base`` along cut weights ``d``."""

    def __init__(self, base, weights=None, e=1):
        if e == 0:
            raise UnsupportedQuiverError("total weight e must be nonzero")
        self.base = base
        self.weights = {a.id: 0 for a in base.arrows}
        if weights:
            unknown = set(weights) - set(self.weights)
            if unknown:
                raise UnsupportedQuiverError(f"weights for unknown arrows {sorted(map(str, unknown))}")
            self.weights.update(weights)
        self.e = e

    def tau(self, v):
        i, n = v
        return (i, n - self.e)

    def tau_inv(self, v):
        i, n = v
        return (i, n + self.e)

    def check_vertices(self, v):
        for x in v:
            if not (isinstance(x, tuple) and len(x) == 2 and self.base.has_vertex(x[0])
                    and isinstance(x[1], int)):
                raise UnknownVertexError(f"{render_id(x)} is not a vertex of the localized quiver")

    def cut_euler(self, m, n):
        """Euler form of the cut: arrows (i, p) -> (j, p + d_a)."""
        total = sum(c * n.get(x, 0) for x, c in m.items())
        for (i, p), c in m.items():
            for a in self.base.arrows_out(i):
                total -= c * n.get((a.target, p + self.weights[a.id]), 0)
        return total

    def tau_twist(self, v):
        return DimVector({self.tau_inv(x): c for x, c in v.items()})

    def cut_arrows_between(self, x, y):
        i, p = x
        j, q = y
        return sum(1 for a in self.base.arrows_out(i) if a.target == j and p + self.weights[a.id] == q)

    def translation_quiver(self):
        double = twisted_double(self.base)
        cut_weights = dict(self.weights)
        return Localization(double, WeightMap(double, self.e, cut_weights=cut_weights))

    def reflected(self):
        """The same quiver read through n -> -n, which negates d and e."""
        return LocalizedDouble(self.base, {k: -w for k, w in self.weights.items()}, -self.e)

    def fingerprint(self):
        return {"quiver": quiver_hash(self.base), "e": str(self.e),
                "weights": {render_id(k): str(v) for k, v in sorted(self.weights.items(), key=lambda t: render_id(t[0]))}}


def as_localized_double(gamma):
    """Recognize the localized-double shape, or raise ``UnsupportedQuiverError``."""
    if isinstance(gamma, LocalizedDouble):
        return gamma
    if isinstance(gamma, Repetition):
        return LocalizedDouble(gamma.base, None, 1)
    if isinstance(gamma, Localization) and isinstance(gamma.base, TranslationQuiver):
        info = gamma.base.double_of
        if info is not None and info[1].is_identity() and isinstance(gamma.e, int):
            Q = info[0]
            weights = {a.id: gamma.weights(a) for a in Q.arrows}
            return LocalizedDouble(Q, weights, gamma.e)
    raise UnsupportedQuiverError(
        "expected a localization of an untwisted double quiver (or a repetition quiver)"
    )


# -- A-infinity intervals -----------------------------------------------------


def hom_dim_interval(I, J):
    """dim Hom(I_{p,q}, I_{p',q'}) on ... -> m+1 -> m -> ...: 1 iff p <= p' <= q <= q'."""
    p, q = I
    p2, q2 = J
    return 1 if p <= p2 <= q <= q2 else 0


def enumerate_interval_multisets(column):
    """All ways to write a column m -> dim as a sum of interval indicators.

    Yields tuples ``((p, q), multiplicity)`` sorted by interval, in
    lexicographic order of the chosen interval sequence.
    """
    remaining = {m: c for m, c in dict(column).items() if c}
    if any(c < 0 for c in remaining.values()):
        raise ValueError("negative column entry")

    def rec(rem, last):
        if not rem:
            yield ()
            return
        p = min(rem)
        if last is not None and last[0] == p:
            q_min = last[1]
        else:
            q_min = p
        q = p
        while q in rem:
            if q >= q_min:
                nxt = dict(rem)
                for m in range(p, q + 1):
                    nxt[m] -= 1
                    if not nxt[m]:
                        del nxt[m]
                for rest in rec(nxt, (p, q)):
                    yield ((p, q),) + rest
            q += 1

    for seq in rec(remaining, None):
        counts = defaultdict(int)
        for iv in seq:
            counts[iv] += 1
        yield tuple(sorted(counts.items()))


def multiset_dimensions(multiset):
    dims = defaultdict(int)
    for (p, q), n in multiset:
        for m in range(p, q + 1):
            dims[m] += n
    return dict(dims)


def _hom_multisets(A, B, shift=0, hom=hom_dim_interval):
    # Hom(A[-shift], B): intervals of A move down by ``shift``
    total = 0
    for (p, q), n in A:
        for J, k in B:
            total += n * k * hom((p - shift, q - shift), J)
    return total


def aut_class(M, hom=hom_dim_interval):
    """[Aut M] = L^{dim End M} * prod (L^-1)_{n_s} for M = sum n_s I_s."""
    dim_end = _hom_multisets(M, M, 0, hom)
    value = MotiveClass(LaurentPoly.monomial(dim_end))
    for _, n in M:
        value = value * pochhammer_inv(n)
    return value


def _gl_factorial_degrees(v):
    den, shift = [], 0
    for c in v.values():
        den.extend(range(1, c + 1))
        shift += c * (c - 1) // 2
    return den, shift


def r_tau_class(Q, d, e, v):
    """Class of representations of the cut with a compatible map to the tau-twist."""
    if e == 0:
        raise UnsupportedQuiverError("e must be nonzero")
    ld = LocalizedDouble(Q, d, e)
    v = DimVector(v)
    ld.check_vertices(v)
    if e < 0:
        ld = ld.reflected()
        v = DimVector({(i, -n): c for (i, n), c in v.items()})
    value = _r_tau_positive(ld, v)
    report_fp = dict(ld.fingerprint(), v=v.render())
    return ClassReport(value, "interval-sum", report_fp)


def _r_tau_positive(ld, v):
    Q, e = ld.base, ld.e
    columns = defaultdict(dict)
    for (i, n), c in v.items():
        m, k = divmod(n, e)
        columns[(i, k)][m] = c
    keys = sorted(columns, key=lambda t: (render_id(t[0]), t[1]))
    index = {key: pos for pos, key in enumerate(keys)}
    choices = []
    for key in keys:
        options = list(enumerate_interval_multisets(columns[key]))
        for ms in options:
            assert multiset_dimensions(ms) == columns[key], "interval multiset dimension mismatch"
        choices.append(options)

    # per-column data: exponent (triangular - dim End) and denominator degrees
    col_data = []
    for options in choices:
        data = []
        for ms in options:
            dim_end = _hom_multisets(ms, ms)
            tri = sum(n * (n + 1) // 2 for _, n in ms)
            den = tuple(k for _, n in ms for k in range(1, n + 1))
            data.append((tri - dim_end, den))
        col_data.append(data)

    # arrow terms: pairs of columns joined by a lifted arrow, with the shift
    links = []
    for a in Q.arrows:
        da = ld.weights[a.id]
        for k in range(e):
            m0, k0 = divmod(k - da, e)
            src, tgt = (a.source, k0), (a.target, k)
            if src in index and tgt in index:
                links.append((index[src], index[tgt], m0))
    hom_cache = {}

    def link_hom(s, t, m0, x, y):
        key = (s, t, m0, x, y)
        val = hom_cache.get(key)
        if val is None:
            val = _hom_multisets(choices[s][x], choices[t][y], m0)
            hom_cache[key] = val
        return val

    groups = defaultdict(lambda: defaultdict(int))
    for combo in itertools.product(*(range(len(c)) for c in choices)):
        exponent = 0
        den = []
        for col, x in enumerate(combo):
            ex, dd = col_data[col][x]
            exponent += ex
            den.extend(dd)
        for s, t, m0 in links:
            exponent += link_hom(s, t, m0, combo[s], combo[t])
        groups[tuple(sorted(den))][exponent] += 1

    gl_den, gl_shift = _gl_factorial_degrees(v)
    gl_poly = ONE_POLY
    for k in gl_den:
        gl_poly = gl_poly.times_cyclotomic_factor(k)
    gl_poly = gl_poly.shift(gl_shift)
    total = LaurentPoly()
    for den in sorted(groups):
        numerator = LaurentPoly(groups[den]) * gl_poly
        term = MotiveClass(numerator, den)
        if not term.is_laurent():
            raise NonReductionError(f"interval sum term kept denominator {term.den}")
        total = total + term.num
    return MotiveClass(total)


def mesh_rep_class(gamma, v):
    """[R(Pi, v)] = L^{-chi(v, v^tau)} [R^tau(cut, v)]."""
    ld = as_localized_double(gamma)
    v = DimVector(v)
    ld.check_vertices(v)
    r = r_tau_class(ld.base, ld.weights, ld.e, v).value
    chi = ld.cut_euler(v, ld.tau_twist(v))
    value = r.shift(-chi)
    if not value.is_laurent():
        raise NonReductionError("mesh representation class is not a Laurent polynomial")
    return ClassReport(value, "mesh-rep", dict(ld.fingerprint(), v=v.render()))


def stack_class(gamma, v):
    """[R(Pi, v) / GL_v]."""
    ld = as_localized_double(gamma)
    v = DimVector(v)
    rep = mesh_rep_class(ld, v).value
    den, shift = _gl_factorial_degrees(v)
    value = MotiveClass(rep.num.shift(-shift), den)
    return ClassReport(value, "stack", dict(ld.fingerprint(), v=v.render()))


def gl_class(v):
    value = ONE_POLY
    for c in DimVector(v).values():
        value = value * gl_motive(c)
    return value


__all__ = [
    "LocalizedDouble",
    "as_localized_double",
    "hom_dim_interval",
    "enumerate_interval_multisets",
    "multiset_dimensions",
    "aut_class",
    "r_tau_class",
    "mesh_rep_class",
    "stack_class",
    "gl_class",
    "ClassReport",
    "Quiver",
]
