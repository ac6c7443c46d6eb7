"""Translation quivers and the constructions built on them.

A translation quiver carries a vertex translation ``tau`` and an arrow
semitranslation ``sigma`` with sigma(a: i -> j) : tau(j) -> i, plus an
optional cut.  Finite ones are ``TranslationQuiver`` instances; the
repetition, localization and stable framed constructions are lazy
objects that answer local queries and can be materialized on a finite
vertex window.

All objects share one small query interface:

* ``tau(v)`` / ``tau_inv(v)`` return ``None`` where undefined (partial case);
* ``sigma(a)`` / ``sigma_inv(a)`` take and return ``Arrow`` tuples;
* ``arrows_out(v, within)`` / ``arrows_in(v, within)`` list incident arrows,
  restricted to arrows whose other endpoint lies in ``within``;
* ``in_cut(a)`` and ``epsilon(a)``.

Paths are tuples of arrow ids written left to right in composition order,
so ``(a, b)`` means "first b, then a".
"""

from __future__ import annotations

from collections import defaultdict

from .errors import (
    InvalidCutError,
    InvalidWeightError,
    NoCutError,
    NonBijectiveError,
    PreconditionError,
    ValidationError,
)
from .quiver import Arrow, DimVector, Quiver, QuiverAutomorphism, StabilityParam, render_id, vertex_key

FRAME = "*"


def _add(n, d):
    if isinstance(n, tuple):
        return tuple(x + y for x, y in zip(n, d))
    return n + d


def _sub(n, d):
    if isinstance(n, tuple):
        return tuple(x - y for x, y in zip(n, d))
    return n - d


def _star(aid):
    return f"{aid}*" if isinstance(aid, str) else (aid, "*")


class TranslationQuiverBase:
    """Query interface; subclasses provide the structure."""

    has_cut = True

    def tau(self, v):
        raise NotImplementedError

    def tau_inv(self, v):
        raise NotImplementedError

    def sigma(self, a):
        raise NotImplementedError

    def sigma_inv(self, a):
        raise NotImplementedError

    def arrows_out(self, v, within=None):
        raise NotImplementedError

    def arrows_in(self, v, within=None):
        raise NotImplementedError

    def arrow(self, arrow_id):
        raise NotImplementedError

    def in_cut(self, a):
        raise NotImplementedError

    def epsilon(self, a):
        if not self.has_cut:
            raise NoCutError("this translation quiver has no cut")
        return 1 if self.in_cut(a) else -1

    def tau_power(self, v, k):
        step = self.tau if k >= 0 else self.tau_inv
        for _ in range(abs(k)):
            v = step(v)
            if v is None:
                return None
        return v

    def materialize(self, vertices):
        """Full finite sub-translation-quiver on ``vertices`` (partial in general)."""
        vs = sorted(set(vertices), key=vertex_key)
        vset = set(vs)
        arrows, seen = [], set()
        for v in vs:
            for a in self.arrows_out(v, within=vset):
                if a.id not in seen:
                    seen.add(a.id)
                    arrows.append(a)
        arrows.sort(key=lambda a: vertex_key(a.id))
        tau = {}
        for v in vs:
            t = self.tau(v)
            if t is not None and t in vset:
                tau[v] = t
        sigma = {}
        for a in arrows:
            if a.target in tau:
                b = self.sigma(a)
                if b is not None and b.id in seen:
                    sigma[a.id] = b.id
        cut = frozenset(a.id for a in arrows if self.in_cut(a)) if self.has_cut else None
        return TranslationQuiver(Quiver(vs, arrows), tau, sigma, cut, partial=True)


class TranslationQuiver(TranslationQuiverBase):
    """A finite (possibly partial) translation quiver."""

    def __init__(self, quiver, tau, sigma, cut=None, partial=False):
        self.quiver = quiver
        self._tau = dict(tau)
        self._sigma = dict(sigma)
        self.cut = frozenset(cut) if cut is not None else None
        self.has_cut = self.cut is not None
        self.partial = partial
        self.double_of = None
        self._validate()
        self._tau_inv = {b: a for a, b in self._tau.items()}
        self._sigma_inv = {b: a for a, b in self._sigma.items()}

    def _validate(self):
        Q = self.quiver
        for v, t in self._tau.items():
            if not Q.has_vertex(v) or not Q.has_vertex(t):
                raise ValidationError(f"tau maps outside the quiver at {render_id(v)}")
        if len(set(self._tau.values())) != len(self._tau):
            raise NonBijectiveError("tau is not injective")
        if not self.partial and set(self._tau) != set(Q.vertices):
            raise NonBijectiveError("tau must be defined on every vertex")
        if len(set(self._sigma.values())) != len(self._sigma):
            raise NonBijectiveError("sigma is not injective")
        for a in Q.arrows:
            if a.target in self._tau:
                if a.id not in self._sigma:
                    raise NonBijectiveError(f"sigma undefined on arrow {render_id(a.id)}")
            elif a.id in self._sigma:
                raise ValidationError(
                    f"sigma defined on {render_id(a.id)} whose target has no translate"
                )
        for aid, bid in self._sigma.items():
            a, b = Q.arrow(aid), Q.arrow(bid)
            if b.source != self._tau[a.target] or b.target != a.source:
                raise ValidationError(
                    f"sigma({render_id(aid)}) must go from tau(target) to source"
                )
        # sigma must be onto the arrows tau(j) -> i for every j in the domain of tau
        for j, tj in self._tau.items():
            into_j = _count(a.source for a in Q.arrows_in(j))
            from_tj = _count(a.target for a in Q.arrows_out(tj))
            if into_j != from_tj:
                raise NonBijectiveError(
                    f"sigma cannot biject arrows into {render_id(j)} with arrows out of tau of it"
                )
        if self.cut is not None:
            ids = {a.id for a in Q.arrows}
            if not self.cut <= ids:
                raise InvalidCutError("cut contains unknown arrows")
            image = {self._sigma[a] for a in self.cut if a in self._sigma}
            if self.cut & image:
                raise InvalidCutError("cut meets its sigma-image")
            if not self.partial:
                if self.cut | image != ids:
                    raise InvalidCutError("cut and its sigma-image must cover all arrows")
                if {self._sigma[b] for b in image} != set(self.cut):
                    raise InvalidCutError("sigma^2 must preserve the cut")

    # -- query interface ----------------------------------------------------

    @property
    def vertices(self):
        return self.quiver.vertices

    @property
    def arrows(self):
        return self.quiver.arrows

    def tau(self, v):
        return self._tau.get(v)

    def tau_inv(self, v):
        return self._tau_inv.get(v)

    def sigma(self, a):
        b = self._sigma.get(a.id)
        return None if b is None else self.quiver.arrow(b)

    def sigma_inv(self, a):
        b = self._sigma_inv.get(a.id)
        return None if b is None else self.quiver.arrow(b)

    def arrows_out(self, v, within=None):
        return self.quiver.arrows_out(v, within)

    def arrows_in(self, v, within=None):
        return self.quiver.arrows_in(v, within)

    def arrow(self, arrow_id):
        return self.quiver.arrow(arrow_id)

    def in_cut(self, a):
        if self.cut is None:
            raise NoCutError("this translation quiver has no cut")
        return a.id in self.cut

    @property
    def tau_map(self):
        return dict(self._tau)

    @property
    def sigma_map(self):
        return dict(self._sigma)

    def window(self, lo=None, hi=None):
        return list(self.quiver.vertices)

    def with_cut(self, cut):
        return TranslationQuiver(self.quiver, self._tau, self._sigma, cut, self.partial)

    def __eq__(self, other):
        if not isinstance(other, TranslationQuiver):
            return NotImplemented
        return (
            self.quiver == other.quiver
            and self._tau == other._tau
            and self._sigma == other._sigma
            and self.cut == other.cut
        )

    def __hash__(self):
        return hash((self.quiver, frozenset(self._tau.items()), self.cut))

    def __repr__(self):
        kind = "PartialTranslationQuiver" if self.partial else "TranslationQuiver"
        return f"{kind}({len(self.vertices)} vertices, {len(self.arrows)} arrows)"


def _count(items):
    counts = defaultdict(int)
    for x in items:
        counts[x] += 1
    return dict(counts)


def PartialTranslationQuiver(quiver, tau, sigma, cut=None):
    return TranslationQuiver(quiver, tau, sigma, cut, partial=True)


# -- twisted double ---------------------------------------------------------


def twisted_double(Q, tau=None):
    """Add a*: tau(j) -> i for each a: i -> j, with sigma(a) = a*, sigma(a*) = tau(a)."""
    if tau is None:
        tau = QuiverAutomorphism.identity(Q)
    arrows = list(Q.arrows)
    sigma = {}
    for a in Q.arrows:
        star = _star(a.id)
        if Q.has_arrow(star):
            raise ValidationError(f"arrow id {render_id(star)} clashes with a starred arrow")
        arrows.append(Arrow(star, tau(a.target), a.source))
        sigma[a.id] = star
    for a in Q.arrows:
        sigma[_star(a.id)] = tau.arrow(a.id)
    gamma = TranslationQuiver(
        Quiver(Q.vertices, arrows),
        {v: tau(v) for v in Q.vertices},
        sigma,
        cut={a.id for a in Q.arrows},
    )
    gamma.double_of = (Q, tau)
    return gamma


# -- repetition -------------------------------------------------------------


class Repetition(TranslationQuiverBase):
    """ZQ: vertices (i, n); a_n: (i,n) -> (j,n), a*_n: (j,n-1) -> (i,n)."""

    def __init__(self, Q):
        self.base = Q
        self._unstar = {}
        for a in Q.arrows:
            star = _star(a.id)
            if Q.has_arrow(star):
                raise ValidationError(f"arrow id {render_id(star)} clashes with a starred arrow")
            self._unstar[star] = a.id

    def tau(self, v):
        i, n = v
        return (i, n - 1)

    def tau_inv(self, v):
        i, n = v
        return (i, n + 1)

    def _lift(self, aid, n, starred):
        a = self.base.arrow(aid)
        if starred:
            return Arrow((_star(aid), n), (a.target, n - 1), (a.source, n))
        return Arrow((aid, n), (a.source, n), (a.target, n))

    def arrow(self, arrow_id):
        name, n = arrow_id
        if name in self._unstar:
            return self._lift(self._unstar[name], n, True)
        return self._lift(name, n, False)

    def arrows_out(self, v, within=None):
        x, n = v
        out = [self._lift(a.id, n, False) for a in self.base.arrows_out(x)]
        out += [self._lift(a.id, n + 1, True) for a in self.base.arrows_in(x)]
        return [a for a in out if within is None or a.target in within]

    def arrows_in(self, v, within=None):
        x, n = v
        out = [self._lift(a.id, n, False) for a in self.base.arrows_in(x)]
        out += [self._lift(a.id, n, True) for a in self.base.arrows_out(x)]
        return [a for a in out if within is None or a.source in within]

    def sigma(self, a):
        name, n = a.id
        if name in self._unstar:
            return self._lift(self._unstar[name], n - 1, False)
        return self._lift(name, n, True)

    def sigma_inv(self, a):
        name, n = a.id
        if name in self._unstar:
            return self._lift(self._unstar[name], n, False)
        return self._lift(name, n + 1, True)

    def in_cut(self, a):
        return a.id[0] not in self._unstar

    def window(self, lo, hi):
        return [(i, n) for n in range(lo, hi + 1) for i in self.base.vertices]

    def __repr__(self):
        return f"Repetition({self.base!r})"


def repetition(Q):
    return Repetition(Q)


# -- weight maps and localization --------------------------------------------


class WeightMap:
    """Arrow weights d with d(a) + d(sigma a) = e.

    Build it from a full table (``weights``), from values on the cut
    (``cut_weights``, the rest follow), or from one value for every cut
    arrow (``cut_value``).
    """

    def __init__(self, gamma, e, weights=None, cut_weights=None, cut_value=None, lift_of=None):
        self.gamma = gamma
        self.e = e
        self._table = dict(weights) if weights is not None else None
        self._cut = dict(cut_weights) if cut_weights is not None else None
        self._cut_value = cut_value
        self._lift_of = lift_of
        modes = sum(x is not None for x in (weights, cut_weights, cut_value, lift_of))
        if modes != 1:
            raise ValueError("give exactly one of weights, cut_weights, cut_value, lift_of")
        if isinstance(gamma, TranslationQuiver):
            self.validate(gamma.arrows)

    def __call__(self, a):
        if self._table is not None:
            try:
                return self._table[a.id]
            except KeyError:
                raise InvalidWeightError(f"no weight for arrow {render_id(a.id)}") from None
        if self._lift_of is not None:
            base = self._lift_of
            return base(base.gamma.arrow(a.id[0]))
        if self.gamma.in_cut(a):
            if self._cut is not None:
                try:
                    return self._cut[a.id]
                except KeyError:
                    raise InvalidWeightError(
                        f"no weight for cut arrow {render_id(a.id)}"
                    ) from None
            return self._cut_value
        pre = self.gamma.sigma_inv(a)
        if pre is None:
            raise InvalidWeightError(f"cannot derive the weight of {render_id(a.id)}")
        return _sub(self.e, self(pre))

    def validate(self, arrows):
        for a in arrows:
            b = self.gamma.sigma(a)
            if b is None:
                continue
            if _add(self(a), self(b)) != self.e:
                raise InvalidWeightError(
                    f"d({render_id(a.id)}) + d({render_id(b.id)}) != {self.e}"
                )

    def is_positive(self, arrows):
        return all(_positive(self(a)) for a in arrows)


def _positive(x):
    if isinstance(x, tuple):
        return all(c > 0 for c in x)
    return x > 0


class Localization(TranslationQuiverBase):
    """loc_d(Gamma): vertices (x, n), arrows a_n: (s a, n - d_a) -> (t a, n).

    tau(x, n) = (tau x, n - e) and sigma(a_n) = (sigma a)_{n - d_a}.
    """

    def __init__(self, gamma, weights):
        self.base = gamma
        self.weights = weights
        self.e = weights.e
        self.has_cut = gamma.has_cut

    @staticmethod
    def _project(within):
        return None if within is None else {v[0] for v in within}

    def _lift(self, a, n):
        d = self.weights(a)
        return Arrow((a.id, n), (a.source, _sub(n, d)), (a.target, n))

    def arrow(self, arrow_id):
        aid, n = arrow_id
        return self._lift(self.base.arrow(aid), n)

    def tau(self, v):
        x, n = v
        tx = self.base.tau(x)
        return None if tx is None else (tx, _sub(n, self.e))

    def tau_inv(self, v):
        x, n = v
        tx = self.base.tau_inv(x)
        return None if tx is None else (tx, _add(n, self.e))

    def arrows_out(self, v, within=None):
        x, n = v
        out = []
        for a in self.base.arrows_out(x, within=self._project(within)):
            b = self._lift(a, _add(n, self.weights(a)))
            if within is None or b.target in within:
                out.append(b)
        return out

    def arrows_in(self, v, within=None):
        x, n = v
        out = []
        for a in self.base.arrows_in(x, within=self._project(within)):
            b = self._lift(a, n)
            if within is None or b.source in within:
                out.append(b)
        return out

    def sigma(self, a):
        aid, n = a.id
        base = self.base.arrow(aid)
        b = self.base.sigma(base)
        if b is None:
            return None
        return self._lift(b, _sub(n, self.weights(base)))

    def sigma_inv(self, a):
        aid, n = a.id
        b = self.base.sigma_inv(self.base.arrow(aid))
        if b is None:
            return None
        return self._lift(b, _add(n, self.weights(b)))

    def in_cut(self, a):
        return self.base.in_cut(self.base.arrow(a.id[0]))

    def window(self, lo, hi):
        base = self.base.window(lo, hi)
        return [(x, n) for n in range(lo, hi + 1) for x in base]

    def shift_vertex(self, v, m):
        return (v[0], _add(v[1], m))

    def shift_arrow(self, a, m):
        return self.arrow((a.id[0], _add(a.id[1], m)))

    def lifted_weights(self):
        """The weight map d(a_n) = d(a) on the localized quiver itself."""
        return WeightMap(self, self.e, lift_of=self.weights)

    def __repr__(self):
        return f"Localization({self.base!r}, e={self.e})"


def localize(gamma, weights):
    if isinstance(gamma, TranslationQuiver):
        weights.validate(gamma.arrows)
    return Localization(gamma, weights)


# -- framing ----------------------------------------------------------------


def _framing_dims(w):
    return {k: v for k, v in dict(w).items() if v}


class Framed(TranslationQuiverBase):
    """Gamma^f: a vertex * with w_i arrows * -> i and w_i arrows tau(i) -> *."""

    def __init__(self, gamma, w):
        self.base = gamma
        self.w = _framing_dims(w)
        self.has_cut = gamma.has_cut

    def tau(self, v):
        return None if v == FRAME else self.base.tau(v)

    def tau_inv(self, v):
        return None if v == FRAME else self.base.tau_inv(v)

    def arrow(self, arrow_id):
        if isinstance(arrow_id, tuple) and arrow_id and arrow_id[0] in ("*in", "*out"):
            kind, i, _ = arrow_id
            if kind == "*in":
                return Arrow(arrow_id, FRAME, i)
            return Arrow(arrow_id, self.base.tau(i), FRAME)
        return self.base.arrow(arrow_id)

    def _in_arrows(self):
        return [Arrow(("*in", i, k), FRAME, i) for i in self.w for k in range(self.w[i])]

    def _out_arrows(self):
        return [
            Arrow(("*out", i, k), self.base.tau(i), FRAME)
            for i in self.w
            for k in range(self.w[i])
        ]

    def arrows_out(self, v, within=None):
        if v == FRAME:
            out = self._in_arrows()
        else:
            base_within = None if within is None else within - {FRAME}
            out = list(self.base.arrows_out(v, within=base_within))
            i = self.base.tau_inv(v)
            if i in self.w:
                out += [Arrow(("*out", i, k), v, FRAME) for k in range(self.w[i])]
        return [a for a in out if within is None or a.target in within]

    def arrows_in(self, v, within=None):
        if v == FRAME:
            out = self._out_arrows()
        else:
            base_within = None if within is None else within - {FRAME}
            out = list(self.base.arrows_in(v, within=base_within))
            out += [Arrow(("*in", v, k), FRAME, v) for k in range(self.w.get(v, 0))]
        return [a for a in out if within is None or a.source in within]

    def sigma(self, a):
        if isinstance(a.id, tuple) and a.id and a.id[0] == "*in":
            _, i, k = a.id
            return Arrow(("*out", i, k), self.base.tau(i), FRAME)
        if isinstance(a.id, tuple) and a.id and a.id[0] == "*out":
            return None
        return self.base.sigma(a)

    def sigma_inv(self, a):
        if isinstance(a.id, tuple) and a.id and a.id[0] == "*out":
            _, i, k = a.id
            return Arrow(("*in", i, k), FRAME, i)
        if isinstance(a.id, tuple) and a.id and a.id[0] == "*in":
            return None
        return self.base.sigma_inv(a)

    def in_cut(self, a):
        if isinstance(a.id, tuple) and a.id and a.id[0] in ("*in", "*out"):
            return a.id[0] == "*in"
        return self.base.in_cut(a)

    def window(self, lo=None, hi=None):
        return list(self.base.window(lo, hi)) + [FRAME]


def frame(gamma, w):
    """The framed quiver; finite input gives a finite partial translation quiver."""
    w = _framing_dims(w)
    for v in w:
        if isinstance(gamma, TranslationQuiver) and not gamma.quiver.has_vertex(v):
            raise ValidationError(f"framing at unknown vertex {render_id(v)}")
    framed = Framed(gamma, w)
    if isinstance(gamma, TranslationQuiver):
        return framed.materialize(list(gamma.vertices) + [FRAME])
    return framed


def is_frame_vertex(v):
    return isinstance(v, tuple) and len(v) == 2 and v[0] == FRAME and isinstance(v[1], int)


class StableFramed(TranslationQuiverBase):
    """Gamma-hat^f: vertices Gamma_0 and [n] = ("*", n); w_{tau^n i} arrows [n] -> i and tau(i) -> [n]."""

    def __init__(self, gamma, w):
        self.base = gamma
        self.w = _framing_dims(w)
        self.has_cut = gamma.has_cut
        for v in self.w:
            if is_frame_vertex(v) or v == FRAME:
                raise ValidationError("framing must live on the base vertices")

    def tau(self, v):
        if is_frame_vertex(v):
            return (FRAME, v[1] - 1)
        return self.base.tau(v)

    def tau_inv(self, v):
        if is_frame_vertex(v):
            return (FRAME, v[1] + 1)
        return self.base.tau_inv(v)

    def _w_at(self, i, n):
        return self.w.get(self.base.tau_power(i, n), 0)

    def arrow(self, arrow_id):
        if isinstance(arrow_id, tuple) and arrow_id and arrow_id[0] in ("*in", "*out"):
            kind, n, i, _ = arrow_id
            if kind == "*in":
                return Arrow(arrow_id, (FRAME, n), i)
            return Arrow(arrow_id, self.base.tau(i), (FRAME, n))
        return self.base.arrow(arrow_id)

    @staticmethod
    def _split(within):
        if within is None:
            return None, None
        frames = {v[1] for v in within if is_frame_vertex(v)}
        return frames, {v for v in within if not is_frame_vertex(v)}

    def _frames_needed(self, within):
        if within is None:
            if self.w:
                raise PreconditionError(
                    "arrows at base vertices of a stable framed quiver need a finite window"
                )
            return set()
        return {v[1] for v in within if is_frame_vertex(v)}

    def arrows_out(self, v, within=None):
        if is_frame_vertex(v):
            n = v[1]
            out = []
            for u, wu in self.w.items():
                i = self.base.tau_power(u, -n)
                out += [Arrow(("*in", n, i, k), v, i) for k in range(wu)]
            return [a for a in out if within is None or a.target in within]
        frames = self._frames_needed(within)
        _, base_within = self._split(within)
        out = list(self.base.arrows_out(v, within=base_within))
        i = self.base.tau_inv(v)
        for n in sorted(frames):
            out += [Arrow(("*out", n, i, k), v, (FRAME, n)) for k in range(self._w_at(i, n))]
        return out

    def arrows_in(self, v, within=None):
        if is_frame_vertex(v):
            n = v[1]
            out = []
            for u, wu in self.w.items():
                i = self.base.tau_power(u, -n)
                src = self.base.tau(i)
                out += [Arrow(("*out", n, i, k), src, v) for k in range(wu)]
            return [a for a in out if within is None or a.source in within]
        frames = self._frames_needed(within)
        _, base_within = self._split(within)
        out = list(self.base.arrows_in(v, within=base_within))
        for n in sorted(frames):
            out += [Arrow(("*in", n, v, k), (FRAME, n), v) for k in range(self._w_at(v, n))]
        return out

    def sigma(self, a):
        if isinstance(a.id, tuple) and a.id and a.id[0] in ("*in", "*out"):
            kind, n, i, k = a.id
            if kind == "*in":
                return Arrow(("*out", n, i, k), self.base.tau(i), (FRAME, n))
            ti = self.base.tau(i)
            return Arrow(("*in", n - 1, ti, k), (FRAME, n - 1), ti)
        return self.base.sigma(a)

    def sigma_inv(self, a):
        if isinstance(a.id, tuple) and a.id and a.id[0] in ("*in", "*out"):
            kind, n, i, k = a.id
            if kind == "*out":
                return Arrow(("*in", n, i, k), (FRAME, n), i)
            j = self.base.tau_inv(i)
            return Arrow(("*out", n + 1, j, k), i, (FRAME, n + 1))
        return self.base.sigma_inv(a)

    def in_cut(self, a):
        if isinstance(a.id, tuple) and a.id and a.id[0] in ("*in", "*out"):
            return a.id[0] == "*in"
        return self.base.in_cut(a)

    def window(self, lo, hi):
        return list(self.base.window(lo, hi)) + [(FRAME, n) for n in range(lo, hi + 1)]

    def __repr__(self):
        return f"StableFramed({self.base!r})"


def stabilize_framed(gamma, w):
    return StableFramed(gamma, w)


# -- path sums, potentials, mesh relations ------------------------------------


class PathSum:
    """Formal Z-linear combination of paths (tuples of arrow ids)."""

    def __init__(self, terms=()):
        acc = defaultdict(int)
        for coef, path in terms:
            acc[tuple(path)] += coef
        self.terms = {p: c for p, c in acc.items() if c}

    def __add__(self, other):
        return PathSum(list(self.items()) + list(other.items()))

    def items(self):
        return [(c, p) for p, c in sorted(self.terms.items(), key=lambda t: vertex_key(t[0]))]

    def __eq__(self, other):
        if not isinstance(other, PathSum):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def arrows(self):
        return {a for p in self.terms for a in p}

    def render(self):
        if not self.terms:
            return "0"
        parts = []
        for c, p in self.items():
            word = ".".join(render_id(a) for a in p)
            sign = "-" if c < 0 else "+"
            mag = "" if abs(c) == 1 else f"{abs(c)}*"
            parts.append(f"{sign} {mag}{word}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    def __repr__(self):
        return f"PathSum({self.render()})"


def _canonical_cycle(word):
    word = tuple(word)
    if not word:
        return word
    rotations = [word[i:] + word[:i] for i in range(len(word))]
    return min(rotations, key=vertex_key)


class Potential:
    """Sum of cyclic words, each stored in its lexicographically minimal rotation."""

    def __init__(self, terms=()):
        acc = defaultdict(int)
        for coef, word in terms:
            acc[_canonical_cycle(word)] += coef
        self.terms = {w: c for w, c in acc.items() if c}

    def items(self):
        return [(c, w) for w, c in sorted(self.terms.items(), key=lambda t: vertex_key(t[0]))]

    def __eq__(self, other):
        if not isinstance(other, Potential):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def check_cycles(self, quiver):
        for word in self.terms:
            arrows = [quiver.arrow(a) for a in word]
            for left, right in zip(arrows, arrows[1:] + arrows[:1]):
                if right.target != left.source:
                    raise ValidationError(f"word {word!r} is not a cycle")


def cyclic_derivative(W, arrow_id):
    """Sum over occurrences of arrow_id of the word read cyclically after it."""
    out = []
    for coef, word in W.items():
        n = len(word)
        for p, a in enumerate(word):
            if a == arrow_id:
                out.append((coef, word[p + 1:] + word[:p]))
    return PathSum(out)


def mesh_relation(gamma):
    """Components (j, tau j) -> sum_{t(a)=j} eps(a) a sigma(a) of a finite translation quiver."""
    if not gamma.has_cut:
        raise NoCutError("mesh relations need a cut")
    out = []
    for j in gamma.vertices:
        tj = gamma.tau(j)
        if tj is None:
            continue
        terms = []
        for a in gamma.arrows_in(j):
            b = gamma.sigma(a)
            if b is not None:
                terms.append((gamma.epsilon(a), (a.id, b.id)))
        out.append(((j, tj), PathSum(terms)))
    return out


def ell_arrow(j):
    return ("ell", j)


def jacobian_potential(gamma):
    """The quiver with extra arrows ell_j: j -> tau j and W = sum eps(a) ell_j a sigma(a)."""
    if not gamma.has_cut:
        raise NoCutError("the potential needs a cut")
    arrows = list(gamma.arrows)
    terms = []
    for j in gamma.vertices:
        tj = gamma.tau(j)
        if tj is None:
            continue
        arrows.append(Arrow(ell_arrow(j), j, tj))
        for a in gamma.arrows_in(j):
            b = gamma.sigma(a)
            if b is not None:
                terms.append((gamma.epsilon(a), (ell_arrow(j), a.id, b.id)))
    quiver = Quiver(gamma.vertices, arrows)
    W = Potential(terms)
    W.check_cycles(quiver)
    return quiver, W


def change_cut_sign(gamma, new_cut):
    """eta(a) = -1 exactly on new-cut arrows outside the old cut."""
    if gamma.cut is None:
        raise NoCutError("the quiver has no cut to change")
    try:
        gamma.with_cut(new_cut)
    except (InvalidCutError, ValidationError) as exc:
        raise InvalidCutError(f"invalid new cut: {exc}") from exc
    new_cut = frozenset(new_cut)
    eta = {a.id: (-1 if (a.id in new_cut and a.id not in gamma.cut) else 1) for a in gamma.arrows}
    for a in gamma.arrows:
        b = gamma.sigma(a)
        if b is None:
            continue
        eps = 1 if a.id in gamma.cut else -1
        eps_new = 1 if a.id in new_cut else -1
        assert eta[a.id] * eta[b.id] == eps * eps_new
    return eta


# -- coverings and Euler forms on translation quivers -------------------------


def pushforward_dim(v_tilde):
    """Sum a localized dimension vector over the fibres (x, n) -> x."""
    return DimVector(v_tilde).relabel(lambda v: v[0])


class _Pullback:
    def __init__(self, theta):
        self.theta = theta

    def __call__(self, v):
        return self.theta(v[0])


def pullback_theta(theta):
    return StabilityParam(func=_Pullback(theta))


def cut_euler_form(gamma, m, n):
    """Euler form of the cut subquiver, evaluated through local queries."""
    total = sum(c * n.get(x, 0) for x, c in m.items())
    targets = set(k for k, c in n.items() if c)
    if not targets:
        return total
    for x, c in m.items():
        if not c:
            continue
        for a in gamma.arrows_out(x, within=targets):
            if gamma.in_cut(a):
                total -= c * n[a.target]
    return total


def tau_twist(gamma, v):
    """(v^tau)_x = v_{tau x}."""
    out = {}
    for y, c in v.items():
        x = gamma.tau_inv(y)
        if x is None:
            raise PreconditionError(f"tau^-1 undefined at {render_id(y)}")
        out[x] = c
    return DimVector(out)


def window_is_acyclic(gamma, vertices):
    return gamma.materialize(vertices).quiver.is_acyclic()
