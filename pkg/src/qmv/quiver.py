"""Finite quivers, dimension vectors, stability parameters and the Euler form.

Vertex and arrow ids are arbitrary hashables internally.  Ids produced by
the lazy constructions in :mod:`qmv.translation` are tuples such as
``("1", 3)``; :func:`render_id` turns them into strings like ``1@3`` for
output and files.
"""

from __future__ import annotations

from collections.abc import Mapping
from fractions import Fraction
from typing import Hashable, NamedTuple

from .errors import NonBijectiveError, PreconditionError, UnknownVertexError, ValidationError


class Arrow(NamedTuple):
    id: Hashable
    source: Hashable
    target: Hashable


def vertex_key(x):
    """Total sort key over the ids we produce (str, int, nested tuples)."""
    if isinstance(x, bool):
        return (0, int(x))
    if isinstance(x, int):
        return (0, x)
    if isinstance(x, str):
        return (1, x)
    if isinstance(x, tuple):
        return (2, tuple(vertex_key(y) for y in x))
    if isinstance(x, Arrow):
        return (3, vertex_key(x.id))
    return (4, repr(x))


def render_id(x):
    """String form of an id; ``(i, n)`` renders as ``i@n``."""
    if isinstance(x, str):
        return x
    if isinstance(x, int):
        return str(x)
    if isinstance(x, tuple):
        if len(x) == 2 and isinstance(x[1], int) and not isinstance(x[1], bool):
            return f"{render_id(x[0])}@{x[1]}"
        if len(x) == 2 and isinstance(x[1], tuple) and all(isinstance(c, int) for c in x[1]):
            return f"{render_id(x[0])}@" + ",".join(map(str, x[1]))
        return ":".join(render_id(y) for y in x)
    return str(x)


class Quiver:
    """A finite quiver with ordered vertices and uniquely named arrows."""

    def __init__(self, vertices, arrows=()):
        self.vertices = tuple(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise ValidationError("duplicate vertex ids")
        vset = set(self.vertices)
        built = []
        for a in arrows:
            a = Arrow(*a)
            if a.source not in vset or a.target not in vset:
                raise UnknownVertexError(f"arrow {render_id(a.id)} has an undeclared endpoint")
            built.append(a)
        self.arrows = tuple(built)
        self._by_id = {}
        for a in self.arrows:
            if a.id in self._by_id:
                raise ValidationError(f"duplicate arrow id {render_id(a.id)}")
            self._by_id[a.id] = a
        self._vset = frozenset(self.vertices)
        self._out = {v: [] for v in self.vertices}
        self._in = {v: [] for v in self.vertices}
        for a in self.arrows:
            self._out[a.source].append(a)
            self._in[a.target].append(a)

    def has_vertex(self, v):
        return v in self._vset

    def arrow(self, arrow_id):
        try:
            return self._by_id[arrow_id]
        except KeyError:
            raise ValidationError(f"unknown arrow {render_id(arrow_id)}") from None

    def has_arrow(self, arrow_id):
        return arrow_id in self._by_id

    def arrows_out(self, v, within=None):
        arrows = self._out.get(v, ())
        if within is None:
            return list(arrows)
        return [a for a in arrows if a.target in within]

    def arrows_in(self, v, within=None):
        arrows = self._in.get(v, ())
        if within is None:
            return list(arrows)
        return [a for a in arrows if a.source in within]

    def full_subquiver(self, vertices):
        keep = [v for v in self.vertices if v in set(vertices)]
        ks = set(keep)
        return Quiver(keep, [a for a in self.arrows if a.source in ks and a.target in ks])

    def opposite(self):
        return Quiver(self.vertices, [Arrow(a.id, a.target, a.source) for a in self.arrows])

    def is_acyclic(self):
        indeg = {v: len(self._in[v]) for v in self.vertices}
        stack = [v for v in self.vertices if indeg[v] == 0]
        seen = 0
        while stack:
            v = stack.pop()
            seen += 1
            for a in self._out[v]:
                indeg[a.target] -= 1
                if indeg[a.target] == 0:
                    stack.append(a.target)
        return seen == len(self.vertices)

    def __eq__(self, other):
        if not isinstance(other, Quiver):
            return NotImplemented
        return self._vset == other._vset and set(self.arrows) == set(other.arrows)

    def __hash__(self):
        return hash((self._vset, frozenset(self.arrows)))

    def __repr__(self):
        return f"Quiver({len(self.vertices)} vertices, {len(self.arrows)} arrows)"


class DimVector(Mapping):
    """Finitely supported vertex -> nonnegative int map; zeros are dropped."""

    __slots__ = ("_d", "_hash")

    def __init__(self, entries=None, **kw):
        data = dict(entries or {}, **kw)
        clean = {}
        for k, v in data.items():
            if not isinstance(v, int) or isinstance(v, bool):
                raise ValidationError(f"dimension at {render_id(k)} must be an int")
            if v < 0:
                raise ValidationError(f"negative dimension at {render_id(k)}")
            if v:
                clean[k] = v
        self._d = clean
        self._hash = None

    def __getitem__(self, k):
        return self._d.get(k, 0)

    def __iter__(self):
        return iter(sorted(self._d, key=vertex_key))

    def __len__(self):
        return len(self._d)

    def __contains__(self, k):
        return k in self._d

    def __eq__(self, other):
        if isinstance(other, DimVector):
            return self._d == other._d
        if isinstance(other, Mapping):
            return self._d == {k: v for k, v in other.items() if v}
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._d.items()))
        return self._hash

    def __add__(self, other):
        out = dict(self._d)
        for k, v in other.items():
            out[k] = out.get(k, 0) + v
        return DimVector(out)

    def __sub__(self, other):
        out = dict(self._d)
        for k, v in other.items():
            out[k] = out.get(k, 0) - v
        return DimVector(out)

    def __le__(self, other):
        return all(v <= other.get(k, 0) for k, v in self._d.items())

    def scale(self, c):
        return DimVector({k: c * v for k, v in self._d.items()})

    @property
    def support(self):
        return frozenset(self._d)

    @property
    def total(self):
        return sum(self._d.values())

    def is_zero(self):
        return not self._d

    def relabel(self, fn):
        """Push entries along a vertex map (summing collisions)."""
        out = {}
        for k, v in self._d.items():
            key = fn(k)
            out[key] = out.get(key, 0) + v
        return DimVector(out)

    def render(self):
        return " ".join(f"{render_id(k)}={v}" for k, v in self.items())

    def __repr__(self):
        return f"DimVector({{{', '.join(f'{render_id(k)!r}: {v}' for k, v in self.items())}}})"


def unit(v):
    return DimVector({v: 1})


class StabilityParam:
    """Rational weights on vertices.

    Either a finite table (with a default for unlisted vertices) or a
    callable, which is how pulled-back parameters on infinite quivers are
    expressed.
    """

    def __init__(self, values=None, default=0, func=None):
        self._values = {k: Fraction(v) for k, v in (values or {}).items()}
        self._default = Fraction(default)
        self._func = func

    def __call__(self, v):
        if self._func is not None:
            return Fraction(self._func(v))
        return self._values.get(v, self._default)

    def dot(self, dims):
        return sum((self(k) * n for k, n in dims.items()), Fraction(0))

    def items(self):
        return self._values.items()

    def __repr__(self):
        if self._func is not None:
            return f"StabilityParam(func={self._func!r})"
        return f"StabilityParam({ {render_id(k): str(v) for k, v in self._values.items()} })"


class QuiverAutomorphism:
    """Vertex and arrow bijections commuting with source and target."""

    def __init__(self, quiver, vertex_map, arrow_map=None):
        self.quiver = quiver
        self.vertex_map = dict(vertex_map)
        self.arrow_map = dict(arrow_map or {})
        self._validate()
        self._vinv = {b: a for a, b in self.vertex_map.items()}
        self._ainv = {b: a for a, b in self.arrow_map.items()}

    @classmethod
    def identity(cls, quiver):
        return cls(quiver, {v: v for v in quiver.vertices}, {a.id: a.id for a in quiver.arrows})

    def _validate(self):
        Q = self.quiver
        vs = set(Q.vertices)
        if set(self.vertex_map) != vs or set(self.vertex_map.values()) != vs:
            raise NonBijectiveError("tau is not a bijection on the vertices")
        ids = {a.id for a in Q.arrows}
        if not self.arrow_map and ids:
            self.arrow_map = _induce_arrow_map(Q, self.vertex_map)
        if set(self.arrow_map) != ids or set(self.arrow_map.values()) != ids:
            raise NonBijectiveError("tau is not a bijection on the arrows")
        for a in Q.arrows:
            b = Q.arrow(self.arrow_map[a.id])
            if b.source != self.vertex_map[a.source] or b.target != self.vertex_map[a.target]:
                raise ValidationError(
                    f"tau does not commute with endpoints at arrow {render_id(a.id)}"
                )

    def __call__(self, v):
        return self.vertex_map[v]

    def inverse_vertex(self, v):
        return self._vinv[v]

    def arrow(self, arrow_id):
        return self.arrow_map[arrow_id]

    def inverse(self):
        return QuiverAutomorphism(self.quiver, self._vinv, self._ainv)

    def is_identity(self):
        return all(k == v for k, v in self.vertex_map.items()) and all(
            k == v for k, v in self.arrow_map.items()
        )


def _induce_arrow_map(Q, vmap):
    """Match arrows by endpoints, in declaration order; fails on ambiguity only if impossible."""
    pools = {}
    for a in Q.arrows:
        pools.setdefault((a.source, a.target), []).append(a.id)
    used = {k: 0 for k in pools}
    out = {}
    for a in Q.arrows:
        key = (vmap[a.source], vmap[a.target])
        pool = pools.get(key, [])
        i = used.get(key, 0)
        if i >= len(pool):
            raise NonBijectiveError(f"no image for arrow {render_id(a.id)} under tau")
        out[a.id] = pool[i]
        used[key] = i + 1
    return out


def _check_support(Q, *vectors):
    for vec in vectors:
        for k in vec:
            if not Q.has_vertex(k):
                raise UnknownVertexError(f"unknown vertex {render_id(k)}")


def euler_form(Q, m, n):
    """chi(m, n) = sum_i m_i n_i - sum_{a: i -> j} m_i n_j."""
    _check_support(Q, m, n)
    total = sum(m[i] * n.get(i, 0) for i in m)
    for i, mi in m.items():
        if mi:
            for a in Q.arrows_out(i):
                total -= mi * n.get(a.target, 0)
    return total


def twist_dimvector(v, tau):
    """(v^tau)_i = v_{tau i}; supported on tau^-1 of the support of v."""
    if isinstance(tau, QuiverAutomorphism):
        inv = tau.inverse_vertex
    elif hasattr(tau, "tau_inv"):
        inv = tau.tau_inv
    else:
        raise TypeError("expected a QuiverAutomorphism or a translation quiver")
    return DimVector({inv(k): c for k, c in v.items()})


def slope(theta, v):
    total = sum(v.values())
    if total == 0:
        raise PreconditionError("slope of the zero vector")
    return theta.dot(v) / total
