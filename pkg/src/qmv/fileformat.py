"""Line-oriented quiver file format.

One directive per line, ``#`` starts a comment::

    vertex <id>
    arrow <id> <source> <target>
    tau <x> <y>            # vertex map, or arrow map when x is an arrow id
    sigma <a> <b>          # explicit semitranslation (translation quiver given directly)
    partial                # allow tau/sigma to be partial
    cut <arrow>
    weight <arrow> <int>
    dim <vertex> <int>
    theta <vertex> <rational>
    framing <vertex> <int>
    double | repetition | localize e=<int> | frame | stabilize

Ids are whitespace-free tokens without ``@``; ``@`` is reserved for
lifted vertices ``i@n`` (and ``*@n`` for stable framing vertices), which
may appear in ``dim`` and ``theta`` lines after a Z-indexed construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import NonBijectiveError, ParseError, ValidationError
from .quiver import Arrow, DimVector, Quiver, QuiverAutomorphism, StabilityParam, render_id, vertex_key
from .translation import (
    FRAME,
    Framed,
    Localization,
    Repetition,
    StableFramed,
    TranslationQuiver,
    WeightMap,
    frame,
    twisted_double,
)

CONSTRUCTIONS = ("double", "repetition", "localize", "frame", "stabilize")
_Z_INDEXED = {"repetition", "localize", "stabilize"}


@dataclass
class QuiverFile:
    vertices: list = field(default_factory=list)
    arrows: list = field(default_factory=list)
    tau: dict = field(default_factory=dict)
    tau_arrows: dict = field(default_factory=dict)
    sigma: dict = field(default_factory=dict)
    partial: bool = False
    cut: list = field(default_factory=list)
    weights: dict = field(default_factory=dict)
    dims: dict = field(default_factory=dict)
    theta: dict = field(default_factory=dict)
    framing: dict = field(default_factory=dict)
    constructions: list = field(default_factory=list)

    @property
    def quiver(self):
        return Quiver(self.vertices, [Arrow(*a) for a in self.arrows])

    def automorphism(self):
        """tau as a QuiverAutomorphism (identity when no tau lines were given)."""
        Q = self.quiver
        if not self.tau:
            if self.tau_arrows:
                raise ValidationError("arrow tau lines need vertex tau lines too")
            return QuiverAutomorphism.identity(Q)
        return QuiverAutomorphism(Q, self.tau, self.tau_arrows or None)

    def translation_quiver(self):
        """The explicitly described translation quiver (sigma lines present)."""
        cut = set(self.cut) if (self.cut or not self.arrows) else None
        return TranslationQuiver(self.quiver, self.tau, self.sigma, cut, partial=self.partial)

    def is_z_indexed(self):
        return any(name in _Z_INDEXED for name, _ in self.constructions)


def _tokens(line):
    return line.split("#", 1)[0].split()


def _int(tok, lineno, what):
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {tok!r}", lineno) from None


def _check_id(tok, lineno):
    if "@" in tok or tok == FRAME:
        raise ParseError(f"id {tok!r} uses a reserved character", lineno)
    return tok


def parse_quiver(text):
    """Parse and validate a quiver file."""
    qf = QuiverFile()
    seen_vertices, seen_arrows = set(), set()
    lifted_refs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = _tokens(raw)
        if not toks:
            continue
        head, args = toks[0], toks[1:]

        def need(k):
            if len(args) != k:
                raise ParseError(f"'{head}' expects {k} argument(s), got {len(args)}", lineno)

        if head == "vertex":
            need(1)
            v = _check_id(args[0], lineno)
            if v in seen_vertices:
                raise ParseError(f"duplicate vertex {v}", lineno)
            seen_vertices.add(v)
            qf.vertices.append(v)
        elif head == "arrow":
            need(3)
            a, s, t = _check_id(args[0], lineno), args[1], args[2]
            if a in seen_arrows:
                raise ParseError(f"duplicate arrow {a}", lineno)
            for end in (s, t):
                if end not in seen_vertices:
                    raise ParseError(f"arrow {a} has undeclared endpoint {end}", lineno)
            seen_arrows.add(a)
            qf.arrows.append((a, s, t))
        elif head == "tau":
            need(2)
            x, y = args
            if x in seen_vertices:
                if y not in seen_vertices:
                    raise ParseError(f"tau maps vertex {x} to unknown vertex {y}", lineno)
                if x in qf.tau:
                    raise ParseError(f"tau of {x} given twice", lineno)
                qf.tau[x] = y
            elif x in seen_arrows:
                if y not in seen_arrows:
                    raise ParseError(f"tau maps arrow {x} to unknown arrow {y}", lineno)
                qf.tau_arrows[x] = y
            else:
                raise ParseError(f"tau of unknown id {x}", lineno)
        elif head == "sigma":
            need(2)
            a, b = args
            for x in (a, b):
                if x not in seen_arrows:
                    raise ParseError(f"sigma mentions unknown arrow {x}", lineno)
            qf.sigma[a] = b
        elif head == "partial":
            need(0)
            qf.partial = True
        elif head == "cut":
            need(1)
            if args[0] not in seen_arrows:
                raise ParseError(f"cut mentions unknown arrow {args[0]}", lineno)
            qf.cut.append(args[0])
        elif head == "weight":
            need(2)
            qf.weights[args[0]] = _int(args[1], lineno, "weight")
        elif head == "dim":
            need(2)
            n = _int(args[1], lineno, "dimension")
            if n < 0:
                raise ParseError("dimension must be nonnegative", lineno)
            qf.dims[args[0]] = n
            lifted_refs.append((args[0], lineno))
        elif head == "theta":
            need(2)
            try:
                qf.theta[args[0]] = Fraction(args[1])
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"theta must be rational, got {args[1]!r}", lineno) from None
            lifted_refs.append((args[0], lineno))
        elif head == "framing":
            need(2)
            n = _int(args[1], lineno, "framing")
            if n < 0:
                raise ParseError("framing must be nonnegative", lineno)
            qf.framing[args[0]] = n
            lifted_refs.append((args[0], lineno))
        elif head in CONSTRUCTIONS:
            params = {}
            for arg in args:
                if "=" not in arg:
                    raise ParseError(f"malformed parameter {arg!r}", lineno)
                key, val = arg.split("=", 1)
                params[key] = _int(val, lineno, key)
            if head == "localize" and set(params) != {"e"}:
                raise ParseError("localize expects exactly e=<int>", lineno)
            if head != "localize" and params:
                raise ParseError(f"'{head}' takes no parameters", lineno)
            qf.constructions.append((head, params))
        else:
            raise ParseError(f"unknown directive {head!r}", lineno)

    z_indexed = qf.is_z_indexed()
    for ref, lineno in lifted_refs:
        if ref in seen_vertices:
            continue
        base, _, idx = ref.partition("@")
        ok = z_indexed and (base in seen_vertices or base == FRAME)
        if ok:
            ok = all(part.lstrip("-").isdigit() for part in idx.split("@"))
        if not ok:
            raise ParseError(f"unknown vertex {ref}", lineno)
    _semantic_checks(qf)
    return qf


def _semantic_checks(qf):
    Q = qf.quiver
    if qf.sigma:
        qf.translation_quiver()
        return
    if qf.tau:
        if not qf.partial:
            vs = set(qf.vertices)
            if set(qf.tau) != vs or set(qf.tau.values()) != vs:
                raise NonBijectiveError("tau is not a bijection on the vertices")
            qf.automorphism()
        elif len(set(qf.tau.values())) != len(qf.tau):
            raise NonBijectiveError("tau is not injective")
    for a in qf.cut:
        Q.arrow(a)


def resolve_vertex(token, base_vertices):
    """'i@n@m' -> ((i, n), m); '*@n' -> ('*', n); plain ids pass through."""
    if not isinstance(token, str) or token in base_vertices:
        return token
    parts = token.split("@")
    v = parts[0]
    for p in parts[1:]:
        v = (v, int(p))
    return v


def build(qf):
    """Apply the construction directives; returns a quiver-like object.

    Without constructions this is the plain ``Quiver`` or, when sigma lines
    are present, the explicit ``TranslationQuiver``.
    """
    Q = qf.quiver
    current = qf.translation_quiver() if qf.sigma else None
    framed_from = None
    for name, params in qf.constructions:
        if current is None and qf.tau and name in ("localize", "frame", "stabilize"):
            # tau lines without sigma lines describe an arrow-free translation quiver
            current = qf.translation_quiver()
        if name == "double":
            if current is not None:
                raise ValidationError("double applies to the base quiver only")
            current = twisted_double(Q, qf.automorphism())
        elif name == "repetition":
            if current is not None:
                raise ValidationError("repetition applies to the base quiver only")
            if qf.tau and not qf.automorphism().is_identity():
                raise ValidationError("repetition needs tau = identity")
            current = Repetition(Q)
        elif name == "localize":
            if current is None:
                raise ValidationError("localize needs a translation quiver (use double first)")
            current = Localization(current, weight_map_from(qf, current, params["e"]))
        elif name == "frame":
            if current is None:
                raise ValidationError("frame needs a translation quiver")
            framed_from = current
            current = frame(current, _framing(qf, current)) if isinstance(
                current, TranslationQuiver
            ) else Framed(current, _framing(qf, current))
        elif name == "stabilize":
            base = framed_from if framed_from is not None else current
            if base is None:
                raise ValidationError("stabilize needs a translation quiver")
            current = StableFramed(base, _framing(qf, base))
            framed_from = None
    return current if current is not None else Q


def _framing(qf, gamma):
    base = set(qf.vertices)
    return {resolve_vertex(k, base): v for k, v in qf.framing.items() if v}


def weight_map_from(qf, gamma, e):
    weights = {}
    for name, value in qf.weights.items():
        weights[name] = value
    if isinstance(gamma, TranslationQuiver):
        ids = {a.id for a in gamma.arrows}
        unknown = set(weights) - ids
        if unknown:
            raise ValidationError(f"weights for unknown arrows: {sorted(unknown)}")
        if set(weights) == ids:
            return WeightMap(gamma, e, weights=weights)
        missing = [a.id for a in gamma.arrows if gamma.in_cut(a) and a.id not in weights]
        if missing:
            raise ValidationError(f"missing weights for cut arrows: {sorted(missing, key=vertex_key)}")
        extra = [k for k in weights if not gamma.in_cut(gamma.arrow(k))]
        if extra:
            raise ValidationError("give weights on the cut only, or on every arrow")
        return WeightMap(gamma, e, cut_weights=weights)
    raise ValidationError("localize over a lazy quiver is not supported from files")


def dims_from(qf, key="dims"):
    table = getattr(qf, key)
    return DimVector({resolve_vertex(k, set(qf.vertices)): v for k, v in table.items()})


def theta_from(qf):
    return StabilityParam({resolve_vertex(k, set(qf.vertices)): v for k, v in qf.theta.items()})


# -- rendering --------------------------------------------------------------


def render_quiver_file(qf):
    lines = [f"vertex {v}" for v in qf.vertices]
    lines += [f"arrow {a} {s} {t}" for a, s, t in qf.arrows]
    lines += [f"tau {x} {y}" for x, y in qf.tau.items()]
    lines += [f"tau {x} {y}" for x, y in qf.tau_arrows.items()]
    if qf.partial:
        lines.append("partial")
    lines += [f"sigma {a} {b}" for a, b in qf.sigma.items()]
    lines += [f"cut {a}" for a in qf.cut]
    lines += [f"weight {a} {w}" for a, w in qf.weights.items()]
    lines += [f"framing {v} {n}" for v, n in qf.framing.items()]
    lines += [f"dim {v} {n}" for v, n in qf.dims.items()]
    lines += [f"theta {v} {t}" for v, t in qf.theta.items()]
    for name, params in qf.constructions:
        extra = "".join(f" {k}={v}" for k, v in params.items())
        lines.append(name + extra)
    return "\n".join(lines) + "\n"


def render_quiver(Q):
    lines = [f"vertex {render_id(v)}" for v in Q.vertices]
    lines += [f"arrow {render_id(a.id)} {render_id(a.source)} {render_id(a.target)}" for a in Q.arrows]
    return "\n".join(lines) + "\n"


def render_translation_quiver(gamma):
    """Text form of a finite translation quiver with explicit tau and sigma lines."""
    lines = [render_quiver(gamma.quiver).rstrip("\n")]
    if gamma.partial:
        lines.append("partial")
    for v in gamma.vertices:
        t = gamma.tau(v)
        if t is not None:
            lines.append(f"tau {render_id(v)} {render_id(t)}")
    for a in gamma.arrows:
        b = gamma.sigma(a)
        if b is not None:
            lines.append(f"sigma {render_id(a.id)} {render_id(b.id)}")
    if gamma.cut is not None:
        for a in gamma.arrows:
            if a.id in gamma.cut:
                lines.append(f"cut {render_id(a.id)}")
    return "\n".join(line for line in lines if line) + "\n"


def stringify(gamma):
    """Relabel a finite translation quiver so every id is its rendered string."""
    Q = gamma.quiver
    names = {v: render_id(v) for v in Q.vertices}
    anames = {a.id: render_id(a.id) for a in Q.arrows}
    if len(set(names.values())) != len(names) or len(set(anames.values())) != len(anames):
        raise ValidationError("rendered ids collide")
    quiver = Quiver(
        [names[v] for v in Q.vertices],
        [Arrow(anames[a.id], names[a.source], names[a.target]) for a in Q.arrows],
    )
    tau = {names[v]: names[gamma.tau(v)] for v in Q.vertices if gamma.tau(v) is not None}
    sigma = {
        anames[a.id]: anames[gamma.sigma(a).id] for a in Q.arrows if gamma.sigma(a) is not None
    }
    cut = None if gamma.cut is None else {anames[a] for a in gamma.cut}
    return TranslationQuiver(quiver, tau, sigma, cut, partial=gamma.partial)


def parse_translation_quiver(text):
    return parse_quiver(text).translation_quiver()
