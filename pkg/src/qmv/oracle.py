"""Brute-force ground truth at tiny sizes.

Nothing here shares code with the class engines: point counts enumerate
matrices over F_q directly and Hom spaces are solved as linear systems.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import CapExceededError, ValidationError
from .quiver import Arrow, DimVector, Quiver, render_id
from .translation import mesh_relation

BIT_CAP = 24


# -- linear algebra ---------------------------------------------------------


def _integer_rows(rows):
    out = []
    for row in rows:
        row = [Fraction(x) for x in row]
        scale = 1
        for x in row:
            scale = scale * x.denominator // math.gcd(scale, x.denominator)
        out.append([int(x * scale) for x in row])
    return out


def rank(rows):
    """Rank over Q by fraction-free (Bareiss) elimination."""
    mat = _integer_rows(rows)
    if not mat:
        return 0
    ncols = len(mat[0])
    r, prev = 0, 1
    for c in range(ncols):
        pivot = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        for i in range(r + 1, len(mat)):
            for j in range(c + 1, ncols):
                mat[i][j] = (mat[r][c] * mat[i][j] - mat[i][c] * mat[r][j]) // prev
            mat[i][c] = 0
        prev = mat[r][c]
        r += 1
        if r == len(mat):
            break
    return r


@dataclass
class ExplicitRep:
    """Vector space dimensions per vertex and a matrix (rows = target) per arrow."""

    quiver: Quiver
    dims: dict
    matrices: dict

    def __post_init__(self):
        self.dims = {v: self.dims.get(v, 0) for v in self.quiver.vertices}
        for a in self.quiver.arrows:
            mat = self.matrices.get(a.id)
            rows, cols = self.dims[a.target], self.dims[a.source]
            if mat is None:
                mat = [[0] * cols for _ in range(rows)]
                self.matrices[a.id] = mat
            if len(mat) != rows or any(len(r) != cols for r in mat):
                raise ValidationError(f"matrix of {render_id(a.id)} has the wrong shape")

    @property
    def dimension_vector(self):
        return DimVector(self.dims)


def _hom_system(M, N):
    Q = M.quiver
    offsets, n_unknowns = {}, 0
    for v in Q.vertices:
        offsets[v] = n_unknowns
        n_unknowns += N.dims[v] * M.dims[v]

    def var(v, r, c):  # entry (r, c) of psi_v: M_v -> N_v
        return offsets[v] + r * M.dims[v] + c

    rows = []
    for a in Q.arrows:
        s, t = a.source, a.target
        Na, Ma = N.matrices[a.id], M.matrices[a.id]
        # (N_a psi_s - psi_t M_a)[r][c] = 0
        for r in range(N.dims[t]):
            for c in range(M.dims[s]):
                row = [0] * n_unknowns
                for k in range(N.dims[s]):
                    if Na[r][k]:
                        row[var(s, k, c)] += Na[r][k]
                for k in range(M.dims[t]):
                    if Ma[k][c]:
                        row[var(t, r, k)] -= Ma[k][c]
                rows.append(row)
    return rows, n_unknowns


def hom_dim_explicit(M, N):
    """dim of {(psi_v)} with N_a psi_s = psi_t M_a for all arrows."""
    if M.quiver is not N.quiver and M.quiver != N.quiver:
        raise ValidationError("representations live on different quivers")
    rows, n = _hom_system(M, N)
    if n == 0:
        return 0
    return n - rank(rows)


def ext1_dim_explicit(M, N):
    """Cokernel dimension of the commutator map; valid for quivers without relations."""
    rows, n = _hom_system(M, N)
    return len(rows) - (rank(rows) if n else 0)


def ainfinity_window(lo, hi):
    """Linear quiver on lo..hi with arrows m+1 -> m."""
    verts = list(range(lo, hi + 1))
    return Quiver(verts, [Arrow(("d", m), m + 1, m) for m in range(lo, hi)])


def interval_rep(window, p, q):
    dims = {m: (1 if p <= m <= q else 0) for m in window.vertices}
    mats = {}
    for a in window.arrows:
        s, t = a.source, a.target
        mats[a.id] = [[1]] if dims[s] and dims[t] else [[0] * dims[s] for _ in range(dims[t])]
    return ExplicitRep(window, dims, mats)


def random_rep(quiver, dims, rng, lo=-2, hi=2):
    mats = {}
    for a in quiver.arrows:
        mats[a.id] = [
            [rng.randint(lo, hi) for _ in range(dims.get(a.source, 0))]
            for _ in range(dims.get(a.target, 0))
        ]
    return ExplicitRep(quiver, dict(dims), mats)


# -- point counts -------------------------------------------------------------


def _matmul(A, B, q):
    if not A or not B:
        rows = len(A)
        cols = len(B[0]) if B else 0
        return [[0] * cols for _ in range(rows)]
    inner = len(B)
    cols = len(B[0])
    return [[sum(A[i][k] * B[k][j] for k in range(inner)) % q for j in range(cols)] for i in range(len(A))]


def _all_matrices(rows, cols, q):
    for flat in itertools.product(range(q), repeat=rows * cols):
        yield [list(flat[r * cols:(r + 1) * cols]) for r in range(rows)]


def enumeration_bits(quiver, v, q):
    return sum(v.get(a.source, 0) * v.get(a.target, 0) for a in quiver.arrows) * math.log2(q)


def count_points(quiver, relations, v, q):
    """Number of F_q representations of dimension v satisfying every relation."""
    v = DimVector(v)
    for x in v:
        if not quiver.has_vertex(x):
            raise ValidationError(f"dimension at unknown vertex {render_id(x)}")
    bits = enumeration_bits(quiver, v, q)
    if bits > BIT_CAP + 1e-9:
        raise CapExceededError(f"enumeration needs {bits:.1f} bits, cap is {BIT_CAP}")
    slots = [a for a in quiver.arrows if v[a.source] and v[a.target]]
    position = {a.id: i for i, a in enumerate(slots)}

    checks = [[] for _ in slots]
    for rel in relations:
        terms = []
        for coef, path in rel.items():
            arrows = [quiver.arrow(a) for a in path]
            if any(a.id not in position for a in arrows):
                continue  # passes through a zero space
            terms.append((coef, arrows))
        if not terms:
            continue
        tgt, src = terms[0][1][0].target, terms[0][1][-1].source
        if not v[tgt] or not v[src]:
            continue
        last = max(position[a.id] for _, arrows in terms for a in arrows)
        checks[last].append((terms, v[tgt], v[src]))

    def satisfied(assign, terms, rows, cols):
        total = [[0] * cols for _ in range(rows)]
        for coef, arrows in terms:
            prod = assign[arrows[0].id]
            for a in arrows[1:]:
                prod = _matmul(prod, assign[a.id], q)
            for i in range(rows):
                for j in range(cols):
                    total[i][j] = (total[i][j] + coef * prod[i][j]) % q
        return not any(any(row) for row in total)

    assign = {}

    def rec(depth):
        if depth == len(slots):
            return 1
        a = slots[depth]
        count = 0
        for mat in _all_matrices(v[a.target], v[a.source], q):
            assign[a.id] = mat
            if all(satisfied(assign, *chk) for chk in checks[depth]):
                count += rec(depth + 1)
        del assign[a.id]
        return count

    return rec(0)


def count_mesh_points(gamma, v, q):
    """F_q-points of the mesh-algebra representation space of dimension v."""
    v = DimVector(v)
    window = gamma.materialize(v.support)
    relations = [rel for _, rel in mesh_relation(window)]
    return count_points(window.quiver, relations, v, q)


def count_gl(n, q):
    """|GL_n(F_q)| by enumerating invertible matrices."""
    return sum(1 for m in _all_matrices(n, n, q) if _rank_mod(m, q) == n)


def _rank_mod(mat, q):
    m = [row[:] for row in mat]
    r = 0
    cols = len(m[0]) if m else 0
    for c in range(cols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] % q), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = pow(m[r][c], q - 2, q)
        m[r] = [(x * inv) % q for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(x - f * y) % q for x, y in zip(m[i], m[r])]
        r += 1
    return r


def count_quotients(n, r, q):
    """Number of r-dimensional quotients of F_q^n (surjections modulo GL_r)."""
    if r > n:
        return 0
    surjections = sum(1 for m in _all_matrices(r, n, q) if _rank_mod(m, q) == r) if r else 1
    return surjections // (count_gl(r, q) if r else 1)
