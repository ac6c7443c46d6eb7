"""Exact arithmetic in Z[L, L^-1] localized at the factors L^n - 1.

Two value types live here.  ``LaurentPoly`` is a dense integer Laurent
polynomial in the Lefschetz class L.  ``MotiveClass`` is a fraction whose
numerator is a ``LaurentPoly`` and whose denominator is a multiset of
positive integers n, each standing for a factor (L^n - 1).  Both are
immutable and hashable; a ``MotiveClass`` with empty denominator compares
and hashes equal to the corresponding ``LaurentPoly`` (and to a plain int
for constants).

Text form::

    L^4 - L^3 + 1
    (L^2+1)/((L-1)*(L^2-1))
"""

from __future__ import annotations

import re
from collections import Counter
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

from .errors import NotDivisibleError, ParseError, PoleError

_HASH_POINT = 7


class LaurentPoly:
    """Integer Laurent polynomial stored as (lowest degree, coefficient tuple)."""

    __slots__ = ("_low", "_c")

    def __init__(self, coefficients=None):
        if coefficients is None:
            coefficients = {}
        elif isinstance(coefficients, int):
            coefficients = {0: coefficients}
        items = {int(k): int(v) for k, v in dict(coefficients).items() if v}
        if not items:
            self._low, self._c = 0, ()
            return
        low, high = min(items), max(items)
        self._low = low
        self._c = tuple(items.get(k, 0) for k in range(low, high + 1))

    @classmethod
    def _make(cls, low, coeffs):
        # trims zeros at both ends
        start, stop = 0, len(coeffs)
        while start < stop and coeffs[start] == 0:
            start += 1
        while stop > start and coeffs[stop - 1] == 0:
            stop -= 1
        obj = cls.__new__(cls)
        if start == stop:
            obj._low, obj._c = 0, ()
        else:
            obj._low, obj._c = low + start, tuple(coeffs[start:stop])
        return obj

    @classmethod
    def monomial(cls, degree, coefficient=1):
        return cls._make(degree, (coefficient,))

    # -- inspection ---------------------------------------------------------

    @property
    def coefficients(self):
        return {self._low + i: c for i, c in enumerate(self._c) if c}

    def coefficient(self, degree):
        i = degree - self._low
        if 0 <= i < len(self._c):
            return self._c[i]
        return 0

    @property
    def degree(self):
        """Top degree; ``None`` for the zero polynomial."""
        if not self._c:
            return None
        return self._low + len(self._c) - 1

    @property
    def low_degree(self):
        if not self._c:
            return None
        return self._low

    def is_zero(self):
        return not self._c

    def is_monomial(self):
        return sum(1 for c in self._c if c) == 1

    def __bool__(self):
        return bool(self._c)

    def terms(self):
        """(degree, coefficient) pairs in descending degree."""
        return [(self._low + i, c) for i, c in reversed(list(enumerate(self._c))) if c]

    # -- arithmetic ---------------------------------------------------------

    def __neg__(self):
        return LaurentPoly._make(self._low, tuple(-c for c in self._c))

    def __add__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        if not other._c:
            return self
        if not self._c:
            return other
        low = min(self._low, other._low)
        high = max(self._low + len(self._c), other._low + len(other._c))
        out = [0] * (high - low)
        for i, c in enumerate(self._c):
            out[self._low - low + i] += c
        for i, c in enumerate(other._c):
            out[other._low - low + i] += c
        return LaurentPoly._make(low, out)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        if not self._c or not other._c:
            return ZERO_POLY
        a, b = self._c, other._c
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return LaurentPoly._make(self._low + other._low, out)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            if self.is_monomial() and abs(self._c[0]) == 1:
                return LaurentPoly.monomial(-self._low * -k, self._c[0] ** (-k))
            return MotiveClass(self) ** k
        result, base = ONE_POLY, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __truediv__(self, other):
        return MotiveClass(self) / other

    def __rtruediv__(self, other):
        return MotiveClass(other) / MotiveClass(self)

    def shift(self, k):
        """Multiply by L^k."""
        if not self._c:
            return self
        return LaurentPoly._make(self._low + k, self._c)

    def times_cyclotomic_factor(self, n):
        """Multiply by (L^n - 1)."""
        return self.shift(n) - self

    def divisible_by_factor(self, n):
        # L^n == 1 modulo (L^n - 1), so the residue is the sum over degree classes
        if not self._c:
            return True
        sums = [0] * n
        for i, c in enumerate(self._c):
            sums[(self._low + i) % n] += c
        return not any(sums)

    def divide_by_factor(self, n):
        """Exact quotient by (L^n - 1); raises ``NotDivisibleError`` otherwise."""
        c = self._c
        size = len(c)
        if size == 0:
            return self
        if size <= n:
            raise NotDivisibleError(f"not divisible by L^{n}-1")
        q = [0] * (size - n)
        for i in range(size - n):
            q[i] = (q[i - n] if i >= n else 0) - c[i]
        for i in range(size - n, size):
            if c[i] != (q[i - n] if i - n >= 0 else 0):
                raise NotDivisibleError(f"not divisible by L^{n}-1")
        return LaurentPoly._make(self._low, q)

    def divmod_monic(self, divisor):
        """Long division by a monic polynomial (nonnegative degrees, constant term nonzero)."""
        d = divisor._c
        if not d or d[-1] != 1:
            raise ValueError("divisor must be monic")
        rem = list(self._c)
        deg_d = len(d) - 1
        if len(rem) <= deg_d:
            return ZERO_POLY, self
        quot = [0] * (len(rem) - deg_d)
        for i in range(len(rem) - 1, deg_d - 1, -1):
            coef = rem[i]
            if coef:
                quot[i - deg_d] = coef
                for j in range(deg_d + 1):
                    rem[i - deg_d + j] -= coef * d[j]
        low = self._low - divisor._low
        return LaurentPoly._make(low, quot), LaurentPoly._make(self._low, rem)

    def dual(self):
        """Substitute L -> L^-1."""
        if not self._c:
            return self
        return LaurentPoly._make(-self.degree, tuple(reversed(self._c)))

    def evaluate(self, q):
        q = Fraction(q)
        if not self._c:
            return Fraction(0)
        if q == 0 and self._low < 0:
            raise PoleError("negative power of L at q=0")
        acc = Fraction(0)
        for c in reversed(self._c):
            acc = acc * q + c
        return acc * q ** self._low if self._low else acc

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self._low == other._low and self._c == other._c
        if isinstance(other, int):
            return self == LaurentPoly(other)
        return NotImplemented

    def __hash__(self):
        return hash(self.evaluate(_HASH_POINT))

    def __repr__(self):
        return f"LaurentPoly({self})"

    def __str__(self):
        return _render_poly(self, spaced=True)


ZERO_POLY = LaurentPoly()
ONE_POLY = LaurentPoly(1)


def _as_poly(x):
    if isinstance(x, LaurentPoly):
        return x
    if isinstance(x, bool):
        return NotImplemented
    if isinstance(x, int):
        return LaurentPoly(x)
    return NotImplemented


# -- cyclotomic helpers -----------------------------------------------------


def _divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


def _mobius(n):
    result, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    return -result if n > 1 else result


def _euler_phi(n):
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


@lru_cache(maxsize=None)
def cyclotomic(d):
    """The d-th cyclotomic polynomial in L."""
    poly = LaurentPoly({d: 1, 0: -1})
    for m in _divisors(d)[:-1]:
        poly, rem = poly.divmod_monic(cyclotomic(m))
        assert rem.is_zero()
    return poly


def _factor_unit_times_cyclotomics(poly):
    """Write poly = c * L^k * prod Phi_d^e_d with c = +-1; return (c, k, {d: e})."""
    if poly.is_zero():
        raise PoleError("division by zero class")
    k = poly.low_degree
    rem = poly.shift(-k)
    exps = {}
    d = 1
    while rem.degree > 0:
        phi = _euler_phi(d)
        if phi > rem.degree:
            if d > 2 * rem.degree * rem.degree + 2:
                break
            d += 1
            continue
        cyc = cyclotomic(d)
        while rem.degree >= phi:
            q, r = rem.divmod_monic(cyc)
            if not r.is_zero():
                break
            rem = q
            exps[d] = exps.get(d, 0) + 1
        d += 1
    if rem.degree != 0 or abs(rem.coefficient(0)) != 1:
        raise NotDivisibleError(f"cannot invert {poly}: not a unit times cyclotomic factors")
    return rem.coefficient(0), k, exps


# -- MotiveClass ------------------------------------------------------------


def _reduce(num, den):
    if num.is_zero():
        return ZERO_POLY, ()
    pending = sorted(den, reverse=True)
    changed = True
    while changed and pending:
        changed = False
        kept = []
        for n in pending:
            if num.divisible_by_factor(n):
                num = num.divide_by_factor(n)
                changed = True
                continue
            for m in _divisors(n)[:-1]:
                trial = num.times_cyclotomic_factor(m)
                if trial.divisible_by_factor(n):
                    num = trial.divide_by_factor(n)
                    kept.append(m)
                    changed = True
                    break
            else:
                kept.append(n)
        pending = sorted(kept, reverse=True)
    return num, tuple(sorted(pending))


class MotiveClass:
    """numerator / prod (L^n - 1) over the denominator multiset, kept reduced."""

    __slots__ = ("num", "den")

    def __init__(self, numerator=0, denominator=()):
        if isinstance(numerator, MotiveClass):
            num, den = numerator.num, numerator.den + tuple(denominator)
        else:
            num = _as_poly(numerator)
            if num is NotImplemented:
                raise TypeError(f"cannot build a MotiveClass from {numerator!r}")
            den = tuple(denominator)
        for n in den:
            if not isinstance(n, int) or n < 1:
                raise ValueError(f"denominator factors must be positive ints, got {n!r}")
        if den:
            num, den = _reduce(num, den)
        self.num, self.den = num, den

    @classmethod
    def _trusted(cls, num, den):
        obj = cls.__new__(cls)
        obj.num, obj.den = num, den
        return obj

    def is_laurent(self):
        return not self.den

    def to_laurent(self):
        if self.den:
            raise NotDivisibleError(f"{self} is not a Laurent polynomial")
        return self.num

    def is_zero(self):
        return self.num.is_zero()

    # -- arithmetic ---------------------------------------------------------

    def __neg__(self):
        return MotiveClass._trusted(-self.num, self.den)

    def __add__(self, other):
        other = as_class(other)
        if other is NotImplemented:
            return NotImplemented
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        if self.den == other.den:
            return MotiveClass(self.num + other.num, self.den)
        ca, cb = Counter(self.den), Counter(other.den)
        union = ca | cb
        na, nb = self.num, other.num
        for n, k in (union - ca).items():
            for _ in range(k):
                na = na.times_cyclotomic_factor(n)
        for n, k in (union - cb).items():
            for _ in range(k):
                nb = nb.times_cyclotomic_factor(n)
        return MotiveClass(na + nb, tuple(union.elements()))

    __radd__ = __add__

    def __sub__(self, other):
        other = as_class(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = as_class(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = as_class(other)
        if other is NotImplemented:
            return NotImplemented
        num = self.num * other.num
        den = self.den + other.den
        if not den:
            return MotiveClass._trusted(num, ())
        return MotiveClass(num, den)

    __rmul__ = __mul__

    def inverse(self):
        sign, k, exps = _factor_unit_times_cyclotomics(self.num)
        num = LaurentPoly.monomial(-k, sign)
        for n in self.den:
            num = num.times_cyclotomic_factor(n)
        den = []
        for d, e in exps.items():
            # 1/Phi_d = prod_{m | d} (L^m - 1)^(-mu(d/m))
            for m in _divisors(d):
                power = -e * _mobius(d // m)
                if power > 0:
                    for _ in range(power):
                        num = num.times_cyclotomic_factor(m)
                elif power < 0:
                    den.extend([m] * (-power))
        return MotiveClass(num, tuple(den))

    def __truediv__(self, other):
        other = as_class(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = as_class(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def shift(self, k):
        return MotiveClass._trusted(self.num.shift(k), self.den)

    def dual(self):
        # 1/(L^-n - 1) = -L^n/(L^n - 1)
        num = self.num.dual()
        for n in self.den:
            num = num.shift(n)
        if len(self.den) % 2:
            num = -num
        return MotiveClass(num, self.den)

    def evaluate(self, q):
        q = Fraction(q)
        value = self.num.evaluate(q)
        for n in self.den:
            denom = q ** n - 1
            if denom == 0:
                raise PoleError(f"factor L^{n}-1 vanishes at q={q}")
            value /= denom
        return value

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other):
        other = as_class(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den == other.den:
            return self.num == other.num
        ca, cb = Counter(self.den), Counter(other.den)
        common = ca & cb
        lhs, rhs = self.num, other.num
        for n, k in (cb - common).items():
            for _ in range(k):
                lhs = lhs.times_cyclotomic_factor(n)
        for n, k in (ca - common).items():
            for _ in range(k):
                rhs = rhs.times_cyclotomic_factor(n)
        return lhs == rhs

    def __hash__(self):
        return hash(self.evaluate(_HASH_POINT))

    def __repr__(self):
        return f"MotiveClass({self})"

    def __str__(self):
        return render(self)


def as_class(x):
    """Coerce an int, LaurentPoly or MotiveClass to a MotiveClass."""
    if isinstance(x, MotiveClass):
        return x
    if isinstance(x, LaurentPoly):
        return MotiveClass._trusted(x, ())
    if isinstance(x, int) and not isinstance(x, bool):
        return MotiveClass._trusted(LaurentPoly(x), ())
    return NotImplemented


ONE = MotiveClass._trusted(ONE_POLY, ())
ZERO = MotiveClass._trusted(ZERO_POLY, ())
L = LaurentPoly.monomial(1)


def lefschetz(k):
    """L^k as a LaurentPoly."""
    return LaurentPoly.monomial(k)


def dual(a):
    if isinstance(a, LaurentPoly):
        return a.dual()
    return as_class(a).dual()


def evaluate(a, q):
    if not isinstance(q, (Rational, Fraction)):
        q = Fraction(q)
    return as_class(a).evaluate(q)


def q_factorial(n):
    """prod_{k=1}^n (L^k - 1)."""
    poly = ONE_POLY
    for k in range(1, n + 1):
        poly = poly.times_cyclotomic_factor(k)
    return poly


@lru_cache(maxsize=None)
def gl_motive(n):
    """[GL_n] = prod_{k=0}^{n-1} (L^n - L^k)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return q_factorial(n).shift(n * (n - 1) // 2)


@lru_cache(maxsize=None)
def grassmannian_motive(n, r):
    """Gaussian binomial [n choose r] in L."""
    if n < 0 or r < 0:
        raise ValueError("n and r must be nonnegative")
    if r > n:
        return ZERO_POLY
    if r == 0 or r == n:
        return ONE_POLY
    return grassmannian_motive(n - 1, r - 1) + grassmannian_motive(n - 1, r).shift(r)


@lru_cache(maxsize=None)
def pochhammer_inv(n):
    """(L^-1; L^-1)_n = prod_{k=1}^n (1 - L^-k)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return as_class(q_factorial(n).shift(-n * (n + 1) // 2))


# -- rendering --------------------------------------------------------------


def _render_monomial(deg, coef, leading):
    mag = abs(coef)
    if deg == 0:
        body = str(mag)
    else:
        power = "L" if deg == 1 else f"L^{deg}"
        body = power if mag == 1 else f"{mag}*{power}"
    if leading:
        return ("-" if coef < 0 else "") + body
    return body


def _render_poly(poly, spaced):
    terms = poly.terms()
    if not terms:
        return "0"
    parts = []
    for idx, (deg, coef) in enumerate(terms):
        if idx == 0:
            parts.append(_render_monomial(deg, coef, True))
        else:
            op = "-" if coef < 0 else "+"
            sep = f" {op} " if spaced else op
            parts.append(sep + _render_monomial(deg, coef, False))
    return "".join(parts)


def _render_factor(n, k):
    base = "(L-1)" if n == 1 else f"(L^{n}-1)"
    return base if k == 1 else f"{base}^{k}"


def render(a):
    """Render a class in the package's text grammar."""
    a = as_class(a)
    if not a.den:
        return _render_poly(a.num, spaced=True)
    numerator = _render_poly(a.num, spaced=False)
    if len(a.num.terms()) > 1:
        numerator = f"({numerator})"
    counts = sorted(Counter(a.den).items())
    factors = [_render_factor(n, k) for n, k in counts]
    if len(factors) == 1:
        return f"{numerator}/{factors[0]}"
    return f"{numerator}/({'*'.join(factors)})"


# -- parsing ----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(L)|([-+*/^()]))")


def _tokenize(text):
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r} at column {pos + 1}")
        if m.group(1):
            out.append(("int", int(m.group(1))))
        elif m.group(2):
            out.append(("L", None))
        else:
            out.append((m.group(3), None))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return out


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def take(self, kind=None):
        if self.i >= len(self.tokens):
            raise ParseError("unexpected end of expression")
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[0]!r}")
        self.i += 1
        return tok

    def expr(self):
        value = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.unary()
        while self.peek() in ("*", "/"):
            op = self.take()[0]
            rhs = self.unary()
            value = value * rhs if op == "*" else value / rhs
        return value

    def unary(self):
        if self.peek() == "-":
            self.take()
            return -self.unary()
        if self.peek() == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == "^":
            self.take()
            sign = 1
            if self.peek() == "-":
                self.take()
                sign = -1
            exp = sign * self.take("int")[1]
            base = base ** exp
        return base

    def atom(self):
        kind = self.peek()
        if kind == "int":
            return as_class(self.take()[1])
        if kind == "L":
            self.take()
            return as_class(L)
        if kind == "(":
            self.take()
            value = self.expr()
            self.take(")")
            return value
        raise ParseError(f"unexpected token {kind!r}")


def parse_class(text):
    """Parse the rendering grammar back into a MotiveClass."""
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty expression")
    parser = _Parser(tokens)
    try:
        value = parser.expr()
    except NotDivisibleError as exc:
        raise ParseError(str(exc)) from exc
    if parser.i != len(tokens):
        raise ParseError(f"trailing tokens in {text!r}")
    return value
