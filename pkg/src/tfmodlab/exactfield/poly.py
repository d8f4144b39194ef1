"""Dense univariate polynomials over an exact field.

Coefficients are stored lowest degree first.  The field is either the
rationals ``QQ`` or a :class:`~tfmodlab.exactfield.tower.FieldTower`; both
expose ``zero()``, ``one()`` and coercion by calling.
"""

from __future__ import annotations

from gmpy2 import mpq

Rational = type(mpq(0))


class RationalField:
    """The base field K = Q."""

    name = "QQ"
    degree = 1

    def __call__(self, x) -> Rational:
        if isinstance(x, Rational):
            return x
        if isinstance(x, str):
            return parse_rational(x)
        return mpq(x)

    def zero(self):
        return mpq(0)

    def one(self):
        return mpq(1)

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")


QQ = RationalField()


def parse_rational(s: str) -> Rational:
    s = s.strip()
    if "/" in s:
        a, b = s.split("/")
        return mpq(int(a), int(b))
    return mpq(int(s))


def format_rational(q) -> str:
    q = mpq(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class Poly:
    __slots__ = ("coeffs", "field")

    def __init__(self, coeffs, field=QQ):
        c = [field(a) for a in coeffs]
        while c and not c[-1]:
            c.pop()
        self.coeffs = tuple(c)
        self.field = field

    @classmethod
    def _raw(cls, coeffs, field):
        # trusted constructor: coeffs already coerced
        c = list(coeffs)
        while c and not c[-1]:
            c.pop()
        p = object.__new__(cls)
        p.coeffs = tuple(c)
        p.field = field
        return p

    @classmethod
    def x(cls, field=QQ):
        return cls._raw([field.zero(), field.one()], field)

    @classmethod
    def const(cls, c, field=QQ):
        return cls._raw([field(c)], field)

    @classmethod
    def monomial(cls, c, k, field=QQ):
        return cls._raw([field.zero()] * k + [field(c)], field)

    # -- basic queries
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    @property
    def lc(self):
        return self.coeffs[-1] if self.coeffs else self.field.zero()

    def __getitem__(self, k):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return self.field.zero()

    def __len__(self):
        return len(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other, self.field)
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Poly({[str(c) for c in self.coeffs]}, {self.field!r})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            cs = str(c)
            if k == 0:
                terms.append(cs)
            else:
                mono = "x" if k == 1 else f"x^{k}"
                terms.append(mono if cs == "1" else f"({cs})*{mono}")
        return " + ".join(terms)

    # -- arithmetic
    def _coerce(self, other):
        if isinstance(other, Poly):
            return other
        return Poly._raw([self.field(other)], self.field)

    def __add__(self, other):
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Poly._raw(out, self.field)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw([-c for c in self.coeffs], self.field)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = self.field(other)
            return Poly._raw([a * c for a in self.coeffs], self.field)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly._raw([], self.field)
        zero = self.field.zero()
        out = [zero] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                out[i + j] = out[i + j] + x * y
        return Poly._raw(out, self.field)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = Poly.const(1, self.field)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def divmod(self, other: "Poly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        db = other.degree
        inv = 1 / other.lc if self.field is QQ else other.lc.inverse()
        zero = self.field.zero()
        if len(r) - 1 < db:
            return Poly._raw([], self.field), self
        q = [zero] * (len(r) - db)
        bc = other.coeffs
        for k in range(len(r) - 1, db - 1, -1):
            c = r[k]
            if not c:
                continue
            c = c * inv
            q[k - db] = c
            for j in range(db + 1):
                r[k - db + j] = r[k - db + j] - c * bc[j]
        return Poly._raw(q, self.field), Poly._raw(r[:db], self.field)

    def __floordiv__(self, other):
        return self.divmod(self._coerce(other))[0]

    def __mod__(self, other):
        return self.divmod(self._coerce(other))[1]

    def exact_div(self, other: "Poly") -> "Poly":
        q, r = self.divmod(other)
        if r:
            raise ArithmeticError("inexact polynomial division")
        return q

    def monic(self) -> "Poly":
        if not self.coeffs:
            return self
        lc = self.lc
        inv = 1 / lc if self.field is QQ else lc.inverse()
        return Poly._raw([c * inv for c in self.coeffs], self.field)

    def derivative(self) -> "Poly":
        return Poly._raw([c * k for k, c in enumerate(self.coeffs) if k], self.field)

    def __call__(self, x):
        acc = None
        for c in reversed(self.coeffs):
            acc = c if acc is None else acc * x + c
        if acc is None:
            return self.field.zero() if not isinstance(x, Poly) else Poly._raw([], self.field)
        return acc

    def compose(self, other: "Poly") -> "Poly":
        acc = Poly._raw([], self.field)
        for c in reversed(self.coeffs):
            acc = acc * other + c
        return acc

    def shift_x(self, k: int) -> "Poly":
        """Multiply by x^k."""
        if not self.coeffs:
            return self
        return Poly._raw([self.field.zero()] * k + list(self.coeffs), self.field)

    def x_valuation(self) -> int:
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        raise ValueError("valuation of zero polynomial")

    def map_field(self, field) -> "Poly":
        return Poly([field(c) for c in self.coeffs], field)


def poly_gcd(p: Poly, q: Poly) -> Poly:
    """Monic gcd; ``poly_gcd(0, 0) == 0``."""
    a, b = p, q
    while b:
        a, b = b, a % b
    return a.monic()


def poly_xgcd(p: Poly, q: Poly):
    """Return ``(g, s, t)`` with ``s*p + t*q == g`` and ``g`` monic."""
    field = p.field
    r0, r1 = p, q
    s0, s1 = Poly.const(1, field), Poly._raw([], field)
    t0, t1 = Poly._raw([], field), Poly.const(1, field)
    while r1:
        quo, rem = r0.divmod(r1)
        r0, r1 = r1, rem
        s0, s1 = s1, s0 - quo * s1
        t0, t1 = t1, t0 - quo * t1
    if not r0:
        return r0, s0, t0
    lc = r0.lc
    inv = 1 / lc if field is QQ else lc.inverse()
    return r0 * inv, s0 * inv, t0 * inv


def poly_lcm(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return Poly._raw([], p.field)
    return (p * q).exact_div(poly_gcd(p, q)).monic()


def squarefree_decomposition(p: Poly):
    """Yun's algorithm over a characteristic-zero field.

    Returns ``[(a_1, 1), (a_2, 2), ...]`` with monic squarefree, pairwise
    coprime ``a_i`` (trivial ones dropped) and ``monic(p) == prod a_i^i``.
    """
    f = p.monic()
    if f.degree <= 0:
        return []
    out = []
    df = f.derivative()
    a = poly_gcd(f, df)
    b = f.exact_div(a)
    c = df.exact_div(a)
    d = c - b.derivative()
    i = 1
    while b.degree > 0:
        a = poly_gcd(b, d)
        if a.degree > 0:
            out.append((a, i))
        b = b.exact_div(a)
        c = d.exact_div(a)
        d = c - b.derivative()
        i += 1
    return out
