"""The simple extension L = K[theta]/(f) of K = Q."""

from __future__ import annotations

import math

from gmpy2 import mpq

from .factor import is_irreducible, poly_factor
from .poly import QQ, Poly, Rational, format_rational, parse_rational, poly_gcd, poly_xgcd, squarefree_decomposition


class NotIrreducible(ValueError):
    pass


class TowerMismatch(ValueError):
    pass


class FieldTower:
    """L = Q[theta]/(min_poly); min_poly is certified irreducible on construction."""

    def __init__(self, min_poly: Poly, name: str | None = None):
        if min_poly.field is not QQ:
            raise TypeError("min_poly must have rational coefficients")
        min_poly = min_poly.monic()
        if not is_irreducible(min_poly):
            raise NotIrreducible(f"{min_poly} is not irreducible over QQ")
        self.min_poly = min_poly
        self.degree = min_poly.degree
        self.name = name or f"QQ[t]/({min_poly})"
        d = self.degree
        # x^k mod f for k in [d, 2d-2], as coefficient vectors
        self._red = []
        x = Poly.x()
        for k in range(d, 2 * d - 1):
            r = Poly.monomial(1, k) % min_poly
            self._red.append([r[i] for i in range(d)])
        self._red_den = 1
        for row in self._red:
            self._red_den = math.lcm(self._red_den, *(int(c.denominator) for c in row))
        self._ired = [[int(c * self._red_den) for c in row] for row in self._red]
        self._zero = TowerElement(self, (mpq(0),) * d)
        self._one = TowerElement(self, (mpq(1),) + (mpq(0),) * (d - 1))

    @classmethod
    def from_string(cls, spec: str) -> "FieldTower":
        if spec in ("builtin:theta7", "theta7"):
            return theta7()
        raise ValueError(f"unknown tower spec {spec!r}")

    def __repr__(self):
        return f"FieldTower({self.min_poly})"

    def __eq__(self, other):
        return isinstance(other, FieldTower) and self.min_poly == other.min_poly

    def __hash__(self):
        return hash(self.min_poly)

    def __call__(self, x) -> "TowerElement":
        if isinstance(x, TowerElement):
            if x.tower is not self and x.tower != self:
                raise TowerMismatch("element from a different tower")
            return x
        if isinstance(x, (list, tuple)):
            if len(x) > self.degree:
                raise ValueError("coefficient vector too long")
            c = [QQ(a) for a in x] + [mpq(0)] * (self.degree - len(x))
            return TowerElement(self, tuple(c))
        if isinstance(x, str):
            x = parse_rational(x)
        return TowerElement(self, (QQ(x),) + (mpq(0),) * (self.degree - 1))

    def zero(self):
        return self._zero

    def one(self):
        return self._one

    @property
    def theta(self) -> "TowerElement":
        if self.degree == 1:
            return self(-self.min_poly[0])
        return self([0, 1])

    def power_basis(self):
        return [self([0] * k + [1]) for k in range(self.degree)]

    def embed(self, q) -> "TowerElement":
        return self(q)

    def _mul_vec(self, a, b):
        # integer convolution over a common denominator avoids per-step gcds
        d = self.degree
        da = _common_den(a)
        db = _common_den(b)
        ia = [int(x * da) for x in a]
        ib = [int(y * db) for y in b]
        prod = [0] * (2 * d - 1)
        for i, x in enumerate(ia):
            if x:
                for j, y in enumerate(ib):
                    if y:
                        prod[i + j] += x * y
        rd = self._red_den
        out = [c * rd for c in prod[:d]] if rd != 1 else prod[:d]
        for k in range(d, 2 * d - 1):
            c = prod[k]
            if c:
                red = self._ired[k - d]
                for i in range(d):
                    if red[i]:
                        out[i] += c * red[i]
        den = da * db * rd
        return tuple(mpq(c, den) for c in out)


def _common_den(v):
    den = 1
    for x in v:
        q = x.denominator
        if q != 1:
            den = math.lcm(den, int(q))
    return den


class TowerElement:
    __slots__ = ("tower", "c")

    def __init__(self, tower: FieldTower, coeffs):
        self.tower = tower
        self.c = tuple(coeffs)

    def _coerce(self, other):
        if isinstance(other, TowerElement):
            if other.tower is not self.tower and other.tower != self.tower:
                raise TowerMismatch("elements from different towers")
            return other
        return self.tower(other)

    def __add__(self, other):
        o = self._coerce(other)
        return TowerElement(self.tower, tuple(a + b for a, b in zip(self.c, o.c)))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return TowerElement(self.tower, tuple(a - b for a, b in zip(self.c, o.c)))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return TowerElement(self.tower, tuple(-a for a in self.c))

    def __mul__(self, other):
        if isinstance(other, TowerElement):
            if other.tower is not self.tower and other.tower != self.tower:
                raise TowerMismatch("elements from different towers")
            if other.is_rational():
                k = other.c[0]
                return TowerElement(self.tower, tuple(a * k for a in self.c))
            if self.is_rational():
                k = self.c[0]
                return TowerElement(self.tower, tuple(a * k for a in other.c))
            return TowerElement(self.tower, self.tower._mul_vec(self.c, other.c))
        if isinstance(other, Poly):
            return NotImplemented
        k = QQ(other)
        return TowerElement(self.tower, tuple(a * k for a in self.c))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.tower.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, TowerElement):
            return self.c == other.c and (self.tower is other.tower or self.tower == other.tower)
        try:
            return self.c == self.tower(other).c
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        if self.is_rational():
            return hash(self.c[0])
        return hash(self.c)

    def __bool__(self):
        return any(self.c)

    def is_zero(self) -> bool:
        return not any(self.c)

    def is_rational(self) -> bool:
        return not any(self.c[1:])

    def rational(self) -> Rational:
        if not self.is_rational():
            raise ValueError("element is not in K")
        return self.c[0]

    def as_poly(self) -> Poly:
        return Poly._raw(list(self.c), QQ)

    def inverse(self) -> "TowerElement":
        """``ext_inv``: the multiplicative inverse (DivisionByZero for 0)."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in field tower")
        if self.is_rational():
            return self.tower(1 / self.c[0])
        g, s, _ = poly_xgcd(self.as_poly(), self.tower.min_poly)
        # g is a nonzero constant since min_poly is irreducible
        return self.tower([s[i] for i in range(self.tower.degree)])

    def matrix(self):
        """Matrix of multiplication by self on the power basis (rows of columns)."""
        d = self.tower.degree
        cols = [self.tower._mul_vec(self.c, tuple(mpq(1) if i == k else mpq(0) for i in range(d))) for k in range(d)]
        return [[cols[j][i] for j in range(d)] for i in range(d)]

    def norm(self) -> Rational:
        from ..linalg import det_rows

        return det_rows(self.matrix())

    def __repr__(self):
        return f"TowerElement({[format_rational(a) for a in self.c]})"

    def __str__(self):
        terms = []
        for k, a in enumerate(self.c):
            if not a:
                continue
            s = format_rational(a)
            if k == 0:
                terms.append(s)
            else:
                mono = "t" if k == 1 else f"t^{k}"
                terms.append(mono if s == "1" else f"{s}*{mono}")
        return "+".join(terms) if terms else "0"

    def to_json(self):
        return [format_rational(a) for a in self.c]


def ext_inv(e: TowerElement) -> TowerElement:
    return e.inverse()


def ext_minpoly(e: TowerElement) -> Poly:
    """Minimal polynomial of e over Q (kernel of the power-vector matrix)."""
    from ..linalg import kernel_rows

    d = e.tower.degree
    powers = [e.tower.one().c]
    p = e.tower.one()
    for k in range(1, d + 1):
        p = p * e
        powers.append(p.c)
        # columns = powers; find first dependency
        cols = [[powers[j][i] for j in range(k + 1)] for i in range(d)]
        ker = kernel_rows(cols, k + 1)
        if ker:
            v = ker[0]
            return Poly(v, QQ).monic()
    raise AssertionError("unreachable: degree bounded by [L:K]")


_THETA7 = None


def theta7() -> FieldTower:
    """Default tower Q[theta]/(theta^7 - 2)."""
    global _THETA7
    if _THETA7 is None:
        _THETA7 = FieldTower(Poly([-2, 0, 0, 0, 0, 0, 0, 1]), name="builtin:theta7")
    return _THETA7


# ----------------------------------------------------------- factoring in L[x]


def _shift(p: Poly, a) -> Poly:
    """p(x + a) via Horner."""
    field = p.field
    lin = Poly._raw([field(a), field.one()], field)
    acc = Poly._raw([], field)
    for c in reversed(p.coeffs):
        acc = acc * lin + c
    return acc


def _interpolate(xs, ys) -> Poly:
    """Newton interpolation over Q."""
    n = len(xs)
    coef = list(ys)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    p = Poly.const(coef[-1])
    for i in range(n - 2, -1, -1):
        p = p * Poly([-xs[i], 1]) + coef[i]
    return p


def norm_poly(p: Poly) -> Poly:
    """Norm of p in L[x] down to Q[x] (product of the conjugates)."""
    tower = p.field
    deg = p.degree * tower.degree
    xs = [mpq(k) for k in range(deg + 1)]
    ys = [p(tower(xk)).norm() for xk in xs]
    return _interpolate(xs, ys)


def _trager(g: Poly):
    """Irreducible monic factors of a squarefree monic g in L[x]."""
    tower = g.field
    theta = tower.theta
    s = 0
    while True:
        for cand in ([s] if s == 0 else [s, -s]):
            h = _shift(g, theta * (-cand))
            n = norm_poly(h)
            if poly_gcd(n, n.derivative()).degree == 0:
                _, facs = poly_factor(n)
                if len(facs) == 1:
                    return [g]
                out = []
                for nf, _e in facs:
                    nf_l = nf.map_field(tower)
                    f = poly_gcd(g, _shift(nf_l, theta * cand))
                    if f.degree > 0:
                        out.append(f)
                return out
        s += 1


def factor_over_tower(p: Poly):
    """Factor p in L[x]: returns ``(lc, [(q, e), ...])`` with monic irreducible q."""
    tower = p.field
    if p.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    unit = p.lc
    out = []
    for part, mult in squarefree_decomposition(p):
        rational = all(c.is_rational() for c in part.coeffs)
        pieces = []
        if rational:
            qpart = Poly([c.rational() for c in part.coeffs], QQ)
            _, qfacs = poly_factor(qpart)
            for qf, _ in qfacs:
                lf = qf.map_field(tower)
                if math.gcd(qf.degree, tower.degree) == 1:
                    pieces.append(lf)
                else:
                    pieces.extend(_trager(lf))
        else:
            pieces = _trager(part)
        out.extend((q, mult) for q in pieces)
    return unit, out
