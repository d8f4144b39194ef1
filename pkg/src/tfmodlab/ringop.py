"""Ideals and torsion-free modules over R = K + xL[x].

Every nonzero ideal is stored exactly as ``G (V + xS)`` where ``S = L[x]``,
``G = x^e h`` with ``h(0) = 1`` generates ``IS`` and ``V`` is a nonzero
K-subspace of L.  This is possible because I always contains ``I x S``
(the conductor ``xS`` lies in R).  Modules of rank n are stored the same way:
``N = B (V + xS^n)`` with B an n x n matrix over S spanning ``NS``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field as dc_field

from gmpy2 import mpq

from . import polymat
from .exactfield import Poly, factor_over_tower, poly_gcd, poly_xgcd, theta7
from .exactfield.tower import TowerElement
from .linalg import Matrix, kernel_rows, rref_rows, solve
from .pairs import (PairModule, UncertifiedFactors, decompose, direct_sum_all, free_pair, is_free,
                    is_isomorphic, k_basis)


class RingError(ValueError):
    pass


class ZeroElement(RingError):
    pass


class ZeroIdeal(RingError):
    pass


class UnitIdeal(RingError):
    pass


class SupportMismatch(RingError):
    pass


class RankMismatch(RingError):
    pass


class NotFullRank(RingError):
    pass


class NotLocalSubmodule(RingError):
    pass


class UnrepresentableDescriptor(RingError):
    pass


class GenusMismatch(RingError):
    pass


# ------------------------------------------------------------------ elements


def element(r, tower=None) -> Poly:
    """Coerce ``r`` to a polynomial over L (no membership check)."""
    tower = tower or theta7()
    if isinstance(r, Poly):
        return r if r.field == tower else r.map_field(tower)
    if isinstance(r, (list, tuple)):
        return Poly([tower(c) for c in r], tower)
    return Poly.const(tower(r), tower)


def in_R(p: Poly) -> bool:
    return not p or p[0].is_rational()


def _x_power(k, tower):
    return Poly.monomial(1, k, tower)


def _split_x(p: Poly):
    e = p.x_valuation()
    return e, Poly._raw(p.coeffs[e:], p.field)


def _normalized(p: Poly):
    """``(c, p / c)`` with ``c = p(0)`` nonzero."""
    c = p[0]
    return c, p * c.inverse()


def _valuation(p: Poly, q: Poly) -> int:
    k = 0
    while p:
        quo, rem = p.divmod(q)
        if rem:
            break
        p = quo
        k += 1
    return k


def _poly_key(p: Poly):
    return (p.degree, tuple(tuple(str(a) for a in c.c) for c in p.coeffs))


def poly_to_json(p: Poly):
    return [c.to_json() for c in p.coeffs]


def poly_from_json(data, tower):
    return Poly([tower(list(c)) if isinstance(c, (list, tuple)) else tower(c) for c in data], tower)


def _subspace_annihilator(vs, tower):
    """Rows y over K with ``y . coords(w) == 0`` exactly for w in the K-span of ``vs``."""
    d = tower.degree
    if not vs:
        return [[mpq(1) if i == j else mpq(0) for i in range(d)] for j in range(d)]
    return kernel_rows([list(v.c) for v in vs], d)


def _in_subspace(a: TowerElement, ann) -> bool:
    return all(not sum((y * c for y, c in zip(row, a.c) if y), mpq(0)) for row in ann)


def _k_basis_elems(elems, tower):
    work = [list(e.c) for e in elems if e]
    if not work:
        return []
    rank, _ = rref_rows(work, tower.degree)
    return [tower(r) for r in work[:rank]]


# ------------------------------------------------------------------ maximal ideals


@dataclass(frozen=True)
class MaximalIdealDesc:
    """``M0`` is xL[x]; ``Poly`` is qR with q irreducible in L[x] and q(0) = 1."""

    tag: str
    q: Poly | None = None

    def __post_init__(self):
        if self.tag not in ("M0", "Poly"):
            raise ValueError(f"unknown maximal ideal tag {self.tag!r}")
        if self.tag == "Poly" and (self.q is None or self.q.degree < 1 or self.q[0] != 1):
            raise ValueError("Poly(q) needs q of positive degree with q(0) = 1")

    @classmethod
    def m0(cls):
        return cls("M0")

    @classmethod
    def poly(cls, q, tower=None, check: bool = True):
        q = element(q, tower)
        if not q or not q[0]:
            raise ValueError("q(0) must be nonzero")
        q = _normalized(q)[1]
        if check:
            _, facs = factor_over_tower(q)
            if len(facs) != 1 or facs[0][1] != 1:
                raise ValueError(f"{q} is not irreducible in L[x]")
        return cls("Poly", q)

    def key(self):
        return (0,) if self.tag == "M0" else (1,) + _poly_key(self.q)

    def contains(self, f: Poly) -> bool:
        if not f:
            return True
        if self.tag == "M0":
            return not f[0]
        return not (f % self.q)

    def __str__(self):
        return "M0" if self.tag == "M0" else f"Poly({self.q})"

    def to_json(self):
        if self.tag == "M0":
            return {"tag": "M0"}
        return {"tag": "Poly", "q": poly_to_json(self.q)}

    @classmethod
    def from_json(cls, data, tower=None):
        tower = tower or theta7()
        if data["tag"] == "M0":
            return cls.m0()
        return cls.poly(poly_from_json(data["q"], tower), tower)


M0 = MaximalIdealDesc.m0()


# ------------------------------------------------------------------ ideals


class IdealOfR:
    """A nonzero ideal ``x^e h (V + xS)`` of R, or the zero ideal."""

    def __init__(self, e: int, h: Poly, V, gens=(), tower=None, _zero=False):
        self.tower = tower or (h.field if h is not None else theta7())
        self.gens = tuple(gens)
        self._zero = _zero
        if _zero:
            self.e, self.h, self.V = None, None, ()
            return
        if h[0] != 1:
            raise ValueError("h(0) must be 1")
        V = _k_basis_elems([self.tower(v) for v in V], self.tower)
        if not V:
            raise ValueError("coefficient space must be nonzero")
        if e == 0 and not (len(V) == 1 and V[0].is_rational()):
            raise ValueError("with e = 0 the coefficient space must be K")
        self.e, self.h, self.V = e, h, tuple(V)
        self._ann = None

    # -- constructors
    @classmethod
    def from_generators(cls, gens, tower=None):
        tower = tower or theta7()
        gens = [element(g, tower) for g in gens]
        for g in gens:
            if not in_R(g):
                raise RingError(f"{g} is not an element of R")
        nz = [g for g in gens if g]
        if not nz:
            return cls(None, None, (), gens, tower, _zero=True)
        g = Poly._raw([], tower)
        for f in nz:
            g = poly_gcd(g, f)
        e, core = _split_x(g)
        _, h = _normalized(core)
        G = h.shift_x(e)
        consts = [f.exact_div(G)[0] for f in nz]
        V = [tower.one()] if e == 0 else consts
        return cls(e, h, V, gens, tower)

    @classmethod
    def unit(cls, tower=None):
        tower = tower or theta7()
        return cls(0, Poly.const(1, tower), [tower.one()], [Poly.const(1, tower)], tower)

    @classmethod
    def zero(cls, tower=None):
        return cls.from_generators([], tower)

    @classmethod
    def maximal(cls, desc: MaximalIdealDesc, tower=None):
        tower = tower or (desc.q.field if desc.q is not None else theta7())
        if desc.tag == "M0":
            return cls(1, Poly.const(1, tower), tower.power_basis(), [Poly.x(tower) * w for w in tower.power_basis()], tower)
        return cls(0, desc.q, [tower.one()], [desc.q], tower)

    @classmethod
    def principal(cls, f, tower=None):
        return cls.from_generators([f], tower)

    # -- queries
    @property
    def is_zero(self) -> bool:
        return self._zero

    @property
    def is_unit(self) -> bool:
        return not self._zero and self.e == 0 and self.h.degree == 0

    @property
    def generator(self) -> Poly:
        """G = x^e h, the monic-at-zero generator of IS."""
        return self.h.shift_x(self.e)

    @property
    def coeff_dim(self) -> int:
        return len(self.V)

    def _annihilator(self):
        if self._ann is None:
            self._ann = _subspace_annihilator(self.V, self.tower)
        return self._ann

    def contains(self, f) -> bool:
        f = element(f, self.tower)
        if not f:
            return True
        if self._zero:
            return False
        quo, rem = f.divmod(self.generator)
        return not rem and _in_subspace(quo[0], self._annihilator())

    def __contains__(self, f):
        return self.contains(f)

    def standard_generators(self):
        """R-generators ``G v`` (v in V) and ``G x w`` (w in the power basis)."""
        if self._zero:
            return []
        G = self.generator
        return [G * v for v in self.V] + [G.shift_x(1) * w for w in self.tower.power_basis()]

    def canonical(self):
        if self._zero:
            return ("zero",)
        return (self.e, self.h.coeffs, tuple(v.c for v in self.V))

    def __eq__(self, other):
        return isinstance(other, IdealOfR) and self.canonical() == other.canonical()

    def __hash__(self):
        return hash(self.canonical())

    def __le__(self, other: "IdealOfR"):
        return all(other.contains(g) for g in self.standard_generators())

    def __mul__(self, other: "IdealOfR") -> "IdealOfR":
        if self._zero or other._zero:
            return IdealOfR.zero(self.tower)
        V = [a * b for a in self.V for b in other.V]
        gens = [a * b for a in self.gens for b in other.gens]
        return IdealOfR(self.e + other.e, self.h * other.h, V, gens, self.tower)

    def __add__(self, other: "IdealOfR") -> "IdealOfR":
        return IdealOfR.from_generators(self.standard_generators() + other.standard_generators(), self.tower)

    def __pow__(self, k: int) -> "IdealOfR":
        out = IdealOfR.unit(self.tower)
        for _ in range(k):
            out = out * self
        return out

    def __repr__(self):
        if self._zero:
            return "IdealOfR(0)"
        return f"IdealOfR(e={self.e}, h={self.h}, dim V={len(self.V)})"

    def __str__(self):
        if self._zero:
            return "(0)"
        if self.is_unit:
            return "R"
        V = ", ".join(str(v) for v in self.V)
        return f"({self.generator}) * (K<{V}> + xS)"

    def to_json(self):
        if self._zero:
            return {"e": -1, "h": [], "coeffspace": [], "gens": []}
        return {"e": self.e, "h": poly_to_json(self.h),
                "coeffspace": [v.to_json() for v in self.V],
                "gens": [poly_to_json(g) for g in self.gens]}

    @classmethod
    def from_json(cls, data, tower=None):
        tower = tower or theta7()
        if data.get("e", 0) < 0:
            return cls.zero(tower)
        return cls(data["e"], poly_from_json(data["h"], tower), [tower(list(v)) for v in data["coeffspace"]],
                   [poly_from_json(g, tower) for g in data.get("gens", [])], tower)


def ideal(*gens, tower=None) -> IdealOfR:
    return IdealOfR.from_generators(gens, tower)


# ------------------------------------------------------------------ the ring


class RingR:
    """R = K + xL[x] inside S = L[x]; the conductor is xS, also a maximal ideal."""

    def __init__(self, tower=None):
        self.tower = tower or theta7()

    def element(self, r) -> Poly:
        p = element(r, self.tower)
        if not in_R(p):
            raise RingError(f"{p} is not in K + xL[x]")
        return p

    def contains(self, r) -> bool:
        return in_R(element(r, self.tower))

    @property
    def conductor(self) -> IdealOfR:
        return IdealOfR.maximal(M0, self.tower)

    def maximal_ideal(self, desc: MaximalIdealDesc) -> IdealOfR:
        return IdealOfR.maximal(desc, self.tower)

    def probe_primes(self, count: int, seed: int = 0, exclude=()):
        """Random degree-one maximal ideals (1 + c x) avoiding ``exclude``."""
        rng = random.Random(seed)
        out = []
        excl = set(exclude)
        while len(out) < count:
            c = self.tower([rng.randint(-9, 9) for _ in range(2)])
            if not c:
                continue
            desc = MaximalIdealDesc.poly(Poly([self.tower.one(), c], self.tower), self.tower, check=False)
            if desc not in excl and desc not in out:
                out.append(desc)
        return out


# ------------------------------------------------------------------ factorization


@dataclass(frozen=True)
class FactoredElement:
    unit: TowerElement
    e: int
    factors: tuple

    def expand(self) -> Poly:
        tower = self.unit.tower
        p = Poly.const(self.unit, tower).shift_x(self.e)
        for q, k in self.factors:
            p = p * q ** k
        return p

    def to_json(self):
        return {"unit": self.unit.to_json(), "e": self.e,
                "factors": [{"q": poly_to_json(q), "mult": k} for q, k in self.factors]}


def factor_element(r, tower=None) -> FactoredElement:
    """``r = unit * x^e * prod q_i^{e_i}`` with q_i irreducible and q_i(0) = 1."""
    p = element(r, tower)
    tower = p.field
    if not p:
        raise ZeroElement("cannot factor zero")
    if not in_R(p):
        raise RingError(f"{p} is not an element of R")
    e, core = _split_x(p)
    unit, core = _normalized(core)
    facs = []
    if core.degree > 0:
        _, parts = factor_over_tower(core)
        for q, k in parts:
            facs.append((_normalized(q)[1], k))
    facs.sort(key=lambda qk: _poly_key(qk[0]))
    out = FactoredElement(unit, e, tuple(facs))
    assert out.expand() == p
    return out


def support(I: IdealOfR):
    """Maximal ideals containing I (M0 first)."""
    if I.is_zero:
        raise ZeroIdeal("the zero ideal lies in every maximal ideal")
    out = [M0] if I.e > 0 else []
    if I.h.degree > 0:
        fe = factor_element(I.h)
        out += [MaximalIdealDesc("Poly", q) for q, _ in fe.factors]
    return out


def comaximal_factorization(I: IdealOfR):
    """Pairwise comaximal primary components, in the order of :func:`support`."""
    if I.is_zero:
        raise ZeroIdeal("zero ideal")
    if I.is_unit:
        raise UnitIdeal("R has no proper factorization")
    tower = I.tower
    parts = []
    if I.e > 0:
        parts.append(IdealOfR(I.e, Poly.const(1, tower), I.V, [], tower))
    if I.h.degree > 0:
        for q, k in factor_element(I.h).factors:
            parts.append(IdealOfR(0, q ** k, [tower.one()], [q ** k], tower))
    prod = IdealOfR.unit(tower)
    for P in parts:
        prod = prod * P
    if prod != I:
        raise AssertionError("components do not multiply back to the ideal")
    for i, A in enumerate(parts):
        for B in parts[:i]:
            if not (A + B).is_unit:
                raise AssertionError("components are not comaximal")
    return parts


def min_generators(I: IdealOfR, at: MaximalIdealDesc) -> int:
    """dim_K of I_m / (m I_m)."""
    if I.is_zero:
        raise ZeroIdeal("zero ideal")
    if at.tag == "M0":
        # I_m = x^e (V + xS)_m and m (V + xS) = xS since VL = L
        return len(I.V)
    return 1


# ------------------------------------------------------------------ CRT


@dataclass
class CRTElements:
    targets: list
    modulus: IdealOfR
    components: list
    b_targets: list
    b: Poly

    def to_json(self):
        return {"targets": [t.to_json() for t in self.targets],
                "components": [c.to_json() for c in self.components],
                "b_i": [poly_to_json(x) for x in self.b_targets], "b": poly_to_json(self.b)}


def _crt_solve(components, values, tower):
    """b in R with b - values[i] in components[i] for each i."""
    Gs = [c.generator for c in components]
    P = Poly.const(1, tower)
    for G in Gs:
        P = P * G
    b0 = Poly._raw([], tower)
    for G, val in zip(Gs, values):
        if val:
            cof = P.exact_div(G)
            _, s, _ = poly_xgcd(cof, G)
            b0 = b0 + (s % G) * cof
    # b = b0 + P w with w in L; only constant terms still need to land in the coefficient spaces
    cons = []
    for comp, G, val in zip(components, Gs, values):
        a = (b0 - val).exact_div(G)[0]
        cons.append((a, P.exact_div(G)[0], comp._annihilator()))
    cons.append((b0[0], P[0], _subspace_annihilator([tower.one()], tower)))
    if all(_in_subspace(a, ann) for a, _, ann in cons):
        return b0
    rows, rhs = [], []
    for a, p, ann in cons:
        mp = p.matrix()
        for y in ann:
            rows.append([sum((y[i] * mp[i][k] for i in range(tower.degree) if y[i]), mpq(0)) for k in range(tower.degree)])
            rhs.append(-sum((yi * ai for yi, ai in zip(y, a.c) if yi), mpq(0)))
    w = solve(Matrix.from_rows(rows), rhs)
    if w is None:
        raise AssertionError("CRT constant adjustment has no solution")
    return b0 + P * tower(w)


def crt_idempotents(targets, modulus: IdealOfR) -> CRTElements:
    """Elements b_i (1 at target i, 0 elsewhere) and b (0 at targets, 1 elsewhere) modulo I."""
    supp = support(modulus)
    targets = list(targets)
    if len(set(targets)) != len(targets) or any(t not in supp for t in targets):
        raise SupportMismatch("targets must be distinct maximal ideals containing the modulus")
    comps = comaximal_factorization(modulus) if not modulus.is_unit else []
    tower = modulus.tower
    bs = []
    for t in targets:
        vals = [1 if s == t else 0 for s in supp]
        bs.append(_crt_solve(comps, vals, tower))
    b = _crt_solve(comps, [0 if s in targets else 1 for s in supp], tower)
    out = CRTElements(targets, modulus, comps, bs, b)
    check_crt(out)
    return out


def check_crt(c: CRTElements) -> bool:
    supp = support(c.modulus)
    for t, bt in zip(c.targets, c.b_targets):
        if not in_R(bt):
            raise AssertionError("CRT element outside R")
        for s, comp in zip(supp, c.components):
            want = 1 if s == t else 0
            if not comp.contains(bt - want):
                raise AssertionError(f"b for {t} fails its congruence at {s}")
    for s, comp in zip(supp, c.components):
        want = 0 if s in c.targets else 1
        if not comp.contains(c.b - want):
            raise AssertionError(f"complement element fails at {s}")
    return True


# ------------------------------------------------------------------ trace chains


@dataclass
class TraceChain:
    ideals: list


@dataclass
class TraceChainReport:
    valid: bool
    first_violation: int | None
    reason: str = ""
    product: IdealOfR | None = None

    def to_json(self):
        return {"valid": self.valid, "first_violation": self.first_violation, "reason": self.reason,
                "product": self.product.to_json() if self.product is not None else None}


def validate_trace_chain(chain) -> TraceChainReport:
    """Check J_n <= J_{n+1} and J_{n+1} J_n == J_n; violations are indexed from 1."""
    ideals = chain.ideals if isinstance(chain, TraceChain) else list(chain)
    if not ideals:
        raise ValueError("trace chain must be nonempty")
    for n in range(len(ideals) - 1):
        a, b = ideals[n], ideals[n + 1]
        if not a <= b:
            return TraceChainReport(False, n + 1, "chain is not ascending")
        prod = b * a
        if prod != a:
            return TraceChainReport(False, n + 1, "J_{n+1} J_n differs from J_n", prod)
    return TraceChainReport(True, None)


# ------------------------------------------------------------------ coprime ranks


@dataclass(frozen=True)
class CoprimeReport:
    r1: int
    r2: int
    gcd: int
    closure_fails: bool

    def to_json(self):
        return {"r1": self.r1, "r2": self.r2, "gcd": self.gcd, "closure_fails": self.closure_fails}


def coprime_obstruction(r1: int, r2: int) -> CoprimeReport:
    """Ranks with a common factor give sums that are not sums of finitely generated modules."""
    if r1 < 1 or r2 < 1:
        raise ValueError("ranks must be positive")
    g = math.gcd(r1, r2)
    return CoprimeReport(r1, r2, g, g > 1)


# ------------------------------------------------------------------ modules


@dataclass(frozen=True)
class LocalFree:
    """Localization at a DVR prime: free of ``rank``; ``valuation`` of det B there."""

    rank: int
    valuation: int

    def to_json(self):
        return {"free_rank": self.rank, "valuation": self.valuation}


class ModuleDescriptor:
    """The R-module ``B (V + xS^n)`` inside ``S^n``."""

    def __init__(self, B, pair: PairModule):
        self.tower = pair.tower
        self.n = pair.n
        self.pair = pair
        self.B = [[element(e, self.tower) for e in row] for row in B]
        if len(self.B) != self.n or any(len(r) != self.n for r in self.B):
            raise RankMismatch("basis matrix shape differs from the pair rank")
        self._det = polymat.det(self.B, self.tower)
        if not self._det:
            raise NotFullRank("basis matrix is singular")
        self._adj = None

    # -- constructors
    @classmethod
    def free(cls, n: int, tower=None):
        tower = tower or theta7()
        return cls(polymat.identity(n, tower), free_pair(n, tower))

    @classmethod
    def from_pair(cls, pair: PairModule):
        return cls(polymat.identity(pair.n, pair.tower), pair)

    @classmethod
    def from_ideal(cls, I: IdealOfR):
        if I.is_zero:
            raise ZeroIdeal("zero ideal has rank 0")
        tower = I.tower
        return cls([[I.generator]], PairModule(1, [(v,) for v in I.V], tower))

    @classmethod
    def from_generators(cls, gens, n: int, tower=None):
        """R-span of vectors in S^n."""
        tower = tower or theta7()
        gens = [[element(e, tower) for e in g] for g in gens]
        basis = polymat.column_basis(gens, n, tower)
        if len(basis) != n:
            raise NotFullRank(f"generators span rank {len(basis)} < {n}")
        vals = []
        for g in gens:
            s = polymat.solve_echelon(basis, g, tower)
            if s is None:
                raise AssertionError("generator outside its own S-span")
            vals.append(tuple(c[0] for c in s))
        B = [[basis[j][i] for j in range(n)] for i in range(n)]
        return cls(B, PairModule(n, k_basis(vals, n, tower), tower))

    # -- basic data
    @property
    def rank(self) -> int:
        return self.n

    @property
    def det(self) -> Poly:
        return self._det

    def _adjugate(self):
        if self._adj is None:
            self._adj = polymat.adjugate(self.B, self.tower)
        return self._adj

    def generators(self):
        """R-generators: B v for v in V and B x w e_j."""
        out = [polymat.matvec(self.B, [Poly.const(c, self.tower) for c in v], self.tower) for v in self.pair.V]
        xs = Poly.x(self.tower)
        for j in range(self.n):
            for w in self.tower.power_basis():
                out.append([self.B[i][j] * xs * w for i in range(self.n)])
        return out

    def coords(self, g):
        """``B^-1 g`` as ``(numerators, denominator)`` in lowest terms."""
        g = [element(e, self.tower) for e in g]
        num = polymat.matvec(self._adjugate(), g, self.tower)
        den = self._det
        c = den
        for a in num:
            c = poly_gcd(c, a)
        num = [a.exact_div(c) for a in num]
        den = den.exact_div(c)
        return num, den

    def contains(self, g) -> bool:
        num, den = self.coords(g)
        if den.degree > 0:
            return False
        inv = den[0].inverse()
        return self.pair.contains([a[0] * inv for a in num])

    def contains_at(self, g, desc: MaximalIdealDesc) -> bool:
        num, den = self.coords(g)
        if desc.tag == "Poly":
            return bool(den % desc.q)
        if not den[0]:
            return False
        inv = den[0].inverse()
        return self.pair.contains([a[0] * inv for a in num])

    def local_le(self, other: "ModuleDescriptor", desc: MaximalIdealDesc) -> bool:
        return all(other.contains_at(g, desc) for g in self.generators())

    def local_equal(self, other: "ModuleDescriptor", desc: MaximalIdealDesc) -> bool:
        return self.local_le(other, desc) and other.local_le(self, desc)

    def __le__(self, other: "ModuleDescriptor") -> bool:
        return all(other.contains(g) for g in self.generators())

    def same_module(self, other: "ModuleDescriptor") -> bool:
        return self.n == other.n and self <= other and other <= self

    def localize(self, desc: MaximalIdealDesc):
        if desc.tag == "M0":
            return self.pair
        return LocalFree(self.n, _valuation(self._det, desc.q))

    def scaled(self, f) -> "ModuleDescriptor":
        f = element(f, self.tower)
        return ModuleDescriptor(polymat.scalar(self.B, f), self.pair)

    def to_ideal(self) -> IdealOfR:
        if self.n != 1:
            raise RankMismatch("only rank-one modules are ideals")
        g = self.B[0][0]
        e, core = _split_x(g)
        c, h = _normalized(core)
        V = [v[0] * c for v in self.pair.V]
        if e == 0 and not all(v.is_rational() for v in V):
            raise RingError("module is not contained in R")
        return IdealOfR(e, h, V, [], self.tower)

    def __repr__(self):
        return f"ModuleDescriptor(n={self.n}, dim V={self.pair.dim}, det={self._det})"

    def to_json(self):
        return {"n": self.n, "tower": self.tower.name,
                "B": [[poly_to_json(e) for e in row] for row in self.B],
                "V": self.pair.to_json()["V"]}

    @classmethod
    def from_json(cls, data, tower=None):
        tower = tower or theta7()
        n = data["n"]
        pair = PairModule.from_json({"n": n, "tower": data.get("tower", tower.name), "V": data["V"]}, tower)
        B = data.get("B")
        if B is None:
            return cls.from_pair(pair)
        return cls([[poly_from_json(e, tower) for e in row] for row in B], pair)


def localize_check(N: ModuleDescriptor, desc: MaximalIdealDesc):
    """The pair at M0, a :class:`LocalFree` record elsewhere."""
    return N.localize(desc)


def local_pair_submodule(ambient: ModuleDescriptor, pair: PairModule) -> ModuleDescriptor:
    """A module whose M0-localization is isomorphic to ``pair`` and lies inside ``ambient``."""
    if pair.n != ambient.n:
        raise RankMismatch("pair rank differs from ambient rank")
    return ModuleDescriptor(polymat.scalar(ambient.B, Poly.x(ambient.tower)), pair)


def local_power_submodule(ambient: ModuleDescriptor, desc: MaximalIdealDesc, k: int) -> ModuleDescriptor:
    """``g^k`` times the ambient, g = x at M0 or q at Poly(q)."""
    g = Poly.x(ambient.tower) if desc.tag == "M0" else desc.q
    return ambient.scaled(g ** k)


# ------------------------------------------------------------------ gluing


@dataclass
class GlueResult:
    module: ModuleDescriptor
    ambient: ModuleDescriptor
    assigned: list
    d_factors: list
    crt: CRTElements | None
    variant: int = 0

    def to_json(self):
        return {"module": self.module.to_json(),
                "assigned": [a.to_json() for a in self.assigned],
                "d_factors": [poly_to_json(d) for d in self.d_factors],
                "crt": self.crt.to_json() if self.crt else None,
                "variant": self.variant}


def _prime_power(desc, k, tower):
    return _x_power(k, tower) if desc.tag == "M0" else desc.q ** k


def _numerator(ambient: ModuleDescriptor, g, desc: MaximalIdealDesc):
    """s g with s in R outside ``desc`` and s g in the ambient."""
    num, den = ambient.coords(g)
    tower = ambient.tower
    if desc.tag == "Poly":
        s = den.shift_x(1)
    else:
        if not den[0]:
            raise NotLocalSubmodule("generator not in the ambient localization at M0")
        s = den * den[0].inverse()
    return [s * e for e in g]


def glue_submodule(ambient: ModuleDescriptor, assignments: dict, variant: int = 0, check: bool = True) -> GlueResult:
    """Submodule N of ``ambient`` with N_m = X(m) at assigned primes and the ambient elsewhere.

    ``assignments`` maps a :class:`MaximalIdealDesc` to a :class:`ModuleDescriptor`
    whose localization there is the wanted local submodule.  ``variant`` raises
    the exponents of the d_i and shifts the CRT elements by multiples of d,
    giving different (isomorphic) outputs.
    """
    tower = ambient.tower
    active = []
    for desc, X in sorted(assignments.items(), key=lambda kv: kv[0].key()):
        if X.n != ambient.n:
            raise RankMismatch(f"assignment at {desc} has rank {X.n}, ambient has {ambient.n}")
        if not X.local_le(ambient, desc):
            raise NotLocalSubmodule(f"assignment at {desc} is not inside the ambient localization")
        if not X.local_equal(ambient, desc):
            active.append((desc, X))
    if not active:
        return GlueResult(ambient, ambient, [], [], None, variant)
    # d_i with d_i M_n inside X(n)
    ds = []
    gens_M = ambient.generators()
    for desc, X in active:
        k = 1
        while True:
            di = _prime_power(desc, k, tower)
            if all(X.contains_at([di * e for e in g], desc) for g in gens_M):
                break
            k += 1
            if k > 64:
                raise AssertionError(f"no power of the prime at {desc} moves the ambient into X")
        ds.append(_prime_power(desc, k + variant, tower))
    d = Poly.const(1, tower)
    for di in ds:
        d = d * di
    crt = crt_idempotents([desc for desc, _ in active], IdealOfR.principal(d, tower))
    bs = [bi + d * variant for bi in crt.b_targets]
    gens = []
    for (desc, X), bi in zip(active, bs):
        for g in X.generators():
            gens.append([bi * e for e in _numerator(ambient, g, desc)])
    for g in gens_M:
        gens.append([d * e for e in g])
        if crt.b:
            gens.append([crt.b * e for e in g])
    N = ModuleDescriptor.from_generators(gens, ambient.n, tower)
    result = GlueResult(N, ambient, [desc for desc, _ in active], ds, crt, variant)
    if check:
        verify_glue(result, assignments)
    return result


def verify_glue(result: GlueResult, assignments: dict, probes=()) -> bool:
    N, M = result.module, result.ambient
    if not N <= M:
        raise AssertionError("glued module is not inside the ambient")
    for desc, X in assignments.items():
        if not N.local_equal(X, desc):
            raise AssertionError(f"localization at {desc} differs from the assignment")
    others = list(probes)
    if M0 not in assignments:
        others.append(M0)
    for desc in others:
        if desc in assignments:
            continue
        if not N.local_equal(M, desc):
            raise AssertionError(f"localization at {desc} differs from the ambient")
    return True


# ------------------------------------------------------------------ genus


@dataclass
class LocalClass:
    """Local decomposition at one prime: r free rank-one summands plus non-free factors."""

    free_rank: int
    nonfree: list = dc_field(default_factory=list)
    levels: list = dc_field(default_factory=list)

    def to_json(self):
        return {"free_rank": self.free_rank, "nonfree": [p.to_json() for p in self.nonfree],
                "certificate_levels": self.levels}


COUNT_CLASSES = ("finite", "countable", "uncountable")


@dataclass
class FamilyRecord:
    """Symbolic family of non-free primes: how many, and their free rank r_m."""

    count: str
    r: object
    label: str = ""

    def validate(self):
        if self.count not in COUNT_CLASSES:
            raise UnrepresentableDescriptor(f"unknown count class {self.count!r}")
        if not (self.r == "unbounded" or (isinstance(self.r, int) and not isinstance(self.r, bool) and self.r >= 0)):
            raise UnrepresentableDescriptor(f"r must be a nonnegative integer or 'unbounded', got {self.r!r}")

    def to_json(self):
        return {"count": self.count, "r": self.r, "label": self.label}


@dataclass
class GenusDescriptor:
    rank: object
    local: dict = dc_field(default_factory=dict)
    families: list = dc_field(default_factory=list)
    free_elsewhere: bool = True

    def to_json(self):
        return {"rank": self.rank,
                "support": [{"prime": d.to_json(), **c.to_json()}
                            for d, c in sorted(self.local.items(), key=lambda kv: kv[0].key())],
                "families": [f.to_json() for f in self.families],
                "free_elsewhere": self.free_elsewhere}

    @classmethod
    def from_json(cls, data, tower=None):
        tower = tower or theta7()
        rank = data.get("rank", "countable")
        local = {}
        for entry in data.get("support", []):
            desc = MaximalIdealDesc.from_json(entry["prime"], tower)
            nonfree = [PairModule.from_json(p, tower) for p in entry.get("nonfree", [])]
            local[desc] = LocalClass(entry.get("free_rank", 0), nonfree)
        fams = []
        for f in data.get("families", []):
            if not isinstance(f, dict) or "count" not in f or "r" not in f:
                raise UnrepresentableDescriptor("family records need 'count' and 'r'")
            fams.append(FamilyRecord(f["count"], f["r"], f.get("label", "")))
        return cls(rank, local, fams, data.get("free_elsewhere", True))


def _as_pair(m):
    return m.pair if isinstance(m, ModuleDescriptor) else m


def genus_of(m, seed: int = 0) -> GenusDescriptor:
    """Rank and the M0 decomposition; every other localization is free."""
    p = _as_pair(m)
    if is_free(p):
        return GenusDescriptor(p.n)
    rep = decompose(p, seed)
    if not rep.certified:
        raise UncertifiedFactors("local decomposition has ProbablyLocal factors")
    free = [f for f in rep.factors if is_free(f)]
    nonfree = [(f, lv) for f, lv in zip(rep.factors, rep.levels) if not is_free(f)]
    return GenusDescriptor(p.n, {M0: LocalClass(len(free), [f for f, _ in nonfree], [lv for _, lv in nonfree])})


def same_genus(m, n, seed: int = 0) -> bool:
    p, q = _as_pair(m), _as_pair(n)
    return p.n == q.n and is_isomorphic(p, q, seed)[0]


@dataclass
class ModuleIsomorphism:
    """``phi = B_N A B_M^-1 = numerator / denominator`` maps M onto N."""

    pair_witness: Matrix
    numerator: list
    denominator: Poly

    def apply(self, g, tower):
        return [e for e in polymat.matvec(self.numerator, [element(x, tower) for x in g], tower)]

    def to_json(self):
        w = self.pair_witness
        return {"pair_witness": [[e.to_json() for e in w.row(i)] for i in range(w.rows)],
                "numerator": [[poly_to_json(e) for e in r] for r in self.numerator],
                "denominator": poly_to_json(self.denominator)}


def iso_from_genus(m: ModuleDescriptor, n: ModuleDescriptor, seed: int = 0):
    """Global isomorphism M -> N from a pair isomorphism at M0, or None."""
    if isinstance(m, PairModule):
        m = ModuleDescriptor.from_pair(m)
    if isinstance(n, PairModule):
        n = ModuleDescriptor.from_pair(n)
    if m.n != n.n:
        return None
    ok, A = is_isomorphic(m.pair, n.pair, seed)
    if not ok:
        return None
    tower = m.tower
    Ap = [[Poly.const(A[i, j], tower) for j in range(m.n)] for i in range(m.n)]
    num = polymat.matmul(polymat.matmul(n.B, Ap, tower), m._adjugate(), tower)
    iso = ModuleIsomorphism(A, num, m.det)
    # every generator of M lands in N (phi(M) = N follows since A V_M = V_N)
    for g in m.generators():
        y, den = m.coords(g)
        if den.degree > 0:
            raise AssertionError("generator of M not in M")
        y = [e * den[0].inverse() for e in y]
        img = polymat.matvec(n.B, polymat.matvec(Ap, y, tower), tower)
        if not n.contains(img):
            raise AssertionError("isomorphism witness does not map M into N")
    return iso


def realizability_conditions(g: GenusDescriptor):
    """The two conditions (free off a countable set; r_m <= b only finitely often)."""
    for f in g.families:
        if not isinstance(f, FamilyRecord):
            raise UnrepresentableDescriptor("family entries must be FamilyRecord")
        f.validate()
    for c in g.local.values():
        if not isinstance(c.free_rank, int) or c.free_rank < 0:
            raise UnrepresentableDescriptor("free ranks must be nonnegative integers")
    cond_i = all(f.count != "uncountable" for f in g.families)
    cond_ii = all(not (f.count != "finite" and f.r != "unbounded") for f in g.families)
    return cond_i, cond_ii


def genus_realizable(g: GenusDescriptor) -> bool:
    """Whether the genus contains a direct sum of finitely generated modules."""
    i, ii = realizability_conditions(g)
    return i and ii


# ------------------------------------------------------------------ matching


@dataclass
class MatchBlock:
    a: list
    b: list
    witness: Matrix

    def to_json(self):
        w = self.witness
        return {"a": self.a, "b": self.b, "witness": [[e.to_json() for e in w.row(i)] for i in range(w.rows)]}


def match_decompositions(A, B, seed: int = 0):
    """Group the members of A and B into blocks with isomorphic direct sums."""
    A = [_as_pair(x) for x in A]
    B = [_as_pair(x) for x in B]
    if sum(p.n for p in A) != sum(p.n for p in B):
        raise GenusMismatch("total ranks differ")
    fa, fb = [], []
    for owner, (src, dst) in enumerate([(A, fa), (B, fb)]):
        for idx, p in enumerate(src):
            rep = decompose(p, seed)
            if not rep.certified:
                raise UncertifiedFactors("a factor has only a ProbablyLocal verdict")
            dst.extend((idx, f) for f in rep.factors)
    if len(fa) != len(fb):
        raise GenusMismatch("numbers of indecomposable factors differ")
    parent = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    used = set()
    for ia, f in fa:
        for j, (ib, g) in enumerate(fb):
            if j not in used and is_isomorphic(f, g, seed)[0]:
                used.add(j)
                parent[find(("a", ia))] = find(("b", ib))
                break
        else:
            raise GenusMismatch("an indecomposable factor has no partner")
    groups = {}
    for i in range(len(A)):
        groups.setdefault(find(("a", i)), ([], []))[0].append(i)
    for j in range(len(B)):
        groups.setdefault(find(("b", j)), ([], []))[1].append(j)
    blocks = []
    for a_idx, b_idx in sorted(groups.values(), key=lambda ab: (ab[0][:1] or [len(A)], ab[1])):
        ok, W = is_isomorphic(direct_sum_all([A[i] for i in a_idx]), direct_sum_all([B[j] for j in b_idx]), seed)
        if not ok:
            raise GenusMismatch("regrouped blocks are not isomorphic")
        blocks.append(MatchBlock(a_idx, b_idx, W))
    return blocks
