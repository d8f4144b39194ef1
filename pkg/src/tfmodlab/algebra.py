"""Finite-dimensional associative K-algebras given by matrices over L.

The algebra is stored by a K-basis of n x n matrices over the tower and
its structure constants over K.  Elements are coordinate vectors.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field

from gmpy2 import mpq

from .exactfield import QQ, Poly, poly_factor, poly_xgcd
from .linalg import Matrix, kernel_rows, matrix_min_poly, rref_rows

COMPLETE = "Complete"
RANDOMIZED = "Randomized"

LOCAL_CERTIFIED = "LocalCertified"
NOT_LOCAL = "NotLocal"
PROBABLY_LOCAL = "ProbablyLocal"

PRIMITIVE_SAMPLES = 64
NONCOMMUTATIVE_DRAWS = 200


class AlgebraError(ValueError):
    pass


@dataclass(frozen=True)
class LocalityVerdict:
    tag: str
    witness: tuple | None = None
    note: str = ""
    witness_matrix: Matrix | None = dc_field(default=None, compare=False)

    @property
    def is_local(self) -> bool:
        return self.tag != NOT_LOCAL

    @property
    def certified(self) -> bool:
        return self.tag != PROBABLY_LOCAL

    def to_json(self):
        out = {"tag": self.tag, "note": self.note}
        if self.witness_matrix is not None:
            m = self.witness_matrix
            out["witness"] = [[e.to_json() for e in m.row(i)] for i in range(m.rows)]
        return out


def flatten(mat: Matrix):
    """K-coordinates of a matrix over L, row-major then power basis."""
    out = []
    for e in mat.entries:
        out.extend(e.c)
    return out


class FinDimAlgebra:
    """Unital K-subalgebra of M_n(L) spanned by ``basis``.

    Construction validates K-independence, closure under products and that
    the identity matrix lies in the span.
    """

    def __init__(self, basis, tower, closed: bool = False):
        self.tower = tower
        self.basis = list(basis)
        if not self.basis:
            raise AlgebraError("algebra needs a nonempty basis")
        self.n = self.basis[0].rows
        self.dim = len(self.basis)
        vecs = [flatten(b) for b in self.basis]
        self._width = len(vecs[0])
        work = [list(v) for v in vecs]
        rank, piv = rref_rows(work, self._width)
        if rank != self.dim:
            raise AlgebraError("basis matrices are K-dependent")
        self._piv = piv
        sub = Matrix.from_rows([[v[p] for p in piv] for v in vecs])
        self._sub_inv = sub.inverse().to_rows()
        one = self.coords(Matrix.identity(self.n, tower))
        if one is None:
            raise AlgebraError("identity matrix is not in the span")
        self.one = one
        self.zero = [mpq(0)] * self.dim
        # closed=True: closure is known (e.g. an endomorphism ring), so only the
        # matrix entries carrying pivot coordinates of each product are formed
        self.struct = [[self._product_coords(bi, bj) if closed else self.coords(bi @ bj)
                        for bj in self.basis] for bi in self.basis]
        if any(c is None for row in self.struct for c in row):
            raise AlgebraError("span is not closed under multiplication")
        self._radical = None

    def _product_coords(self, a: Matrix, b: Matrix):
        d = self.tower.degree
        n = self.n
        vals = {}
        for p in self._piv:
            idx = p // d
            if idx not in vals:
                i, j = divmod(idx, n)
                acc = self.tower.zero()
                for k in range(n):
                    x, y = a[i, k], b[k, j]
                    if x and y:
                        acc = acc + x * y
                vals[idx] = acc
        w = [vals[p // d].c[p % d] for p in self._piv]
        return [sum((w[k] * self._sub_inv[k][i] for k in range(self.dim) if w[k]), mpq(0)) for i in range(self.dim)]

    @classmethod
    def from_structure(cls, struct, one):
        """Abstract algebra from structure constants (used for quotients in tests)."""
        self = object.__new__(cls)
        self.tower = None
        self.basis = None
        self.dim = len(one)
        self.n = None
        self.struct = struct
        self.one = list(one)
        self.zero = [mpq(0)] * self.dim
        self._radical = None
        return self

    # -- element arithmetic
    def coords(self, mat: Matrix):
        w = flatten(mat)
        c = [sum((w[p] * self._sub_inv[k][i] for k, p in enumerate(self._piv)), mpq(0)) for i in range(self.dim)]
        # verify membership
        acc = [mpq(0)] * self._width
        for ci, b in zip(c, self._flat_basis()):
            if ci:
                for j, x in enumerate(b):
                    if x:
                        acc[j] += ci * x
        return c if acc == w else None

    def _flat_basis(self):
        if not hasattr(self, "_fb"):
            self._fb = [flatten(b) for b in self.basis]
        return self._fb

    def to_matrix(self, a) -> Matrix:
        out = Matrix.zero(self.n, self.n, self.tower)
        for c, b in zip(a, self.basis):
            if c:
                out = out + b.scale(c)
        return out

    def mul(self, a, b):
        out = [mpq(0)] * self.dim
        for i, x in enumerate(a):
            if not x:
                continue
            srow = self.struct[i]
            for j, y in enumerate(b):
                if not y:
                    continue
                xy = x * y
                for k, s in enumerate(srow[j]):
                    if s:
                        out[k] += xy * s
        return out

    def add(self, a, b):
        return [x + y for x, y in zip(a, b)]

    def sub(self, a, b):
        return [x - y for x, y in zip(a, b)]

    def scale(self, a, c):
        return [x * c for x in a]

    def is_idempotent(self, e) -> bool:
        return self.mul(e, e) == list(e)

    def is_commutative(self) -> bool:
        return all(self.struct[i][j] == self.struct[j][i] for i in range(self.dim) for j in range(i))

    def left_regular(self, a):
        """Matrix (rows) of x -> a*x in the basis."""
        cols = [self.mul(a, [mpq(1) if k == j else mpq(0) for k in range(self.dim)]) for j in range(self.dim)]
        return [[cols[j][i] for j in range(self.dim)] for i in range(self.dim)]

    def eval_poly(self, p: Poly, a):
        acc = list(self.zero)
        for c in reversed(p.coeffs):
            acc = self.add(self.mul(acc, a), self.scale(self.one, c))
        return acc

    # -- structure
    def radical(self):
        """K-basis of the Jacobson radical (kernel of the trace form)."""
        if self._radical is None:
            tr = [sum((self.struct[k][l][l] for l in range(self.dim)), mpq(0)) for k in range(self.dim)]
            form = [[sum((c * t for c, t in zip(self.struct[i][j], tr)), mpq(0)) for j in range(self.dim)]
                    for i in range(self.dim)]
            self._radical = kernel_rows(form, self.dim)
        return [list(v) for v in self._radical]

    def trace_form(self):
        tr = [sum((self.struct[k][l][l] for l in range(self.dim)), mpq(0)) for k in range(self.dim)]
        return [[sum((c * t for c, t in zip(self.struct[i][j], tr)), mpq(0)) for j in range(self.dim)]
                for i in range(self.dim)]

    def _quotient_frame(self):
        """Change of basis to (radical basis, complement) and its inverse."""
        if hasattr(self, "_qframe"):
            return self._qframe
        rad = self.radical()
        work = [list(v) for v in rad]
        rank, piv = rref_rows(work, self.dim)
        comp = []
        pivset = set(piv)
        for j in range(self.dim):
            if j not in pivset:
                comp.append([mpq(1) if k == j else mpq(0) for k in range(self.dim)])
        frame = rad + comp
        # columns of T are the frame vectors; coords in frame = T^{-1} a
        T = Matrix.from_rows([[frame[j][i] for j in range(self.dim)] for i in range(self.dim)])
        Tinv = T.inverse().to_rows()
        self._qframe = (len(rad), comp, Tinv)
        return self._qframe

    def quotient_coords(self, a):
        r, comp, Tinv = self._quotient_frame()
        full = [sum((row[k] * a[k] for k in range(self.dim) if a[k]), mpq(0)) for row in Tinv]
        return full[r:]

    def quotient_dim(self) -> int:
        r, comp, _ = self._quotient_frame()
        return len(comp)

    def quotient_regular(self, a):
        """Matrix (rows) of left multiplication by a on A/J."""
        r, comp, _ = self._quotient_frame()
        cols = [self.quotient_coords(self.mul(a, u)) for u in comp]
        q = len(comp)
        return [[cols[j][i] for j in range(q)] for i in range(q)]

    def quotient_is_commutative(self) -> bool:
        r, comp, _ = self._quotient_frame()
        for i, u in enumerate(comp):
            for v in comp[:i]:
                if any(self.quotient_coords(self.sub(self.mul(u, v), self.mul(v, u)))):
                    return False
        return True

    def quotient_center(self):
        """Elements of A (complement span) whose images are central in A/J."""
        r, comp, _ = self._quotient_frame()
        q = len(comp)
        # z = sum c_i u_i is central iff [z, u_j] lies in J for every j
        rows = []
        for uj in comp:
            cols = [self.quotient_coords(self.sub(self.mul(ui, uj), self.mul(uj, ui))) for ui in comp]
            rows.extend([[cols[i][k] for i in range(q)] for k in range(q)])
        out = []
        for c in kernel_rows(rows, q):
            z = list(self.zero)
            for ci, u in zip(c, comp):
                if ci:
                    z = self.add(z, self.scale(u, ci))
            out.append(z)
        return out

    def quotient_semisimple_check(self) -> bool:
        """Trace form of A/J on the complement is nondegenerate."""
        r, comp, _ = self._quotient_frame()
        q = len(comp)
        if q == 0:
            return True
        mats = [Matrix.from_rows(self.quotient_regular(u)) for u in comp]
        form = Matrix.from_rows([[(mats[i] @ mats[j]).trace() for j in range(q)] for i in range(q)])
        return form.det() != 0

    def quotient_min_poly(self, a) -> Poly:
        return matrix_min_poly(Matrix.from_rows(self.quotient_regular(a)))

    # -- idempotents
    def _split(self, a, f: Poly):
        """Idempotent from a non-primary minimal polynomial of a mod J, lifted to A."""
        _, facs = poly_factor(f)
        if len(facs) < 2:
            return None
        g = facs[0][0] ** facs[0][1]
        h = Poly.const(1)
        for q, e in facs[1:]:
            h = h * q ** e
        _, s, _ = poly_xgcd(h, g)
        eps = (h * s) % f
        u = self.eval_poly(eps, a)
        for _ in range(64):
            u2 = self.mul(u, u)
            if u2 == u:
                break
            u3 = self.mul(u2, u)
            u = self.sub(self.scale(u2, 3), self.scale(u3, 2))
        if not self.is_idempotent(u) or u == self.zero or u == self.one:
            return None
        return u

    def _samples(self, vecs, seed, budget):
        rng = random.Random(seed)
        for _ in range(budget):
            a = list(self.zero)
            for v in vecs:
                c = rng.randint(-3, 3)
                if c:
                    a = self.add(a, self.scale(v, c))
            yield a
        for v in vecs:
            yield list(v)
        for i, v in enumerate(vecs):
            for w in vecs[i + 1:]:
                yield self.add(v, w)

    def find_idempotent(self, seed: int = 0):
        """Return ``(e or None, flag)`` with flag Complete or Randomized."""
        e, flag, _ = self._idempotent_search(seed)
        return e, flag

    def _idempotent_search(self, seed):
        q = self.quotient_dim()
        if q <= 1:
            return None, COMPLETE, "quotient by the radical is K"
        r, comp, _ = self._quotient_frame()
        if self.quotient_is_commutative():
            for a in self._samples(comp, seed, PRIMITIVE_SAMPLES):
                f = self.quotient_min_poly(a)
                if len(poly_factor(f)[1]) >= 2:
                    e = self._split(a, f)
                    if e is not None:
                        return e, COMPLETE, "split minimal polynomial in commutative quotient"
                elif f.degree == q:
                    return None, COMPLETE, f"primitive element with irreducible minimal polynomial of degree {q}"
            return None, RANDOMIZED, "no primitive element found within budget"
        # central idempotents first: the centre of A/J is commutative, so this step is exact
        centre = self.quotient_center()
        if len(centre) > 1:
            for a in self._samples(centre, seed, PRIMITIVE_SAMPLES):
                f = self.quotient_min_poly(a)
                if len(poly_factor(f)[1]) >= 2:
                    e = self._split(a, f)
                    if e is not None:
                        return e, COMPLETE, "split minimal polynomial of a central element"
        basis = [[mpq(1) if k == j else mpq(0) for k in range(self.dim)] for j in range(self.dim)]
        for a in self._samples(basis, seed, NONCOMMUTATIVE_DRAWS):
            f = self.quotient_min_poly(a)
            if len(poly_factor(f)[1]) >= 2:
                e = self._split(a, f)
                if e is not None:
                    return e, RANDOMIZED, "split minimal polynomial of a sampled element"
        return None, RANDOMIZED, f"noncommutative quotient; no splitting in {NONCOMMUTATIVE_DRAWS} draws"

    def is_local(self, seed: int = 0) -> LocalityVerdict:
        e, flag, note = self._idempotent_search(seed)
        if e is not None:
            wm = self.to_matrix(e) if self.basis is not None else None
            return LocalityVerdict(NOT_LOCAL, tuple(e), note, wm)
        if flag == COMPLETE:
            return LocalityVerdict(LOCAL_CERTIFIED, None, note)
        return LocalityVerdict(PROBABLY_LOCAL, None, note)


def radical(a: FinDimAlgebra):
    return a.radical()


def find_idempotent(a: FinDimAlgebra, seed: int = 0):
    return a.find_idempotent(seed)


def is_local(a: FinDimAlgebra, seed: int = 0) -> LocalityVerdict:
    return a.is_local(seed)
