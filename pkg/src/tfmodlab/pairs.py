"""Artinian pairs V -> L^n and the torsion-free modules M = V + (xS)^n.

A finitely generated torsion-free module over T = K + xL[x] (or its
localization at xL[x]) of rank n is determined up to isomorphism by a
K-subspace V of L^n with VL = L^n.  Morphisms are matrices A over L with
A V_p contained in V_q, so everything reduces to K-linear algebra once each
L-entry is expanded in the power basis of L.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field as dc_field

from gmpy2 import mpq

from .algebra import LOCAL_CERTIFIED, NOT_LOCAL, PROBABLY_LOCAL, FinDimAlgebra, LocalityVerdict
from .exactfield import QQ, Poly, TowerMismatch, format_rational, theta7
from .linalg import Matrix, det_rows, kernel_rows, rref_rows, sparse_kernel
from . import polymat


class PairError(ValueError):
    pass


class DependentGenerators(PairError):
    pass


class NotFullLSpan(PairError):
    pass


class IndependencePreconditionFailed(PairError):
    pass


class NotSaturated(PairError):
    pass


class NotThreeGenerated(PairError):
    pass


class TruncationTooSmall(PairError):
    pass


class UncertifiedFactors(PairError):
    pass


def _flat(vec):
    out = []
    for e in vec:
        out.extend(e.c)
    return out


def _unflat(coords, n, tower):
    d = tower.degree
    return tuple(tower(coords[i * d:(i + 1) * d]) for i in range(n))


def _l_rank(vectors, n, tower):
    if not vectors:
        return 0
    cols = [[v[i] for v in vectors] for i in range(n)]
    return rref_rows(cols, len(vectors))[0]


def k_basis(vectors, n, tower):
    """Echelon K-basis (as L-vectors) of the K-span of ``vectors``."""
    if not vectors:
        return []
    work = [_flat(v) for v in vectors]
    rank, _ = rref_rows(work, n * tower.degree)
    return [_unflat(r, n, tower) for r in work[:rank]]


class PairModule:
    """The pair V -> L^n, i.e. the module V + (xS)^n."""

    def __init__(self, n: int, vectors, tower=None, _check=True):
        tower = tower or theta7()
        self.tower = tower
        self.n = int(n)
        vs = []
        for v in vectors:
            v = tuple(tower(e) for e in v)
            if len(v) != self.n:
                raise PairError(f"vector of length {len(v)} in a rank-{self.n} pair")
            vs.append(v)
        self.V = tuple(vs)
        if _check:
            if self.n < 0:
                raise PairError("rank must be nonnegative")
            flat = [_flat(v) for v in vs]
            if flat and rref_rows([list(r) for r in flat], self.n * tower.degree)[0] != len(vs):
                raise DependentGenerators("generators of V are K-linearly dependent")
            if _l_rank(vs, self.n, tower) != self.n:
                raise NotFullLSpan("VL is a proper subspace of L^n")
        self._cache = {}

    @property
    def dim(self) -> int:
        """dim_K V."""
        return len(self.V)

    @property
    def rank(self) -> int:
        return self.n

    def kvectors(self):
        if "kv" not in self._cache:
            self._cache["kv"] = [_flat(v) for v in self.V]
        return self._cache["kv"]

    def canonical(self):
        """Reduced echelon K-basis; equal iff the subspaces V are equal."""
        if "canon" not in self._cache:
            work = [list(r) for r in self.kvectors()]
            rref_rows(work, self.n * self.tower.degree)
            self._cache["canon"] = tuple(tuple(r) for r in work)
        return self._cache["canon"]

    def same_subspace(self, other: "PairModule") -> bool:
        return self.n == other.n and self.canonical() == other.canonical()

    def annihilator(self):
        """Rows y (over K) with y . w == 0 for all w in V: x in V iff all y.x == 0."""
        if "ann" not in self._cache:
            self._cache["ann"] = kernel_rows(self.kvectors(), self.n * self.tower.degree) if self.V else [
                [mpq(1) if i == j else mpq(0) for i in range(self.n * self.tower.degree)]
                for j in range(self.n * self.tower.degree)]
        return self._cache["ann"]

    def contains(self, vec) -> bool:
        x = _flat(vec)
        return all(not sum((a * b for a, b in zip(y, x) if a), mpq(0)) for y in self.annihilator())

    def apply(self, A: Matrix) -> "PairModule":
        """The pair A.V for an invertible n x n matrix A over L."""
        if A.rows != self.n or A.cols != self.n:
            raise PairError("coordinate change has the wrong shape")
        return PairModule(self.n, [tuple(A @ list(v)) for v in self.V], self.tower)

    def __repr__(self):
        return f"PairModule(n={self.n}, dim={self.dim})"

    def __str__(self):
        cols = ["(" + ", ".join(str(e) for e in v) + ")" for v in self.V]
        return f"V = K<{', '.join(cols)}> in L^{self.n}"

    def to_json(self):
        return {"n": self.n, "tower": self.tower.name,
                "V": [[e.to_json() for e in v] for v in self.V]}

    @classmethod
    def from_json(cls, data, tower=None):
        tower = tower or theta7()
        if data.get("tower", tower.name) != tower.name:
            raise TowerMismatch(f"pair over {data.get('tower')} but tower is {tower.name}")
        return cls(data["n"], [[tower(list(e)) for e in v] for v in data["V"]], tower)


# ------------------------------------------------------------------ constructors


def make_pair(n: int, vectors, tower=None) -> PairModule:
    return PairModule(n, vectors, tower)


def free_pair(n: int, tower=None) -> PairModule:
    if n < 1:
        raise PairError("free pair needs n >= 1")
    tower = tower or theta7()
    one, zero = tower.one(), tower.zero()
    return PairModule(n, [tuple(one if i == j else zero for i in range(n)) for j in range(n)], tower)


def zero_pair(tower=None) -> PairModule:
    return PairModule(0, [], tower)


def is_free(p: PairModule) -> bool:
    """Some K-basis of V is an L-basis of L^n."""
    return p.dim == p.n and _l_rank(p.V, p.n, p.tower) == p.n


def direct_sum(p: PairModule, q: PairModule) -> PairModule:
    if p.tower != q.tower:
        raise TowerMismatch("direct sum of pairs over different towers")
    z = p.tower.zero()
    vs = [tuple(v) + (z,) * q.n for v in p.V] + [(z,) * p.n + tuple(w) for w in q.V]
    return PairModule(p.n + q.n, vs, p.tower, _check=False)


def direct_sum_all(pairs) -> PairModule:
    pairs = list(pairs)
    out = pairs[0]
    for p in pairs[1:]:
        out = direct_sum(out, p)
    return out


def independence_ok(alpha, beta, tower) -> bool:
    elems = [tower.one(), alpha, beta, alpha * alpha, alpha * beta, beta * beta]
    return rref_rows([list(e.c) for e in elems], tower.degree)[0] == 6


def psi_pair(n: int, t, alpha=None, beta=None, tower=None) -> PairModule:
    """Columns of [I | alpha I + beta (t I + H)], H the lower shift."""
    tower = tower or (alpha.tower if alpha is not None and hasattr(alpha, "tower") else theta7())
    alpha = tower(alpha) if alpha is not None else tower.theta
    beta = tower(beta) if beta is not None else tower.theta ** 3
    if n < 2:
        raise PairError("the construction needs n >= 2")
    if not independence_ok(alpha, beta, tower):
        raise IndependencePreconditionFailed("{1, a, b, a^2, ab, b^2} is K-dependent")
    t = QQ(t)
    zero, one = tower.zero(), tower.one()
    diag = alpha + beta * t
    vs = [tuple(one if i == j else zero for i in range(n)) for j in range(n)]
    for j in range(n):
        col = [zero] * n
        col[j] = diag
        if j + 1 < n:
            col[j + 1] = beta
        vs.append(tuple(col))
    return PairModule(n, vs, tower)


def psi_matrix_text(n: int, t, alpha="a", beta="b") -> str:
    """Plain-text rendering of the n x 2n matrix [I | aI + b(tI + H)]."""
    diag = f"{alpha}+{format_rational(QQ(t))}{beta}" if QQ(t) else alpha
    rows = []
    for i in range(n):
        left = ["1" if i == j else "0" for j in range(n)]
        right = []
        for j in range(n):
            right.append(diag if i == j else (beta if i == j + 1 else "0"))
        rows.append(left + ["|"] + right)
    width = max(len(x) for r in rows for x in r)
    return "\n".join("[ " + " ".join(x.rjust(width) for x in r) + " ]" for r in rows)


# ------------------------------------------------------------------ morphisms


def hom_pairs(p: PairModule, q: PairModule):
    """K-basis of {A in M_{q.n x p.n}(L) : A V_p in V_q}."""
    if p.tower != q.tower:
        raise TowerMismatch("hom between pairs over different towers")
    tower = p.tower
    d = tower.degree
    np_, nq = p.n, q.n
    if np_ == 0 or nq == 0:
        return []
    ann = q.annihilator()
    # y split into blocks y_i (length d) per output coordinate
    ann_blocks = [[y[i * d:(i + 1) * d] for i in range(nq)] for y in ann]
    rows = []
    for v in p.V:
        mats = [e.matrix() for e in v]  # mats[j][l][k] = coord l of theta^k * v_j
        for blocks in ann_blocks:
            row = {}
            for i, yi in enumerate(blocks):
                nzl = [(l, a) for l, a in enumerate(yi) if a]
                if not nzl:
                    continue
                for j in range(np_):
                    mj = mats[j]
                    base = (i * np_ + j) * d
                    for k in range(d):
                        s = mpq(0)
                        for l, a in nzl:
                            m = mj[l][k]
                            if m:
                                s += a * m
                        if s:
                            row[base + k] = s
            if row:
                rows.append(row)
    ker = sparse_kernel(rows, nq * np_ * d)
    out = []
    for vec in ker:
        ents = [tower(vec[idx * d:(idx + 1) * d]) for idx in range(nq * np_)]
        out.append(Matrix(nq, np_, ents, tower))
    return out


def endo_algebra(p: PairModule) -> FinDimAlgebra:
    if "end" not in p._cache:
        p._cache["end"] = FinDimAlgebra(hom_pairs(p, p), p.tower, closed=True)
    return p._cache["end"]


def is_indecomposable(p: PairModule, seed: int = 0) -> LocalityVerdict:
    """Locality verdict for End(p); LocalCertified means certified indecomposable."""
    if p.n == 0:
        return LocalityVerdict(NOT_LOCAL, None, "zero module")
    return endo_algebra(p).is_local(seed)


# -- isomorphism


def _mpoly_mul(a, b):
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            v = out.get(e)
            v = ca * cb if v is None else v + ca * cb
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return out


def _mpoly_add(a, b, sign=1):
    out = dict(a)
    for e, c in b.items():
        v = out.get(e)
        v = (c if sign > 0 else -c) if v is None else (v + c if sign > 0 else v - c)
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def symbolic_det(mats):
    """Determinant of sum_i c_i mats[i] as a polynomial {exponents: coeff} over L."""
    n = mats[0].rows
    h = len(mats)
    entry = {}
    for i in range(n):
        for j in range(n):
            poly = {}
            for v, m in enumerate(mats):
                c = m[i, j]
                if c:
                    e = tuple(1 if k == v else 0 for k in range(h))
                    poly[e] = c
            entry[i, j] = poly
    memo = {}

    def minor(row, mask):
        if row == n:
            return {tuple([0] * h): mats[0].field.one()}
        key = mask
        if key in memo:
            return memo[key]
        total = {}
        sign = 1
        for c in range(n):
            if mask & (1 << c):
                continue
            ent = entry[row, c]
            if ent:
                sub = minor(row + 1, mask | (1 << c))
                if sub:
                    total = _mpoly_add(total, _mpoly_mul(ent, sub), sign)
            sign = -sign
        memo[key] = total
        return total

    return minor(0, 0)


def _combo(mats, coeffs):
    out = None
    for m, c in zip(mats, coeffs):
        if c:
            t = m.scale(c)
            out = t if out is None else out + t
    return out if out is not None else Matrix.zero(mats[0].rows, mats[0].cols, mats[0].field)


def is_isomorphic(p: PairModule, q: PairModule, seed: int = 0):
    """Return ``(iso, witness)``; witness A is invertible over L with A V_p = V_q."""
    if p.tower != q.tower:
        raise TowerMismatch("pairs over different towers")
    if p.n != q.n or p.dim != q.dim:
        return False, None
    if p.n == 0:
        return True, Matrix(0, 0, [], p.tower)
    if p.same_subspace(q):
        return True, Matrix.identity(p.n, p.tower)
    homs = hom_pairs(p, q)
    if not homs:
        return False, None
    rng = random.Random(seed)
    for trial in range(8):
        coeffs = [rng.randint(-3, 3) for _ in homs]
        if trial == 0:
            coeffs = [1] * len(homs)
        A = _combo(homs, coeffs)
        if A.det():
            return True, A
    poly = symbolic_det(homs)
    if not poly:
        return False, None
    # a nonzero polynomial of degree <= n in each variable has a nonroot in {0..n}^h
    for point in itertools.product(range(p.n + 1), repeat=len(homs)):
        A = _combo(homs, point)
        if A.det():
            return True, A
    raise AssertionError("nonzero determinant polynomial vanished on a full grid")


# ------------------------------------------------------------------ decomposition


@dataclass
class DecompositionReport:
    factors: list
    classes: list
    levels: list
    witness: Matrix = dc_field(repr=False)
    source: PairModule = dc_field(repr=False, default=None)

    @property
    def certified(self) -> bool:
        return all(lv != PROBABLY_LOCAL for lv in self.levels)

    def to_json(self):
        w = self.witness
        return {
            "factors": [f.to_json() for f in self.factors],
            "iso_classes": self.classes,
            "certificate_levels": self.levels,
            "witness": [[e.to_json() for e in w.row(i)] for i in range(w.rows)],
        }


def _image_basis(e: Matrix):
    """L-basis (column vectors) of the image of e."""
    cols = [e.col(j) for j in range(e.cols)]
    work = [list(c) for c in cols]
    # row-reduce the transposed matrix: rows are columns of e
    rank, _ = rref_rows(work, e.rows)
    return work[:rank]


def _block_diag(blocks, tower):
    n = sum(b.rows for b in blocks)
    out = Matrix.zero(n, n, tower)
    off = 0
    for b in blocks:
        for i in range(b.rows):
            for j in range(b.cols):
                out.entries[(off + i) * n + off + j] = b[i, j]
        off += b.rows
    return out


def _split(p: PairModule, seed: int):
    """Recursive split; returns (list of (pair, tag)), W with W V_p = sum of factors."""
    tower = p.tower
    verdict = is_indecomposable(p, seed)
    if verdict.tag != NOT_LOCAL:
        return [(p, verdict.tag)], Matrix.identity(p.n, tower)
    e = verdict.witness_matrix
    one = Matrix.identity(p.n, tower)
    f = one - e
    u1 = _image_basis(e)
    u2 = _image_basis(f)
    r = len(u1)
    P = Matrix.from_rows([[c[i] for c in u1 + u2] for i in range(p.n)], tower)
    Pinv = P.inverse()
    v1 = [tuple((Pinv @ (e @ list(v)))[:r]) for v in p.V]
    v2 = [tuple((Pinv @ (f @ list(v)))[r:]) for v in p.V]
    p1 = PairModule(r, k_basis(v1, r, tower), tower)
    p2 = PairModule(p.n - r, k_basis(v2, p.n - r, tower), tower)
    f1, w1 = _split(p1, seed)
    f2, w2 = _split(p2, seed)
    return f1 + f2, _block_diag([w1, w2], tower) @ Pinv


def decompose(p: PairModule, seed: int = 0) -> DecompositionReport:
    tower = p.tower
    parts, W = _split(p, seed)
    # normalize order by (rank, dim, echelon basis)
    sizes = [q.n for q, _ in parts]
    offsets = [sum(sizes[:i]) for i in range(len(parts))]
    order = sorted(range(len(parts)), key=lambda i: (parts[i][0].n, parts[i][0].dim,
                                                       [str(x) for r in parts[i][0].canonical() for x in r]))
    perm_rows = []
    for i in order:
        perm_rows.extend(range(offsets[i], offsets[i] + sizes[i]))
    Pm = Matrix.from_rows([[tower.one() if c == r else tower.zero() for c in range(p.n)] for r in perm_rows], tower)
    W = Pm @ W
    factors = [parts[i][0] for i in order]
    levels = [parts[i][1] for i in order]
    classes = []
    reps = []
    for idx, fac in enumerate(factors):
        for cls, rep in zip(classes, reps):
            if is_isomorphic(factors[rep], fac)[0]:
                cls.append(idx)
                break
        else:
            classes.append([idx])
            reps.append(idx)
    report = DecompositionReport(factors, classes, levels, W, p)
    if factors and not p.apply(W).same_subspace(direct_sum_all(factors)):
        raise AssertionError("decomposition witness does not map V onto the sum of factors")
    return report


def _match_multisets(small, big):
    """Injective iso-matching of factor lists; returns index map or None."""
    used = set()
    mapping = {}
    for i, a in enumerate(small):
        for j, b in enumerate(big):
            if j in used:
                continue
            if is_isomorphic(a, b)[0]:
                used.add(j)
                mapping[i] = j
                break
        else:
            return None
    return mapping


def is_direct_summand(p: PairModule, q: PairModule, seed: int = 0) -> bool:
    """p is isomorphic to a direct summand of q (Krull-Schmidt matching)."""
    dp, dq = decompose(p, seed), decompose(q, seed)
    if not (dp.certified and dq.certified):
        raise UncertifiedFactors("a factor has only a ProbablyLocal verdict")
    return _match_multisets(dp.factors, dq.factors) is not None


# ------------------------------------------------------------------ quotients


def _as_poly_vector(vec, tower):
    out = []
    for e in vec:
        if isinstance(e, Poly):
            out.append(e if e.field == tower else e.map_field(tower))
        elif isinstance(e, (list, tuple)):
            out.append(Poly([tower(c) if isinstance(c, (list, tuple)) else tower(c) for c in e], tower))
        else:
            out.append(Poly.const(tower(e), tower))
    return out


def _truncated_dim(vectors, h, N, tower):
    """dim_K of the image of the R-span of ``vectors`` in S^h / x^N S^h."""
    d = tower.degree
    basis = tower.power_basis()
    gens = []
    for s in vectors:
        gens.append(s)
        for a in range(1, N):
            for w in basis:
                gens.append([(p * w).shift_x(a) for p in s])
    rows = []
    for g in gens:
        row = []
        for i in range(h):
            for a in range(N):
                row.extend(g[i][a].c)
        rows.append(row)
    return rref_rows(rows, h * N * d)[0]


def quotient_pair(k: int, generators, tower=None, truncation: int | None = None) -> PairModule:
    """Artinian pair of R^k / H for a saturated submodule H given by generators.

    Raises NotSaturated when R^k/H has torsion.
    """
    tower = tower or theta7()
    gens = [_as_poly_vector(g, tower) for g in generators]
    for g in gens:
        if len(g) != k:
            raise PairError("generator length differs from k")
        for c in g:
            if c and not c[0].is_rational():
                raise PairError("generator is not in R^k (constant term outside K)")
    gens = [g for g in gens if any(g)]
    if not gens:
        return free_pair(k, tower)
    Z = polymat.column_basis(gens, k, tower)
    h = len(Z)
    zrows = [[Z[j][i] for j in range(h)] for i in range(k)]
    pinv, P, D = polymat.diagonalize(zrows, tower)
    # coordinates of generators along the saturated basis Y = P[:, :h]
    coords = []
    for g in gens:
        c = polymat.matvec(pinv, g, tower)
        if any(c[h:]):
            raise AssertionError("generator outside the saturation")
        coords.append(c[:h])
    # primes other than x: the S-span must be saturated away from x
    T = polymat.column_basis(coords, h, tower)
    e = 0
    for j, col in enumerate(T):
        piv = next(c for c in col if c)
        if any(piv[i] for i in range(piv.degree)):
            raise NotSaturated("quotient has torsion at a maximal ideal other than xL[x]")
        e += piv.degree
    # at x: compare truncated images of H and of R^k cap U
    Y0 = [[P[i][j][0] for j in range(h)] for i in range(k)]
    d = tower.degree
    eqs = []
    for i in range(k):
        for l in range(1, d):
            row = [mpq(0)] * (h * d)
            for j in range(h):
                m = Y0[i][j].matrix()
                for kk in range(d):
                    row[j * d + kk] = m[l][kk]
            eqs.append(row)
    W = kernel_rows(eqs, h * d) if eqs else [[mpq(1) if a == b else mpq(0) for a in range(h * d)] for b in range(h * d)]
    if truncation is not None and truncation < e + 1:
        raise TruncationTooSmall(f"truncation {truncation} is below the computed bound {e + 1}")
    N = max(e + 1, truncation or 0)
    for level in (N, N + 1):
        want = len(W) + (level - 1) * h * d
        if _truncated_dim(coords, h, level, tower) != want:
            raise NotSaturated("quotient has torsion at xL[x]")
    n = k - h
    if n == 0:
        return zero_pair(tower)
    phi0 = [[pinv[h + i][j][0] for j in range(k)] for i in range(n)]
    cols = [tuple(phi0[i][j] for i in range(n)) for j in range(k)]
    return PairModule(n, k_basis(cols, n, tower), tower)


def bass_pair(a, b, c, tower=None) -> PairModule:
    """Rank-2 pair of R^3 / (R^3 cap Q (xa, xb, xc)) for a, b, c in L."""
    tower = tower or theta7()
    a, b, c = tower(a), tower(b), tower(c)
    if rref_rows([list(a.c), list(b.c), list(c.c)], tower.degree)[0] != 3:
        raise NotThreeGenerated("Ka + Kb + Kc must be 3-dimensional")
    gens = []
    for w in tower.power_basis():
        gens.append([Poly([tower.zero(), w * y], tower) for y in (a, b, c)])
    return quotient_pair(3, gens, tower)
