"""Exact dense linear algebra over Q or a field tower.

Entries are any exact field elements supporting ``+ - * /`` and truth
testing (``gmpy2.mpq`` or :class:`TowerElement`).  The ``*_rows`` helpers
work on plain lists of rows and are the hot path for K-linear systems.
"""

from __future__ import annotations

from gmpy2 import mpq

from .exactfield.poly import QQ, Poly, poly_lcm


class NonSquare(ValueError):
    pass


class Matrix:
    __slots__ = ("rows", "cols", "entries", "field")

    def __init__(self, rows: int, cols: int, entries, field=QQ):
        entries = [field(e) for e in entries]
        if len(entries) != rows * cols:
            raise ValueError("entries length must equal rows*cols")
        self.rows, self.cols, self.entries, self.field = rows, cols, entries, field

    @classmethod
    def from_rows(cls, rows, field=QQ):
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        return cls(len(rows), ncols, [e for r in rows for e in r], field)

    @classmethod
    def identity(cls, n, field=QQ):
        return cls(n, n, [field.one() if i == j else field.zero() for i in range(n) for j in range(n)], field)

    @classmethod
    def zero(cls, r, c, field=QQ):
        return cls(r, c, [field.zero()] * (r * c), field)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i):
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j):
        return self.entries[j::self.cols]

    def to_rows(self):
        return [self.row(i) for i in range(self.rows)]

    def transpose(self):
        return Matrix.from_rows([self.col(j) for j in range(self.cols)], self.field) if self.rows else Matrix(self.cols, 0, [], self.field)

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.rows == other.rows and self.cols == other.cols
                and all(a == b for a, b in zip(self.entries, other.entries)))

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(self.entries)))

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols}, {[[str(e) for e in r] for r in self.to_rows()]})"

    def __add__(self, other):
        return Matrix(self.rows, self.cols, [a + b for a, b in zip(self.entries, other.entries)], self.field)

    def __sub__(self, other):
        return Matrix(self.rows, self.cols, [a - b for a, b in zip(self.entries, other.entries)], self.field)

    def __neg__(self):
        return Matrix(self.rows, self.cols, [-a for a in self.entries], self.field)

    def scale(self, c):
        return Matrix(self.rows, self.cols, [a * c for a in self.entries], self.field)

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.cols != other.rows:
                raise ValueError("shape mismatch")
            return Matrix.from_rows(matmul_rows(self.to_rows(), other.to_rows(), self.field), self.field) if self.rows else Matrix(0, other.cols, [], self.field)
        return [sum((a * b for a, b in zip(self.row(i), other)), self.field.zero()) for i in range(self.rows)]

    def is_zero(self):
        return not any(self.entries)

    def is_square(self):
        return self.rows == self.cols

    def trace(self):
        return sum((self[i, i] for i in range(self.rows)), self.field.zero())

    def __pow__(self, k):
        result = Matrix.identity(self.rows, self.field)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def det(self):
        if not self.is_square():
            raise NonSquare("determinant of a non-square matrix")
        return det_rows(self.to_rows(), self.field)

    def inverse(self):
        if not self.is_square():
            raise NonSquare("inverse of a non-square matrix")
        n = self.rows
        one, zero = self.field.one(), self.field.zero()
        aug = [r + [one if i == j else zero for j in range(n)] for i, r in enumerate(self.to_rows())]
        rank, piv = rref_rows(aug, n)
        if rank < n or piv[:n] != list(range(n)):
            raise ZeroDivisionError("singular matrix")
        return Matrix.from_rows([r[n:] for r in aug], self.field)

    def rank(self):
        return rref_rows([list(r) for r in self.to_rows()], self.cols)[0]

    def apply_poly(self, p: Poly):
        n = self.rows
        acc = Matrix.zero(n, n, self.field)
        for c in reversed(p.coeffs):
            acc = acc @ self
            for i in range(n):
                acc.entries[i * n + i] = acc.entries[i * n + i] + c
        return acc


# ------------------------------------------------------------------ row helpers


def matmul_rows(a, b, field=QQ):
    zero = field.zero()
    bt = list(zip(*b)) if b else []
    out = []
    for r in a:
        nz = [(k, x) for k, x in enumerate(r) if x]
        row = []
        for col in bt:
            acc = zero
            for k, x in nz:
                y = col[k]
                if y:
                    acc = acc + x * y
            row.append(acc)
        out.append(row)
    return out


def rref_rows(rows, ncols):
    """In-place reduced row echelon form of the first ``ncols`` columns.

    Returns ``(rank, pivots)``; rows beyond the rank are zero afterwards and
    sorted to the bottom.
    """
    nrows = len(rows)
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = None
        for i in range(r, nrows):
            if rows[i][c]:
                p = i
                break
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        prow = rows[r]
        inv = 1 / prow[c]
        width = len(prow)
        nzcols = [j for j in range(c, width) if prow[j]]
        for j in nzcols:
            prow[j] = prow[j] * inv
        for i in range(nrows):
            if i == r:
                continue
            row = rows[i]
            f = row[c]
            if f:
                for j in nzcols:
                    row[j] = row[j] - f * prow[j]
        pivots.append(c)
        r += 1
    return r, pivots


def kernel_rows(rows, ncols, field=QQ):
    """Basis of the right null space of the matrix given by ``rows``."""
    work = [list(r) for r in rows]
    rank, piv = rref_rows(work, ncols)
    pivset = set(piv)
    free = [j for j in range(ncols) if j not in pivset]
    basis = []
    zero, one = field.zero(), field.one()
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for i, pc in enumerate(piv):
            v[pc] = -work[i][f]
        basis.append(v)
    return basis


def det_rows(rows, field=QQ):
    work = [list(r) for r in rows]
    n = len(work)
    det = field.one()
    for c in range(n):
        p = None
        for i in range(c, n):
            if work[i][c]:
                p = i
                break
        if p is None:
            return field.zero()
        if p != c:
            work[c], work[p] = work[p], work[c]
            det = -det
        pr = work[c]
        det = det * pr[c]
        inv = 1 / pr[c]
        for i in range(c + 1, n):
            f = work[i][c]
            if f:
                f = f * inv
                row = work[i]
                for j in range(c, n):
                    if pr[j]:
                        row[j] = row[j] - f * pr[j]
    return det


def row_space_basis(vectors, ncols):
    """Reduced basis of the span of ``vectors`` (echelon rows)."""
    work = [list(v) for v in vectors]
    rank, _ = rref_rows(work, ncols)
    return work[:rank]


# ------------------------------------------------------------------ public ops


def rref(m: Matrix):
    """Return ``(reduced matrix, rank, pivot columns)``."""
    rows = [list(r) for r in m.to_rows()]
    rank, piv = rref_rows(rows, m.cols)
    red = Matrix(m.rows, m.cols, [e for r in rows for e in r], m.field) if m.rows else Matrix(0, m.cols, [], m.field)
    return red, rank, piv


def kernel(m: Matrix):
    """Basis of the right null space as a list of vectors."""
    return kernel_rows(m.to_rows(), m.cols, m.field)


def solve(m: Matrix, b):
    """One solution of ``m x = b`` or ``None``."""
    rows = [r + [bi] for r, bi in zip(m.to_rows(), b)]
    rank, piv = rref_rows(rows, m.cols + 1)
    if m.cols in piv:
        return None
    x = [m.field.zero()] * m.cols
    for i, pc in enumerate(piv):
        x[pc] = rows[i][m.cols]
    return x


def matrix_min_poly(m: Matrix) -> Poly:
    """Monic minimal polynomial: lcm of the Krylov annihilators of the unit vectors."""
    if not m.is_square():
        raise NonSquare("minimal polynomial of a non-square matrix")
    n = m.rows
    field = m.field
    result = Poly.const(1, field)
    rows = m.to_rows()
    for j in range(n):
        v = [field.one() if i == j else field.zero() for i in range(n)]
        # skip if current result already annihilates e_j
        if not any(_poly_apply_vec(result, rows, v, field)):
            continue
        krylov = [v]
        while True:
            w = [sum((a * b for a, b in zip(r, krylov[-1])), field.zero()) for r in rows]
            krylov.append(w)
            cols = [[krylov[k][i] for k in range(len(krylov))] for i in range(n)]
            ker = kernel_rows(cols, len(krylov), field)
            if ker:
                ann = Poly(ker[0], field).monic()
                result = poly_lcm(result, ann)
                break
    return result


def _poly_apply_vec(p: Poly, rows, v, field):
    acc = [field.zero()] * len(v)
    for c in reversed(p.coeffs):
        acc = [sum((a * b for a, b in zip(r, acc)), field.zero()) for r in rows]
        acc = [a + c * x for a, x in zip(acc, v)]
    return acc


def sparse_echelon(rows):
    """Row echelon form of sparse rows (dicts col -> value) over Q.

    Returns ``{pivot_col: row}`` where each row has leading entry 1 at its
    pivot column and no entries left of it.
    """
    piv = {}
    for r in rows:
        row = {c: v for c, v in r.items() if v}
        while row:
            c = min(row)
            prow = piv.get(c)
            if prow is None:
                inv = 1 / row[c]
                piv[c] = {j: v * inv for j, v in row.items()}
                break
            f = row[c]
            for j, v in prow.items():
                nv = row.get(j, 0) - f * v
                if nv:
                    row[j] = nv
                else:
                    row.pop(j, None)
    return piv


def sparse_kernel(rows, ncols):
    """Kernel basis (dense vectors over Q) of a sparse system."""
    piv = sparse_echelon(rows)
    free = [j for j in range(ncols) if j not in piv]
    order = sorted(piv, reverse=True)
    basis = []
    zero = mpq(0)
    for f in free:
        v = {f: mpq(1)}
        for c in order:
            s = zero
            for j, a in piv[c].items():
                if j != c and j in v:
                    s += a * v[j]
            if s:
                v[c] = -s
        basis.append([v.get(j, zero) for j in range(ncols)])
    return basis


def sparse_rank(rows):
    return len(sparse_echelon(rows))
