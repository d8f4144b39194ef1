"""Matrices over S = L[x]: column Hermite bases and diagonalization.

Matrices are lists of rows of :class:`Poly` over the tower.  Only what the
lattice descriptors need: bases of S-spans, triangular solves and a
Smith-style diagonalization with both transforms.
"""

from __future__ import annotations

from .exactfield import Poly


def pzero(field):
    return Poly._raw([], field)


def pone(field):
    return Poly.const(1, field)


def identity(n, field):
    return [[pone(field) if i == j else pzero(field) for j in range(n)] for i in range(n)]


def transpose(m):
    return [list(r) for r in zip(*m)] if m else []


def matmul(a, b, field):
    out = []
    for r in a:
        row = []
        for j in range(len(b[0])):
            acc = pzero(field)
            for k, x in enumerate(r):
                if x and b[k][j]:
                    acc = acc + x * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def matvec(a, v, field):
    out = []
    for r in a:
        acc = pzero(field)
        for x, y in zip(r, v):
            if x and y:
                acc = acc + x * y
        out.append(acc)
    return out


def evaluate0(m):
    """Entrywise value at x = 0."""
    return [[e[0] for e in r] for r in m]


def det(m, field):
    """Determinant by fraction-free elimination (Bareiss) over L[x]."""
    n = len(m)
    if n == 0:
        return pone(field)
    a = [list(r) for r in m]
    sign = 1
    prev = pone(field)
    for k in range(n - 1):
        if not a[k][k]:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return pzero(field)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]).exact_div(prev)
        prev = a[k][k]
    return a[n - 1][n - 1] * sign


def column_basis(vectors, n, field):
    """S-basis of the S-span of ``vectors`` (each a length-n list of Poly).

    Returns the basis as a list of column vectors in lower-echelon form:
    column j has its first nonzero entry at a strictly increasing row and
    that entry is monic.
    """
    cols = [list(v) for v in vectors if any(v)]
    basis = []
    row = 0
    while cols and row < n:
        # gcd-reduce entries at ``row`` among remaining columns
        while True:
            nz = [c for c in cols if c[row]]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda c: c[row].degree)
            piv = nz[0]
            new = [piv]
            for c in cols:
                if c is piv:
                    continue
                if c[row]:
                    q = c[row] // piv[row]
                    c = [a - q * b for a, b in zip(c, piv)]
                if any(c):
                    new.append(c)
            cols = new
        nz = [c for c in cols if c[row]]
        if nz:
            piv = nz[0]
            inv = piv[row].lc.inverse()
            piv = [a * inv for a in piv]
            basis.append(piv)
            cols = [c for c in cols if c is not nz[0]]
        row += 1
    return basis


def solve_echelon(basis, g, field):
    """Coefficients s with sum s_j basis_j == g, or None if g is not in the S-span."""
    g = list(g)
    n = len(g)
    s = []
    for col in basis:
        r = next(i for i in range(n) if col[i])
        q, rem = g[r].divmod(col[r])
        if rem:
            return None
        for i in range(n):
            if q and col[i]:
                g[i] = g[i] - q * col[i]
        s.append(q)
    if any(g):
        return None
    return s


def diagonalize(z, field):
    """Return ``(Pinv, P, D)`` with ``Pinv @ z @ Q == D`` diagonal and ``P = Pinv^-1``.

    ``z`` is k x h of full column rank.  Only the row transforms are tracked
    (the column transform is not needed by callers).
    """
    k = len(z)
    h = len(z[0]) if z else 0
    a = [list(r) for r in z]
    pinv = identity(k, field)
    p = identity(k, field)

    def row_add(i, j, c):  # row_i += c * row_j
        a[i] = [x + c * y for x, y in zip(a[i], a[j])]
        pinv[i] = [x + c * y for x, y in zip(pinv[i], pinv[j])]
        for r in range(k):  # P col_j -= c * col_i
            if p[r][i]:
                p[r][j] = p[r][j] - c * p[r][i]

    def row_swap(i, j):
        a[i], a[j] = a[j], a[i]
        pinv[i], pinv[j] = pinv[j], pinv[i]
        for r in range(k):
            p[r][i], p[r][j] = p[r][j], p[r][i]

    def col_add(i, j, c):  # col_i += c * col_j
        for r in range(k):
            if a[r][j]:
                a[r][i] = a[r][i] + c * a[r][j]

    for t in range(h):
        while True:
            cands = [(a[i][j].degree, i, j) for i in range(t, k) for j in range(t, h) if a[i][j]]
            if not cands:
                raise ValueError("matrix is not of full column rank")
            _, i, j = min(cands)
            if i != t:
                row_swap(i, t)
            if j != t:
                for r in range(k):
                    a[r][j], a[r][t] = a[r][t], a[r][j]
            piv = a[t][t]
            clean = True
            for i in range(t + 1, k):
                if a[i][t]:
                    q, rem = a[i][t].divmod(piv)
                    row_add(i, t, -q)
                    if rem:
                        clean = False
            for j in range(t + 1, h):
                if a[t][j]:
                    q, rem = a[t][j].divmod(piv)
                    col_add(j, t, -q)
                    if rem:
                        clean = False
            if clean:
                break
    return pinv, p, a


def adjugate(m, field):
    """Classical adjoint: ``adjugate(m) @ m == det(m) * I``."""
    n = len(m)
    if n == 1:
        return [[pone(field)]]
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[m[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
            c = det(minor, field)
            out[j][i] = c if (i + j) % 2 == 0 else -c
    return out


def scalar(m, c):
    return [[e * c for e in r] for r in m]
