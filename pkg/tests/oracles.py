"""Independent reference computations used by the tests.

Nothing here imports the linear algebra or pair code under test: the
oracles work with plain ``fractions.Fraction`` and dictionaries.
"""

from fractions import Fraction
from itertools import combinations_with_replacement

DEG = 7  # theta^7 = 2


def lmul(a, b):
    """Product in Q[t]/(t^7 - 2) on coefficient lists."""
    out = [Fraction(0)] * (2 * DEG - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    for k in range(2 * DEG - 2, DEG - 1, -1):
        if out[k]:
            out[k - DEG] += 2 * out[k]
            out[k] = Fraction(0)
    return out[:DEG]


def coeffs(e):
    return [Fraction(int(c.numerator), int(c.denominator)) for c in e.c]


def nullity(rows, ncols):
    """Dimension of the kernel, by sparse elimination over Fraction."""
    pivots = {}
    rank = 0
    for row in rows:
        r = {j: v for j, v in row.items() if v}
        while r:
            j = min(r)
            if j in pivots:
                p = pivots[j]
                f = r[j]
                for k, v in p.items():
                    nv = r.get(k, 0) - f * v
                    if nv:
                        r[k] = nv
                    else:
                        r.pop(k, None)
            else:
                inv = 1 / r[j]
                pivots[j] = {k: v * inv for k, v in r.items()}
                rank += 1
                break
    return ncols - rank


def hom_dimension(Vp, Vq, n):
    """dim_K {A in M_n(L) : A Vp in span_K Vq}, via unknowns for A and for the coordinates in Vq.

    ``Vp``, ``Vq`` are lists of vectors of coefficient lists.  Since Vq is
    K-independent, the coordinates are determined by A, so the kernel
    dimension of the combined system is the hom dimension.
    """
    nA = n * n * DEG
    ncols = nA + len(Vp) * len(Vq)
    rows = []
    for a, v in enumerate(Vp):
        for i in range(n):
            # (A v)_i = sum_j A_ij v_j, expanded coefficient-wise
            eqs = [dict() for _ in range(DEG)]
            for j in range(n):
                for k in range(DEG):
                    unit = [Fraction(0)] * DEG
                    unit[k] = Fraction(1)
                    prod = lmul(unit, v[j])
                    col = (i * n + j) * DEG + k
                    for d in range(DEG):
                        if prod[d]:
                            eqs[d][col] = eqs[d].get(col, 0) + prod[d]
            for b, w in enumerate(Vq):
                col = nA + a * len(Vq) + b
                for d in range(DEG):
                    if w[i][d]:
                        eqs[d][col] = eqs[d].get(col, 0) - w[i][d]
            rows.extend(eqs)
    return nullity(rows, ncols)


def pair_vectors(p):
    return [[coeffs(e) for e in v] for v in p.V]


def semigroup_members(gens, bound):
    """Subset-sum closure by brute force."""
    reach = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for s in frontier:
            for g in gens:
                if s + g <= bound and s + g not in reach:
                    reach.add(s + g)
                    nxt.append(s + g)
        frontier = nxt
    return reach


def monomial_min_generators(gens):
    """Smallest set W of exponents whose S-translates cover the overmodule basis.

    The overmodule has K-basis t^j for gaps j >= multiplicity; t^s acts by
    shifting (monomials landing in S vanish in the quotient).  Exhaustive
    search over subsets in increasing size.
    """
    bound = 4 * max(gens) * min(gens)
    members = semigroup_members(gens, bound)
    m = min(gens)
    basis = [j for j in range(m, bound) if j not in members]
    nonzero = [s for s in members if s > 0]

    def span(W):
        out = set(W)
        for w in W:
            for s in nonzero:
                if w + s in basis:
                    out.add(w + s)
        return out

    target = set(basis)
    for size in range(len(basis) + 1):
        for W in combinations_with_replacement(basis, size):
            if len(set(W)) == size and span(W) == target:
                return size, sorted(W)
    raise AssertionError("unreachable")
