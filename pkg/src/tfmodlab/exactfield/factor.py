"""Factorization of polynomials over Q.

Squarefree decomposition, modular factorization (distinct degree plus
Cantor-Zassenhaus), Hensel lifting and subset recombination.  Integer
polynomials here are plain lists of ``int``, lowest degree first.
"""

from __future__ import annotations

import itertools
import math
import random

from gmpy2 import mpq

from .poly import QQ, Poly, squarefree_decomposition

# --------------------------------------------------------------- Z[x] / F_p[x]


def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _zmul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _zdivexact(a, b):
    """Exact division in Z[x]; returns None if b does not divide a."""
    a = list(a)
    db = len(b) - 1
    if len(a) - 1 < db:
        return None if any(a) else []
    q = [0] * (len(a) - db)
    lb = b[-1]
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k]
        if c == 0:
            continue
        if c % lb:
            return None
        c //= lb
        q[k - db] = c
        for j in range(db + 1):
            a[k - db + j] -= c * b[j]
    if any(a[:db]):
        return None
    return q


def _content(a):
    g = 0
    for c in a:
        g = math.gcd(g, c)
    return g


def _primitive(a):
    g = _content(a)
    out = [c // g for c in a]
    if out and out[-1] < 0:
        out = [-c for c in out]
    return out


def _pmod(a, p):
    return _trim([c % p for c in a])


def _pmul(a, b, p):
    return _pmod(_zmul(a, b), p)


def _pdivmod(a, b, p):
    a = list(a)
    db = len(b) - 1
    inv = pow(b[-1], -1, p)
    if len(a) - 1 < db:
        return [], _trim(a)
    q = [0] * (len(a) - db)
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k] % p
        if c == 0:
            continue
        c = c * inv % p
        q[k - db] = c
        for j in range(db + 1):
            a[k - db + j] = (a[k - db + j] - c * b[j]) % p
    return _trim(q), _trim([c % p for c in a[:db]])


def _pmonic(a, p):
    inv = pow(a[-1], -1, p)
    return [c * inv % p for c in a]


def _pgcd(a, b, p):
    a, b = _pmod(a, p), _pmod(b, p)
    while b:
        a, b = b, _pdivmod(a, b, p)[1]
    return _pmonic(a, p) if a else a


def _pxgcd(a, b, p):
    r0, r1 = _pmod(a, p), _pmod(b, p)
    s0, s1, t0, t1 = [1], [], [], [1]
    while r1:
        q, r = _pdivmod(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, _psub(s0, _pmul(q, s1, p), p)
        t0, t1 = t1, _psub(t0, _pmul(q, t1, p), p)
    inv = pow(r0[-1], -1, p)
    return ([c * inv % p for c in r0], [c * inv % p for c in s0], [c * inv % p for c in t0])


def _psub(a, b, p):
    n = max(len(a), len(b))
    return _trim([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)])


def _ppowmod(base, e, mod, p):
    result = [1]
    base = _pdivmod(base, mod, p)[1]
    while e:
        if e & 1:
            result = _pdivmod(_pmul(result, base, p), mod, p)[1]
        base = _pdivmod(_pmul(base, base, p), mod, p)[1]
        e >>= 1
    return result


def _pderiv(a, p):
    return _trim([(k * c) % p for k, c in enumerate(a)][1:])


def _distinct_degree(f, p):
    """f monic squarefree mod p -> list of (product of degree-d factors, d)."""
    out = []
    h = [0, 1]
    g = list(f)
    d = 0
    while len(g) - 1 >= 2 * (d + 1):
        d += 1
        h = _ppowmod(h, p, g, p)
        diff = _psub(h, [0, 1], p)
        c = _pgcd(g, diff, p)
        if len(c) > 1:
            out.append((c, d))
            g = _pdivmod(g, c, p)[0]
            h = _pdivmod(h, g, p)[1] if len(g) > 1 else [0]
    if len(g) > 1:
        out.append((g, len(g) - 1))
    return out


def _equal_degree(f, d, p, rng):
    n = len(f) - 1
    if n == d:
        return [f]
    while True:
        a = _trim([rng.randrange(p) for _ in range(n)])
        if len(a) < 2:
            continue
        b = _ppowmod(a, (p ** d - 1) // 2, f, p)
        g = _pgcd(f, _psub(b, [1], p), p)
        if 1 < len(g) < len(f):
            h = _pdivmod(f, g, p)[0]
            return _equal_degree(g, d, p, rng) + _equal_degree(_pmonic(h, p), d, p, rng)


def factor_mod_p(f, p, seed=0):
    """Monic irreducible factors of squarefree ``f`` modulo an odd prime."""
    f = _pmonic(_pmod(f, p), p)
    rng = random.Random(seed)
    out = []
    for g, d in _distinct_degree(f, p):
        out.extend(_equal_degree(g, d, p, rng))
    return out


# --------------------------------------------------------------- Hensel lifting


def _symmetric(a, m):
    half = m // 2
    return _trim([c % m - m if c % m > half else c % m for c in a])


def _hensel_two(f, g, h, p, k):
    """Lift ``f == g*h (mod p)`` to modulus ``p**k``; g monic, lc(f) in h."""
    _, s, t = _pxgcd(g, h, p)
    m = p
    target = p ** k
    while m < target:
        m = min(m * m, target)
        e = _psub(f, _zmul(g, h), m)
        q, r = _pdivmod_monic(_pmul(t, e, m), g, m)
        h = _padd(h, _padd(_pmul(s, e, m), _pmul(q, h, m), m), m)
        g = _padd(g, r, m)
        b = _psub(_padd(_pmul(t, h, m), _pmul(s, g, m), m), [1], m)
        c, d = _pdivmod_monic(_pmul(t, b, m), g, m)
        t = _psub(t, d, m)
        s = _psub(s, _padd(_pmul(s, b, m), _pmul(c, h, m), m), m)
    return g, h


def _padd(a, b, m):
    n = max(len(a), len(b))
    return _trim([((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % m for i in range(n)])


def _pdivmod_monic(a, b, m):
    """Division by a monic polynomial modulo any integer m."""
    a = [c % m for c in a]
    db = len(b) - 1
    if len(a) - 1 < db:
        return [], _trim(a)
    q = [0] * (len(a) - db)
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k] % m
        if c == 0:
            continue
        q[k - db] = c
        for j in range(db + 1):
            a[k - db + j] = (a[k - db + j] - c * b[j]) % m
    return _trim(q), _trim(a[:db])


def _hensel_multi(f, factors, p, k):
    """Lift monic modular factors of f (lc(f) kept in the cofactor)."""
    m = p ** k
    lifted = []
    rest = list(f)
    for g in factors[:-1]:
        h = _pdivmod(_pmod(rest, p), g, p)[0]
        g_l, h_l = _hensel_two(_pmod(rest, m), g, h, p, k)
        lifted.append(g_l)
        rest = h_l
    inv = pow(rest[-1], -1, m)
    lifted.append([c * inv % m for c in rest])
    return lifted


# --------------------------------------------------------------- Zassenhaus


def _primes():
    n = 3
    while True:
        if all(n % d for d in range(3, int(n ** 0.5) + 1, 2)):
            yield n
        n += 2


def _factor_squarefree_primitive(f):
    """Irreducible primitive factors of a squarefree primitive f in Z[x]."""
    n = len(f) - 1
    if n <= 1:
        return [f]
    lc = f[-1]
    candidates = []
    for p in _primes():
        if lc % p == 0:
            continue
        fp = _pmod(f, p)
        if len(_pgcd(fp, _pderiv(fp, p), p)) > 1:
            continue
        facs = factor_mod_p(f, p)
        candidates.append((len(facs), p, facs))
        if len(facs) == 1 or len(candidates) >= 5:
            break
    r, p, facs = min(candidates, key=lambda c: (c[0], c[1]))
    if r == 1:
        return [f]
    norm = math.isqrt(sum(c * c for c in f)) + 1
    bound = 2 * abs(lc) * (2 ** n) * norm
    k = 1
    while p ** k <= bound:
        k += 1
    m = p ** k
    lifted = _hensel_multi(f, facs, p, k)
    result = []
    remaining = list(range(len(lifted)))
    g = list(f)
    s = 1
    while 2 * s <= len(remaining):
        found = False
        for subset in itertools.combinations(remaining, s):
            lcg = g[-1]
            cand = [lcg]
            for i in subset:
                cand = _pmod(_zmul(cand, lifted[i]), m)
            cand = _primitive(_symmetric(cand, m))
            q = _zdivexact(g, cand)
            if q is not None:
                result.append(cand)
                g = q
                remaining = [i for i in remaining if i not in subset]
                found = True
                break
        if not found:
            s += 1
    result.append(_primitive(g))
    return result


def _to_primitive_int(p: Poly):
    den = 1
    for c in p.coeffs:
        den = den * c.denominator // math.gcd(den, int(c.denominator))
    ints = [int(c * den) for c in p.coeffs]
    return _primitive(ints)


def poly_factor(p: Poly):
    """Factor a nonzero polynomial over Q.

    Returns ``(unit, [(q, e), ...])`` with monic irreducible ``q`` and
    ``p == unit * prod(q**e)``.
    """
    if p.field is not QQ:
        raise TypeError("poly_factor works over QQ; use factor_over_tower for L[x]")
    if p.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    unit = p.lc
    out = []
    for part, mult in squarefree_decomposition(p):
        for fz in _factor_squarefree_primitive(_to_primitive_int(part)):
            q = Poly([mpq(c) for c in fz], QQ).monic()
            out.append((q, mult))
    out.sort(key=lambda t: (t[0].degree, [str(c) for c in t[0].coeffs], t[1]))
    return unit, out


def is_irreducible(p: Poly) -> bool:
    if p.degree < 1:
        return False
    _, facs = poly_factor(p)
    return len(facs) == 1 and facs[0][1] == 1
