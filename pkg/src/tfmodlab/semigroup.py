"""Numerical semigroups and the monomial criteria on their semigroup rings.

Everything here is exponent-set combinatorics: the modules involved are
spanned by monomials t^j, so no polynomial arithmetic is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property


class NotCoprime(ValueError):
    pass


class NumericalSemigroup:
    """The additive monoid generated by positive integers."""

    def __init__(self, generators):
        gens = sorted({int(g) for g in generators})
        if not gens or gens[0] < 1:
            raise ValueError("generators must be positive integers")
        self.generators = tuple(gens)
        self.gcd = math.gcd(*gens)
        # Schur: the Frobenius number of the reduced semigroup is below (a_1/d)(a_k/d)
        self.bound = gens[0] * gens[-1] + gens[-1]

    @cached_property
    def table(self):
        """``table[k]`` is True iff k is a member, for 0 <= k <= bound."""
        t = [False] * (self.bound + 1)
        t[0] = True
        for k in range(1, self.bound + 1):
            t[k] = any(k >= g and t[k - g] for g in self.generators)
        return t

    def __contains__(self, k: int) -> bool:
        if k < 0:
            return False
        if k <= self.bound:
            return self.table[k]
        if k % self.gcd:
            return False
        # beyond the bound every multiple of gcd is a member (bound exceeds the Frobenius number)
        return True

    def _require_coprime(self):
        if self.gcd != 1:
            raise NotCoprime(f"generators {list(self.generators)} have gcd {self.gcd}")

    @property
    def minimal_generators(self):
        out = []
        for g in self.generators:
            if not any(g - h >= 0 and (g - h) in self for h in self.generators if h < g):
                out.append(g)
        return tuple(out)

    def __repr__(self):
        return f"<{','.join(map(str, self.generators))}>"

    def to_json(self):
        return list(self.generators)


def _as_semigroup(s):
    return s if isinstance(s, NumericalSemigroup) else NumericalSemigroup(s)


def multiplicity(s) -> int:
    """Least nonzero member."""
    return _as_semigroup(s).generators[0]


def frobenius(s) -> int:
    """Largest non-member (-1 when the semigroup is all of N)."""
    s = _as_semigroup(s)
    s._require_coprime()
    return max((k for k in range(s.bound + 1) if not s.table[k]), default=-1)


def gaps(s) -> set:
    s = _as_semigroup(s)
    s._require_coprime()
    return {k for k in range(frobenius(s) + 1) if not s.table[k]}


def normalization_local(s) -> bool:
    """The semigroup ring localized at t has local integral closure K[t]_(t) iff gcd = 1."""
    return _as_semigroup(s).gcd == 1


@dataclass(frozen=True)
class OvermoduleReport:
    basis: tuple
    decomposable: tuple
    witnesses: tuple

    @property
    def count(self) -> int:
        return len(self.witnesses)

    def to_json(self):
        return {"min_gens": self.count, "witnesses": list(self.witnesses),
                "basis_exponents": list(self.basis), "decomposable": list(self.decomposable)}


def overmodule_report(s) -> OvermoduleReport:
    """Monomial generators of the module spanned by t^j, j >= multiplicity, j a gap."""
    s = _as_semigroup(s)
    s._require_coprime()
    m = multiplicity(s)
    basis = sorted(j for j in gaps(s) if j >= m)
    bset = set(basis)
    # t^j is decomposable when j = a + k with a a nonzero member and t^k a basis monomial
    dec = sorted(j for j in basis if any((j - k) > 0 and (j - k) in s for k in bset if k < j))
    wit = tuple(j for j in basis if j not in dec)
    return OvermoduleReport(tuple(basis), tuple(dec), wit)


def overmodule_min_gens(s):
    """``(count, witness exponents)``."""
    r = overmodule_report(s)
    return r.count, r.witnesses


@dataclass(frozen=True)
class DRReport:
    multiplicity: int
    overmodule_gens: int
    dr1: bool
    dr2: bool

    @property
    def passes(self) -> bool:
        return self.dr1 and self.dr2

    @property
    def failing(self):
        return [name for name, ok in (("dr1", self.dr1), ("dr2", self.dr2)) if not ok]

    def to_json(self):
        return {"dr1": self.dr1, "dr2": self.dr2, "passes": self.passes, "failing": self.failing,
                "mu_normalization": self.multiplicity, "overmodule_min_gens": self.overmodule_gens}


def dr_check(s) -> DRReport:
    """Drozd-Roiter style test: mu(normalization) <= 3 and a cyclic overmodule."""
    s = _as_semigroup(s)
    s._require_coprime()
    m = multiplicity(s)
    k = overmodule_report(s).count
    return DRReport(m, k, m <= 3, k <= 1)
