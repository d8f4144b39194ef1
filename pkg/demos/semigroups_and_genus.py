"""
Semigroup rings and genus bookkeeping
=====================================

Two smaller computations.  For a numerical semigroup ring K[[t^S]] the
overmodule spanned by the gap monomials above the multiplicity tells whether
the Drozd-Roiter conditions hold.  For the genus, realizability by a direct
sum of finitely generated modules depends only on how the non-free primes are
spread out.
"""

from tfmodlab.pairs import psi_pair
from tfmodlab.ringop import M0, FamilyRecord, GenusDescriptor, LocalClass, coprime_obstruction, genus_realizable
from tfmodlab.semigroup import dr_check, frobenius, gaps, overmodule_report

for gens in ([2, 3], [3, 4], [3, 7], [5, 6]):
    ov = overmodule_report(gens)
    dr = dr_check(gens)
    print(f"<{gens}>: gaps {sorted(gaps(gens))}, frobenius {frobenius(gens)}")
    print(f"    overmodule needs {ov.count} generators: " + ", ".join(f"t^{j}" for j in ov.witnesses))
    print("    Drozd-Roiter:", "pass" if dr.passes else "fail " + ", ".join(dr.failing))

# Sums of modules of ranks sharing a factor are not closed under taking sums
for r1, r2 in ((2, 2), (4, 6), (2, 3), (1, 5)):
    print((r1, r2), "closure fails" if coprime_obstruction(r1, r2).closure_fails else "ok")

# One non-free prime: realizable
g = GenusDescriptor(2, {M0: LocalClass(0, [psi_pair(2, 0)])})
print("finite support:", genus_realizable(g))

# Countably many non-free primes each with free rank 1: not realizable
print("countable, r = 1:", genus_realizable(GenusDescriptor("countable", families=[FamilyRecord("countable", 1)])))
# ... unless the free ranks are unbounded along the family
print("countable, r unbounded:",
      genus_realizable(GenusDescriptor("countable", families=[FamilyRecord("countable", "unbounded")])))
