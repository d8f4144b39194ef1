"""
Gluing local data into a global module
======================================

A torsion-free R-module is determined by its localizations, and any finite
set of compatible local changes can be realised globally.  We glue Psi_t in
at the conductor prime and an ideal power at the prime (1 + x), and then look
at the result one prime at a time.
"""

from tfmodlab.exactfield import Poly, theta7
from tfmodlab.pairs import is_isomorphic, psi_pair
from tfmodlab.ringop import (M0, IdealOfR, MaximalIdealDesc, ModuleDescriptor, RingR, crt_idempotents,
                             glue_submodule, iso_from_genus, local_pair_submodule, local_power_submodule,
                             localize_check)

L = theta7()
x = Poly.x(L)
R = RingR(L)

# Chinese remainder elements for the modulus x(1 + x)
P = MaximalIdealDesc.poly(1 + x, L)
crt = crt_idempotents([P], IdealOfR.principal(x * (1 + x), L))
print("b_1 =", crt.b_targets[0], "  b =", crt.b)

# Rank 2: Psi_1 at the conductor, (1 + x)^2 M at P (det valuation 4), M everywhere else
M = ModuleDescriptor.free(2, L)
psi = psi_pair(2, 1)
assignments = {M0: local_pair_submodule(M, psi), P: local_power_submodule(M, P, 2)}
glued = glue_submodule(M, assignments)
N = glued.module
print(N)

print("at M0, isomorphic to Psi_1:", is_isomorphic(localize_check(N, M0), psi)[0])
print("at (1 + x):", localize_check(N, P))
for q in R.probe_primes(3, seed=2):
    print(f"at ({q.q}):", localize_check(N, q))

# A different choice of CRT elements gives a different presentation; the
# local data are the same, so the two modules are isomorphic.
other = glue_submodule(M, assignments, variant=1).module
iso = iso_from_genus(N, other)
print("isomorphic:", iso is not None)
