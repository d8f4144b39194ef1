"""
Krull-Schmidt decomposition of a scrambled pair
===============================================

Direct sums of pairs are easy to write down and hard to recognise once the
coordinates have been mixed.  decompose() recovers the summands from the
endomorphism algebra alone.
"""

import random

from tfmodlab.exactfield import theta7
from tfmodlab.linalg import Matrix
from tfmodlab.pairs import decompose, direct_sum, direct_sum_all, free_pair, is_isomorphic, psi_pair

L = theta7()
rng = random.Random(1)


def random_gl(n):
    while True:
        A = Matrix.from_rows([[L([rng.randint(-2, 2) for _ in range(3)]) for _ in range(n)] for _ in range(n)], L)
        if A.det():
            return A


# Psi_0 + free(1) + Psi_3, then an invertible change of coordinates over L
parts = [psi_pair(2, 0), free_pair(1), psi_pair(2, 3)]
scrambled = direct_sum_all(parts).apply(random_gl(5))
print("input: rank", scrambled.n, "dim V", scrambled.dim)

report = decompose(scrambled)
for f, level in zip(report.factors, report.levels):
    match = [i for i, q in enumerate(parts) if is_isomorphic(f, q)[0]]
    print(f"factor of rank {f.n}, dim V {f.dim}: {level}, isomorphic to input part {match}")

# The witness W maps V onto the direct sum of the factors.
print("witness checks out:", scrambled.apply(report.witness).same_subspace(direct_sum_all(report.factors)))

# Repeated summands are the hard case.  Psi_1 + Psi_1 has End/J = M_2(Q), and
# splitting a matrix algebra given only by structure constants is a hard
# problem in general.  The randomized search usually fails here, and the
# report says so rather than guessing.
twice = direct_sum(psi_pair(2, 1), psi_pair(2, 1)).apply(random_gl(4))
rep = decompose(twice)
print("Psi_1 + Psi_1:", rep.levels, "certified" if rep.certified else "not certified")

# Central idempotents still separate different isomorphism types exactly.
mixed = direct_sum_all([psi_pair(2, 0), psi_pair(2, 0), psi_pair(2, 1)]).apply(random_gl(6))
rep = decompose(mixed)
print("Psi_0 + Psi_0 + Psi_1:", [f.n for f in rep.factors], rep.levels)
