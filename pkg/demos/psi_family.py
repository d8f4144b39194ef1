"""
An infinite family of indecomposable pairs
==========================================

Over R = Q + xL[x] with L = Q(2^(1/7)), torsion-free modules are controlled
by their artinian pair at the conductor: a Q-subspace V of L^n that spans
L^n.  This script builds the pairs Psi_t and checks by exact linear algebra
that they are indecomposable and pairwise non-isomorphic.
"""

from fractions import Fraction

from tfmodlab.exactfield import theta7
from tfmodlab.pairs import endo_algebra, hom_pairs, is_indecomposable, is_isomorphic, psi_matrix_text, psi_pair

L = theta7()
theta = L.theta

# The defining matrix of Psi_t for n = 2, with a = theta and b = theta^3.
# Its columns span V over Q.
print(psi_matrix_text(2, 1))

# Build a few members, including a non-integer parameter.
ts = [0, 1, 2, Fraction(1, 3)]
family = [psi_pair(2, t, theta, theta ** 3) for t in ts]
for t, p in zip(ts, family):
    print(f"t = {t}: rank {p.n}, dim_Q V = {p.dim}")

# Homomorphisms of pairs are the L-matrices carrying one V into the other.
# Between different members there are none; each member has an n-dimensional
# endomorphism ring.
print([[len(hom_pairs(p, q)) for q in family] for p in family])

# The endomorphism ring is local, and the verdict is certified because the
# ring is commutative.
for t, p in zip(ts, family):
    v = is_indecomposable(p)
    print(f"t = {t}: {v.tag}  ({v.note})")

A = endo_algebra(psi_pair(3, 1))
print("End(Psi_1), n = 3: dimension", A.dim, "radical dimension", len(A.radical()))

# Isomorphism classes: only t = u gives an isomorphism.
print([[is_isomorphic(p, q)[0] for q in family] for p in family])
