"""Exact computations with torsion-free modules over K + xL[x]."""

__version__ = "0.1.0"
