from .poly import QQ, Poly, Rational, format_rational, parse_rational, poly_gcd, poly_lcm, poly_xgcd, squarefree_decomposition
from .factor import is_irreducible, poly_factor
from .tower import (FieldTower, NotIrreducible, TowerElement, TowerMismatch, ext_inv, ext_minpoly,
                    factor_over_tower, norm_poly, theta7)
