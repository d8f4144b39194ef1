import pytest
from gmpy2 import mpq

from tfmodlab.algebra import (COMPLETE, LOCAL_CERTIFIED, NOT_LOCAL, AlgebraError, FinDimAlgebra, find_idempotent, is_local,
                              radical)
from tfmodlab.linalg import Matrix


def unit(T, n, i, j, c=None):
    rows = [[T.zero()] * n for _ in range(n)]
    rows[i][j] = T.one() if c is None else c
    return Matrix.from_rows(rows, T)


def test_split_diagonal_algebra(T):
    A = FinDimAlgebra([unit(T, 2, 0, 0), unit(T, 2, 1, 1)], T)
    v = is_local(A)
    assert v.tag == NOT_LOCAL
    e = list(v.witness)
    assert A.is_idempotent(e) and e not in (A.zero, A.one)


def test_field_extension_is_local(T):
    A = FinDimAlgebra([unit(T, 1, 0, 0, T.theta ** k) for k in range(7)], T)
    assert A.is_commutative()
    assert radical(A) == []
    v = is_local(A)
    assert v.tag == LOCAL_CERTIFIED


def test_dual_numbers_radical(T):
    one = Matrix.identity(2, T)
    A = FinDimAlgebra([one, unit(T, 2, 0, 1)], T)
    assert len(radical(A)) == 1
    assert is_local(A).tag == LOCAL_CERTIFIED


def test_upper_triangular_not_local(T):
    A = FinDimAlgebra([unit(T, 2, 0, 0), unit(T, 2, 1, 1), unit(T, 2, 0, 1)], T)
    assert len(radical(A)) == 1
    assert A.quotient_dim() == 2
    assert is_local(A).tag == NOT_LOCAL


def test_full_matrix_algebra_has_idempotent(T):
    basis = [unit(T, 2, i, j) for i in range(2) for j in range(2)]
    A = FinDimAlgebra(basis, T)
    assert not A.is_commutative()
    e, _ = find_idempotent(A, seed=3)
    assert e is not None and A.is_idempotent(e)


def test_structure_errors(T):
    with pytest.raises(AlgebraError):
        FinDimAlgebra([unit(T, 2, 0, 1)], T)  # identity missing
    with pytest.raises(AlgebraError):
        FinDimAlgebra([Matrix.identity(2, T), unit(T, 2, 0, 1), unit(T, 2, 1, 0)], T)  # not closed
    with pytest.raises(AlgebraError):
        FinDimAlgebra([Matrix.identity(2, T), Matrix.identity(2, T)], T)


def test_abstract_algebra_from_structure():
    # K x K with basis e1, e2
    z, o = mpq(0), mpq(1)
    struct = [[[o, z], [z, z]], [[z, z], [z, o]]]
    A = FinDimAlgebra.from_structure(struct, [o, o])
    assert is_local(A).tag == NOT_LOCAL


def test_central_idempotent_of_matrix_block_plus_field(T):
    # M_2(Q) x Q inside 3x3 matrices: the centre of A/J is Q x Q, so the split is exact
    basis = [unit(T, 3, i, j) for i in range(2) for j in range(2)] + [unit(T, 3, 2, 2)]
    A = FinDimAlgebra(basis, T)
    assert len(A.quotient_center()) == 2
    e, flag = find_idempotent(A, seed=0)
    assert flag == COMPLETE and A.is_idempotent(e) and e not in (A.zero, A.one)
    assert all(A.mul(e, b) == A.mul(b, e) for b in ([1 if k == j else 0 for k in range(5)] for j in range(5)))
