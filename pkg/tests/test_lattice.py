from __future__ import annotations

import random

import pytest

from helpers import determinantal_factors, q_rank, q_solve
from tropex.errors import LatticeError, TorsionError
from tropex.lattice import (
    IntMatrix,
    Lattice,
    coordinates,
    integer_kernel,
    inverse_unimodular,
    invariant_factors,
    is_saturated,
    left_inverse,
    primitive,
    quotient,
    saturation_basis,
    smith_normal_form,
    solve_integer_linear,
)


def M(rows, ncols=None):
    return IntMatrix.from_rows(rows, ncols=ncols)


def check_snf(A: IntMatrix):
    s = smith_normal_form(A)
    assert s.U @ A @ s.V == s.D
    assert s.U.is_unimodular() and s.V.is_unimodular()
    assert s.U @ s.U_inverse == IntMatrix.identity(A.nrows)
    f = s.invariant_factors
    assert all(f[i + 1] % f[i] == 0 for i in range(len(f) - 1))
    return s


def test_snf_identity():
    s = check_snf(IntMatrix.identity(2))
    assert s.invariant_factors == (1, 1)
    assert s.D == IntMatrix.identity(2)


def test_snf_two_three():
    s = check_snf(M([[2, 0], [0, 3]]))
    assert s.invariant_factors == (1, 6)
    assert s.D == M([[1, 0], [0, 6]])


def test_snf_zero_matrix():
    s = check_snf(IntMatrix.zeros(3, 2))
    assert s.invariant_factors == ()
    assert s.D.is_zero()


def test_snf_empty_shapes():
    assert invariant_factors(IntMatrix.zeros(0, 3)) == ()
    assert invariant_factors(IntMatrix.zeros(3, 0)) == ()


def test_snf_random_matrices_against_minors():
    # [DERIVED] invariant factors from gcds of minors, entries in [-9, 9], dims <= 5
    rng = random.Random(7)
    for _ in range(150):
        nr, nc = rng.randint(1, 5), rng.randint(1, 4)
        rows = [[rng.randint(-9, 9) for _ in range(nc)] for _ in range(nr)]
        s = check_snf(M(rows, nc))
        assert list(s.invariant_factors) == determinantal_factors(rows)


@pytest.mark.parametrize("n, cols, expect", [
    (2, [(1, 0)], True),
    (2, [(2, 0)], False),
    (2, [(1, 1)], True),
    (2, [], True),
    (2, [(1, 1), (1, -1)], False),
    (3, [(1, 2, 3), (0, 1, 1)], True),
])
def test_is_saturated_examples(n, cols, expect):
    assert is_saturated(IntMatrix.from_columns(cols, n), Lattice(n)) is expect


def test_is_saturated_checks_ambient():
    with pytest.raises(ValueError):
        is_saturated(IntMatrix.from_columns([(1, 0, 0)], 3), Lattice(2))


def test_quotient_by_diagonal():
    q = quotient(Lattice(2), IntMatrix.from_columns([(1, 1)], 2))
    assert q.quotient.rank == 1
    assert q.projection.to_lists() in ([[1, -1]], [[-1, 1]])
    assert q.projection @ (1, 1) == (0,)
    assert q.projection @ q.section == IntMatrix.identity(1)


def test_quotient_by_nothing_is_identity():
    q = quotient(Lattice(3), IntMatrix.zeros(3, 0))
    assert q.projection == IntMatrix.identity(3)
    assert q.section == IntMatrix.identity(3)


def test_quotient_torsion_is_reported():
    with pytest.raises(TorsionError) as info:
        quotient(Lattice(2), IntMatrix.from_columns([(2, 0)], 2))
    assert info.value.factors == [2]
    assert "Z/2" in str(info.value)


def test_quotient_torsion_allowed():
    q = quotient(Lattice(2), IntMatrix.from_columns([(2, 0)], 2), allow_torsion=True)
    assert q.torsion == (2,)
    assert q.quotient.rank == 1
    assert q.projection @ (2, 0) == (0,)


def test_quotient_dependent_columns():
    with pytest.raises(LatticeError):
        quotient(Lattice(2), IntMatrix.from_columns([(1, 0), (2, 0)], 2))


def test_solve_integer_linear_examples():
    assert solve_integer_linear(M([[2]]), [4]) == (2,)
    assert solve_integer_linear(M([[2]]), [3]) is None
    x = solve_integer_linear(M([[1, 1]]), [5])
    assert x is not None and x[0] + x[1] == 5


def test_solve_integer_linear_inconsistent_and_shape():
    assert solve_integer_linear(M([[1], [1]]), [1, 2]) is None
    with pytest.raises(ValueError):
        solve_integer_linear(M([[1, 1]]), [1, 2])


def test_solve_integer_linear_random_against_rational_solve():
    rng = random.Random(11)
    for _ in range(200):
        nr, nc = rng.randint(1, 3), rng.randint(1, 3)
        rows = [[rng.randint(-4, 4) for _ in range(nc)] for _ in range(nr)]
        A = M(rows, nc)
        b = [rng.randint(-6, 6) for _ in range(nr)]
        x = solve_integer_linear(A, b)
        if x is not None:
            assert A @ x == tuple(b)
        elif q_solve(A.columns(), b) is not None and q_rank(rows) == nc:
            # unique rational solution exists; it must be non-integral
            sol = q_solve(A.columns(), b)
            assert any(t.denominator != 1 for t in sol)


def test_primitive_and_inverse():
    assert primitive((4, -6, 0)) == (2, -3, 0)
    assert primitive((0, 0)) == (0, 0)
    U = M([[2, 1], [1, 1]])
    assert U @ inverse_unimodular(U) == IntMatrix.identity(2)
    with pytest.raises(LatticeError):
        inverse_unimodular(M([[2, 0], [0, 1]]))
    with pytest.raises(LatticeError):
        inverse_unimodular(M([[1, 1], [1, 1]]))


def test_saturation_and_kernel():
    B = saturation_basis([(2, 2, 0), (0, 2, 2)], 3)
    assert B.ncols == 2 and is_saturated(B, Lattice(3))
    assert coordinates(B, (1, 1, 0)) is not None
    K = integer_kernel(M([[1, 1, 1]]))
    assert K.ncols == 2
    assert (M([[1, 1, 1]]) @ K).is_zero()
    assert is_saturated(K, Lattice(3))


def test_left_inverse_of_saturated_basis():
    B = IntMatrix.from_columns([(1, 1, 0), (0, 1, 1)], 3)
    C = left_inverse(B)
    assert C @ B == IntMatrix.identity(2)


def test_matrix_basics():
    A = M([[1, 2], [3, 4]])
    assert A.T == M([[1, 3], [2, 4]])
    assert A.det() == -2
    assert A @ (1, 1) == (3, 7)
    assert (-A)[0, 1] == -2
    assert A.hstack(IntMatrix.identity(2)).shape == (2, 4)
    with pytest.raises(ValueError):
        M([[1, 2], [3]])
