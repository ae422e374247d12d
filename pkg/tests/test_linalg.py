import math
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from alphammp.linalg import (
    as_int_matrix,
    column_lattice_basis,
    det_bareiss,
    dot,
    identity,
    integer_row_kernel,
    is_unimodular,
    mat,
    mat_mul,
    mat_vec,
    row_unimodular_reduce,
    signature,
    solve_exact,
    transpose,
)

small_int = st.integers(min_value=-9, max_value=9)


def square(draw_n=4):
    return st.integers(min_value=1, max_value=draw_n).flatmap(
        lambda n: st.lists(
            st.lists(small_int, min_size=n, max_size=n), min_size=n, max_size=n
        )
    )


@given(square())
def test_det_matches_sympy(rows):
    a = mat(rows)
    assert det_bareiss(a) == int(sympy.Matrix(rows).det())


def test_det_int_result_type():
    # Bareiss keeps everything integral; result is a Python int
    d = det_bareiss(mat([[2, 1], [7, 4]]))
    assert d == 1 and isinstance(d, int)


@given(square(3), square(3))
def test_det_multiplicative_same_size(r1, r2):
    if len(r1) != len(r2):
        return
    a, b = mat(r1), mat(r2)
    assert det_bareiss(mat_mul(a, b)) == det_bareiss(a) * det_bareiss(b)


def test_solve_exact_square_and_inconsistent():
    a = mat([[2, 0], [0, 3]])
    x = solve_exact(a, mat([[1], [1]]))
    assert x == ((Fraction(1, 2),), (Fraction(1, 3),))
    tall = mat([[1, 0], [0, 1], [1, 1]])
    solve_exact(tall, mat([[1], [2], [3]]))  # consistent overdetermined
    with pytest.raises(ValueError):
        solve_exact(tall, mat([[1], [2], [4]]))


def test_solve_exact_reproduces_product():
    rng = random.Random(11)
    for _ in range(25):
        n = rng.randint(1, 4)
        while True:
            a = mat([[rng.randint(-5, 5) for _ in range(n)] for _ in range(n)])
            if det_bareiss(a) != 0:
                break
        x = mat([[Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(2)]
                 for _ in range(n)])
        assert solve_exact(a, mat_mul(a, x)) == x


def test_as_int_matrix_rejects_fractions():
    assert as_int_matrix(mat([[Fraction(4, 2)]])) == ((2,),)
    with pytest.raises(ValueError):
        as_int_matrix(mat([[Fraction(1, 2)]]))


def test_column_lattice_basis_saturation():
    # columns (2,0),(0,2),(1,1) span index-2 sublattice of Z^2 plus (1,1):
    # the lattice is {(x,y): x+y even} with basis e.g. (1,1),(0,2)
    b = column_lattice_basis(mat([[2, 0, 1], [0, 2, 1]]))
    cols = [tuple(row[j] for row in b) for j in range(len(b[0]))]
    assert len(cols) == 2
    span = set()
    for s in range(-6, 7):
        for t in range(-6, 7):
            span.add((s * cols[0][0] + t * cols[1][0], s * cols[0][1] + t * cols[1][1]))
    assert (1, 1) in span and (2, 0) in span
    assert (1, 0) not in span


@given(st.lists(small_int, min_size=1, max_size=6))
def test_row_unimodular_reduce_properties(w):
    g, u = row_unimodular_reduce(tuple(w))
    assert g == math.gcd(*map(abs, w))
    assert is_unimodular(u)
    reduced = vec_times(w, u)
    assert reduced[0] == g and all(x == 0 for x in reduced[1:])


def vec_times(v, a):
    n = len(a[0])
    return tuple(sum(v[i] * a[i][j] for i in range(len(v))) for j in range(n))


def test_integer_row_kernel_saturated():
    k = integer_row_kernel((2, 4, 6))
    # every integer solution of 2x+4y+6z = 0 must be an integer combo
    cols = [tuple(k[r][c] for r in range(3)) for c in range(len(k[0]))]
    assert len(cols) == 2
    for sol in [(2, -1, 0), (3, 0, -1), (1, 1, -1)]:
        assert dot(sol, (2, 4, 6)) == 0
        a = mat([[cols[0][i], cols[1][i]] for i in range(3)])
        x = solve_exact(a, mat([[s] for s in sol]))
        assert all(row[0].denominator == 1 for row in x)


def test_signature_examples():
    assert signature(mat([[1, 0], [0, -1]])) == (1, 1, 0)
    assert signature(mat([[0, 1], [1, 0]])) == (1, 1, 0)  # hyperbolic plane
    assert signature(mat([[2, 1], [1, 2]])) == (2, 0, 0)
    assert signature(mat([[0, 0], [0, 0]])) == (0, 0, 2)
    assert signature(mat([[1, 2], [2, 4]])) == (1, 0, 1)


def test_matrix_helpers():
    a = mat([[1, 2], [3, 4]])
    assert transpose(a) == ((1, 3), (2, 4))
    assert mat_mul(a, identity(2)) == a
    assert mat_vec(a, (1, 1)) == (3, 7)
    assert dot((1, 2, 3), (4, 5, 6)) == 32
