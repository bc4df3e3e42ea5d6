from __future__ import annotations

import random

from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from neron.snf import bareiss_det, matmul, matvec, smith_normal_form, solve_integer

matrices = st.integers(1, 6).flatmap(
    lambda m: st.integers(1, 6).flatmap(
        lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=m, max_size=m)
    )
)


def _det(M):
    return int(Matrix(M).det()) if M else 1


@settings(max_examples=150)
@given(matrices)
def test_transforms_diagonalise(A):
    snf = smith_normal_form(A)
    m, n = len(A), len(A[0])
    assert matmul(matmul(snf.U, A), snf.V) == snf.D()
    assert abs(_det(snf.U)) == 1 and len(snf.U) == m
    assert abs(_det(snf.V)) == 1 and len(snf.V) == n


@settings(max_examples=150)
@given(matrices)
def test_divisibility_chain(A):
    d = smith_normal_form(A).diagonal
    assert all(x > 0 for x in d)
    assert all(d[i + 1] % d[i] == 0 for i in range(len(d) - 1))


@settings(max_examples=100)
@given(matrices)
def test_matches_sympy_invariant_factors(A):
    ours = [x for x in smith_normal_form(A).diagonal]
    S = sympy_snf(Matrix(A))
    theirs = [abs(int(S[i, i])) for i in range(min(S.shape)) if S[i, i] != 0]
    assert ours == theirs


@settings(max_examples=100)
@given(matrices, st.lists(st.integers(-5, 5), min_size=6, max_size=6))
def test_solve_integer_finds_solutions(A, x0):
    n = len(A[0])
    b = matvec(A, x0[:n])
    x = solve_integer(A, b)
    assert x is not None and matvec(A, x) == b


def test_solve_integer_detects_insolubility():
    assert solve_integer([[2, 0], [0, 3]], [1, 0]) is None
    assert solve_integer([[2, 4]], [3]) is None
    assert solve_integer([[1, 1], [1, 1]], [1, 2]) is None
    assert solve_integer([[2, 4]], [6]) is not None


def test_bareiss_matches_sympy():
    rng = random.Random(7)
    for _ in range(60):
        n = rng.randint(1, 7)
        M = [[rng.randint(-6, 6) for _ in range(n)] for _ in range(n)]
        assert bareiss_det(M) == _det(M)


def test_theta_laplacian():
    # resolved theta graph: A-B directly, A-P-B, and A-Q1-Q2-B
    L = [
        [3, -1, -1, -1, 0],
        [-1, 3, -1, 0, -1],
        [-1, -1, 2, 0, 0],
        [-1, 0, 0, 2, -1],
        [0, -1, 0, -1, 2],
    ]
    snf = smith_normal_form(L)
    assert [d for _, d in snf.torsion()] == [11]
    assert snf.rank == 4
    assert bareiss_det([row[1:] for row in L[1:]]) == 11
