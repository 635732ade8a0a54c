import random

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from symspin.linalg import (NotInSpan, SpanSolver, SparseMatrix, combine, image_basis, kernel_basis, rank,
                            solve_in_span)
from symspin.scalars import I, Scalar


def random_matrix(rng, rows, cols, density=0.5, bound=3):
    ent = {}
    for r in range(rows):
        for c in range(cols):
            if rng.random() < density:
                ent[(r, c)] = Scalar(rng.randint(-bound, bound), rng.randint(-bound, bound))
    return SparseMatrix(rows, cols, ent)


def to_sympy(M):
    out = sp.zeros(M.rows, M.cols)
    for (r, c), x in M.entries.items():
        out[r, c] = sp.Rational(x.real.numerator, x.real.denominator) + sp.I * sp.Rational(
            x.imag.numerator, x.imag.denominator)
    return out


def test_rank_of_identity_and_zero():
    assert rank(SparseMatrix.identity(5)) == 5
    assert rank(SparseMatrix(3, 4)) == 0
    assert kernel_basis(SparseMatrix(2, 3)) == [{0: 1}, {1: 1}, {2: 1}]


def test_complex_dependence_detected():
    # second column is i times the first
    M = SparseMatrix.from_rows([[1, I], [I, -1]])
    assert rank(M) == 1
    (v,) = kernel_basis(M)
    assert M.apply(v) == {}


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6), st.integers(1, 6))
def test_rank_matches_sympy(seed, rows, cols):
    M = random_matrix(random.Random(seed), rows, cols)
    assert rank(M) == to_sympy(M).rank()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6), st.integers(1, 7))
def test_kernel_is_kernel_with_right_size(seed, rows, cols):
    M = random_matrix(random.Random(seed), rows, cols, density=0.4)
    K = kernel_basis(M)
    assert len(K) == cols - rank(M)
    for v in K:
        assert M.apply(v) == {}
    if K:
        assert rank(SparseMatrix.from_columns(K, cols)) == len(K)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_span_solver_roundtrip(seed):
    rng = random.Random(seed)
    M = random_matrix(rng, 6, 4)
    basis = image_basis(M)
    coeffs = [Scalar(rng.randint(-4, 4), rng.randint(-4, 4)) for _ in basis]
    target = combine(basis, coeffs)
    assert SpanSolver(basis, 6).coordinates(target) == coeffs


def test_not_in_span():
    basis = [{0: Scalar(1)}]
    with pytest.raises(NotInSpan):
        solve_in_span(basis, {1: Scalar(1)}, 2)


def test_dependent_basis_rejected():
    with pytest.raises(ValueError):
        SpanSolver([{0: Scalar(1)}, {0: Scalar(2)}], 1)


def test_kernel_basis_is_deterministic():
    rng = random.Random(3)
    M = random_matrix(rng, 4, 7)
    assert kernel_basis(M) == kernel_basis(SparseMatrix(M.rows, M.cols, dict(reversed(list(M.entries.items())))))


def test_matmul_and_shape_errors():
    A = SparseMatrix.from_rows([[1, 2], [3, 4]])
    assert (A @ SparseMatrix.identity(2)) == A
    with pytest.raises(ValueError):
        A + SparseMatrix(3, 3)
