from itertools import permutations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hidatriple.errors import DomainError
from hidatriple.linalg import (
    charpoly,
    det,
    factorial_power_limit,
    identity,
    kernel_vector_simple,
    mat_eq,
    mat_inv,
    mat_mul,
    mat_vec,
    min_scalar_for_membership,
    poly_eval_matrix,
)

P, N = 7, 5
MOD = P**N


def square(n_min=1, n_max=4):
    return st.integers(n_min, n_max).flatmap(
        lambda n: st.lists(st.lists(st.integers(-50, 50), min_size=n, max_size=n), min_size=n, max_size=n)
    )


def _leibniz(A):
    n = len(A)
    tot = 0
    for s in permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if s[i] > s[j]:
                    sign = -sign
        prod = 1
        for i in range(n):
            prod *= A[i][s[i]]
        tot += sign * prod
    return tot


@given(square())
def test_det_matches_leibniz(A):
    assert det(A) == _leibniz(A)


@given(square())
def test_cayley_hamilton(A):
    c = charpoly(A)
    assert c[-1] == 1 and len(c) == len(A) + 1
    Z = poly_eval_matrix(c, A, MOD)
    assert all(x == 0 for r in Z for x in r)


@given(square())
def test_inverse(A):
    if _leibniz(A) % P == 0:
        with pytest.raises(DomainError):
            mat_inv(A, P, N)
        return
    Ai = mat_inv(A, P, N)
    assert mat_eq(mat_mul(A, Ai, MOD), identity(len(A)), MOD)


def test_charpoly_known():
    assert charpoly([[0, 1], [-6, 5]]) == [6, -5, 1]


@given(st.lists(st.integers(0, MOD - 1), min_size=3, max_size=3))
def test_kernel_vector(v):
    # rank-2 matrix with kernel spanned by (1, 2, 3) mod p
    A = [[2, -1, 0], [3, 0, -1], [1, 1, -1]]
    k = kernel_vector_simple(A, P, N)
    assert all(x % MOD == 0 for x in mat_vec(A, k, MOD))
    assert any(x % P for x in k)


def test_membership():
    gens = [[P**2, 0], [0, 1]]
    assert min_scalar_for_membership([1, 0], 0, gens, P, N) == 2
    assert min_scalar_for_membership([P**3, 5], 0, gens, P, N) == 0
    assert min_scalar_for_membership([P**2, 0], 1, gens, P, N) == 1
    with pytest.raises(DomainError):
        min_scalar_for_membership([0, 0, 1], 0, [[1, 0, 0], [0, 1, 0]], P, N)


def test_factorial_power_limit_is_ordinary_idempotent():
    A = [[P, 1], [0, 3]]
    E = factorial_power_limit(A, P, N)
    assert mat_eq(mat_mul(E, E, MOD), E, MOD)
    # slope-zero part has rank one
    assert E[1][1] % MOD == 1 and E[0][0] % MOD == 0
