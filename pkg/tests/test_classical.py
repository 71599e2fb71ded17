import pytest

from hidatriple.classical import (
    delta_qexp,
    dim_cusp_level1,
    eigenbasis,
    eisenstein_series,
    hecke_matrix,
    level1_basis,
    ordinary_eigenforms,
    p_stabilize,
)
from hidatriple.errors import DomainError
from hidatriple.linalg import charpoly


def _delta_naive(B):
    # q prod (1 - q^n)^24 by repeated multiplication, independent of the eta^3 route
    c = [0] * (B + 1)
    c[0] = 1
    for n in range(1, B + 1):
        for _ in range(24):
            for i in range(B, n - 1, -1):
                c[i] -= c[i - n]
    return [0] + c[:B]


def test_delta_values():
    D = delta_qexp(30).qexp.coeffs
    naive = _delta_naive(30)
    assert list(D) == naive
    assert D[1] == 1 and D[2] == -24 and D[3] == 252
    assert D[11] == 534612


def test_dimensions():
    assert level1_basis(12, 20).dim == 1
    assert level1_basis(24, 20).dim == 2
    assert level1_basis(10, 20).dim == 0
    # dim M_k counted as #{(a, b): 4a + 6b = k}; cusp forms have codimension one
    for k in range(4, 80, 2):
        dim_M = sum(1 for a in range(k // 4 + 1) if (k - 4 * a) % 6 == 0)
        assert dim_cusp_level1(k) == dim_M - 1
        assert level1_basis(k, k // 12 + 5).dim == dim_M - 1


def test_weight24_T2_charpoly():
    sp = level1_basis(24, 20)
    T = hecke_matrix(sp, 2)
    assert charpoly(T) == [-20468736, -1080, 1]


def test_eigenbasis_weight12():
    (f,) = eigenbasis(level1_basis(12, 20), 11, 6)
    assert f.eigenvalues[2] % 11**6 == -24 % 11**6


def test_stabilize_eisenstein():
    p, k, N = 7, 4, 6
    E = eisenstein_series(k, 40)
    from hidatriple.classical import ClassicalForm

    f = ClassicalForm(k, E.scale(pow(240, -1, p**N)).reduce(p**N), label="E4")
    fs = p_stabilize(f, p, N, "unit")
    assert fs.eigenvalues[p] % p**N == 1


def test_stabilize_delta():
    f = delta_qexp(30)
    fs = p_stabilize(f, 11, 6, "unit")
    alpha = fs.eigenvalues[11]
    assert alpha % 11 == 534612 % 11 == 1
    assert (alpha**2 - 534612 * alpha + 11**11) % 11**6 == 0
    with pytest.raises(DomainError):
        p_stabilize(delta_qexp(30), 5, 6, "unit")


def test_ordinary_eigenforms_weight32():
    (f,) = ordinary_eigenforms(32, 11, 6, 30)
    assert f.qexp.coeffs[1] == 1 and f.qexp.coeffs[11] % 11
