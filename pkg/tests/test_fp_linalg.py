import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modpforms.fp_linalg import (
    FpMatrix,
    check_modulus,
    inv_mod,
    is_prime,
    matmul,
    rank,
    reduce_vector,
    rref,
    row_space,
    solve_in_basis,
    subspace_contains,
)

PRIMES = [2, 3, 5, 7, 11, 13, 101]


def trial_division_prime(n):
    return n >= 2 and all(n % d for d in range(2, int(n**0.5) + 1))


@st.composite
def matrices(draw, max_dim=6):
    p = draw(st.sampled_from(PRIMES))
    r = draw(st.integers(0, max_dim))
    c = draw(st.integers(1, max_dim))
    rows = draw(st.lists(st.lists(st.integers(0, p - 1), min_size=c, max_size=c),
                         min_size=r, max_size=r))
    return FpMatrix.from_rows(rows, p, c)


def test_is_prime_matches_trial_division():
    for n in range(-3, 5000):
        assert is_prime(n) == trial_division_prime(n), n
    assert is_prime(2**31 - 1)
    assert not is_prime(2**31 - 3)


def test_check_modulus_rejects():
    for bad in (0, 1, 4, 2**31 + 11, 2**61 - 1):
        with pytest.raises(ValueError):
            check_modulus(bad)
    with pytest.raises(TypeError):
        check_modulus(5.0)


def test_inv_mod():
    for p in PRIMES:
        for a in range(1, p):
            assert a * inv_mod(a, p) % p == 1
    with pytest.raises(ZeroDivisionError):
        inv_mod(0, 7)


def test_rref_identity():
    e = rref(FpMatrix.identity(2, 5))
    assert e.rank == 2 and e.pivots == (0, 1)
    assert e.echelon == FpMatrix.identity(2, 5)


def test_rref_zero():
    e = rref(FpMatrix.zeros(3, 3, 7))
    assert e.rank == 0 and e.pivots == ()


def test_rref_proportional_rows():
    e = rref(FpMatrix.from_rows([[2, 4], [1, 2]], 5))
    assert e.rank == 1
    assert e.echelon.rows[0] == (1, 2)


def test_rref_empty():
    assert rref(FpMatrix(5, (), 4)).rank == 0


def test_subspace_contains_examples():
    ident = FpMatrix.identity(3, 11)
    assert subspace_contains(ident, [4, 0, 10])
    assert not subspace_contains(FpMatrix.from_rows([[1, 0]], 5), [0, 1])
    assert subspace_contains(FpMatrix.from_rows([[1, 2]], 7), [3, 6])


def test_subspace_contains_dimension_mismatch():
    with pytest.raises(ValueError):
        subspace_contains(FpMatrix.identity(2, 5), [1, 2, 3])


def test_subspace_contains_requires_echelon():
    with pytest.raises(ValueError):
        reduce_vector(FpMatrix.from_rows([[2, 0], [1, 1]], 5), [1, 1])


@given(matrices())
def test_rank_equals_transpose_rank(m):
    assert rank(m) == rank(m.transpose())


@given(matrices())
def test_rref_idempotent(m):
    e = rref(m).echelon
    assert rref(e).echelon == e


@given(matrices())
def test_rows_in_own_row_space(m):
    basis = row_space(m)
    assert all(subspace_contains(basis, r) for r in m.rows)


@given(matrices())
def test_pivots_strictly_increasing(m):
    piv = rref(m).pivots
    assert list(piv) == sorted(set(piv))


@settings(max_examples=50)
@given(matrices(), st.data())
def test_solve_in_basis_roundtrip(m, data):
    basis = row_space(m)
    if basis.nrows == 0:
        return
    coeffs = data.draw(st.lists(st.integers(0, m.p - 1), min_size=basis.nrows,
                                max_size=basis.nrows))
    v = matmul(FpMatrix.from_rows([coeffs], m.p), basis).rows[0]
    assert solve_in_basis(basis, v) == coeffs


def test_solve_in_basis_outside_span():
    assert solve_in_basis(FpMatrix.from_rows([[1, 1, 0]], 3), [0, 0, 1]) is None


def test_matrix_shape_validation():
    with pytest.raises(ValueError):
        FpMatrix(5, ((1, 2), (3,)), 2)
