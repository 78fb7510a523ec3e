import itertools

import numpy as np
import pytest

from zp2mass.errors import InvalidModulusError, ShapeError
from zp2mass.ringmat import (
    Modulus,
    ResidueMatrix,
    extend_basis,
    howell_contains,
    howell_form,
    howell_pivots,
    kernel_fp,
    kernel_zp2,
    left_kernel_fp,
    rank_fp,
    rref_fp,
    solve_affine_fp,
)


def field(p):
    return Modulus.field(p)


def ring(p):
    return Modulus.ring(p)


@pytest.mark.parametrize("p, m", [(4, 4), (3, 27), (1, 1), (6, 36)])
def test_modulus_rejects_non_prime_or_wrong_power(p, m):
    with pytest.raises(InvalidModulusError):
        Modulus(p, m)


def test_entries_are_reduced_and_immutable():
    M = ResidueMatrix.from_rows(ring(3), [[-1, 10], [9, 18]])
    assert M.tolist() == [[8, 1], [0, 0]]
    with pytest.raises(ValueError):
        M.data[0, 0] = 3


def test_arithmetic_checks_modulus_and_shape():
    A = ResidueMatrix.from_rows(field(2), [[1, 0], [1, 1]])
    B = ResidueMatrix.from_rows(ring(2), [[1, 0], [1, 1]])
    with pytest.raises(InvalidModulusError):
        A @ B
    with pytest.raises(ShapeError):
        A + ResidueMatrix.zeros(field(2), 1, 2)
    assert (A @ A).tolist() == [[1, 0], [0, 1]]
    assert (A * 3).tolist() == A.tolist()
    assert (-A + A) == ResidueMatrix.zeros(field(2), 2, 2)


def test_from_rows_without_rows_needs_column_count():
    with pytest.raises(ShapeError):
        ResidueMatrix.from_rows(field(3), [])
    assert ResidueMatrix.from_rows(field(3), [], cols=4).shape == (0, 4)


def test_rref_over_f3():
    M = ResidueMatrix.from_rows(field(3), [[2, 1], [1, 2]])
    E = rref_fp(M)
    assert E.rank == 1
    assert E.matrix.tolist() == [[1, 2]]
    assert E.pivot_cols == [0]


def test_rref_refuses_ring_matrices():
    with pytest.raises(InvalidModulusError):
        rref_fp(ResidueMatrix.identity(ring(2), 2))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_kernels_are_annihilated(p, rng):
    for _ in range(10):
        M = ResidueMatrix(field(p), np.array([[rng.randrange(p) for _ in range(5)] for _ in range(3)]))
        K = kernel_fp(M)
        assert K.rows == 5 - rank_fp(M)
        assert not (M @ K.T).data.any()
        L = left_kernel_fp(M)
        assert L.rows == 3 - rank_fp(M)
        assert not (L @ M).data.any()


def test_solve_affine():
    A = ResidueMatrix.from_rows(field(2), [[1, 1], [1, 1]])
    assert solve_affine_fp(A, [0, 1]) is None
    sol = solve_affine_fp(A, [1, 1])
    assert ((A.data @ sol.particular) % 2).tolist() == [1, 1]
    assert len(sol.kernel_basis) == 1


def test_extend_basis_skips_dependent_candidates():
    base = [np.array([1, 0, 0])]
    cands = [np.array([1, 0, 0]), np.array([0, 1, 0]), np.array([1, 1, 0])]
    picked = extend_basis(base, cands, 2)
    assert [v.tolist() for v in picked] == [[0, 1, 0]]
    assert extend_basis(base, [], 2) == []


def test_howell_form_keeps_p_multiple_of_p_led_row():
    H = howell_form(ResidueMatrix.from_rows(ring(2), [[2, 1]]))
    assert H.tolist() == [[2, 1], [0, 2]]
    assert howell_pivots(H) == [0, 1]
    assert howell_contains(H, [0, 2])
    assert howell_contains(H, [2, 3])
    assert not howell_contains(H, [2, 0])
    assert not howell_contains(H, [1, 0])


def test_howell_form_refuses_field_matrices():
    with pytest.raises(InvalidModulusError):
        howell_form(ResidueMatrix.identity(field(3), 2))


def test_howell_form_is_independent_of_generators():
    a = howell_form(ResidueMatrix.from_rows(ring(3), [[1, 1, 4, 0], [0, 3, 6, 0]]))
    b = howell_form(ResidueMatrix.from_rows(ring(3), [[1, 4, 1, 0], [2, 2, 8, 0], [0, 6, 3, 0]]))
    assert a == b


@pytest.mark.parametrize("p, expected", [(2, 15), (3, 23)])
def test_submodules_of_rank_two(p, expected):
    """Z_{p^2}^2 has p^2 + 3p + 5 submodules."""
    m = p * p
    forms = set()
    for entries in itertools.product(range(m), repeat=4):
        M = ResidueMatrix(ring(p), np.array(entries).reshape(2, 2))
        forms.add(howell_form(M).key())
    assert len(forms) == expected == p * p + 3 * p + 5


@pytest.mark.parametrize("p", [2, 3])
def test_kernel_zp2(p, rng):
    m = p * p
    for _ in range(10):
        M = ResidueMatrix(ring(p), np.array([[rng.randrange(m) for _ in range(4)] for _ in range(2)]))
        K = kernel_zp2(M)
        assert not (M @ K.T).data.any()
    assert kernel_zp2(ResidueMatrix.zeros(ring(p), 0, 3)) == ResidueMatrix.identity(ring(p), 3)


def random_matrix(modulus, rows, cols, rng):
    data = np.array([[rng.randrange(modulus.m) for _ in range(cols)] for _ in range(rows)], dtype=np.int64)
    return ResidueMatrix(modulus, data.reshape(rows, cols))


def row_span(M):
    """Every combination of the rows of M, coefficients ranging over the whole ring."""
    if M.rows == 0:
        return {(0,) * M.cols}
    coeffs = np.array(list(itertools.product(range(M.modulus.m), repeat=M.rows)), dtype=np.int64)
    return {tuple(w) for w in ((coeffs @ M.data) % M.modulus.m).tolist()}


SPAN_GRID = [(p, n) for p in (2, 3, 5) for n in range(1, 5)]


@pytest.mark.parametrize("p, n", SPAN_GRID)
def test_rref_is_idempotent_and_keeps_the_row_span(p, n, rng):
    for _ in range(4):
        M = random_matrix(field(p), rng.randint(1, 3), n, rng)
        E = rref_fp(M).matrix
        assert rref_fp(E).matrix == E
        assert row_span(E) == row_span(M)


@pytest.mark.parametrize("p, n", SPAN_GRID)
def test_howell_form_is_idempotent_and_keeps_the_row_span(p, n, rng):
    for _ in range(4):
        M = random_matrix(ring(p), rng.randint(1, 3), n, rng)
        H = howell_form(M)
        assert howell_form(H) == H
        assert row_span(H) == row_span(M)


@pytest.mark.parametrize("p, cols", [(2, 3), (2, 8), (3, 5), (3, 8)])
def test_solve_affine_matches_an_exhaustive_count(p, cols, rng):
    X = np.array(list(itertools.product(range(p), repeat=cols)), dtype=np.int64)
    for trial in range(8):
        A = random_matrix(field(p), rng.randint(1, 4), cols, rng)
        if trial % 2:
            b = [rng.randrange(p) for _ in range(A.rows)]
        else:
            x = np.array([rng.randrange(p) for _ in range(cols)], dtype=np.int64)
            b = ((A.data @ x) % p).tolist()
        hits = int(((X @ A.data.T) % p == np.array(b)).all(axis=1).sum())
        sol = solve_affine_fp(A, b)
        if sol is None:
            assert hits == 0
        else:
            assert hits == p ** len(sol.kernel_basis)
            assert ((A.data @ sol.particular) % p).tolist() == b
