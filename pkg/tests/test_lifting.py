import numpy as np
import pytest

from zp2mass import census, codecore, lifting
from zp2mass.codecore import FpCode
from zp2mass.errors import DomainError, PreconditionFailed
from zp2mass.lifting import MapKind
from zp2mass.ringmat import Modulus, ResidueMatrix, rank_fp


def random_full_rank(p, m, n, rng):
    while True:
        A = ResidueMatrix(Modulus.field(p), np.array([[rng.randrange(p) for _ in range(n)] for _ in range(m)]).reshape(m, n))
        if rank_fp(A) == m:
            return A


@pytest.mark.parametrize(
    "p, n, k1, k2, expected",
    [
        (3, 4, 1, 0, 9),
        (3, 4, 1, 1, 3),
        (2, 8, 1, 0, 128),
        (2, 8, 4, 0, 2**10),
        (5, 6, 2, 0, 5**5),
        (3, 4, 0, 4, 1),
    ],
)
def test_lift_count(p, n, k1, k2, expected):
    assert lifting.lift_count(p, n, k1, k2) == expected


def test_lift_count_rejects_infeasible_types():
    with pytest.raises(DomainError):
        lifting.lift_count(3, 4, 2, 1)
    with pytest.raises(DomainError):
        lifting.even_one_count(8, 0, 0)


@pytest.mark.parametrize("k1, k2, expected", [(1, 0, 1), (2, 0, 16), (2, 1, 8), (4, 0, 8), (3, 2, 2)])
def test_even_one_count(k1, k2, expected):
    assert lifting.even_one_count(8, k1, k2) == expected
    assert lifting.even_pm1_count(8, k1, k2) == 2 ** (8 - k1 - k2) * expected


@pytest.mark.parametrize("p, m, n", [(2, 1, 3), (2, 2, 5), (3, 2, 4), (5, 3, 6), (3, 3, 3)])
def test_psi_image_sizes(p, m, n, rng):
    for _ in range(5):
        check = lifting.image_check(random_full_rank(p, m, n, rng), MapKind.PSI)
        assert check.matches
        assert check.image_size * check.kernel_size == p ** (m * n)


@pytest.mark.parametrize("m, n", [(1, 2), (2, 4), (3, 5), (3, 3)])
def test_phi_is_onto_symmetric_matrices(m, n, rng):
    for _ in range(5):
        check = lifting.image_check(random_full_rank(2, m, n, rng), MapKind.PHI)
        assert check.image_size == 2 ** (m * (m + 1) // 2)


def test_phi_alpha_needs_ones_outside_the_row_space():
    A = ResidueMatrix.from_rows(Modulus.field(2), [[1, 1, 1]])
    with pytest.raises(PreconditionFailed):
        lifting.image_check(A, MapKind.PHI_ALPHA)
    B = ResidueMatrix.from_rows(Modulus.field(2), [[1, 1, 0, 0], [0, 1, 1, 0]])
    assert lifting.image_check(B, MapKind.PHI_ALPHA).matches


def test_phi_is_quaternary():
    A = ResidueMatrix.from_rows(Modulus.field(3), [[1, 1]])
    N = ResidueMatrix.zeros(Modulus.field(3), 1, 2)
    with pytest.raises(DomainError):
        lifting.phi_map(A, N)


def test_free_lifts_of_the_worked_residue(worked_residue):
    sols = lifting.free_so_lifts(worked_residue)
    assert sols.count == 9
    codes = sols.codes()
    assert len({C.key() for C in codes}) == 9
    for C in codes:
        assert codecore.is_self_orthogonal(C)
        assert C.type == (1, 0)
        assert codecore.residue(C).key() == worked_residue.key()
        assert codecore.torsion(C).key() == worked_residue.key()


def test_member_order_matches_members(worked_residue):
    sols = lifting.free_so_lifts(worked_residue)
    assert [sols.member(i) for i in range(sols.count)] == list(sols.members())
    assert all(sols.satisfies(N) for N in sols.members())


def test_so_lifts_with_torsion(worked_codes, worked_residue, worked_torsion):
    codes = lifting.so_lifts(worked_residue, worked_torsion)
    keys = {C.key() for C in codes}
    assert len(codes) == 3 == len(keys)
    assert worked_codes[0].key() in keys
    assert worked_codes[1].key() in keys
    for C in codes:
        assert codecore.torsion(C).key() == worked_torsion.key()


def test_standard_frame_recovers_N(worked_residue, worked_torsion):
    sols = lifting.so_lift_solutions(worked_residue, worked_torsion)
    frame = sols.frame
    assert sorted(frame.perm) == [0, 1, 2, 3]
    assert frame.A.shape == (1, 3)
    assert frame.B.shape == (1, 3)
    N = sols.member(1)
    C = frame.code(N)
    assert C.type == (1, 1)
    assert sols.satisfies(frame.read_N(C))


def test_chain_preconditions(worked_residue):
    with pytest.raises(PreconditionFailed):
        lifting.so_lifts(FpCode.from_rows(3, 4, [[1, 0, 0, 0]]))
    with pytest.raises(PreconditionFailed):
        lifting.so_lifts(worked_residue, FpCode.from_rows(3, 4, [[1, 0, 0, 0]]))
    with pytest.raises(PreconditionFailed):
        # weight 2: self-orthogonal but not doubly even
        lifting.so_lifts(FpCode.from_rows(2, 4, [[1, 1, 0, 0]]))


def test_fiber_of_a_worked_code(worked_codes, worked_residue, worked_torsion):
    Cp = worked_codes[0]
    fib = lifting.fiber(Cp, worked_residue)
    assert len({C.key() for C in fib}) == 3
    free = {C.key() for C in lifting.free_so_lifts(worked_residue).codes()}
    for C in fib:
        assert C.key() in free
        assert all(codecore.contains(Cp, row) for row in C.gens.data)
        assert lifting.free_lift_extension(C, worked_torsion).key() == Cp.key()


def test_each_free_lift_extends_once(worked_residue, worked_torsion):
    primes = {C.key() for C in lifting.so_lifts(worked_residue, worked_torsion)}
    for C in lifting.free_so_lifts(worked_residue).codes():
        assert lifting.free_lift_extension(C, worked_torsion).key() in primes


def ones(n):
    return FpCode.from_rows(2, n, [[1] * n])


def test_even_lift_of_the_repetition_code():
    codes = lifting.even_lifts_with_one(ones(8))
    assert [C.key() for C in codes] == [codecore.from_generators(2, 8, [[1] * 8]).key()]


def test_even_lifts_with_pm1_of_the_repetition_code():
    codes = lifting.even_lifts_with_pm1(ones(8))
    assert len(codes) == 128
    for C in codes[:8]:
        assert codecore.is_even(C, cross_check=True)
        assert len(codecore.pm1_codewords(C)) == 2


def test_even_lifts_over_the_hamming_code():
    C1 = census.doubly_even_with_one(8, 4)[0]
    codes = lifting.even_lifts_with_one(C1)
    assert len(codes) == 8
    for C in codes:
        assert codecore.is_self_dual(C)
        assert codecore.is_even(C, cross_check=True)
        assert codecore.contains(C, [1] * 8)


def test_even_lifts_need_length_divisible_by_8():
    with pytest.raises(PreconditionFailed):
        lifting.even_lifts_with_one(ones(4))
    with pytest.raises(PreconditionFailed):
        lifting.even_lifts_with_one(FpCode.from_rows(2, 8, [[1, 1, 1, 1, 0, 0, 0, 0]]))


def test_sign_vectors():
    signs = list(lifting.sign_vectors(3))
    assert len(signs) == 8 == len(set(signs))
