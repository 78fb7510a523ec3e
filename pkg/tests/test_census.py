from collections import Counter

import pytest

from zp2mass import census, codecore
from zp2mass.errors import BudgetExceeded, DomainError
from zp2mass.schemas import Family

SMALL_ORACLE = [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3)]


@pytest.mark.parametrize("n, k, p, expected", [(2, 1, 3, 4), (4, 2, 2, 35), (5, 0, 7, 1), (6, 6, 2, 1), (4, 2, 3, 130)])
def test_gaussian(n, k, p, expected):
    assert census.gaussian(n, k, p) == expected


def test_gaussian_domain():
    with pytest.raises(DomainError):
        census.gaussian(3, 4, 2)


@pytest.mark.parametrize("p, n, k", [(2, 4, 2), (3, 4, 2), (5, 3, 1)])
def test_fp_codes_match_gaussian(p, n, k):
    codes = list(census.fp_codes(p, n, k))
    assert len(codes) == census.gaussian(n, k, p)
    assert len({C.key() for C in codes}) == len(codes)


def test_sigma_values():
    assert census.sigma_p(4, 1, 3) == 16
    assert census.sigma_de(8, 1) == 71
    assert census.sigma_de(8, 4) == 30
    assert census.sigma_one(8, 2) == 35
    assert census.sigma_one(8, 3) == 105
    assert census.sigma_one(8, 4) == 30
    assert census.sigma_one(0, 0) == 1
    assert census.sigma_one(8, 0) == 0
    assert census.sigma(2, 8, 1) == census.sigma_de(8, 1)


def test_sigma_p_refuses_two():
    with pytest.raises(DomainError):
        census.sigma_p(4, 1, 2)


def test_swept_codes_are_self_orthogonal():
    for C in census.self_orthogonal_fp_codes(3, 5, 2):
        assert C.is_self_orthogonal()
    for C in census.self_orthogonal_fp_codes(2, 8, 2):
        assert C.is_doubly_even()


def test_intermediate_codes(worked_residue, worked_torsion):
    codes = census.intermediate_codes(worked_residue, 1)
    assert len(codes) == census.gaussian(2, 1, 3)
    perp = codecore.dual_fp(worked_residue)
    for C2 in codes:
        assert C2.dim == 2
        assert worked_residue.issubset(C2)
        assert C2.issubset(perp)
    assert worked_torsion.key() in {C2.key() for C2 in codes}


def test_mass_so_values():
    assert census.mass_so(4, 1, 1, 3).value == 192
    assert census.mass_so(8, 1, 0, 2).value == 9088
    infeasible = census.mass_so(4, 2, 1, 3)
    assert infeasible.value == 0
    assert infeasible.diagnostic


def test_totals():
    assert census.mass_self_dual(2, 3).value == 1
    assert census.mass_self_dual(2, 2).value == 1
    assert census.mass_so_total(2, 2).value == 5


def test_type2_masses():
    one = census.mass_type2(8, "one")
    pm1 = census.mass_type2(8, "pm1")
    assert one.value == 486
    assert pm1.value == 5662
    assert [(t.k1, t.k2, t.term) for t in one.breakdown] == [(0, 8, 0), (1, 6, 1), (2, 4, 35), (3, 2, 210), (4, 0, 240)]
    with pytest.raises(DomainError):
        census.mass_type2(8, "both")


def test_even_masses():
    assert census.mass_even_one(8, 2, 0).value == 560
    assert census.mass_even_pm1(8, 1, 0).value == census.sigma_one(8, 1) * census.gaussian(6, 0, 2) * 128
    assert census.mass_even_one(8, 0, 0).value == 0
    with pytest.raises(DomainError):
        census.mass_even_one(4, 1, 0)


def test_mass_dispatch():
    assert census.mass(Family.SO, 3, 4, 1, 1).value == 192
    assert census.mass(Family.SELF_DUAL, 3, 2).value == 1
    assert census.mass(Family.SO, 2, 2).value == 5
    with pytest.raises(DomainError):
        census.mass(Family.EVEN_ONE, 3, 8)
    with pytest.raises(DomainError):
        census.mass(Family.SO, 3, 4, 1)


@pytest.mark.parametrize("p, expected", [(2, 15), (3, 23)])
def test_oracle_finds_every_submodule(p, expected):
    codes = census.oracle_enumerate(p, 2)
    assert len(codes) == expected
    assert [C.key() for C in codes] == sorted({C.key() for C in codes})


def test_oracle_length_one():
    assert len(census.oracle_enumerate(2, 1)) == 3


@pytest.mark.parametrize("p, n", SMALL_ORACLE)
def test_oracle_matches_mass_so(p, n):
    found = Counter(C.type for C in census.oracle_enumerate(p, n, Family.SO))
    for k1 in range(n // 2 + 1):
        for k2 in range(n - 2 * k1 + 1):
            assert found[(k1, k2)] == census.mass_so(n, k1, k2, p).value, (k1, k2)
    assert sum(found.values()) == census.mass_so_total(n, p).value


def test_oracle_filters_type():
    codes = census.oracle_enumerate(2, 3, Family.SO, k1=0, k2=1)
    assert len(codes) == census.mass_so(3, 0, 1, 2).value == 7
    assert all(C.type == (0, 1) for C in codes)


def test_oracle_budget():
    with pytest.raises(BudgetExceeded):
        census.oracle_enumerate(3, 5)


def test_oracle_rejects_quaternary_family_at_odd_p():
    with pytest.raises(DomainError):
        census.oracle_enumerate(3, 2, Family.EVEN_ONE)


@pytest.mark.parametrize("family, p, n", [(Family.SO, 2, 4), (Family.SO, 3, 3), (Family.SELF_DUAL, 2, 4), (Family.SELF_DUAL, 3, 2)])
def test_constructive_matches_oracle(family, p, n):
    built = census.constructive_enumerate(family, p, n)
    swept = census.oracle_enumerate(p, n, family)
    assert sorted(C.key() for C in built) == [C.key() for C in swept]
    assert len(built) == census.mass(family, p, n).value


def test_constructive_count_and_chains():
    assert census.constructive_count(Family.SO, 3, 4, 1, 1) == 192
    assert len(list(census.chains(Family.SO, 3, 4, 1, 1))) == 16 * 4
    assert census.constructive_count(Family.TYPE2_ONE, 2, 8) == 486


def test_family_types():
    assert census.family_types(Family.TYPE2_ONE, 8) == [(1, 6), (2, 4), (3, 2), (4, 0)]
    assert census.family_types(Family.SELF_DUAL, 4) == [(0, 4), (1, 2), (2, 0)]
    assert census.family_types(Family.SO, 2) == [(0, 0), (0, 1), (0, 2), (1, 0)]


def test_constructive_budget(monkeypatch):
    monkeypatch.setattr(census.settings, "family_limit", 10)
    with pytest.raises(BudgetExceeded):
        census.constructive_enumerate(Family.SO, 3, 4, 1, 1)


@pytest.mark.slow
def test_type2_one_constructive_total():
    assert len(census.constructive_enumerate(Family.TYPE2_ONE, 2, 8)) == 486


@pytest.mark.slow
def test_type2_pm1_constructive_total():
    assert len(census.constructive_enumerate(Family.TYPE2_PM1, 2, 8)) == 5662
