from fractions import Fraction

import pytest

from zp2mass import census, codecore, equivalence, verify
from zp2mass.equivalence import SignedMonomial, UnionFind
from zp2mass.errors import BudgetExceeded, ShapeError
from zp2mass.schemas import Family


def test_signed_monomial_validation():
    with pytest.raises(ShapeError):
        SignedMonomial((0, 0), (1, 1))
    with pytest.raises(ShapeError):
        SignedMonomial((0,), (2,))
    with pytest.raises(ShapeError):
        SignedMonomial((1, 0), (1,))


def test_group_order():
    assert SignedMonomial.group_order(4) == 384
    assert SignedMonomial.group_order(4, signed=False) == 24
    assert SignedMonomial.group_order(0) == 1


def test_compose_applies_the_right_factor_first(rng):
    v = [1, 2, 3, 4, 5]
    for _ in range(20):
        g, h = SignedMonomial.random(5, rng), SignedMonomial.random(5, rng)
        assert (g * h).act_vector(v, 9) == g.act_vector(h.act_vector(v, 9), 9)
        assert g * g.inverse() == SignedMonomial.identity(5)
        assert g.inverse() * g == SignedMonomial.identity(5)


def test_apply_matches_act_vector(worked_codes, rng):
    C = worked_codes[2]
    for _ in range(10):
        g = SignedMonomial.random(4, rng)
        D = equivalence.apply(g, C)
        assert D.type == C.type
        for row in C.gens.data:
            assert codecore.contains(D, g.act_vector(row, 9))


def test_generators():
    assert len(equivalence.generators(1)) == 1
    assert len(equivalence.generators(3, signed=False)) == 2
    assert len(equivalence.generators(3)) == 3


def test_orbit_stabilizer_on_small_code():
    C = codecore.from_generators(2, 2, [[1, 1]])
    assert equivalence.aut_order(C) == 4
    assert equivalence.aut_order(C, signed=False) == 2
    orbit = equivalence.orbit(C)
    assert len(orbit) == 2
    assert codecore.from_generators(2, 2, [[1, 3]]).key() in {D.key() for D in orbit}


@pytest.mark.parametrize(
    "p, n, rows, expected",
    [
        (2, 3, [], 48),
        (3, 2, [[3, 0], [0, 3]], 8),
        (2, 2, [[1, 0], [0, 1]], 8),
        (2, 2, [[2, 0]], 4),
    ],
)
def test_aut_order_small(p, n, rows, expected):
    C = codecore.from_generators(p, n, rows)
    assert equivalence.aut_order(C) == expected


def test_worked_aut_orders(worked_codes):
    assert [equivalence.aut_order(C) for C in worked_codes] == [24, 12, 4, 8]
    assert sum(384 // equivalence.aut_order(C) for C in worked_codes) == 192


def test_worked_codes_are_inequivalent(worked_codes):
    for i, C in enumerate(worked_codes):
        for D in worked_codes[i + 1 :]:
            assert equivalence.are_equivalent(C, D) is None


def test_are_equivalent_returns_a_witness(worked_codes, rng):
    C = worked_codes[1]
    D = equivalence.apply(SignedMonomial.random(4, rng), C)
    g = equivalence.are_equivalent(C, D)
    assert g is not None
    assert equivalence.apply(g, C).key() == D.key()


def test_aut_order_is_invariant(worked_codes, rng):
    C = worked_codes[3]
    g = SignedMonomial.random(4, rng)
    assert equivalence.aut_order(equivalence.apply(g, C)) == equivalence.aut_order(C)
    assert sorted(equivalence.fingerprints(equivalence.apply(g, C))) == sorted(equivalence.fingerprints(C))


def test_are_equivalent_shape():
    with pytest.raises(ShapeError):
        equivalence.are_equivalent(codecore.zero_code(2, 2), codecore.zero_code(2, 3))
    assert equivalence.are_equivalent(codecore.zero_code(2, 2), codecore.from_generators(2, 2, [[2, 2]])) is None


def test_union_find():
    uf = UnionFind(range(5))
    uf.union(0, 1)
    uf.union(3, 4)
    uf.union(1, 4)
    assert uf.find(0) == uf.find(3)
    assert uf.find(2) == 2
    assert len(uf.reps()) == 2
    assert uf.size[uf.find(0)] == 4
    assert uf.size[uf.find(2)] == 1


def test_classify_worked_example():
    res = equivalence.classify(3, 4, Family.SO, 1, 1)
    assert len(res.representatives) == 4
    assert sorted(res.aut_orders) == [4, 8, 12, 24]
    assert res.mass_sum == Fraction(192)
    assert res.expected_mass == 192
    assert res.certified
    assert sum(res.orbit_sizes) == 192
    report = res.to_schema()
    assert report.mass_sum == "192"
    assert report.type == {"k1": 1, "k2": 1}
    assert report.model_dump(mode="json")["expected_mass"] == "192"


def test_representatives_are_orbit_minima():
    res = equivalence.classify(3, 4, Family.SO, 1, 1)
    for rep in res.representatives:
        assert rep.key() == min(D.key() for D in equivalence.orbit(rep))


def test_classify_zero_type():
    res = equivalence.classify(2, 4, Family.SO, 0, 0)
    assert len(res.representatives) == 1
    assert res.certified


@pytest.mark.parametrize("family, p, n", [(Family.SO, 2, 4), (Family.SO, 3, 3), (Family.SELF_DUAL, 3, 4), (Family.SELF_DUAL, 2, 4)])
def test_classify_is_certified(family, p, n):
    res = equivalence.classify(p, n, family)
    assert res.certified
    assert res.mass_sum == census.mass(family, p, n).value


def test_oracle_and_lifts_give_the_same_classes():
    a = equivalence.classify(2, 4, Family.SO, oracle=True)
    b = equivalence.classify(2, 4, Family.SO)
    assert [C.key() for C in a.representatives] == [C.key() for C in b.representatives]


def test_expected_mass():
    assert equivalence.expected_mass(Family.SO, 3, 4, 1, 1) == 192
    assert equivalence.expected_mass(Family.TYPE2_ONE, 2, 8) == 486


def test_aut_budget(monkeypatch):
    monkeypatch.setattr(equivalence.settings, "aut_max_n", 3)
    with pytest.raises(BudgetExceeded):
        equivalence.aut_order(codecore.zero_code(2, 4))


@pytest.mark.slow
@pytest.mark.parametrize("family", [Family.TYPE2_ONE, Family.TYPE2_PM1])
def test_type2_classification_at_length_8(family):
    res = equivalence.classify(2, 8, family)
    assert res.certified
    assert res.mass_sum == census.mass(family, 2, 8).value


RANDOM_GRID = [(p, n) for p in (2, 3) for n in range(1, 7)]


@pytest.mark.parametrize("p, n", RANDOM_GRID)
def test_aut_order_divides_group_order_and_is_invariant(p, n, rng):
    for _ in range(5):
        C = verify.random_code(p, n, rng)
        a = equivalence.aut_order(C)
        assert SignedMonomial.group_order(n) % a == 0
        D = equivalence.apply(SignedMonomial.random(n, rng), C)
        assert equivalence.aut_order(D) == a


@pytest.mark.parametrize("p, n", [(p, n) for p, n in RANDOM_GRID if n <= 4])
def test_orbit_times_aut_order_is_group_order(p, n, rng):
    for _ in range(3):
        C = verify.random_code(p, n, rng)
        assert len(equivalence.orbit(C)) * equivalence.aut_order(C) == SignedMonomial.group_order(n)


@pytest.mark.parametrize("n", range(1, 7))
def test_apply_preserves_invariants(n, rng):
    for _ in range(10):
        C = verify.random_code(2, n, rng)
        D = equivalence.apply(SignedMonomial.random(n, rng), C)
        assert D.type == C.type
        assert D.size == C.size
        assert codecore.is_self_orthogonal(D) == codecore.is_self_orthogonal(C)
        assert codecore.is_even(D) == codecore.is_even(C)
        assert codecore.euclidean_weight_distribution(D) == codecore.euclidean_weight_distribution(C)
