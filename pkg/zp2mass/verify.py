"""Formula-versus-oracle checks, driven by ``zp2mass verify``.

Each check returns :class:`CheckResult` rows. The ``small`` grid runs in seconds; the
``full`` grid covers every check at the scale stated for it in the README.
"""

from __future__ import annotations

import random
import time
from collections import Counter
from typing import Any, Callable, Iterable, Optional

import numpy as np

from . import census, codecore, equivalence, lifting
from .codecore import CodeZp2, FpCode
from .errors import PreconditionFailed, ZpmError
from .jlog import jlog
from .lifting import MapKind
from .ringmat import Modulus, ResidueMatrix, rank_fp, solve_affine_fp
from .schemas import CheckResult, Family

WORKED_EXAMPLE = (
    [[1, 1, 4, 0], [0, 3, 6, 0]],
    [[1, 1, 4, 3], [0, 3, 6, 0]],
    [[1, 1, 4, 6], [0, 3, 6, 3]],
    [[1, 7, 7, 0], [0, 0, 0, 3]],
)
WORKED_AUT_ORDERS = (24, 12, 4, 8)

GRIDS: dict[str, dict[str, Any]] = {
    "small": {
        "oracle": [(2, n) for n in range(1, 4)] + [(3, n) for n in range(1, 3)],
        "self_dual": [(2, 2), (3, 2)],
        "free": {"primes": (2, 3), "max_n": 4, "max_k1": 2, "sample": {2: 2, 3: 2}},
        "fiber": {"primes": (2, 3), "max_n": 4, "sample": {2: 1, 3: 1}},
        "even": None,
        "type2": False,
        "lemma_trials": 5,
        "structure": {"samples": 100, "max_n": 4, "chain_max_n": 4},
    },
    "full": {
        "oracle": [(2, n) for n in range(1, 6)] + [(3, n) for n in range(1, 5)],
        "self_dual": [(2, 2), (2, 4), (3, 2), (3, 4)],
        "free": {"primes": (2, 3, 5), "max_n": 6, "max_k1": 2, "sample": {5: 3}},
        "fiber": {"primes": (2, 3, 5), "max_n": 6, "sample": {(3, 6): 2, 5: 2}},
        "even": {"n": 8, "max_k1": 4, "pm1_sample": 2},
        "type2": True,
        "lemma_trials": 50,
        "structure": {"samples": 1000, "max_n": 6, "chain_max_n": 5},
    },
}


def _result(name: str, params: dict, expected: Any, actual: Any, started: float, ok: Optional[bool] = None) -> CheckResult:
    res = CheckResult(
        name=name,
        params=params,
        ok=(expected == actual) if ok is None else ok,
        expected=str(expected),
        actual=str(actual),
        seconds=round(time.monotonic() - started, 3),
    )
    jlog("info" if res.ok else "warning", "verify_check", name=name, ok=res.ok, **params)
    return res


def _guarded(name: str, params: dict, body: Callable[[], tuple[Any, Any]]) -> CheckResult:
    started = time.monotonic()
    try:
        expected, actual = body()
    except ZpmError as exc:
        return _result(name, params, "no error", f"{type(exc).__name__}: {exc}", started, ok=False)
    return _result(name, params, expected, actual, started)


# --- 1. the worked example over Z_9 ---------------------------------------------------


def check_worked_example() -> list[CheckResult]:
    out = []

    def classification():
        res = equivalence.classify(3, 4, Family.SO, 1, 1)
        expected = (4, sorted(WORKED_AUT_ORDERS), 192, True)
        return expected, (len(res.representatives), sorted(res.aut_orders), res.mass_sum, res.certified)

    def formula():
        return (16, 4, 192), (census.sigma_p(4, 1, 3), census.gaussian(2, 1, 3), census.mass_so(4, 1, 1, 3).value)

    def listed_codes():
        codes = [codecore.from_generators(3, 4, rows) for rows in WORKED_EXAMPLE]
        auts = tuple(equivalence.aut_order(C) for C in codes)
        inequivalent = all(
            equivalence.are_equivalent(codes[i], codes[j]) is None for i in range(4) for j in range(i + 1, 4)
        )
        terms = [equivalence.SignedMonomial.group_order(4) // a for a in auts]
        return (WORKED_AUT_ORDERS, True, [16, 32, 96, 48]), (auts, inequivalent, terms)

    out.append(_guarded("worked_example_classification", {"p": 3, "n": 4, "k1": 1, "k2": 1}, classification))
    out.append(_guarded("worked_example_formula", {"p": 3, "n": 4, "k1": 1, "k2": 1}, formula))
    out.append(_guarded("worked_example_representatives", {"p": 3, "n": 4}, listed_codes))
    return out


# --- 2, 3. oracle against the mass formulas ---------------------------------------------


def check_oracle_grid(pairs: Iterable[tuple[int, int]], workers: int = 1) -> list[CheckResult]:
    out = []
    for p, n in pairs:
        started = time.monotonic()
        try:
            found = Counter(C.type for C in census.oracle_enumerate(p, n, Family.SO, workers=workers))
        except ZpmError as exc:
            out.append(_result("oracle_vs_mass_so", {"p": p, "n": n}, "no error", str(exc), started, ok=False))
            continue
        for k1 in range(n // 2 + 1):
            for k2 in range(n - 2 * k1 + 1):
                params = {"p": p, "n": n, "k1": k1, "k2": k2}
                out.append(_result("oracle_vs_mass_so", params, census.mass_so(n, k1, k2, p).value, found[(k1, k2)], started))
    return out


def check_self_dual(pairs: Iterable[tuple[int, int]], workers: int = 1) -> list[CheckResult]:
    return [
        _guarded(
            "oracle_vs_mass_self_dual",
            {"p": p, "n": n},
            lambda p=p, n=n: (census.mass_self_dual(n, p).value, len(census.oracle_enumerate(p, n, Family.SELF_DUAL, workers=workers))),
        )
        for p, n in pairs
    ]


# --- 4, 5. free lifts and fibers -----------------------------------------------------------


def _sample(items, k: Optional[int], rng: random.Random) -> list:
    items = list(items)
    return items if k is None or len(items) <= k else rng.sample(items, k)


def _cell_sample(sample: dict, p: int, n: int) -> Optional[int]:
    """How many codes a cell checks: keyed by (p, n), then by p. Missing means all of them."""
    return sample.get((p, n), sample.get(p))


def _free_lift_codes(C1: FpCode) -> list[CodeZp2]:
    return lifting.free_so_lifts(C1).codes()


def check_free_lifts(primes, max_n: int, max_k1: int, sample: dict, rng: random.Random) -> list[CheckResult]:
    out = []
    for p in primes:
        for n in range(1, max_n + 1):
            for k1 in range(min(max_k1, n // 2) + 1):
                codes_fp = census.self_orthogonal_fp_codes(p, n, k1)
                params = {"p": p, "n": n, "k1": k1}

                def counts():
                    want = lifting.free_lift_count(p, n, k1)
                    got = {lifting.free_so_lifts(C1).count for C1 in codes_fp}
                    return {want} if codes_fp else set(), got

                def members():
                    bad = 0
                    for C1 in _sample(codes_fp, _cell_sample(sample, p, n), rng):
                        for C in _free_lift_codes(C1):
                            if not codecore.is_self_orthogonal(C):
                                bad += 1
                            elif codecore.residue(C).key() != C1.key() or codecore.torsion(C).key() != C1.key():
                                bad += 1
                    return 0, bad

                out.append(_guarded("free_lift_count", params, counts))
                out.append(_guarded("free_lift_members", params, members))
    return out


def fiber_report(C1: FpCode, C2: FpCode) -> tuple[set[int], set[int], bool]:
    """Sizes of {free lifts in C'} and {C' over a free lift}, and fiber() agreement."""
    primes = lifting.so_lifts(C1, C2)
    free = _free_lift_codes(C1)
    inside, over = set(), Counter()
    agree = True
    for Cp in primes:
        contained = [C for C in free if all(codecore.contains(Cp, r) for r in C.gens.data)]
        inside.add(len(contained))
        for C in contained:
            over[C.key()] += 1
        if {C.key() for C in lifting.fiber(Cp, C1)} != {C.key() for C in contained}:
            agree = False
    for C in free:
        if lifting.free_lift_extension(C, C2).key() not in {Cp.key() for Cp in primes}:
            agree = False
    return inside, {over[C.key()] for C in free}, agree


def check_fibers(primes, max_n: int, sample: dict, rng: random.Random) -> list[CheckResult]:
    out = []
    for p in primes:
        for n in range(2, max_n + 1):
            for k1 in range(1, n // 2 + 1):
                for k2 in range(1, n - 2 * k1 + 1):
                    params = {"p": p, "n": n, "k1": k1, "k2": k2}
                    k = _cell_sample(sample, p, n)
                    C1s = _sample(census.self_orthogonal_fp_codes(p, n, k1), k, rng)

                    def body(C1s=C1s, k=k, k1=k1, k2=k2):
                        got = set()
                        for C1 in C1s:
                            for C2 in _sample(census.intermediate_codes(C1, k2), k, rng):
                                inside, over, agree = fiber_report(C1, C2)
                                got.add((frozenset(inside), frozenset(over), agree))
                        want = {(frozenset({p ** (k1 * k2)}), frozenset({1}), True)} if got else set()
                        return want, got

                    out.append(_guarded("fiber_structure", params, body))
    return out


# --- 6, 7. even lifts and type II totals at n = 8 ------------------------------------------


def check_even_lifts(n: int, max_k1: int, pm1_sample: int, rng: random.Random) -> list[CheckResult]:
    out = []
    ones = [1] * n
    for k1 in range(1, max_k1 + 1):
        for k2 in range(n - 2 * k1 + 1):
            params = {"n": n, "k1": k1, "k2": k2}
            chain_list = list(census.chains(Family.EVEN_ONE, 2, n, k1, k2))

            def with_one(chain_list=chain_list, k1=k1, k2=k2):
                want = lifting.even_one_count(n, k1, k2)
                sizes, bad = set(), 0
                for C1, C2 in chain_list:
                    codes = lifting.even_lifts_with_one(C1, C2)
                    sizes.add(len(codes))
                    bad += sum(1 for C in codes if not (codecore.is_even(C, cross_check=True) and codecore.contains(C, ones)))
                return ({want} if chain_list else set(), 0), (sizes, bad)

            def with_pm1(chain_list=chain_list, k1=k1, k2=k2):
                want = lifting.even_pm1_count(n, k1, k2)
                sizes, bad = set(), 0
                for C1, C2 in _sample(chain_list, pm1_sample, rng):
                    codes = lifting.even_lifts_with_pm1(C1, C2)
                    sizes.add(len(codes))
                    bad += sum(1 for C in codes if not codecore.is_even(C) or len(codecore.pm1_codewords(C)) != 2 ** (k1 + k2))
                return ({want} if chain_list else set(), 0), (sizes, bad)

            out.append(_guarded("even_lifts_with_one", params, with_one))
            out.append(_guarded("even_lifts_with_pm1", params, with_pm1))
    return out


def check_type2(n: int = 8, workers: int = 1) -> list[CheckResult]:
    out = []
    for which, family in (("one", Family.TYPE2_ONE), ("pm1", Family.TYPE2_PM1)):
        params = {"n": n, "family": family.value}
        out.append(
            _guarded(
                "type2_constructive_total",
                params,
                lambda which=which, family=family: (
                    census.mass_type2(n, which).value,
                    len(census.constructive_enumerate(family, 2, n, workers=workers)),
                ),
            )
        )

        def certified(family=family):
            res = equivalence.classify(2, n, family, workers=workers)
            return (True, res.expected_mass), (res.certified, res.mass_sum)

        out.append(_guarded("type2_classification", params, certified))
    return out


# --- 8. the lift maps ---------------------------------------------------------------------


def random_full_rank(p: int, m: int, n: int, rng: random.Random) -> ResidueMatrix:
    field_ = Modulus.field(p)
    while True:
        A = ResidueMatrix(field_, np.array([[rng.randrange(p) for _ in range(n)] for _ in range(m)], dtype=np.int64).reshape(m, n))
        if rank_fp(A) == m:
            return A


def _lemma_kinds(lemma: str, p: int, A: ResidueMatrix) -> list[MapKind]:
    if lemma == "3.1":
        return [MapKind.PSI] + ([MapKind.PHI] if p == 2 else [])
    if p != 2:
        return []
    ones_in_rowspace = solve_affine_fp(A.T, [1] * A.cols) is not None
    return [] if ones_in_rowspace else [MapKind.PHI_ALPHA]


def check_lemma(lemma: str, p: int, m: int, n: int, trials: int, rng: random.Random) -> CheckResult:
    started = time.monotonic()
    params = {"lemma": lemma, "p": p, "m": m, "n": n, "trials": trials}
    checked = failures = 0
    try:
        for _ in range(trials):
            A = random_full_rank(p, m, n, rng)
            for kind in _lemma_kinds(lemma, p, A):
                check = lifting.image_check(A, kind)
                checked += 1
                if check.image_size * check.kernel_size != p ** (m * n):
                    failures += 1
    except ZpmError as exc:
        return _result("lift_map_images", params, "no error", f"{type(exc).__name__}: {exc}", started, ok=False)
    return _result("lift_map_images", params, 0, failures, started, ok=failures == 0 and (checked > 0 or lemma == "3.2"))


def check_lemma_grid(trials: int, rng: random.Random) -> list[CheckResult]:
    out = []
    for p in (2, 3, 5):
        for m in range(1, 4):
            for n in range(m, 7):
                out.append(check_lemma("3.1", p, m, n, trials, rng))
                if p == 2 and n > m:
                    out.append(check_lemma("3.2", p, m, n, trials, rng))
    return out


# --- 9. structural invariants on random codes ----------------------------------------------


def random_code(p: int, n: int, rng: random.Random) -> CodeZp2:
    m = p * p
    rows = [[rng.randrange(m) for _ in range(n)] for _ in range(rng.randint(0, n))]
    if rows and rng.random() < 0.5:
        # bias toward codes with torsion
        rows = [[(p * x) % m if i % 2 else x for x in r] for i, r in enumerate(rows)]
    return codecore.from_generators(p, n, rows)


def check_structure(samples: int, rng: random.Random, max_n: int = 6, chain_max_n: int = 5) -> list[CheckResult]:
    out = []

    def size_and_dual():
        bad = Counter()
        for _ in range(samples):
            p = rng.choice((2, 3))
            n = rng.randint(1, max_n)
            C = random_code(p, n, rng)
            res, tor = codecore.residue(C), codecore.torsion(C)
            if C.size != res.size * tor.size or not res.issubset(tor):
                bad["size"] += 1
            D = codecore.dual(C)
            if codecore.dual(D).key() != C.key() or C.size * D.size != p ** (2 * n):
                bad["dual"] += 1
            if codecore.is_self_dual(C) != (C.key() == D.key()):
                bad["self_dual"] += 1
            g = equivalence.SignedMonomial.random(n, rng)
            E = equivalence.apply(g, C)
            if E.type != C.type or E.size != C.size or codecore.is_self_orthogonal(E) != codecore.is_self_orthogonal(C):
                bad["action"] += 1
            if p == 2 and codecore.is_even(E) != codecore.is_even(C):
                bad["action"] += 1
            if p == 2 and codecore.euclidean_weight_distribution(E) != codecore.euclidean_weight_distribution(C):
                bad["weights"] += 1
            if equivalence.apply(g.inverse(), E).key() != C.key():
                bad["inverse"] += 1
        return {}, dict(bad)

    def residue_chain():
        bad = 0
        for n in range(1, chain_max_n + 1):
            for C in census.oracle_enumerate(2, n, Family.SO):
                if not codecore.residue_torsion_chain(C):
                    bad += 1
        return 0, bad

    def aut_divides():
        bad = 0
        for _ in range(samples):
            p = rng.choice((2, 3))
            n = rng.randint(1, max_n)
            C = random_code(p, n, rng)
            a = equivalence.aut_order(C)
            g = equivalence.SignedMonomial.random(n, rng)
            if equivalence.SignedMonomial.group_order(n) % a or equivalence.aut_order(equivalence.apply(g, C)) != a:
                bad += 1
        return 0, bad

    out.append(_guarded("size_dual_action_invariants", {"samples": samples, "max_n": max_n}, size_and_dual))
    out.append(_guarded("residue_torsion_chain", {"p": 2, "max_n": chain_max_n}, residue_chain))
    out.append(_guarded("aut_order_divides_group", {"samples": samples, "max_n": max_n}, aut_divides))
    return out


# --- drivers ------------------------------------------------------------------------------


def run_grid(name: str, seed: int = 0, workers: int = 1) -> list[CheckResult]:
    if name not in GRIDS:
        raise PreconditionFailed(f"unknown grid {name!r}; choose from {sorted(GRIDS)}")
    grid = GRIDS[name]
    rng = random.Random(seed)
    out = check_worked_example()
    out += check_oracle_grid(grid["oracle"], workers)
    out += check_self_dual(grid["self_dual"], workers)
    out += check_free_lifts(rng=rng, **grid["free"])
    out += check_fibers(rng=rng, **grid["fiber"])
    if grid["even"]:
        out += check_even_lifts(rng=rng, **grid["even"])
    if grid["type2"]:
        out += check_type2(8, workers)
    out += check_lemma_grid(grid["lemma_trials"], rng)
    out += check_structure(rng=rng, **grid["structure"])
    return out
