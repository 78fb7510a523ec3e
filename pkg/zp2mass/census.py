"""Counting: base-field sweeps, Gaussian coefficients, mass formulas and the Z_{p^2} oracle.

Nothing here uses closed forms for the number of self-orthogonal codes over F_p; those
numbers come from exhaustive sweeps of reduced row-echelon generator matrices.
"""

from __future__ import annotations

import itertools
import time
from functools import lru_cache
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from . import codecore, lifting
from .codecore import CodeZp2, FpCode
from .config import settings
from .errors import BudgetExceeded, DomainError, PreconditionFailed
from .jlog import jlog
from .parallel import pmap
from .ringmat import Modulus, ResidueMatrix, extend_basis, howell_contains, is_prime
from .schemas import Family, MassReport, MassTerm


def gaussian(n: int, k: int, p: int) -> int:
    """Number of k-dimensional subspaces of F_p^n."""
    if k < 0 or k > n:
        raise DomainError(f"gaussian coefficient needs 0 <= k <= n, got n={n}, k={k}")
    num = den = 1
    for i in range(k):
        num *= p**n - p**i
        den *= p**k - p**i
    return num // den


# --- sweeps over F_p -------------------------------------------------------------------

RowTest = Callable[[np.ndarray], bool]
PairTest = Callable[[np.ndarray, np.ndarray], bool]


def _rref_sweep(p: int, n: int, k: int, row_ok: Optional[RowTest] = None, pair_ok: Optional[PairTest] = None) -> Iterator[np.ndarray]:
    """Every k x n RREF matrix over F_p whose rows pass ``row_ok`` and pairs pass ``pair_ok``."""
    for piv in itertools.combinations(range(n), k):
        pivset = set(piv)
        options: list[list[np.ndarray]] = []
        for c in piv:
            free = [j for j in range(c + 1, n) if j not in pivset]
            rows = []
            for values in itertools.product(range(p), repeat=len(free)):
                v = np.zeros(n, dtype=np.int64)
                v[c] = 1
                v[free] = values
                if row_ok is None or row_ok(v):
                    rows.append(v)
            options.append(rows)

        chosen: list[np.ndarray] = []

        def extend(i: int) -> Iterator[np.ndarray]:
            if i == k:
                yield np.array(chosen, dtype=np.int64).reshape(k, n)
                return
            for v in options[i]:
                if pair_ok is None or all(pair_ok(u, v) for u in chosen):
                    chosen.append(v)
                    yield from extend(i + 1)
                    chosen.pop()

        yield from extend(0)


def _check_prime(p: int) -> None:
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")


def fp_codes(p: int, n: int, k: int) -> Iterator[FpCode]:
    _check_prime(p)
    if k < 0 or k > n:
        raise DomainError(f"no {k}-dimensional codes of length {n}")
    field_ = Modulus.field(p)
    for R in _rref_sweep(p, n, k):
        yield FpCode(p, n, ResidueMatrix(field_, R))


@lru_cache(maxsize=None)
def _self_orthogonal(p: int, n: int, k: int) -> tuple[FpCode, ...]:
    field_ = Modulus.field(p)

    def row_ok(v: np.ndarray) -> bool:
        # doubly even at p = 2
        return int(v.sum()) % 4 == 0 if p == 2 else int(v @ v) % p == 0

    def pair_ok(u: np.ndarray, v: np.ndarray) -> bool:
        return int(u @ v) % p == 0

    return tuple(FpCode(p, n, ResidueMatrix(field_, R)) for R in _rref_sweep(p, n, k, row_ok, pair_ok))


def self_orthogonal_fp_codes(p: int, n: int, k: int) -> tuple[FpCode, ...]:
    """Self-orthogonal [n, k] codes over F_p; doubly even ones when p = 2."""
    _check_prime(p)
    if k < 0 or 2 * k > n:
        raise DomainError(f"no self-orthogonal codes of length {n} and dimension {k}")
    return _self_orthogonal(p, n, k)


@lru_cache(maxsize=None)
def doubly_even_with_one(n: int, k: int) -> tuple[FpCode, ...]:
    if k < 0 or 2 * k > n:
        raise DomainError(f"no self-orthogonal codes of length {n} and dimension {k}")
    if n % 4:
        return ()
    return tuple(C for C in _self_orthogonal(2, n, k) if C.contains_all_ones())


def sigma_p(n: int, k: int, p: int) -> int:
    if p == 2:
        raise DomainError("sigma_p counts codes over odd primes; use sigma_de for p = 2")
    return len(self_orthogonal_fp_codes(p, n, k))


def sigma_de(n: int, k: int) -> int:
    return len(self_orthogonal_fp_codes(2, n, k))


def sigma_one(n: int, k: int) -> int:
    if k == 0:
        # only the empty word is "all ones" in length 0
        return 1 if n == 0 else 0
    return len(doubly_even_with_one(n, k))


def sigma(p: int, n: int, k: int) -> int:
    return sigma_de(n, k) if p == 2 else sigma_p(n, k, p)


def intermediate_codes(C1: FpCode, k2: int) -> list[FpCode]:
    """All C2 with C1 <= C2 <= C1^perp and dim C2 = dim C1 + k2."""
    if not C1.is_self_orthogonal():
        raise PreconditionFailed("intermediate codes need a self-orthogonal C1")
    p, n, k1 = C1.p, C1.n, C1.dim
    q = n - 2 * k1
    if k2 < 0 or k2 > q:
        raise DomainError(f"quotient C1^perp / C1 has dimension {q}, asked for {k2}")
    base = list(C1.basis.data)
    Q = np.array(extend_basis(base, list(codecore.dual_fp(C1).basis.data), p), dtype=np.int64).reshape(q, n)
    out = []
    for S in fp_codes(p, q, k2):
        pulled = (S.basis.data @ Q) % p
        out.append(FpCode.from_rows(p, n, [*(r.tolist() for r in base), *pulled.tolist()]))
    return out


# --- mass formulas ---------------------------------------------------------------------


def _feasible(n: int, k1: int, k2: int) -> bool:
    return k1 >= 0 and k2 >= 0 and 2 * k1 + k2 <= n


def mass_so(n: int, k1: int, k2: int, p: int) -> MassReport:
    _check_prime(p)
    if not _feasible(n, k1, k2):
        return MassReport(family=Family.SO, p=p, n=n, k1=k1, k2=k2, value=0, diagnostic="infeasible type: 2*k1 + k2 > n")
    value = sigma(p, n, k1) * gaussian(n - 2 * k1, k2, p) * lifting.lift_count(p, n, k1, k2)
    return MassReport(family=Family.SO, p=p, n=n, k1=k1, k2=k2, value=value)


def _summed(family: Family, p: int, n: int, terms: Sequence[MassReport]) -> MassReport:
    breakdown = [MassTerm(k1=t.k1, k2=t.k2, term=t.value) for t in terms]
    return MassReport(family=family, p=p, n=n, value=sum(t.term for t in breakdown), breakdown=breakdown)


def mass_self_dual(n: int, p: int) -> MassReport:
    terms = [mass_so(n, k1, n - 2 * k1, p) for k1 in range(n // 2 + 1)]
    return _summed(Family.SELF_DUAL, p, n, terms)


def mass_so_total(n: int, p: int) -> MassReport:
    """All self-orthogonal codes of length n, every type."""
    terms = [mass_so(n, k1, k2, p) for k1 in range(n // 2 + 1) for k2 in range(n - 2 * k1 + 1)]
    return _summed(Family.SO, p, n, terms)


def _check_even_length(n: int) -> None:
    if n % 8:
        raise DomainError(f"even codes with a +-1 codeword have length divisible by 8, got {n}")


def _even_mass(family: Family, n: int, k1: int, k2: int, lift: Callable[[int, int, int], int]) -> MassReport:
    _check_even_length(n)
    if not _feasible(n, k1, k2):
        return MassReport(family=family, p=2, n=n, k1=k1, k2=k2, value=0, diagnostic="infeasible type: 2*k1 + k2 > n")
    if k1 == 0:
        value = 1 if n == 0 and k2 == 0 else 0
        return MassReport(family=family, p=2, n=n, k1=k1, k2=k2, value=value, diagnostic="a residue code containing 1 has k1 >= 1")
    value = sigma_one(n, k1) * gaussian(n - 2 * k1, k2, 2) * lift(n, k1, k2)
    return MassReport(family=family, p=2, n=n, k1=k1, k2=k2, value=value)


def mass_even_one(n: int, k1: int, k2: int) -> MassReport:
    return _even_mass(Family.EVEN_ONE, n, k1, k2, lifting.even_one_count)


def mass_even_pm1(n: int, k1: int, k2: int) -> MassReport:
    return _even_mass(Family.EVEN_PM1, n, k1, k2, lifting.even_pm1_count)


def mass_type2(n: int, with_: str = "pm1") -> MassReport:
    if with_ not in ("one", "pm1"):
        raise DomainError(f"type II mass is taken with 'one' or 'pm1', got {with_!r}")
    _check_even_length(n)
    per_type = mass_even_one if with_ == "one" else mass_even_pm1
    family = Family.TYPE2_ONE if with_ == "one" else Family.TYPE2_PM1
    return _summed(family, 2, n, [per_type(n, k1, n - 2 * k1) for k1 in range(n // 2 + 1)])


def mass(family: Family, p: int, n: int, k1: Optional[int] = None, k2: Optional[int] = None) -> MassReport:
    """Dispatch used by the command line; omitted types sum over every type."""
    if family.quaternary_only and p != 2:
        raise DomainError(f"family {family.value} is only defined for p = 2")
    if family is Family.SELF_DUAL:
        return mass_self_dual(n, p)
    if family is Family.TYPE2_ONE:
        return mass_type2(n, "one")
    if family is Family.TYPE2_PM1:
        return mass_type2(n, "pm1")
    per_type = {
        Family.SO: lambda a, b: mass_so(n, a, b, p),
        Family.EVEN_ONE: lambda a, b: mass_even_one(n, a, b),
        Family.EVEN_PM1: lambda a, b: mass_even_pm1(n, a, b),
    }[family]
    if k1 is not None and k2 is not None:
        return per_type(k1, k2)
    if k1 is not None or k2 is not None:
        raise DomainError("give both k1 and k2, or neither")
    if family is Family.SO:
        return mass_so_total(n, p)
    _check_even_length(n)
    return _summed(family, 2, n, [per_type(a, b) for a in range(n // 2 + 1) for b in range(n - 2 * a + 1)])


# --- the independent oracle over Z_{p^2} --------------------------------------------------


def _family_test(family: Optional[Family]) -> Callable[[CodeZp2], bool]:
    if family is None:
        return lambda C: True
    if family is Family.SO:
        return codecore.is_self_orthogonal
    if family is Family.SELF_DUAL:
        return codecore.is_self_dual

    def has_one(C: CodeZp2) -> bool:
        return codecore.contains(C, [1] * C.n)

    def has_pm1(C: CodeZp2) -> bool:
        return any(True for _ in codecore.pm1_codewords(C))

    tests = {
        Family.EVEN_ONE: lambda C: codecore.is_even_by_scan(C) and has_one(C),
        Family.EVEN_PM1: lambda C: codecore.is_even_by_scan(C) and has_pm1(C),
        Family.TYPE2_ONE: lambda C: codecore.is_self_dual(C) and codecore.is_even_by_scan(C) and has_one(C),
        Family.TYPE2_PM1: lambda C: codecore.is_self_dual(C) and codecore.is_even_by_scan(C) and has_pm1(C),
    }
    return tests[family]


def _profiles(p: int, n: int) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    for k in range(n + 1):
        for piv in itertools.combinations(range(n), k):
            for vals in itertools.product((1, p), repeat=k):
                yield piv, vals


def _sweep_profile(unit: tuple[int, int, tuple[int, ...], tuple[int, ...], bool]) -> list[np.ndarray]:
    """Howell forms with the given pivot columns and pivot values, built bottom-up."""
    p, n, piv, vals, orthogonal = unit
    m = p * p
    ring = Modulus.ring(p)
    k = len(piv)
    pivset = set(piv)
    found: list[np.ndarray] = []

    def row_choices(i: int) -> Iterator[np.ndarray]:
        c, d = piv[i], vals[i]
        slots = []
        for j in range(c + 1, n):
            if j in pivset:
                slots.append((j, range(vals[piv.index(j)])))
            else:
                slots.append((j, range(m)))
        for entries in itertools.product(*(r for _, r in slots)):
            v = np.zeros(n, dtype=np.int64)
            v[c] = d
            for (j, _), e in zip(slots, entries):
                v[j] = e
            yield v

    def build(i: int, below: list[np.ndarray]) -> None:
        if i < 0:
            found.append(np.array(below, dtype=np.int64).reshape(k, n))
            return
        H = ResidueMatrix(ring, np.array(below, dtype=np.int64).reshape(len(below), n))
        for v in row_choices(i):
            if orthogonal and (int(v @ v) % m or any(int(v @ u) % m for u in below)):
                continue
            if vals[i] == p and not howell_contains(H, (p * v) % m):
                continue
            build(i - 1, [v, *below])

    build(k - 1, [])
    return found


def oracle_enumerate(
    p: int,
    n: int,
    family: Optional[Family] = None,
    k1: Optional[int] = None,
    k2: Optional[int] = None,
    *,
    workers: Optional[int] = None,
) -> list[CodeZp2]:
    """Every code over Z_{p^2} of length n in ``family`` (all codes for None), sorted by canonical form.

    Sweeps Howell normal forms directly: each profile of pivot columns and pivot values
    is filled bottom-up, keeping a row led by p only when p times it lies in the span of
    the rows below.
    """
    _check_prime(p)
    if family is not None and family.quaternary_only and p != 2:
        raise DomainError(f"family {family.value} is only defined for p = 2")
    space = p ** (2 * n)
    if space > settings.oracle_max_space:
        raise BudgetExceeded("oracle sweep over Z_{p^2}^n", space, settings.oracle_max_space)
    started = time.monotonic()
    units = [(p, n, piv, vals, family is not None) for piv, vals in _profiles(p, n)]
    test = _family_test(family)
    ring = Modulus.ring(p)
    codes = []
    for part in pmap(_sweep_profile, units, workers or settings.workers):
        for H in part:
            C = codecore.from_howell(p, n, ResidueMatrix(ring, H))
            if k1 is not None and C.k1 != k1:
                continue
            if k2 is not None and C.k2 != k2:
                continue
            if test(C):
                codes.append(C)
    codes.sort(key=lambda C: C.key())
    jlog(
        "info",
        "oracle_sweep_done",
        p=p,
        n=n,
        family=family.value if family else "all",
        count=len(codes),
        seconds=round(time.monotonic() - started, 3),
    )
    return codes


# --- constructive enumeration through the lifts ------------------------------------------


def family_types(family: Family, n: int, k1: Optional[int] = None, k2: Optional[int] = None) -> list[tuple[int, int]]:
    if family in (Family.SELF_DUAL, Family.TYPE2_ONE, Family.TYPE2_PM1):
        lo = 1 if family.quaternary_only and n else 0
        types = [(a, n - 2 * a) for a in range(lo, n // 2 + 1)]
    else:
        lo = 1 if family.quaternary_only else 0
        types = [(a, b) for a in range(lo, n // 2 + 1) for b in range(n - 2 * a + 1)]
    if k1 is not None:
        types = [t for t in types if t[0] == k1]
    if k2 is not None:
        types = [t for t in types if t[1] == k2]
    return types


def _residue_codes(family: Family, p: int, n: int, k1: int) -> tuple[FpCode, ...]:
    if family.quaternary_only:
        return doubly_even_with_one(n, k1)
    return self_orthogonal_fp_codes(p, n, k1)


def _check_family(family: Family, p: int, n: int) -> None:
    _check_prime(p)
    if family.quaternary_only:
        if p != 2:
            raise DomainError(f"family {family.value} is only defined for p = 2")
        _check_even_length(n)


def chains(family: Family, p: int, n: int, k1: Optional[int] = None, k2: Optional[int] = None) -> Iterator[tuple[FpCode, FpCode]]:
    """Every admissible (residue, torsion) pair for the family."""
    _check_family(family, p, n)
    for a, b in family_types(family, n, k1, k2):
        for C1 in _residue_codes(family, p, n, a):
            for C2 in intermediate_codes(C1, b):
                yield C1, C2


def constructive_count(family: Family, p: int, n: int, k1: Optional[int] = None, k2: Optional[int] = None) -> int:
    """Family size summed over explicit chains, each term from a solved lift system."""
    total = 0
    for C1, C2 in chains(family, p, n, k1, k2):
        if family.quaternary_only:
            size = lifting.even_lift_solutions(C1, C2).count
            if family in (Family.EVEN_PM1, Family.TYPE2_PM1):
                size *= 2 ** (n - C2.dim)
        else:
            size = lifting.so_lift_solutions(C1, C2).count
        total += size
    return total


def constructive_enumerate(
    family: Family,
    p: int,
    n: int,
    k1: Optional[int] = None,
    k2: Optional[int] = None,
    *,
    workers: Optional[int] = None,
) -> list[CodeZp2]:
    _check_family(family, p, n)
    estimate = mass(family, p, n, k1, k2).value if (k1 is None) == (k2 is None) else constructive_count(family, p, n, k1, k2)
    if estimate > settings.family_limit:
        raise BudgetExceeded(f"{family.value} family of length {n}", estimate, settings.family_limit)
    enumerator = {
        Family.SO: lifting.so_lifts,
        Family.SELF_DUAL: lifting.so_lifts,
        Family.EVEN_ONE: lifting.even_lifts_with_one,
        Family.TYPE2_ONE: lifting.even_lifts_with_one,
        Family.EVEN_PM1: lifting.even_lifts_with_pm1,
        Family.TYPE2_PM1: lifting.even_lifts_with_pm1,
    }[family]
    started = time.monotonic()
    codes = [C for C1, C2 in chains(family, p, n, k1, k2) for C in enumerator(C1, C2, workers=workers)]
    jlog(
        "info",
        "lift_enumeration_done",
        family=family.value,
        p=p,
        n=n,
        count=len(codes),
        seconds=round(time.monotonic() - started, 3),
    )
    return codes
