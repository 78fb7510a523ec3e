"""The signed monomial group, automorphism orders and mass-certified classification.

A :class:`SignedMonomial` moves coordinate i to ``perm[i]`` and then multiplies
coordinate j by ``signs[j]``. Automorphism groups are measured with a stabilizer chain
on the 2n signed coordinates +-e_i; each orbit point is certified by one explicit
automorphism found by backtracking over column images, pruned by comparing punctured
codes and per-column fingerprints.
"""

from __future__ import annotations

import math
import random
import time
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from . import census, codecore
from .codecore import CodeZp2
from .config import settings
from .errors import BudgetExceeded, InternalConsistencyError, ShapeError
from .jlog import jlog
from .ringmat import ResidueMatrix, howell_form
from .schemas import ClassificationReport, Family, RepresentativeOut


@dataclass(frozen=True)
class SignedMonomial:
    perm: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.perm))):
            raise ShapeError(f"{self.perm} is not a permutation")
        if len(self.signs) != len(self.perm) or any(s not in (1, -1) for s in self.signs):
            raise ShapeError("signs must be +1 or -1, one per coordinate")

    @property
    def n(self) -> int:
        return len(self.perm)

    @classmethod
    def identity(cls, n: int) -> SignedMonomial:
        return cls(tuple(range(n)), (1,) * n)

    @classmethod
    def permutation(cls, perm: Sequence[int]) -> SignedMonomial:
        return cls(tuple(perm), (1,) * len(perm))

    @classmethod
    def random(cls, n: int, rng: random.Random, *, signed: bool = True) -> SignedMonomial:
        perm = list(range(n))
        rng.shuffle(perm)
        signs = tuple(rng.choice((1, -1)) for _ in range(n)) if signed else (1,) * n
        return cls(tuple(perm), signs)

    @staticmethod
    def group_order(n: int, *, signed: bool = True) -> int:
        return (2**n if signed else 1) * math.factorial(n)

    def compose(self, other: SignedMonomial) -> SignedMonomial:
        """self * other: apply ``other`` first."""
        if self.n != other.n:
            raise ShapeError("composing monomials of different lengths")
        inv = self.inverse_perm()
        perm = tuple(self.perm[other.perm[i]] for i in range(self.n))
        signs = tuple(self.signs[j] * other.signs[inv[j]] for j in range(self.n))
        return SignedMonomial(perm, signs)

    __mul__ = compose

    def inverse_perm(self) -> list[int]:
        inv = [0] * self.n
        for i, j in enumerate(self.perm):
            inv[j] = i
        return inv

    def inverse(self) -> SignedMonomial:
        return SignedMonomial(tuple(self.inverse_perm()), tuple(self.signs[self.perm[i]] for i in range(self.n)))

    def act_vector(self, v: Sequence[int], m: int) -> tuple[int, ...]:
        out = [0] * self.n
        for i, x in enumerate(v):
            j = self.perm[i]
            out[j] = (self.signs[j] * int(x)) % m
        return tuple(out)

    def act_point(self, point: tuple[int, int]) -> tuple[int, int]:
        j = self.perm[point[0]]
        return j, point[1] * self.signs[j]


def apply(g: SignedMonomial, C: CodeZp2) -> CodeZp2:
    if g.n != C.n:
        raise ShapeError(f"monomial of length {g.n} applied to a code of length {C.n}")
    return codecore.transform(C, g.perm, g.signs)


def generators(n: int, *, signed: bool = True) -> list[SignedMonomial]:
    """A transposition, an n-cycle and (signed) one sign change generate the group."""
    gens = []
    if n >= 2:
        gens.append(SignedMonomial.permutation([1, 0, *range(2, n)]))
        gens.append(SignedMonomial.permutation([*range(1, n), 0]))
    if signed and n >= 1:
        gens.append(SignedMonomial(tuple(range(n)), (-1,) + (1,) * (n - 1)))
    return gens


def orbit(C: CodeZp2, *, signed: bool = True) -> list[CodeZp2]:
    """The orbit of C, breadth first over :func:`generators`."""
    seen = {C.key(): C}
    queue = deque([C])
    gens = generators(C.n, signed=signed)
    while queue:
        D = queue.popleft()
        for g in gens:
            E = apply(g, D)
            if E.key() not in seen:
                seen[E.key()] = E
                queue.append(E)
    return [seen[k] for k in sorted(seen)]


# --- backtracking ---------------------------------------------------------------------


def _check_budget(n: int, signed: bool) -> None:
    if n > settings.aut_max_n:
        limit = SignedMonomial.group_order(settings.aut_max_n, signed=signed)
        raise BudgetExceeded("signed monomial group search", SignedMonomial.group_order(n, signed=signed), limit)


def fingerprints(C: CodeZp2, *, signed: bool = True) -> list[tuple]:
    """Per column: multiset of (value class at the column, value-class profile of the word).

    Values v and -v form one class when signs are allowed. Codes larger than the
    configured limit get a constant fingerprint.
    """
    if C.size > settings.fingerprint_limit:
        return [()] * C.n
    m = C.p * C.p
    words = codecore.codewords(C)
    cls = np.minimum(words, (-words) % m) if signed else words
    classes = sorted(set(int(x) for x in np.unique(cls))) or [0]
    profile = np.stack([(cls == u).sum(axis=1) for u in classes], axis=1)
    out = []
    for i in range(C.n):
        rows = np.hstack([cls[:, i : i + 1], profile])
        uniq, counts = np.unique(rows, axis=0, return_counts=True)
        out.append(tuple(zip(map(tuple, uniq.tolist()), counts.tolist())))
    return out


class _Matcher:
    """Backtracking search for g with apply(g, C) = D."""

    def __init__(self, C: CodeZp2, D: CodeZp2, signed: bool, fpC: list[tuple], fpD: list[tuple]):
        self.C, self.D = C, D
        self.signed = signed
        self.fpC, self.fpD = fpC, fpD
        self.n = C.n
        self._prefix_keys: dict[int, tuple] = {}

    def _prefix(self, t: int) -> tuple:
        if t not in self._prefix_keys:
            self._prefix_keys[t] = howell_form(self.C.gens.select_columns(range(t))).key()
        return self._prefix_keys[t]

    def _consistent(self, images: Sequence[tuple[int, int]]) -> bool:
        # the punctured code on the first t coordinates must map onto D punctured on their images
        t = len(images)
        cols = [j for j, _ in images]
        signs = np.array([s for _, s in images], dtype=np.int64)
        Dt = self.D.gens.data[:, cols] * signs
        return howell_form(ResidueMatrix(self.D.gens.modulus, Dt.reshape(self.D.gens.rows, t))).key() == self._prefix(t)

    def search(self, fixed: Sequence[tuple[int, int]] = ()) -> Optional[SignedMonomial]:
        images = list(fixed)
        for i, (j, _) in enumerate(images):
            if self.fpC[i] != self.fpD[j]:
                return None
        if images and not self._consistent(images):
            return None
        used = {j for j, _ in images}
        found = self._extend(images, used)
        if found is None:
            return None
        perm = tuple(j for j, _ in found)
        signs = [1] * self.n
        for j, s in found:
            signs[j] = s
        g = SignedMonomial(perm, tuple(signs))
        if apply(g, self.C).key() != self.D.key():
            raise InternalConsistencyError("backtracking accepted a map that does not carry C onto D")
        return g

    def _extend(self, images: list[tuple[int, int]], used: set[int]) -> Optional[list[tuple[int, int]]]:
        t = len(images)
        if t == self.n:
            return list(images)
        for j in range(self.n):
            if j in used or self.fpD[j] != self.fpC[t]:
                continue
            for s in (1, -1) if self.signed else (1,):
                images.append((j, s))
                if self._consistent(images):
                    used.add(j)
                    found = self._extend(images, used)
                    if found is not None:
                        return found
                    used.discard(j)
                images.pop()
        return None


def _closure(start: tuple[int, int], gens: Iterable[SignedMonomial]) -> set[tuple[int, int]]:
    gens = list(gens)
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for g in gens:
            y = g.act_point(x)
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


def aut_order(C: CodeZp2, *, signed: bool = True) -> int:
    """|Aut C| inside the signed monomial group (permutations only when ``signed`` is False)."""
    n = C.n
    _check_budget(n, signed)
    fp = fingerprints(C, signed=signed)
    matcher = _Matcher(C, C, signed, fp, fp)
    witnesses: list[SignedMonomial] = []
    order = 1
    # deepest base point first, so every witness found so far fixes the current prefix
    for k in reversed(range(n)):
        prefix = [(i, 1) for i in range(k)]
        orb = _closure((k, 1), witnesses)
        for j in range(k, n):
            if fp[j] != fp[k]:
                continue
            for s in (1, -1) if signed else (1,):
                if (j, s) in orb:
                    continue
                w = matcher.search(prefix + [(j, s)])
                if w is not None:
                    witnesses.append(w)
                    orb = _closure((k, 1), witnesses)
        order *= len(orb)
    group = SignedMonomial.group_order(n, signed=signed)
    if group % order:
        raise InternalConsistencyError(f"automorphism order {order} does not divide {group}")
    return order


def are_equivalent(C: CodeZp2, D: CodeZp2, *, signed: bool = True) -> Optional[SignedMonomial]:
    if (C.p, C.n) != (D.p, D.n):
        raise ShapeError(f"comparing codes with (p, n) = {(C.p, C.n)} and {(D.p, D.n)}")
    _check_budget(C.n, signed)
    if C.type != D.type:
        return None
    fpC, fpD = fingerprints(C, signed=signed), fingerprints(D, signed=signed)
    if sorted(fpC) != sorted(fpD):
        return None
    return _Matcher(C, D, signed, fpC, fpD).search()


# --- classification -------------------------------------------------------------------


class UnionFind:
    def __init__(self, X: Iterable):
        self.parent = {x: x for x in X}
        self.rank = {x: 0 for x in self.parent}
        self.size = {x: 1 for x in self.parent}

    def find(self, x):
        y = self.parent[x]
        if self.parent[y] != y:
            y = self.parent[x] = self.find(y)
        return y

    def union(self, x, y) -> None:
        x, y = self.find(x), self.find(y)
        if x == y:
            return
        if self.rank[x] < self.rank[y]:
            x, y = y, x
        elif self.rank[x] == self.rank[y]:
            self.rank[x] += 1
        self.parent[y] = x
        self.size[x] += self.size[y]
        del self.rank[y]

    def reps(self) -> set:
        return set(self.rank)


@dataclass
class ClassificationResult:
    family: Family
    p: int
    n: int
    k1: Optional[int]
    k2: Optional[int]
    signed: bool
    representatives: list[CodeZp2] = field(default_factory=list)
    aut_orders: list[int] = field(default_factory=list)
    orbit_sizes: list[int] = field(default_factory=list)
    mass_sum: Fraction = Fraction(0)
    expected_mass: int = 0
    certified: bool = False

    @property
    def group_order(self) -> int:
        return SignedMonomial.group_order(self.n, signed=self.signed)

    def to_schema(self) -> ClassificationReport:
        return ClassificationReport(
            family=self.family,
            p=self.p,
            n=self.n,
            type={"k1": self.k1, "k2": self.k2} if self.k1 is not None and self.k2 is not None else None,
            representatives=[
                RepresentativeOut(rows=C.gens.tolist(), k1=C.k1, k2=C.k2, aut_order=a, orbit_size=o)
                for C, a, o in zip(self.representatives, self.aut_orders, self.orbit_sizes)
            ],
            mass_sum=str(self.mass_sum),
            expected_mass=self.expected_mass,
            certified=self.certified,
        )


def expected_mass(family: Family, p: int, n: int, k1: Optional[int] = None, k2: Optional[int] = None) -> int:
    if (k1, k2) == (None, None):
        return census.mass(family, p, n).value
    if family in (Family.SO, Family.SELF_DUAL):
        term = lambda a, b: census.mass_so(n, a, b, p)  # noqa: E731
    elif family in (Family.EVEN_ONE, Family.TYPE2_ONE):
        term = lambda a, b: census.mass_even_one(n, a, b)  # noqa: E731
    else:
        term = lambda a, b: census.mass_even_pm1(n, a, b)  # noqa: E731
    return sum(term(a, b).value for a, b in census.family_types(family, n, k1, k2))


def classify(
    p: int,
    n: int,
    family: Family,
    k1: Optional[int] = None,
    k2: Optional[int] = None,
    *,
    oracle: bool = False,
    workers: Optional[int] = None,
) -> ClassificationResult:
    """Split a family into equivalence classes and certify the split with the mass formula.

    Families of codes containing the all-ones vector are only closed under permutations
    (the signed monomials fixing 1), so they are classified under S_n.
    """
    started = time.monotonic()
    signed = family not in (Family.EVEN_ONE, Family.TYPE2_ONE)
    _check_budget(n, signed)
    if oracle:
        members = census.oracle_enumerate(p, n, family, k1, k2, workers=workers)
    else:
        members = census.constructive_enumerate(family, p, n, k1, k2, workers=workers)
    if len(members) > settings.family_limit:
        raise BudgetExceeded(f"{family.value} family of length {n}", len(members), settings.family_limit)
    by_key = {C.key(): C for C in members}
    if len(by_key) != len(members):
        raise InternalConsistencyError("family enumeration produced duplicates")

    uf = UnionFind(by_key)
    for g in generators(n, signed=signed):
        for key, C in by_key.items():
            image = apply(g, C).key()
            if image not in by_key:
                raise InternalConsistencyError(f"family {family.value} is not closed under the group: {C!r}")
            uf.union(key, image)
    classes: dict = {}
    for key in by_key:
        classes.setdefault(uf.find(key), []).append(key)

    result = ClassificationResult(family, p, n, k1, k2, signed)
    group = result.group_order
    for root, keys in sorted(classes.items(), key=lambda kv: min(kv[1])):
        rep = by_key[min(keys)]
        orbit = uf.size[root]
        aut = aut_order(rep, signed=signed)
        if aut * orbit != group:
            raise InternalConsistencyError(f"orbit of size {orbit} and |Aut| = {aut} for {rep!r} do not multiply to {group}")
        result.representatives.append(rep)
        result.aut_orders.append(aut)
        result.orbit_sizes.append(orbit)
    result.mass_sum = sum((Fraction(group, a) for a in result.aut_orders), Fraction(0))
    if result.mass_sum.denominator != 1:
        raise InternalConsistencyError(f"mass sum {result.mass_sum} is not an integer")
    result.expected_mass = expected_mass(family, p, n, k1, k2)
    result.certified = result.mass_sum == result.expected_mass
    jlog(
        "info" if result.certified else "warning",
        "classification_done",
        family=family.value,
        p=p,
        n=n,
        classes=len(result.representatives),
        mass_sum=str(result.mass_sum),
        expected_mass=str(result.expected_mass),
        certified=result.certified,
        seconds=round(time.monotonic() - started, 3),
    )
    return result
