"""Codes over F_p and Z_{p^2}.

A :class:`CodeZp2` is stored through the Howell form of its generators, so equality,
hashing and dedupe of codes are equality of canonical matrices. A :class:`FpCode` is
stored through its reduced row-echelon basis.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .config import settings
from .errors import BudgetExceeded, DomainError, InternalConsistencyError, ShapeError
from .ringmat import (
    Modulus,
    ResidueMatrix,
    howell_contains,
    howell_form,
    howell_pivots,
    kernel_fp,
    kernel_zp2,
    left_kernel_fp,
    rref_fp,
    solve_affine_fp,
)

EUCLIDEAN_WEIGHT = (0, 1, 4, 1)


@dataclass(frozen=True)
class FpCode:
    p: int
    n: int
    basis: ResidueMatrix

    @classmethod
    def from_rows(cls, p: int, n: int, rows: Iterable[Sequence[int]]) -> FpCode:
        M = ResidueMatrix.from_rows(Modulus.field(p), rows, cols=n)
        return cls(p, n, rref_fp(M).matrix)

    @classmethod
    def zero(cls, p: int, n: int) -> FpCode:
        return cls(p, n, ResidueMatrix.zeros(Modulus.field(p), 0, n))

    @property
    def dim(self) -> int:
        return self.basis.rows

    @property
    def size(self) -> int:
        return self.p**self.dim

    @property
    def pivots(self) -> list[int]:
        return howell_pivots(self.basis)

    def key(self) -> tuple:
        return self.basis.key()

    def contains(self, v: Sequence[int]) -> bool:
        w = np.array(v, dtype=np.int64) % self.p
        if w.shape != (self.n,):
            raise ShapeError(f"vector of length {w.shape[0]} against a code of length {self.n}")
        for i, c in enumerate(self.pivots):
            if w[c]:
                w = (w - w[c] * self.basis.data[i]) % self.p
        return not w.any()

    def issubset(self, other: FpCode) -> bool:
        return all(other.contains(row) for row in self.basis.data)

    def is_self_orthogonal(self) -> bool:
        return not (self.basis @ self.basis.T).data.any()

    def is_doubly_even(self) -> bool:
        if self.p != 2:
            return False
        # generators of weight 0 mod 4 that are pairwise orthogonal span a doubly even code
        return self.is_self_orthogonal() and all(int(r.sum()) % 4 == 0 for r in self.basis.data)

    def contains_all_ones(self) -> bool:
        return self.contains([1] * self.n)

    def codewords(self) -> np.ndarray:
        if self.size > settings.codeword_limit:
            raise BudgetExceeded("codeword table", self.size, settings.codeword_limit)
        coeffs = np.array(list(itertools.product(range(self.p), repeat=self.dim)), dtype=np.int64)
        return (coeffs.reshape(self.size, self.dim) @ self.basis.data) % self.p


@dataclass(frozen=True)
class CodeZp2:
    p: int
    n: int
    gens: ResidueMatrix
    k1: int
    k2: int

    @property
    def type(self) -> tuple[int, int]:
        return self.k1, self.k2

    @property
    def size(self) -> int:
        return self.p ** (2 * self.k1 + self.k2)

    def key(self) -> tuple:
        return self.gens.key()

    def __repr__(self) -> str:
        return f"CodeZp2(p={self.p}, n={self.n}, type={{{self.k1},{self.k2}}}, gens={self.gens.tolist()})"


def from_howell(p: int, n: int, H: ResidueMatrix) -> CodeZp2:
    log_size = sum(2 if int(H.data[i, c]) == 1 else 1 for i, c in enumerate(howell_pivots(H)))
    k1 = rref_fp(H.reduce_to(Modulus.field(p))).rank
    k2 = log_size - 2 * k1
    if k2 < 0:
        raise InternalConsistencyError(f"negative torsion rank for {H.tolist()}")
    return CodeZp2(p, n, H, k1, k2)


def from_generators(p: int, n: int, rows: Iterable[Sequence[int]]) -> CodeZp2:
    M = ResidueMatrix.from_rows(Modulus.ring(p), rows, cols=n)
    return from_howell(p, n, howell_form(M))


def from_matrix(M: ResidueMatrix) -> CodeZp2:
    return from_howell(M.modulus.p, M.cols, howell_form(M))


def zero_code(p: int, n: int) -> CodeZp2:
    return from_generators(p, n, [])


def cardinality(C: CodeZp2) -> int:
    return C.size


def residue(C: CodeZp2) -> FpCode:
    return FpCode(C.p, C.n, rref_fp(C.gens.reduce_to(Modulus.field(C.p))).matrix)


def torsion(C: CodeZp2) -> FpCode:
    p, m = C.p, C.p * C.p
    G = C.gens.data
    Gbar = C.gens.reduce_to(Modulus.field(p))
    # combinations of the generators that vanish mod p are p times a torsion vector
    extra = [((a @ G) % m) // p for a in left_kernel_fp(Gbar).data]
    T = FpCode.from_rows(p, C.n, [*Gbar.data.tolist(), *(v.tolist() for v in extra)])
    if T.dim != C.k1 + C.k2:
        raise InternalConsistencyError(f"torsion dimension {T.dim} differs from k1 + k2 = {C.k1 + C.k2}")
    return T


def dual(C: CodeZp2) -> CodeZp2:
    return from_matrix(kernel_zp2(C.gens))


def dual_fp(C: FpCode) -> FpCode:
    return FpCode(C.p, C.n, rref_fp(kernel_fp(C.basis)).matrix)


def contains(C: CodeZp2, v: Sequence[int]) -> bool:
    return howell_contains(C.gens, v)


def is_self_orthogonal(C: CodeZp2) -> bool:
    return not (C.gens @ C.gens.T).data.any()


def is_self_dual(C: CodeZp2) -> bool:
    return C.size == C.p**C.n and is_self_orthogonal(C)


def is_free(C: CodeZp2) -> bool:
    return C.k2 == 0


def euclidean_weight(v: Sequence[int]) -> int:
    return sum(EUCLIDEAN_WEIGHT[int(x) % 4] for x in v)


def _euclidean_weights(words: np.ndarray) -> np.ndarray:
    return np.take(np.array(EUCLIDEAN_WEIGHT, dtype=np.int64), words % 4).sum(axis=1)


def _require_quaternary(C: CodeZp2, what: str) -> None:
    if C.p != 2:
        raise DomainError(f"{what} is defined for codes over Z_4, got p = {C.p}")


def is_even(C: CodeZp2, *, cross_check: bool = False) -> bool:
    _require_quaternary(C, "evenness")
    verdict = is_self_orthogonal(C) and all(euclidean_weight(r) % 8 == 0 for r in C.gens.data)
    if cross_check and C.size <= settings.fingerprint_limit and verdict != is_even_by_scan(C):
        raise InternalConsistencyError(f"generator criterion disagrees with the codeword scan on {C!r}")
    return verdict


def is_even_by_scan(C: CodeZp2) -> bool:
    _require_quaternary(C, "evenness")
    return bool((_euclidean_weights(codewords(C)) % 8 == 0).all())


def euclidean_weight_distribution(C: CodeZp2) -> Counter:
    """Euclidean weight -> number of codewords of that weight."""
    _require_quaternary(C, "Euclidean weight")
    return Counter(_euclidean_weights(codewords(C)).tolist())


def contains_pm1(C: CodeZp2) -> tuple[int, ...] | None:
    """Some codeword with every coordinate equal to 1 or 3, if there is one.

    A codeword lies in {1, 3}^n exactly when it reduces to the all-ones vector mod 2,
    so it suffices to lift one preimage of 1 under the residue map.
    """
    _require_quaternary(C, "{1, 3}^n membership")
    if C.gens.rows == 0:
        return None
    Gbar = C.gens.reduce_to(Modulus.field(2))
    sol = solve_affine_fp(Gbar.T, [1] * C.n)
    if sol is None:
        return None
    z = (sol.particular @ C.gens.data) % 4
    if C.n % 8 and is_even(C):
        raise InternalConsistencyError(f"even code of length {C.n} contains a {{1,3}} vector")
    return tuple(int(x) for x in z)


def pm1_codewords(C: CodeZp2) -> np.ndarray:
    _require_quaternary(C, "{1, 3}^n membership")
    words = codewords(C)
    return words[(words % 2 == 1).all(axis=1)]


def codewords(C: CodeZp2) -> np.ndarray:
    """All codewords, lexicographic in the coefficients of the canonical generators."""
    if C.size > settings.codeword_limit:
        raise BudgetExceeded("codeword table", C.size, settings.codeword_limit)
    m = C.p * C.p
    ranges = [range(m // int(C.gens.data[i, c])) for i, c in enumerate(howell_pivots(C.gens))]
    coeffs = np.array(list(itertools.product(*ranges)), dtype=np.int64).reshape(C.size, C.gens.rows)
    return (coeffs @ C.gens.data) % m


def transform(C: CodeZp2, perm: Sequence[int], signs: Sequence[int]) -> CodeZp2:
    """Image of C under coordinate i -> perm[i] followed by the sign at each target."""
    G = C.gens.data
    out = np.zeros_like(G)
    out[:, list(perm)] = G
    out = out * np.array(signs, dtype=np.int64)
    return from_matrix(ResidueMatrix(C.gens.modulus, out))


def residue_torsion_chain(C: CodeZp2) -> bool:
    """Residue doubly even and residue <= torsion <= residue^perp (self-orthogonal Z_4 codes)."""
    _require_quaternary(C, "the residue/torsion chain")
    res, tor = residue(C), torsion(C)
    return res.is_doubly_even() and res.issubset(tor) and tor.issubset(dual_fp(res))


def format_matrix(C: CodeZp2 | FpCode) -> str:
    rows = C.gens.tolist() if isinstance(C, CodeZp2) else C.basis.tolist()
    lines = [f"{C.p} {C.n}", *(" ".join(str(x) for x in r) for r in rows)]
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> tuple[int, int, list[list[int]]]:
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or len(lines[0]) != 2:
        raise ShapeError("first line of a matrix file must be `p n`")
    p, n = int(lines[0][0]), int(lines[0][1])
    rows = [[int(x) for x in ln] for ln in lines[1:]]
    for r in rows:
        if len(r) != n:
            raise ShapeError(f"row of length {len(r)} in a matrix file declaring n = {n}")
    return p, n, rows


def read_code(text: str) -> CodeZp2:
    p, n, rows = parse_matrix(text)
    return from_generators(p, n, rows)


def read_fp_code(text: str) -> FpCode:
    p, n, rows = parse_matrix(text)
    return FpCode.from_rows(p, n, rows)


def iter_codewords(C: CodeZp2) -> Iterator[tuple[int, ...]]:
    for row in codewords(C):
        yield tuple(int(x) for x in row)
