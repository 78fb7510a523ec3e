"""Lifts of binary / p-ary codes to self-orthogonal and even codes over Z_{p^2}.

Every self-orthogonal code C over Z_{p^2} with residue C1 and torsion C2 has, after
a column permutation bringing C1 and C2 to standard form, a generator matrix

    [ I  A + pN ]
    [ 0  pB     ]

where [I A] generates C1, [0 B] completes it to C2 and N is a k1 x (n - k1) matrix
over F_p. Self-orthogonality is the linear condition

    A N^t + N A^t = -(I + A A^t) / p   (mod p)

and two solutions give the same code exactly when they differ by M B for some M.
For quaternary even codes containing the all-ones vector the first row of C1 is the
all-ones vector and the condition becomes (Phi_A + alpha)(N) = (target, 0).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Sequence

import numpy as np

from . import codecore
from .codecore import CodeZp2, FpCode
from .config import settings
from .errors import DomainError, InternalConsistencyError, PreconditionFailed, ShapeError
from .jlog import jlog
from .parallel import blocks, pmap
from .ringmat import Modulus, ResidueMatrix, extend_basis, howell_form, howell_pivots, rank_fp, rref_fp, solve_affine_fp

# smaller solution sets are built in-process
PARALLEL_MIN_CODES = 512


# --- the matrix maps ---------------------------------------------------------------


def _check_pair(A: ResidueMatrix, N: ResidueMatrix) -> int:
    if A.shape != N.shape:
        raise ShapeError(f"A is {A.shape} but N is {N.shape}")
    if not A.modulus.is_field or A.modulus != N.modulus:
        raise DomainError("the lift maps act on matrices over F_p")
    return A.modulus.p


def psi_map(A: ResidueMatrix, N: ResidueMatrix) -> ResidueMatrix:
    _check_pair(A, N)
    return A @ N.T + N @ A.T


def phi_map(A: ResidueMatrix, N: ResidueMatrix) -> ResidueMatrix:
    if _check_pair(A, N) != 2:
        raise DomainError("phi_map is defined over F_2")
    X = A @ N.T
    return X + X.T + ResidueMatrix(A.modulus, np.diag(np.diag(X.data)))


def alpha_map(N: ResidueMatrix) -> np.ndarray:
    if N.modulus.m != 2:
        raise DomainError("alpha_map is defined over F_2")
    return N.data.sum(axis=1) % 2


class MapKind(str, Enum):
    PSI = "psi"
    PHI = "phi"
    PHI_ALPHA = "phi+alpha"


def _upper(S: np.ndarray) -> np.ndarray:
    return S[np.triu_indices(S.shape[0])]


def _image_vector(A: ResidueMatrix, N: ResidueMatrix, kind: MapKind) -> np.ndarray:
    if kind is MapKind.PSI:
        return _upper(psi_map(A, N).data)
    head = _upper(phi_map(A, N).data)
    if kind is MapKind.PHI:
        return head
    return np.concatenate([head, alpha_map(N)])


def coefficient_matrix(A: ResidueMatrix, kind: MapKind) -> ResidueMatrix:
    """The map N -> image as a matrix acting on N flattened row-major.

    Rows are the upper-triangular entries (i <= j) of the symmetric image, followed by
    the coordinates of alpha for ``PHI_ALPHA``.
    """
    m, c = A.shape
    cols = []
    for t in range(m * c):
        E = np.zeros(m * c, dtype=np.int64)
        E[t] = 1
        cols.append(_image_vector(A, ResidueMatrix(A.modulus, E.reshape(m, c)), kind))
    height = m * (m + 1) // 2 + (m if kind is MapKind.PHI_ALPHA else 0)
    data = np.array(cols, dtype=np.int64).T.reshape(height, m * c)
    return ResidueMatrix(A.modulus, data)


@dataclass(frozen=True)
class ImageCheck:
    kind: MapKind
    p: int
    m: int
    n: int
    image_size: int
    kernel_size: int
    expected_image: int

    @property
    def matches(self) -> bool:
        return self.image_size == self.expected_image


def expected_image_size(kind: MapKind, p: int, m: int) -> int:
    sym = p ** (m * (m + 1) // 2)
    if kind is MapKind.PSI:
        return sym if p != 2 else 2 ** (m * (m - 1) // 2)
    if kind is MapKind.PHI:
        return sym
    return sym * 2**m


def image_check(A: ResidueMatrix, kind: MapKind) -> ImageCheck:
    """Image and kernel sizes of a lift map, checked against Sym_m / Alt_m."""
    if not A.modulus.is_field:
        raise DomainError("image_check works over F_p")
    p = A.modulus.p
    m, c = A.shape
    if rank_fp(A) != m:
        raise PreconditionFailed(f"A has rank {rank_fp(A)}, expected full row rank {m}")
    if kind is not MapKind.PSI and p != 2:
        raise PreconditionFailed(f"{kind.value} is only defined for p = 2")
    if kind is MapKind.PHI_ALPHA and m and solve_affine_fp(A.T, [1] * c) is not None:
        raise PreconditionFailed("the all-ones vector lies in the row space of A")
    r = rank_fp(coefficient_matrix(A, kind))
    check = ImageCheck(kind, p, m, c, p**r, p ** (m * c - r), expected_image_size(kind, p, m))
    if not check.matches:
        raise InternalConsistencyError(f"{kind.value} image has size {check.image_size}, expected {check.expected_image}")
    return check


# --- closed-form counts ---------------------------------------------------------------


def _check_type(n: int, k1: int, k2: int) -> None:
    if k1 < 0 or k2 < 0 or 2 * k1 + k2 > n:
        raise DomainError(f"no chain C1 <= C2 <= C1^perp of dimensions {k1}, {k1 + k2} in length {n}")


def lift_count(p: int, n: int, k1: int, k2: int = 0) -> int:
    _check_type(n, k1, k2)
    shift = 1 if p == 2 else -1
    return p ** (k1 * (2 * n - 3 * k1 + shift - 2 * k2) // 2)


def free_lift_count(p: int, n: int, k1: int) -> int:
    return lift_count(p, n, k1, 0)


def even_one_count(n: int, k1: int, k2: int = 0) -> int:
    _check_type(n, k1, k2)
    if k1 < 1:
        raise DomainError("a code containing the all-ones vector has k1 >= 1")
    return 2 ** ((k1 - 1) * (2 * n - 3 * k1 - 2 - 2 * k2) // 2)


def even_pm1_count(n: int, k1: int, k2: int = 0) -> int:
    return 2 ** (n - k1 - k2) * even_one_count(n, k1, k2)


# --- standard frames ------------------------------------------------------------------


@dataclass(frozen=True)
class StandardFrame:
    """Column permutation and the blocks A, B of the standard generator matrices.

    Column j of the permuted code is column ``perm[j]`` of the original one. With
    ``with_one`` the first row of C1 is the all-ones vector and ``A`` holds the
    remaining k1 - 1 rows.
    """

    p: int
    n: int
    k1: int
    k2: int
    perm: tuple[int, ...]
    A: ResidueMatrix
    B: ResidueMatrix
    with_one: bool = False

    @property
    def ring(self) -> Modulus:
        return Modulus.ring(self.p)

    def unpermute(self, rows: np.ndarray) -> np.ndarray:
        out = np.zeros_like(rows)
        out[:, list(self.perm)] = rows
        return out

    def free_rows(self, N: ResidueMatrix | np.ndarray) -> np.ndarray:
        """Rows [I | A + pN] (or [1 1 1; 0 I A + 2N]) in permuted coordinates."""
        p, k1, n = self.p, self.k1, self.n
        Nd = N.data if isinstance(N, ResidueMatrix) else np.asarray(N, dtype=np.int64)
        tail = self.A.data + p * Nd.reshape(self.A.shape)
        if not self.with_one:
            return np.hstack([np.eye(k1, dtype=np.int64), tail]).reshape(k1, n)
        body = np.hstack([np.zeros((k1 - 1, 1), dtype=np.int64), np.eye(k1 - 1, dtype=np.int64), tail])
        return np.vstack([np.ones((1, n), dtype=np.int64), body.reshape(k1 - 1, n)])

    def torsion_rows(self) -> np.ndarray:
        head = np.zeros((self.k2, self.k1), dtype=np.int64)
        return np.hstack([head, self.p * self.B.data]).reshape(self.k2, self.n)

    def code(self, N: ResidueMatrix | np.ndarray, *, with_torsion: bool = True) -> CodeZp2:
        rows = self.free_rows(N)
        if with_torsion and self.k2:
            rows = np.vstack([rows, self.torsion_rows()])
        return codecore.from_matrix(ResidueMatrix(self.ring, self.unpermute(rows)))

    def read_N(self, C: CodeZp2) -> ResidueMatrix:
        """The N with C containing the free rows for N, read off the Howell form."""
        perm_gens = C.gens.select_columns(self.perm)
        H = howell_form(perm_gens)
        piv = howell_pivots(H)
        lead = 1 if self.with_one else 0
        r = self.A.rows
        head = H.data[lead : lead + r] if r else np.zeros((0, self.n), dtype=np.int64)
        if piv[lead : lead + r] != list(range(lead, lead + r)):
            raise PreconditionFailed("code does not lift the residue of this frame")
        diff = (head[:, self.k1 :] - self.A.data) % (self.p * self.p)
        if (diff % self.p).any():
            raise PreconditionFailed("code does not lift the residue of this frame")
        return ResidueMatrix(Modulus.field(self.p), (diff // self.p).reshape(self.A.shape))


def check_chain(C1: FpCode, C2: FpCode, *, doubly_even: bool | None = None) -> None:
    if (C1.p, C1.n) != (C2.p, C2.n):
        raise PreconditionFailed("residue and torsion codes differ in p or n")
    if not C1.is_self_orthogonal():
        raise PreconditionFailed("residue code is not self-orthogonal")
    if (C1.p == 2 if doubly_even is None else doubly_even) and not C1.is_doubly_even():
        raise PreconditionFailed("residue code is not doubly even")
    if not C1.issubset(C2):
        raise PreconditionFailed("residue code is not contained in the torsion code")
    if (C2.basis @ C1.basis.T).data.any():
        raise PreconditionFailed("torsion code is not contained in the dual of the residue code")


def standard_frame(C1: FpCode, C2: FpCode | None = None, *, with_one: bool = False) -> StandardFrame:
    C2 = C1 if C2 is None else C2
    p, n, k1 = C1.p, C1.n, C1.dim
    pivots = C1.pivots
    field_ = Modulus.field(p)
    rest = []
    for row in C2.basis.data:
        w = row.copy()
        for i, c in enumerate(pivots):
            if w[c]:
                w = (w - w[c] * C1.basis.data[i]) % p
        rest.append(w)
    Bfull = rref_fp(ResidueMatrix(field_, np.array(rest, dtype=np.int64).reshape(len(rest), n))).matrix
    k2 = Bfull.rows
    if k1 + k2 != C2.dim:
        raise PreconditionFailed("residue code is not contained in the torsion code")
    bpiv = howell_pivots(Bfull)
    used = set(pivots) | set(bpiv)
    perm = tuple(pivots + bpiv + [c for c in range(n) if c not in used])
    tail = list(perm[k1:])
    if with_one:
        if p != 2 or not C1.contains_all_ones():
            raise PreconditionFailed("the all-ones frame needs a binary residue code containing 1")
        # 1 is in C1, so the first RREF row has pivot 0 and the others vanish there
        A = ResidueMatrix(field_, C1.basis.data[1:]).select_columns(tail)
    else:
        A = C1.basis.select_columns(tail)
    return StandardFrame(p, n, k1, k2, perm, A, Bfull.select_columns(tail), with_one)


# --- solution sets --------------------------------------------------------------------


@dataclass(frozen=True)
class LiftSolutionSet:
    """N = particular_N + span(kernel_basis); one code per member."""

    frame: StandardFrame
    kind: MapKind
    target: np.ndarray
    particular_N: ResidueMatrix
    kernel_basis: list[ResidueMatrix] = field(default_factory=list)

    @property
    def base_A(self) -> ResidueMatrix:
        return self.frame.A

    @property
    def count(self) -> int:
        return self.frame.p ** len(self.kernel_basis)

    def member(self, index: int) -> ResidueMatrix:
        p = self.frame.p
        acc = self.particular_N.data.copy()
        # most significant coefficient first, so index order is lexicographic
        for K in reversed(self.kernel_basis):
            index, a = divmod(index, p)
            if a:
                acc = acc + a * K.data
        return ResidueMatrix(self.particular_N.modulus, acc)

    def members(self) -> Iterator[ResidueMatrix]:
        p = self.frame.p
        for coeffs in itertools.product(range(p), repeat=len(self.kernel_basis)):
            acc = self.particular_N.data.copy()
            for a, K in zip(coeffs, self.kernel_basis):
                if a:
                    acc = acc + a * K.data
            yield ResidueMatrix(self.particular_N.modulus, acc)

    def satisfies(self, N: ResidueMatrix) -> bool:
        A = self.base_A
        if A.rows == 0:
            return True
        return bool(np.array_equal(_image_vector(A, N, self.kind) % self.frame.p, self.target))

    def codes(self, *, with_torsion: bool = True, workers: int = 1) -> list[CodeZp2]:
        if workers <= 1 or self.count < PARALLEL_MIN_CODES:
            return [self.frame.code(N, with_torsion=with_torsion) for N in self.members()]
        units = [(self, r, with_torsion) for r in blocks(self.count, workers * 4)]
        return [c for part in pmap(_codes_for_block, units, workers) for c in part]


def _codes_for_block(unit: tuple[LiftSolutionSet, range, bool]) -> list[CodeZp2]:
    sols, indices, with_torsion = unit
    return [sols.frame.code(sols.member(i), with_torsion=with_torsion) for i in indices]


def _integer_target(frame: StandardFrame) -> np.ndarray:
    p, A = frame.p, frame.A.data
    S = np.eye(A.shape[0], dtype=np.int64) + A @ A.T
    if (S % p).any():
        raise PreconditionFailed("I + A A^t is not divisible by p")
    if p == 2 and (np.diag(S) % 4).any():
        raise PreconditionFailed("diag(I + A A^t) is not divisible by 4")
    return S


def _solve(frame: StandardFrame, kind: MapKind, target: np.ndarray) -> LiftSolutionSet:
    p = frame.p
    A = frame.A
    r, c = A.shape
    field_ = Modulus.field(p)
    if r == 0:
        return LiftSolutionSet(frame, kind, target, ResidueMatrix.zeros(field_, 0, c))
    coeff = coefficient_matrix(A, kind)
    sol = solve_affine_fp(coeff, target)
    if sol is None:
        raise InternalConsistencyError(f"{kind.value} equations have no solution although the map is onto")
    # fiber directions N -> N + M B leave the code unchanged
    fiber = []
    for a in range(r):
        for b in range(frame.k2):
            W = np.zeros((r, c), dtype=np.int64)
            W[a] = frame.B.data[b]
            fiber.append(W.reshape(-1))
    for w in fiber:
        if ((coeff.data @ w) % p).any():
            raise InternalConsistencyError("fiber direction M B is not in the kernel")
    basis = extend_basis(fiber, sol.kernel_basis, p)
    if len(basis) != len(sol.kernel_basis) - r * frame.k2:
        raise InternalConsistencyError("fiber directions are not independent inside the kernel")
    return LiftSolutionSet(
        frame,
        kind,
        target,
        ResidueMatrix(field_, sol.particular.reshape(r, c)),
        [ResidueMatrix(field_, v.reshape(r, c)) for v in basis],
    )


def so_lift_solutions(C1: FpCode, C2: FpCode | None = None) -> LiftSolutionSet:
    C2 = C1 if C2 is None else C2
    check_chain(C1, C2)
    frame = standard_frame(C1, C2)
    p = frame.p
    S = _integer_target(frame)
    target = _upper((-(S // p)) % p)
    sols = _solve(frame, MapKind.PSI, target)
    expected = lift_count(p, frame.n, frame.k1, frame.k2)
    if sols.count != expected:
        raise InternalConsistencyError(f"{sols.count} lifts found, closed form gives {expected}")
    return sols


def even_lift_solutions(C1: FpCode, C2: FpCode | None = None) -> LiftSolutionSet:
    C2 = C1 if C2 is None else C2
    if C1.p != 2:
        raise PreconditionFailed("even lifts are defined for binary residue codes")
    if C1.n % 8:
        raise PreconditionFailed(f"even codes containing a +-1 vector have length divisible by 8, got {C1.n}")
    if not C1.contains_all_ones():
        raise PreconditionFailed("residue code does not contain the all-ones vector")
    check_chain(C1, C2, doubly_even=True)
    frame = standard_frame(C1, C2, with_one=True)
    A = frame.A
    if A.rows and solve_affine_fp(A.T, [1] * A.cols) is not None:
        raise InternalConsistencyError("the all-ones vector lies in the row space of A")
    if (frame.B.data.sum(axis=1) % 2).any():
        raise InternalConsistencyError("a torsion row has odd weight")
    S = _integer_target(frame)
    T = S // 2 + np.diag(np.diag(S) // 4)
    target = np.concatenate([_upper(T % 2), np.zeros(A.rows, dtype=np.int64)])
    sols = _solve(frame, MapKind.PHI_ALPHA, target)
    expected = even_one_count(frame.n, frame.k1, frame.k2)
    if sols.count != expected:
        raise InternalConsistencyError(f"{sols.count} even lifts found, closed form gives {expected}")
    return sols


# --- enumerators ----------------------------------------------------------------------


def _distinct(codes: Sequence[CodeZp2], what: str) -> list[CodeZp2]:
    seen = set()
    for C in codes:
        k = C.key()
        if k in seen:
            raise InternalConsistencyError(f"{what} produced the same code twice: {C!r}")
        seen.add(k)
    return list(codes)


def free_so_lifts(C1: FpCode) -> LiftSolutionSet:
    return so_lift_solutions(C1, C1)


def so_lifts(C1: FpCode, C2: FpCode | None = None, *, workers: int | None = None) -> list[CodeZp2]:
    sols = so_lift_solutions(C1, C2)
    codes = _distinct(sols.codes(workers=workers or settings.workers), "so_lifts")
    jlog("debug", "lift_enumeration_done", family="so", p=C1.p, n=C1.n, k1=sols.frame.k1, k2=sols.frame.k2, count=len(codes))
    return codes


def even_lifts_with_one(C1: FpCode, C2: FpCode | None = None, *, workers: int | None = None) -> list[CodeZp2]:
    sols = even_lift_solutions(C1, C2)
    codes = _distinct(sols.codes(workers=workers or settings.workers), "even_lifts_with_one")
    jlog("debug", "lift_enumeration_done", family="even-one", n=C1.n, k1=sols.frame.k1, k2=sols.frame.k2, count=len(codes))
    return codes


def sign_vectors(n: int) -> Iterator[tuple[int, ...]]:
    for bits in itertools.product((1, -1), repeat=n):
        yield bits


def even_lifts_with_pm1(C1: FpCode, C2: FpCode | None = None, *, workers: int | None = None) -> list[CodeZp2]:
    """Even codes with residue C1, torsion C2 and some codeword in {1, 3}^n.

    Every such code is a sign change of one containing the all-ones vector, so the
    family is the orbit of ``even_lifts_with_one`` under the 2^n sign diagonals.
    """
    C2 = C1 if C2 is None else C2
    base = even_lifts_with_one(C1, C2, workers=workers)
    n = C1.n
    identity = tuple(range(n))
    found: dict[tuple, CodeZp2] = {}
    for C in base:
        for signs in sign_vectors(n):
            D = codecore.transform(C, identity, signs)
            found.setdefault(D.key(), D)
    codes = [found[k] for k in sorted(found)]
    expected = even_pm1_count(n, C1.dim, C2.dim - C1.dim)
    if len(codes) != expected:
        raise InternalConsistencyError(f"{len(codes)} even codes with a +-1 vector, closed form gives {expected}")
    want = 2**C2.dim
    for D in codes:
        if D.size <= settings.codeword_limit and len(codecore.pm1_codewords(D)) != want:
            raise InternalConsistencyError(f"{D!r} does not meet {{1,3}}^n in exactly {want} codewords")
    jlog("debug", "lift_enumeration_done", family="even-pm1", n=n, k1=C1.dim, k2=C2.dim - C1.dim, count=len(codes))
    return codes


# --- fibers ---------------------------------------------------------------------------


def free_lift_extension(C: CodeZp2, C2: FpCode) -> CodeZp2:
    """The unique self-orthogonal code with torsion C2 containing the free lift C."""
    p = C.p
    rows = np.vstack([C.gens.data, p * C2.basis.data]).reshape(C.gens.rows + C2.dim, C.n)
    ext = codecore.from_matrix(ResidueMatrix(C.gens.modulus, rows))
    if not codecore.is_self_orthogonal(ext):
        raise PreconditionFailed("torsion code is not orthogonal to the free lift")
    return ext


def fiber(Cprime: CodeZp2, C1: FpCode | None = None, *, with_one: bool = False) -> list[CodeZp2]:
    """The free lifts of C1 inside C', one per M in N -> N + M B."""
    C1 = codecore.residue(Cprime) if C1 is None else C1
    frame = standard_frame(C1, codecore.torsion(Cprime), with_one=with_one)
    N = frame.read_N(Cprime).data
    r, k2 = frame.A.rows, frame.k2
    out = []
    for entries in itertools.product(range(frame.p), repeat=r * k2):
        M = np.array(entries, dtype=np.int64).reshape(r, k2)
        out.append(frame.code((N + M @ frame.B.data) % frame.p, with_torsion=False))
    return out
