"""Exact linear algebra over F_p and Z_{p^2}.

Every matrix is a :class:`ResidueMatrix`: an immutable numpy ``int64`` array whose
entries are canonical residues in ``[0, m)`` with ``m = p`` or ``m = p^2``.

Over the field F_p codes are identified by their reduced row-echelon form
(:func:`rref_fp`). Over the chain ring Z_{p^2} the row-echelon form is not enough
to tell two row spans apart, so codes are identified by the Howell normal form
(:func:`howell_form`): echelon rows whose leading entries are 1 or p, entries above
a leading entry reduced modulo it, and for every row led by p, p times that row lies
in the span of the rows below it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import InvalidModulusError, ShapeError

# (p^2)^2 * n must stay below 2^63 for the int64 matmuls
MAX_SQUARE = 1 << 26


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class Modulus:
    p: int
    m: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise InvalidModulusError(f"{self.p} is not prime")
        if self.m not in (self.p, self.p * self.p):
            raise InvalidModulusError(f"modulus {self.m} is neither p = {self.p} nor p^2")
        if self.p * self.p > MAX_SQUARE:
            raise InvalidModulusError(f"p = {self.p} is too large for exact int64 arithmetic")

    @classmethod
    def field(cls, p: int) -> Modulus:
        return cls(p, p)

    @classmethod
    def ring(cls, p: int) -> Modulus:
        return cls(p, p * p)

    @property
    def is_field(self) -> bool:
        return self.m == self.p


@dataclass(frozen=True, eq=False)
class ResidueMatrix:
    modulus: Modulus
    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.int64)
        if arr.ndim != 2:
            raise ShapeError(f"expected a 2-d matrix, got shape {arr.shape}")
        arr = arr % self.modulus.m
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @classmethod
    def from_rows(cls, modulus: Modulus, rows: Iterable[Sequence[int]], cols: int | None = None) -> ResidueMatrix:
        rows = [list(r) for r in rows]
        if cols is None:
            if not rows:
                raise ShapeError("column count is required for a matrix without rows")
            cols = len(rows[0])
        for r in rows:
            if len(r) != cols:
                raise ShapeError(f"row of length {len(r)} in a matrix with {cols} columns")
        return cls(modulus, np.array(rows, dtype=np.int64).reshape(len(rows), cols))

    @classmethod
    def zeros(cls, modulus: Modulus, rows: int, cols: int) -> ResidueMatrix:
        return cls(modulus, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, modulus: Modulus, size: int) -> ResidueMatrix:
        return cls(modulus, np.eye(size, dtype=np.int64))

    @property
    def rows(self) -> int:
        return int(self.data.shape[0])

    @property
    def cols(self) -> int:
        return int(self.data.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def T(self) -> ResidueMatrix:
        return ResidueMatrix(self.modulus, self.data.T)

    def _check_same(self, other: ResidueMatrix) -> None:
        if self.modulus != other.modulus:
            raise InvalidModulusError(f"mixing moduli {self.modulus.m} and {other.modulus.m}")

    def __matmul__(self, other: ResidueMatrix) -> ResidueMatrix:
        self._check_same(other)
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        return ResidueMatrix(self.modulus, self.data @ other.data)

    def __add__(self, other: ResidueMatrix) -> ResidueMatrix:
        self._check_same(other)
        if self.shape != other.shape:
            raise ShapeError(f"cannot add {self.shape} and {other.shape}")
        return ResidueMatrix(self.modulus, self.data + other.data)

    def __sub__(self, other: ResidueMatrix) -> ResidueMatrix:
        self._check_same(other)
        if self.shape != other.shape:
            raise ShapeError(f"cannot subtract {other.shape} from {self.shape}")
        return ResidueMatrix(self.modulus, self.data - other.data)

    def __neg__(self) -> ResidueMatrix:
        return ResidueMatrix(self.modulus, -self.data)

    def __mul__(self, scalar: int) -> ResidueMatrix:
        return ResidueMatrix(self.modulus, self.data * int(scalar))

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ResidueMatrix):
            return NotImplemented
        return (
            self.modulus == other.modulus
            and self.shape == other.shape
            and bool(np.array_equal(self.data, other.data))
        )

    def __hash__(self) -> int:
        return hash((self.modulus, self.shape, self.data.tobytes()))

    def __repr__(self) -> str:
        return f"ResidueMatrix(mod {self.modulus.m}, {self.tolist()})"

    def key(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(r) for r in self.data.tolist())

    def tolist(self) -> list[list[int]]:
        return self.data.tolist()

    def reduce_to(self, modulus: Modulus) -> ResidueMatrix:
        """Same integer representatives read modulo another modulus."""
        return ResidueMatrix(modulus, self.data)

    def select_columns(self, cols: Sequence[int]) -> ResidueMatrix:
        return ResidueMatrix(self.modulus, self.data[:, list(cols)].reshape(self.rows, len(cols)))


class Echelon(NamedTuple):
    matrix: ResidueMatrix
    rank: int
    pivot_cols: list[int]


class AffineSolution(NamedTuple):
    particular: np.ndarray
    kernel_basis: list[np.ndarray]


def _require_field(M: ResidueMatrix) -> int:
    if not M.modulus.is_field:
        raise InvalidModulusError(f"expected a matrix over F_p, got modulus {M.modulus.m}")
    return M.modulus.p


def rref_fp(M: ResidueMatrix) -> Echelon:
    p = _require_field(M)
    R = M.data.copy()
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            R[[r, i]] = R[[i, r]]
        R[r] = (R[r] * pow(int(R[r, c]), -1, p)) % p
        for i in range(rows):
            if i != r and R[i, c]:
                R[i] = (R[i] - R[i, c] * R[r]) % p
        pivots.append(c)
        r += 1
    return Echelon(ResidueMatrix(M.modulus, R[:r].reshape(r, cols)), r, pivots)


def rank_fp(M: ResidueMatrix) -> int:
    return rref_fp(M).rank


def kernel_fp(M: ResidueMatrix) -> ResidueMatrix:
    """Basis of {x : M x = 0} as the rows of the returned matrix."""
    p = _require_field(M)
    R, _, pivots = rref_fp(M)
    pivot_set = set(pivots)
    free = [c for c in range(M.cols) if c not in pivot_set]
    basis = np.zeros((len(free), M.cols), dtype=np.int64)
    for t, f in enumerate(free):
        basis[t, f] = 1
        for i, pc in enumerate(pivots):
            basis[t, pc] = (-int(R.data[i, f])) % p
    return ResidueMatrix(M.modulus, basis)


def left_kernel_fp(M: ResidueMatrix) -> ResidueMatrix:
    """Basis of {a : a M = 0}."""
    return kernel_fp(M.T)


def solve_affine_fp(A: ResidueMatrix, b: Sequence[int]) -> AffineSolution | None:
    p = _require_field(A)
    b = [int(x) % p for x in b]
    if len(b) != A.rows:
        raise ShapeError(f"{A.rows} equations but {len(b)} right-hand sides")
    aug = ResidueMatrix(A.modulus, np.hstack([A.data, np.array(b, dtype=np.int64).reshape(A.rows, 1)]))
    R, _, pivots = rref_fp(aug)
    if A.cols in pivots:
        return None
    particular = np.zeros(A.cols, dtype=np.int64)
    for i, pc in enumerate(pivots):
        particular[pc] = R.data[i, A.cols]
    kernel = kernel_fp(A)
    return AffineSolution(particular, [kernel.data[t].copy() for t in range(kernel.rows)])


def extend_basis(base: Sequence[np.ndarray], candidates: Sequence[np.ndarray], p: int) -> list[np.ndarray]:
    """Pick candidates that, together with ``base``, are linearly independent over F_p.

    The picked vectors span a complement of span(base) inside span(base + candidates).
    """
    field = Modulus.field(p)
    chosen: list[np.ndarray] = []
    current = [np.asarray(v, dtype=np.int64) for v in base]
    if not len(candidates):
        return []
    width = len(candidates[0])
    rank = rref_fp(ResidueMatrix(field, np.array(current, dtype=np.int64).reshape(len(current), width))).rank if current else 0
    for v in candidates:
        trial = current + [np.asarray(v, dtype=np.int64)]
        r = rref_fp(ResidueMatrix(field, np.array(trial, dtype=np.int64).reshape(len(trial), width))).rank
        if r > rank:
            current, rank = trial, r
            chosen.append(np.asarray(v, dtype=np.int64) % p)
    return chosen


def _leading(row: np.ndarray) -> int:
    nz = np.nonzero(row)[0]
    return int(nz[0]) if nz.size else -1


def howell_form(M: ResidueMatrix) -> ResidueMatrix:
    mod = M.modulus
    if mod.is_field:
        raise InvalidModulusError("the Howell form is computed over Z_{p^2}; use rref_fp over F_p")
    p, m = mod.p, mod.m
    work = [row.copy() for row in M.data if row.any()]
    out: list[np.ndarray] = []
    pivots: list[int] = []
    for c in range(M.cols):
        if not work:
            break
        best, best_val = -1, 2
        for idx, row in enumerate(work):
            x = int(row[c])
            if x == 0:
                continue
            v = 0 if x % p else 1
            if v < best_val:
                best, best_val = idx, v
                if v == 0:
                    break
        if best < 0:
            continue
        lead = work.pop(best)
        g = p ** best_val
        unit = int(lead[c]) // g
        lead = (lead * pow(unit, -1, m)) % m
        rest = []
        for row in work:
            y = int(row[c])
            if y:
                row = (row - (y // g) * lead) % m
            if row.any():
                rest.append(row)
        if best_val == 1:
            # p * lead has a zero at c; keep it so the rows below still span it
            extra = (p * lead) % m
            if extra.any():
                rest.append(extra)
        work = rest
        out.append(lead)
        pivots.append(c)
    for i in range(len(out)):
        for j in range(i + 1, len(out)):
            q = int(out[i][pivots[j]]) // int(out[j][pivots[j]])
            if q:
                out[i] = (out[i] - q * out[j]) % m
    return ResidueMatrix(mod, np.array(out, dtype=np.int64).reshape(len(out), M.cols))


def howell_pivots(H: ResidueMatrix) -> list[int]:
    return [_leading(H.data[i]) for i in range(H.rows)]


def howell_contains(H: ResidueMatrix, v: Sequence[int]) -> bool:
    """Membership of v in the row span of a Howell form H."""
    m = H.modulus.m
    w = np.array(v, dtype=np.int64) % m
    if w.shape != (H.cols,):
        raise ShapeError(f"vector of length {w.shape[0]} against {H.cols} columns")
    for i, c in enumerate(howell_pivots(H)):
        g = int(H.data[i, c])
        e = int(w[c])
        if e % g:
            return False
        if e:
            w = (w - (e // g) * H.data[i]) % m
    return not w.any()


def kernel_zp2(M: ResidueMatrix) -> ResidueMatrix:
    """Generators of {x in Z_{p^2}^n : M x = 0}, read off the Howell form of [M^T | I]."""
    mod = M.modulus
    if mod.is_field:
        raise InvalidModulusError("kernel_zp2 works over Z_{p^2}")
    r, n = M.shape
    if r == 0:
        return ResidueMatrix.identity(mod, n)
    aug = ResidueMatrix(mod, np.hstack([M.data.T, np.eye(n, dtype=np.int64)]))
    H = howell_form(aug)
    keep = [i for i, c in enumerate(howell_pivots(H)) if c >= r]
    return ResidueMatrix(mod, H.data[keep, r:].reshape(len(keep), n))
