"""Prime-field arithmetic and dense linear algebra over F_p.

Scalars are plain Python ints held in the canonical range [0, p).  A matrix
is an immutable row-major tuple of rows sharing one modulus.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

MAX_MODULUS = 2**31

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin; exact for n < 3.3e24."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=None)
def check_modulus(p: int) -> int:
    """Validate a field modulus once; returns p unchanged."""
    if not isinstance(p, int) or isinstance(p, bool):
        raise TypeError(f"modulus must be an int, got {type(p).__name__}")
    if not 2 <= p < MAX_MODULUS or not is_prime(p):
        raise ValueError(f"modulus {p} is not a prime in [2, 2^31)")
    return p


def inv_mod(a: int, p: int) -> int:
    """Inverse of a modulo p by the extended Euclidean algorithm."""
    r0, r1 = a % p, p
    s0, s1 = 1, 0
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if r0 != 1:
        raise ZeroDivisionError(f"{a} is not invertible modulo {p}")
    return s0 % p


@dataclass(frozen=True)
class FpMatrix:
    p: int
    rows: tuple[tuple[int, ...], ...]
    ncols: int

    def __post_init__(self) -> None:
        check_modulus(self.p)
        for r in self.rows:
            if len(r) != self.ncols:
                raise ValueError(f"row of length {len(r)} in a matrix with {self.ncols} columns")

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], p: int, ncols: int | None = None) -> FpMatrix:
        reduced = tuple(tuple(int(x) % p for x in r) for r in rows)
        if ncols is None:
            if not reduced:
                raise ValueError("ncols is required for a matrix with no rows")
            ncols = len(reduced[0])
        return cls(p, reduced, ncols)

    @classmethod
    def zeros(cls, nrows: int, ncols: int, p: int) -> FpMatrix:
        return cls(p, tuple((0,) * ncols for _ in range(nrows)), ncols)

    @classmethod
    def identity(cls, n: int, p: int) -> FpMatrix:
        return cls(p, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), n)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def transpose(self) -> FpMatrix:
        cols = tuple(tuple(r[j] for r in self.rows) for j in range(self.ncols))
        return FpMatrix(self.p, cols, self.nrows)

    def truncate_cols(self, n: int) -> FpMatrix:
        n = min(n, self.ncols)
        return FpMatrix(self.p, tuple(r[:n] for r in self.rows), n)

    def entries(self) -> list[int]:
        """Row-major flat list of entries."""
        return [x for r in self.rows for x in r]


class RREF(NamedTuple):
    echelon: FpMatrix
    rank: int
    pivots: tuple[int, ...]


def rref(m: FpMatrix) -> RREF:
    """Reduced row echelon form over F_p.

    Zero rows are dropped from the bottom but the row count of ``echelon``
    matches ``m`` (trailing rows are zero).
    """
    p = m.p
    a = [list(r) for r in m.rows]
    nrows, ncols = m.nrows, m.ncols
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        row = a[r]
        inv = inv_mod(row[c], p)
        if inv != 1:
            row[c:] = [x * inv % p for x in row[c:]]
        for i in range(nrows):
            if i == r:
                continue
            f = a[i][c]
            if f:
                other = a[i]
                other[c:] = [(x - f * y) % p for x, y in zip(other[c:], row[c:])]
        pivots.append(c)
        r += 1
    return RREF(FpMatrix(p, tuple(tuple(x) for x in a), ncols), r, tuple(pivots))


def rank(m: FpMatrix) -> int:
    return rref(m).rank


def row_space(m: FpMatrix) -> FpMatrix:
    """Echelonized basis of the row span (nonzero rows of the rref only)."""
    e = rref(m)
    return FpMatrix(m.p, e.echelon.rows[: e.rank], m.ncols)


def _pivot_cols(basis: FpMatrix) -> list[int]:
    cols = []
    for i, row in enumerate(basis.rows):
        c = next((j for j, x in enumerate(row) if x), None)
        if c is None:
            continue
        if row[c] != 1 or any(basis.rows[k][c] for k in range(basis.nrows) if k != i):
            raise ValueError("basis is not in reduced echelon form")
        cols.append(c)
    return cols


def reduce_vector(basis: FpMatrix, v: Sequence[int]) -> list[int]:
    """Remainder of v after clearing the pivot columns of an rref basis."""
    if len(v) != basis.ncols:
        raise ValueError(f"vector of length {len(v)} against basis with {basis.ncols} columns")
    p = basis.p
    w = [int(x) % p for x in v]
    for row, c in zip((r for r in basis.rows if any(r)), _pivot_cols(basis)):
        f = w[c]
        if f:
            w = [(x - f * y) % p for x, y in zip(w, row)]
    return w


def subspace_contains(basis: FpMatrix, v: Sequence[int]) -> bool:
    """True iff v lies in the row span of ``basis`` (which must be in rref)."""
    return not any(reduce_vector(basis, v))


def solve_in_basis(basis: FpMatrix, v: Sequence[int]) -> list[int] | None:
    """Coefficients c with sum c_i * basis.rows[i] == v, or None if v is outside the span.

    ``basis`` need not be echelonized but its rows must be independent.
    """
    if len(v) != basis.ncols:
        raise ValueError(f"vector of length {len(v)} against basis with {basis.ncols} columns")
    p, n = basis.p, basis.nrows
    # columns: one per basis vector, then the target vector
    aug = FpMatrix.from_rows(
        [[basis.rows[i][j] for i in range(n)] + [v[j]] for j in range(basis.ncols)], p, n + 1
    )
    e = rref(aug)
    if n in e.pivots:
        return None
    if e.pivots != tuple(range(n)):
        raise ValueError("basis rows are linearly dependent")
    return [e.echelon.rows[i][n] for i in range(n)]


def matmul(a: FpMatrix, b: FpMatrix) -> FpMatrix:
    if a.p != b.p or a.ncols != b.nrows:
        raise ValueError("incompatible matrices")
    p = a.p
    bt = b.transpose().rows
    return FpMatrix(
        p, tuple(tuple(sum(x * y for x, y in zip(r, c)) % p for c in bt) for r in a.rows), b.ncols
    )
