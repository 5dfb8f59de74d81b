"""Level-one spaces M_k(SL2(Z)) over F_p from E4, E6 and Delta."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .fp_linalg import FpMatrix, check_modulus, rref
from .qseries import QExp


class PrecisionError(ValueError):
    """Requested precision is too small for the construction."""


def dim_Mk(k: int) -> int:
    """Dimension of M_k(SL2(Z))."""
    if k < 0 or k % 2:
        return 0
    return k // 12 if k % 12 == 2 else k // 12 + 1


def divisor_power_sum(m: int, j: int) -> int:
    """sigma_j(m) by direct enumeration of divisors."""
    return sum(d**j for d in range(1, m + 1) if m % d == 0)


def _sigma_table(n: int, j: int) -> list[int]:
    # sieve form of the divisor sum, same values as divisor_power_sum
    s = [0] * n
    for d in range(1, n):
        dj = d**j
        for m in range(d, n, d):
            s[m] += dj
    return s


@lru_cache(maxsize=64)
def eisenstein4(n: int, p: int) -> QExp:
    """E4 = 1 + 240 sum sigma_3(m) q^m, reduced mod p."""
    if n < 1:
        raise PrecisionError("precision must be >= 1")
    s = _sigma_table(n, 3)
    return QExp.from_coeffs([1] + [240 * s[m] for m in range(1, n)], check_modulus(p))


@lru_cache(maxsize=64)
def eisenstein6(n: int, p: int) -> QExp:
    """E6 = 1 - 504 sum sigma_5(m) q^m, reduced mod p."""
    if n < 1:
        raise PrecisionError("precision must be >= 1")
    s = _sigma_table(n, 5)
    return QExp.from_coeffs([1] + [-504 * s[m] for m in range(1, n)], check_modulus(p))


@lru_cache(maxsize=64)
def delta(n: int, p: int) -> QExp:
    """Delta = q prod_{m>=1} (1 - q^m)^24 to precision n."""
    if n < 2:
        raise PrecisionError("Delta needs precision >= 2")
    check_modulus(p)
    # (1 - q^m)^24 is the binomial expansion in q^m
    binom = [1]
    for i in range(24):
        binom.append(binom[-1] * (24 - i) // (i + 1))
    prod = QExp.one(p, n - 1)
    for m in range(1, n - 1):
        factor = [0] * (n - 1)
        for i, c in enumerate(binom):
            if i * m >= n - 1:
                break
            factor[i * m] = (-1) ** i * c
        prod = prod * QExp.from_coeffs(factor, p)
    return QExp(p, (0,) + prod.coeffs)


@dataclass(frozen=True)
class FormSpace:
    """Echelon basis of a weight-k space of truncated q-expansions."""

    k: int
    p: int
    prec: int
    basis: FpMatrix

    @property
    def dim(self) -> int:
        return self.basis.nrows

    def row(self, i: int) -> QExp:
        return QExp(self.p, self.basis.rows[i])

    def rows(self) -> list[QExp]:
        return [self.row(i) for i in range(self.dim)]


def victor_miller_exponents(k: int) -> list[tuple[int, int, int]]:
    """(i, b, a) with Delta^i E6^b E4^a of weight k, for i = 0 .. dim-1."""
    out = []
    for i in range(dim_Mk(k)):
        b = next(b for b in (0, 1) if (k - 12 * i - 6 * b) % 4 == 0)
        a = (k - 12 * i - 6 * b) // 4
        out.append((i, b, a))
    return out


def victor_miller_basis(k: int, n: int, p: int, *, allow_odd: bool = False) -> FormSpace:
    """Victor-Miller basis f_i = q^i + O(q^dim) of M_k over F_p at precision n.

    Odd weights raise unless ``allow_odd``, in which case the zero space is returned.
    """
    check_modulus(p)
    if k < 0:
        raise ValueError(f"weight must be nonnegative, got {k}")
    if k % 2:
        if not allow_odd:
            raise ValueError(f"odd weight {k} has no level-one forms")
        return FormSpace(k, p, n, FpMatrix(p, (), n))
    d = dim_Mk(k)
    if n < d + 1:
        raise PrecisionError(f"precision {n} < dim M_{k} + 1 = {d + 1}")

    # Delta^i has valuation exactly i, so the rows are triangular with unit diagonal
    e4, e6 = eisenstein4(n, p), eisenstein6(n, p)
    dl = delta(n, p) if d > 1 else None
    rows = []
    e4pow: dict[int, QExp] = {}
    for i, b, a in victor_miller_exponents(k):
        if a not in e4pow:
            e4pow[a] = e4**a
        g = e4pow[a]
        if b:
            g = g * e6
        if i:
            g = g * dl**i
        rows.append(g.coeffs)
    e = rref(FpMatrix(p, tuple(rows), n))
    assert e.pivots == tuple(range(d)), e.pivots
    return FormSpace(k, p, n, e.echelon)
