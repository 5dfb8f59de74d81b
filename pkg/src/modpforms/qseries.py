"""Truncated q-expansions over F_p and the operators U, V and theta."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .fp_linalg import check_modulus


@dataclass(frozen=True)
class QExp:
    """sum(coeffs[m] * q^m) + O(q^precision) with coefficients in F_p."""

    p: int
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        check_modulus(self.p)
        if not self.coeffs:
            raise ValueError("a q-expansion needs precision >= 1")

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[int], p: int, prec: int | None = None) -> QExp:
        c = [int(x) % p for x in coeffs]
        if prec is not None:
            c = (c + [0] * prec)[:prec]
        return cls(p, tuple(c))

    @classmethod
    def zero(cls, p: int, prec: int) -> QExp:
        return cls(p, (0,) * prec)

    @classmethod
    def one(cls, p: int, prec: int) -> QExp:
        return cls(p, (1,) + (0,) * (prec - 1))

    @property
    def prec(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, m: int) -> int:
        if not 0 <= m < self.prec:
            raise IndexError(f"coefficient {m} is beyond precision O(q^{self.prec})")
        return self.coeffs[m]

    def truncate(self, n: int) -> QExp:
        if n > self.prec:
            raise ValueError(f"cannot raise precision from {self.prec} to {n}")
        return QExp(self.p, self.coeffs[:n])

    def valuation(self) -> int | None:
        """Index of the first nonzero known coefficient, None if all vanish."""
        return next((i for i, c in enumerate(self.coeffs) if c), None)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def _check(self, other: QExp) -> None:
        if not isinstance(other, QExp):
            raise TypeError(f"expected QExp, got {type(other).__name__}")
        if other.p != self.p:
            raise ValueError(f"modulus mismatch: {self.p} vs {other.p}")

    def __add__(self, other: QExp) -> QExp:
        return add(self, other)

    def __sub__(self, other: QExp) -> QExp:
        return add(self, other.scale(-1))

    def __neg__(self) -> QExp:
        return self.scale(-1)

    def __mul__(self, other: QExp) -> QExp:
        return mul(self, other)

    def __pow__(self, e: int) -> QExp:
        return power(self, e)

    def scale(self, c: int) -> QExp:
        p = self.p
        c %= p
        return QExp(p, tuple(a * c % p for a in self.coeffs))

    def __str__(self) -> str:
        terms = []
        for m, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if m == 0 else ("q" if m == 1 else f"q^{m}")
            if m == 0:
                terms.append(str(c))
            else:
                terms.append(mono if c == 1 else f"{c}*{mono}")
        body = " + ".join(terms) if terms else "0"
        return f"{body} + O(q^{self.prec})"


def add(f: QExp, g: QExp) -> QExp:
    f._check(g)
    p = f.p
    return QExp(p, tuple((a + b) % p for a, b in zip(f.coeffs, g.coeffs)))


def convolve_schoolbook(a: Sequence[int], b: Sequence[int], n: int, p: int) -> list[int]:
    """First n coefficients of the product, by direct convolution."""
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if not x:
            continue
        for j, y in enumerate(b[: n - i]):
            out[i + j] += x * y
    return [c % p for c in out]


def _convolve_kronecker(a: Sequence[int], b: Sequence[int], n: int, p: int) -> list[int]:
    # pack each sequence into one big integer with slots wide enough that the
    # exact integer convolution never carries between slots
    a, b = a[:n], b[:n]
    bound = min(len(a), len(b)) * (p - 1) ** 2
    width = (bound.bit_length() + 8) // 8
    ia = int.from_bytes(b"".join(x.to_bytes(width, "little") for x in a), "little")
    ib = int.from_bytes(b"".join(x.to_bytes(width, "little") for x in b), "little")
    raw = (ia * ib).to_bytes(width * (len(a) + len(b)), "little")
    return [int.from_bytes(raw[i * width:(i + 1) * width], "little") % p for i in range(n)]


def convolve(a: Sequence[int], b: Sequence[int], n: int, p: int) -> list[int]:
    if min(len(a), len(b), n) <= 16:
        return convolve_schoolbook(a, b, n, p)
    return _convolve_kronecker(a, b, n, p)


def mul(f: QExp, g: QExp) -> QExp:
    """Product truncated to the smaller precision."""
    f._check(g)
    n = min(f.prec, g.prec)
    return QExp(f.p, tuple(convolve(f.coeffs, g.coeffs, n, f.p)))


def power(f: QExp, e: int) -> QExp:
    if e < 0:
        raise ValueError("negative exponent")
    result = QExp.one(f.p, f.prec)
    base = f
    while e:
        if e & 1:
            result = mul(result, base)
        e >>= 1
        if e:
            base = mul(base, base)
    return result


def u_slice(f: QExp) -> QExp:
    """Atkin U: (Uf)_m = a_{mp}.  Precision drops to ceil(prec / p)."""
    return QExp(f.p, f.coeffs[:: f.p])


def v_expand(f: QExp) -> QExp:
    """(Vf)_{mp} = a_m and zero off multiples of p."""
    p = f.p
    out = [0] * (p * (f.prec - 1) + 1)
    out[::p] = f.coeffs
    return QExp(p, tuple(out))


def theta(f: QExp) -> QExp:
    """q d/dq: multiplies a_m by m."""
    p = f.p
    return QExp(p, tuple(m * c % p for m, c in enumerate(f.coeffs)))
