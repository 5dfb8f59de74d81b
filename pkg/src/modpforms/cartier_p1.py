"""Cartier operator and Tango number on the projective line over F_p.

Differentials are kept in partial-fraction form
    omega = (sum_{s, j<0} c_{s,j} (t - s)^j + sum_{j>=0} c_j t^j) dt
with finite poles s in F_p.  A line bundle is O(d * infinity).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

from .fp_linalg import FpMatrix, check_modulus, inv_mod, rref, solve_in_basis, subspace_contains

POLY = None  # pole marker for the polynomial part

Key = tuple["int | None", int]


class SearchSpaceTooLarge(ValueError):
    """Enumeration would exceed the configured candidate cap."""


# ---------------------------------------------------------------------------
# dense polynomials over F_p, coefficient lists with index = degree


def poly_trim(f: Sequence[int]) -> list[int]:
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return f


def poly_mul(f: Sequence[int], g: Sequence[int], p: int) -> list[int]:
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return poly_trim(c % p for c in out)


def poly_divmod(f: Sequence[int], g: Sequence[int], p: int) -> tuple[list[int], list[int]]:
    g = poly_trim(g)
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    r = poly_trim(x % p for x in f)
    inv = inv_mod(g[-1], p)
    q = [0] * max(0, len(r) - len(g) + 1)
    while len(r) >= len(g):
        shift = len(r) - len(g)
        c = r[-1] * inv % p
        q[shift] = c
        for i, b in enumerate(g):
            r[shift + i] = (r[shift + i] - c * b) % p
        r = poly_trim(r)
    return poly_trim(q), r


def poly_gcd(f: Sequence[int], g: Sequence[int], p: int) -> list[int]:
    a, b = poly_trim(f), poly_trim(g)
    while b:
        a, b = b, poly_divmod(a, b, p)[1]
    if a:
        inv = inv_mod(a[-1], p)
        a = [x * inv % p for x in a]
    return a


def poly_deriv(f: Sequence[int], p: int) -> list[int]:
    return poly_trim(i * c % p for i, c in enumerate(f) if i)


def poly_eval(f: Sequence[int], x: int, p: int) -> int:
    acc = 0
    for c in reversed(f):
        acc = (acc * x + c) % p
    return acc


def taylor_shift(f: Sequence[int], s: int, p: int) -> list[int]:
    """Coefficients of f(u + s) in u."""
    out = [c % p for c in f]
    n = len(out)
    # repeated synthetic division by (u - s)
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            out[j] = (out[j] + s * out[j + 1]) % p
    return poly_trim(out)


def squarefree_decomposition(f: Sequence[int], p: int) -> dict[int, list[int]]:
    """{m: P_m} with f = lc * prod P_m^m and each P_m squarefree, pairwise coprime.

    Yun's algorithm, with the characteristic-p step: when f' = 0 the
    polynomial is a p-th power and its p-th root is decomposed recursively.
    """
    f = poly_trim(f)
    if not f:
        raise ValueError("zero polynomial")
    out: dict[int, list[int]] = {}
    _sqf(f, p, 1, out)
    return out


def _sqf(f: list[int], p: int, mult: int, out: dict[int, list[int]]) -> None:
    if len(f) <= 1:
        return
    df = poly_deriv(f, p)
    if not df:
        # f is a p-th power; coefficients in F_p are their own p-th roots
        _sqf(f[::p], p, mult * p, out)
        return
    c = poly_gcd(f, df, p)
    w = poly_divmod(f, c, p)[0]
    i = 1
    while len(w) > 1:
        y = poly_gcd(w, c, p)
        z = poly_divmod(w, y, p)[0]
        if len(z) > 1:
            key = i * mult
            out[key] = poly_mul(out[key], z, p) if key in out else z
        i += 1
        w = y
        c = poly_divmod(c, y, p)[0]
    if len(c) > 1:
        # what remains has zero derivative: a p-th power
        _sqf(c[::p], p, mult * p, out)


# ---------------------------------------------------------------------------
# differentials


@dataclass(frozen=True)
class RatDifferential:
    """A rational differential on P^1 over F_p in partial-fraction form.

    ``terms`` maps (pole, exponent) to a nonzero coefficient; pole ``None``
    marks the polynomial part (exponents >= 0), a finite pole s carries
    exponents < 0 on (t - s).
    """

    p: int
    terms: Mapping[Key, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        check_modulus(self.p)
        clean = {}
        for (s, j), c in self.terms.items():
            c %= self.p
            if not c:
                continue
            if s is None and j < 0 or s is not None and j >= 0:
                raise ValueError(f"term {(s, j)} is not in canonical partial-fraction form")
            if s is not None and not 0 <= s < self.p:
                raise ValueError(f"pole {s} is not a canonical element of F_{self.p}")
            clean[(s, j)] = c
        object.__setattr__(self, "terms", dict(sorted(clean.items(), key=_term_order)))

    @classmethod
    def zero(cls, p: int) -> RatDifferential:
        return cls(p, {})

    @classmethod
    def from_rational(
        cls, num: Sequence[int], poles: Mapping[int, int], p: int
    ) -> RatDifferential:
        """num(t) / prod (t - s)^poles[s] * dt, expanded into partial fractions."""
        num = poly_trim(x % p for x in num)
        out: dict[Key, int] = {}
        denom = [1]
        for s, e in poles.items():
            for _ in range(e):
                denom = poly_mul(denom, [-s % p, 1], p)
        quot, rem = poly_divmod(num, denom, p)
        for j, c in enumerate(quot):
            _acc(out, (POLY, j), c, p)
        for s, e in poles.items():
            if e <= 0:
                continue
            # rem / denom = h(t) / (t-s)^e with h = rem / other factors; its
            # Laurent tail at s gives the principal part
            other = [1]
            for s2, e2 in poles.items():
                if s2 != s:
                    for _ in range(e2):
                        other = poly_mul(other, [-s2 % p, 1], p)
            h = _series_quotient(taylor_shift(rem, s, p), taylor_shift(other, s, p), e, p)
            for i, c in enumerate(h):
                _acc(out, (s % p, i - e), c, p)
        return cls(p, out)

    def __add__(self, other: RatDifferential) -> RatDifferential:
        self._check(other)
        out = dict(self.terms)
        for key, c in other.terms.items():
            _acc(out, key, c, self.p)
        return RatDifferential(self.p, out)

    def scale(self, c: int) -> RatDifferential:
        return RatDifferential(self.p, {k: v * c for k, v in self.terms.items()})

    def __sub__(self, other: RatDifferential) -> RatDifferential:
        return self + other.scale(-1)

    def _check(self, other: RatDifferential) -> None:
        if other.p != self.p:
            raise ValueError(f"modulus mismatch: {self.p} vs {other.p}")

    def mul_poly(self, g: Sequence[int]) -> RatDifferential:
        """g(t) * omega, re-expanded into canonical form."""
        p = self.p
        g = poly_trim(x % p for x in g)
        out: dict[Key, int] = {}
        poly_part = [0] * (1 + max((j for s, j in self.terms if s is None), default=-1))
        for (s, j), c in self.terms.items():
            if s is None:
                poly_part[j] = c
        for j, c in enumerate(poly_mul(g, poly_part, p)):
            _acc(out, (POLY, j), c, p)
        gs_cache: dict[int, list[int]] = {}
        for (s, j), c in self.terms.items():
            if s is None:
                continue
            if s not in gs_cache:
                gs_cache[s] = taylor_shift(g, s, p)
            # g(t) (t-s)^j = sum_i g_i (t-s)^{i+j}
            tail = []
            for i, gi in enumerate(gs_cache[s]):
                e = i + j
                if e < 0:
                    _acc(out, (s, e), c * gi, p)
                else:
                    tail.extend([0] * (e + 1 - len(tail)))
                    tail[e] = (tail[e] + c * gi) % p
            if tail:
                # sum tail_e (t-s)^e back into powers of t
                for d, coeff in enumerate(taylor_shift(tail, -s % p, p)):
                    _acc(out, (POLY, d), coeff, p)
        return RatDifferential(p, out)

    def pole_orders(self) -> dict[int, int]:
        orders: dict[int, int] = {}
        for s, j in self.terms:
            if s is not None:
                orders[s] = max(orders.get(s, 0), -j)
        return orders

    def poly_degree(self) -> int:
        return max((j for s, j in self.terms if s is None), default=-1)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (s, j), c in self.terms.items():
            base = "t" if s is None else ("t" if s == 0 else f"(t-{s})")
            mono = "1" if j == 0 else (base if j == 1 else f"{base}^{j}")
            parts.append(f"{c}*{mono}")
        return "(" + " + ".join(parts) + ")*dt"


def _term_order(item):
    (s, j), _ = item
    return (-1 if s is None else s, j)


def _acc(out: dict, key, c: int, p: int) -> None:
    v = (out.get(key, 0) + c) % p
    if v:
        out[key] = v
    else:
        out.pop(key, None)


def _series_quotient(a: Sequence[int], b: Sequence[int], n: int, p: int) -> list[int]:
    """First n coefficients of the power series a / b (b[0] != 0)."""
    a = list(a) + [0] * n
    inv = inv_mod(b[0], p)
    q: list[int] = []
    for i in range(n):
        c = a[i]
        for j in range(1, min(i, len(b) - 1) + 1):
            c -= b[j] * q[i - j]
        q.append(c * inv % p)
    return q


def cartier(omega: RatDifferential) -> RatDifferential:
    """C((t-s)^j dt) = (t-s)^((j+1)/p - 1) dt when p | j+1, else 0.

    Coefficients pass through unchanged: the p-th root is the identity on F_p.
    """
    p = omega.p
    out: dict[Key, int] = {}
    for (s, j), c in omega.terms.items():
        if (j + 1) % p == 0:
            _acc(out, (s, (j + 1) // p - 1), c, p)
    return RatDifferential(p, out)


@dataclass(frozen=True)
class TwistConfig:
    """Omega^1(S) twisted by L = O(d * infinity), S a set of finite F_p-points."""

    p: int
    d: int
    S: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        check_modulus(self.p)
        pts = tuple(sorted(s % self.p for s in self.S))
        if len(set(pts)) != len(pts):
            raise ValueError(f"S has repeated points: {self.S}")
        object.__setattr__(self, "S", pts)


def h0_dim(cfg: TwistConfig, m: int) -> int:
    return max(0, m * cfg.d + len(cfg.S) - 1)


def h0_basis(cfg: TwistConfig, m: int) -> list[RatDifferential]:
    """Basis t^i / prod_{s in S}(t - s) dt, 0 <= i <= m d + |S| - 2, of H^0(Omega^1(S) (x) L^m)."""
    if m < 1:
        raise ValueError("m must be positive")
    poles = {s: 1 for s in cfg.S}
    return [
        RatDifferential.from_rational([0] * i + [1], poles, cfg.p)
        for i in range(h0_dim(cfg, m))
    ]


def _coordinate_keys(diffs: Sequence[RatDifferential]) -> list[Key]:
    keys = {key for w in diffs for key in w.terms}
    return sorted(keys, key=lambda k: (-1 if k[0] is None else k[0], k[1]))


def _vectors(diffs: Sequence[RatDifferential], keys: Sequence[Key]) -> list[list[int]]:
    return [[w.terms.get(k, 0) for k in keys] for w in diffs]


@dataclass(frozen=True)
class TraceReport:
    p: int
    d: int
    S: tuple[int, ...]
    source_dim: int
    target_dim: int
    rank: int
    surjective: bool
    contained: bool = True


def cartier_matrix(cfg: TwistConfig) -> tuple[FpMatrix, list[RatDifferential], list[RatDifferential]]:
    """Matrix of C from H^0(.. L^p) to coordinates in the H^0(.. L) basis, one row per source element.

    Raises ValueError if some image falls outside the target space.
    """
    p = cfg.p
    src, tgt = h0_basis(cfg, p), h0_basis(cfg, 1)
    images = [cartier(w) for w in src]
    keys = _coordinate_keys(list(tgt) + images)
    tmat = FpMatrix(p, tuple(tuple(v) for v in _vectors(tgt, keys)), len(keys))
    rows = []
    for v in _vectors(images, keys):
        c = solve_in_basis(tmat, v)
        if c is None:
            raise ValueError("Cartier image left the target space")
        rows.append(tuple(c))
    return FpMatrix(p, tuple(rows), len(tgt)), src, tgt


def verify_trace_surjective(cfg: TwistConfig) -> TraceReport:
    """Rank of C: H^0(Omega^1(S) (x) L^p) -> H^0(Omega^1(S) (x) L)."""
    if cfg.d < 0:
        raise ValueError(f"need deg L = d >= 0 (> n(P^1) = -1), got {cfg.d}")
    p = cfg.p
    src, tgt = h0_basis(cfg, p), h0_basis(cfg, 1)
    images = [cartier(w) for w in src]
    keys = _coordinate_keys(list(tgt) + images)
    ncols = len(keys)
    target = rref(FpMatrix(p, tuple(tuple(v) for v in _vectors(tgt, keys)), ncols))
    tbasis = FpMatrix(p, target.echelon.rows[: target.rank], ncols)
    img = FpMatrix(p, tuple(tuple(v) for v in _vectors(images, keys)), ncols)
    contained = all(subspace_contains(tbasis, r) for r in img.rows)
    r = rref(img).rank
    return TraceReport(p, cfg.d, cfg.S, len(src), len(tgt), r,
                       contained and r == len(tgt), contained)


# ---------------------------------------------------------------------------
# Tango number


def tango_sum(f: Sequence[int], p: int) -> int:
    """sum over points of P^1 of floor(ord_x(df) / p), for a polynomial f.

    A finite irreducible factor pi of f' with multiplicity m contributes
    deg(pi) * floor(m / p); infinity contributes floor((-deg f' - 2) / p).
    """
    check_modulus(p)
    df = poly_deriv(poly_trim(x % p for x in f), p)
    if not df:
        raise ValueError("f' = 0: f is a p-th power in F_p(t)")
    finite = sum((len(P) - 1) * (m // p) for m, P in squarefree_decomposition(df, p).items())
    return finite + (-(len(df) - 1) - 2) // p


@dataclass(frozen=True)
class TangoSearchResult:
    p: int
    max_deg: int
    max_value: int
    witness_coeffs: tuple[int, ...]
    candidates: int
    violations: int
    family: str = "polynomials f in F_p[t] with deg f <= max_deg and f' != 0"


MAX_CANDIDATES = 10**7


def _candidates(p: int, max_deg: int, lead: int | None = None) -> Iterator[tuple[int, ...]]:
    # coefficient tuples (c_0, ..., c_max_deg) in lexicographic order
    if lead is None:
        yield from itertools.product(range(p), repeat=max_deg + 1)
        return
    for rest in itertools.product(range(p), repeat=max_deg):
        yield (lead,) + rest


def _search_chunk(args: tuple[int, int, int | None]) -> tuple[int | None, tuple[int, ...], int, int]:
    p, max_deg, lead = args
    best: int | None = None
    witness: tuple[int, ...] = ()
    count = violations = 0
    for c in _candidates(p, max_deg, lead):
        if not any(i * x % p for i, x in enumerate(c)):
            continue
        count += 1
        v = tango_sum(c, p)
        if v > -1:
            violations += 1
        if best is None or v > best:
            best, witness = v, c
    return best, witness, count, violations


def tango_search(p: int, max_deg: int, *, workers: int = 1,
                 max_candidates: int = MAX_CANDIDATES) -> TangoSearchResult:
    """Exhaustive maximum of tango_sum over polynomials of degree <= max_deg.

    Ties go to the lexicographically smallest coefficient sequence (c_0 first).
    """
    check_modulus(p)
    if max_deg < 1:
        raise ValueError("max_deg must be >= 1 (constants have f' = 0)")
    total = p ** (max_deg + 1)
    if total > max_candidates:
        raise SearchSpaceTooLarge(f"{total} candidates exceed the cap of {max_candidates}")
    if workers <= 1:
        chunks = [_search_chunk((p, max_deg, None))]
    else:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as ex:
            chunks = list(ex.map(_search_chunk, [(p, max_deg, c0) for c0 in range(p)]))
    best: int | None = None
    witness: tuple[int, ...] = ()
    count = violations = 0
    # chunks arrive in increasing c_0, so a strict > keeps the lexicographic minimum
    for b, w, n, v in chunks:
        count += n
        violations += v
        if b is not None and (best is None or b > best):
            best, witness = b, w
    assert best is not None
    return TangoSearchResult(p, max_deg, best, witness, count, violations)
