"""Exact verification that U maps M_k onto M_{k'} over F_p.

The certification argument, enforced at runtime by ``_certify``:

* truncating to length L is injective on the q-expansion space of M_k,
  because its echelon basis has every pivot below L;
* M_{k'} sits inside M_k on q-expansions (k = k' mod p-1 and k' <= k;
  multiplying by the Hasse invariant does not change q-expansions mod p);
* U maps M_k into some M_{k''} with k'' <= k, k'' = k mod p-1.

So containment plus equal rank at length L certifies equality of the
image and M_{k'} as subspaces, not just agreement of truncations.
"""
from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Literal, Sequence

from .fp_linalg import FpMatrix, check_modulus, rank, rref, subspace_contains
from .level1 import PrecisionError, dim_Mk, victor_miller_basis
from .qseries import QExp, u_slice
from .weights import target_weight

WITHIN = "within_theorem"
OUTSIDE = "outside_theorem"
HypothesisFlag = Literal["within_theorem", "outside_theorem"]

WORKERS_ENV = "MODPFORMS_WORKERS"

# fields that carry the mathematical verdict; precision and provenance may
# legitimately differ between the built-in and manifest paths
VERDICT_FIELDS = (
    "p", "k", "k0", "k_prime", "dim_k", "dim_k_prime", "image_rank",
    "contained", "surjective", "serre_bound", "hypothesis_flag",
)


class CertificationError(RuntimeError):
    """A step of the certification argument did not hold; indicates a bug."""


class ManifestError(ValueError):
    """Malformed or inconsistent generator manifest."""


class ManifestPrecisionError(ManifestError, PrecisionError):
    """Generators are not known to enough coefficients."""


class WeightNotRepresentable(ManifestError):
    """No monomial in the generators has the requested weight."""


def _certify(cond: bool, msg: str) -> None:
    if not cond:
        raise CertificationError(msg)


@dataclass(frozen=True)
class SurjectivityReport:
    p: int
    k: int
    k0: int
    k_prime: int
    dim_k: int
    dim_k_prime: int
    image_rank: int
    contained: bool
    surjective: bool
    precision_used: int
    serre_bound: int
    hypothesis_flag: HypothesisFlag
    source: str = "level1"
    dimension_source: str = "formula"

    def verdict(self) -> dict:
        d = asdict(self)
        return {f: d[f] for f in VERDICT_FIELDS}

    def to_dict(self) -> dict:
        return asdict(self)


def hypothesis_flag(p: int, k: int) -> HypothesisFlag:
    return WITHIN if p >= 5 and k >= p + 2 else OUTSIDE


def _check_weight(p: int, k: int, allow_below_range: bool) -> None:
    if k < 2:
        raise ValueError(f"weight must be >= 2, got {k}")
    if k < p + 2 and not allow_below_range:
        raise ValueError(f"k = {k} is below the range k >= p+2 = {p + 2}")


def _compare(
    images: Sequence[QExp], target: FpMatrix, length: int
) -> tuple[int, bool]:
    """Rank of the truncated images and whether each lies in ``target``."""
    p = target.p
    img = FpMatrix(p, tuple(f.truncate(length).coeffs for f in images), length)
    contained = all(subspace_contains(target, r) for r in img.rows)
    return rank(img), contained


def verify_level1(p: int, k: int, *, allow_below_range: bool = False) -> SurjectivityReport:
    """Check that U: M_k -> M_{k'} is onto for level one over F_p."""
    check_modulus(p)
    _check_weight(p, k, allow_below_range)
    wt = target_weight(k, p)
    kp = wt.k_prime
    _certify(kp <= k and (k - kp) % (p - 1) == 0, f"k' = {kp} not below k = {k} mod p-1")

    dim_k, dim_kp = dim_Mk(k), dim_Mk(kp)
    length = dim_k + 1
    n_src = p * (length + 1)
    flag = hypothesis_flag(p, k)
    if k % 2:
        # no level-one forms of odd weight; vacuous
        return SurjectivityReport(p, k, wt.k0, kp, 0, 0, 0, True, True, n_src,
                                  wt.serre_bound, flag)

    src = victor_miller_basis(k, n_src, p)
    tgt = victor_miller_basis(kp, length, p)
    _certify(src.dim == dim_k and tgt.dim == dim_kp, "basis dimension mismatch")
    _certify(rref(src.basis.truncate_cols(length)).rank == dim_k,
             "truncation to length L is not injective on M_k")
    _certify(dim_kp <= dim_k, "dim M_k' exceeds dim M_k")

    images = [u_slice(f) for f in src.rows()]
    _certify(all(f.prec >= length for f in images), "U-images shorter than L")
    image_rank, contained = _compare(images, tgt.basis, length)
    _certify(image_rank <= dim_k, "image rank exceeds source dimension")
    return SurjectivityReport(
        p, k, wt.k0, kp, dim_k, dim_kp, image_rank, contained,
        contained and image_rank == dim_kp, n_src, wt.serre_bound, flag,
    )


def _verify_cell(args: tuple[int, int]) -> SurjectivityReport:
    return verify_level1(*args)


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        n = int(env)
        if n < 1:
            raise ValueError(f"{WORKERS_ENV} must be >= 1")
        return n
    return os.cpu_count() or 1


def scan_level1(
    p: int, k_min: int, k_max: int, *, workers: int = 1
) -> list[SurjectivityReport]:
    """Reports for every even k in [k_min, k_max], in increasing k."""
    check_modulus(p)
    if k_min > k_max:
        return []
    if k_min < p + 2:
        raise ValueError(f"k_min = {k_min} is below p+2 = {p + 2}")
    cells = [(p, k) for k in range(k_min, k_max + 1) if k % 2 == 0]
    if workers <= 1 or len(cells) < 2:
        return [_verify_cell(c) for c in cells]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        # map preserves input order regardless of completion order
        return list(ex.map(_verify_cell, cells, chunksize=max(1, len(cells) // (4 * workers))))


@dataclass(frozen=True)
class ScanSummary:
    total: int
    surjective: int
    failures: int
    within_theorem_failures: int
    failed_weights: tuple[tuple[int, int], ...] = field(default=())


def summarize(reports: Iterable[SurjectivityReport]) -> ScanSummary:
    reports = list(reports)
    bad = [r for r in reports if not r.surjective]
    return ScanSummary(
        total=len(reports),
        surjective=len(reports) - len(bad),
        failures=len(bad),
        within_theorem_failures=sum(r.hypothesis_flag == WITHIN for r in bad),
        failed_weights=tuple((r.p, r.k) for r in bad),
    )


# ---------------------------------------------------------------------------
# manifests: user-supplied ring generators for a general group


@dataclass(frozen=True)
class Generator:
    weight: int
    coeffs: tuple[int, ...]


@dataclass(frozen=True)
class GeneratorManifest:
    """Generators of a graded ring of forms, as expansions in q^(1/cusp_width).

    Coefficients are stored already reduced mod p and indexed by powers of
    the local parameter q^(1/cusp_width); U slices those indices by p.
    """

    label: str
    p: int
    cusp_width: int
    index: int
    generators: tuple[Generator, ...]
    dimension_table: dict[int, int] | None = None

    def __post_init__(self) -> None:
        check_modulus(self.p)
        if self.cusp_width < 1 or self.index < 1:
            raise ManifestError("cusp_width and index must be positive")
        if not self.generators:
            raise ManifestError("manifest has no generators")
        for g in self.generators:
            if g.weight <= 0 or g.weight % 2:
                raise ManifestError(f"generator weight {g.weight} is not a positive even integer")
            need = self.index * g.weight // 12 + 2
            if len(g.coeffs) < need:
                raise ManifestPrecisionError(
                    f"generator of weight {g.weight} has {len(g.coeffs)} coefficients, "
                    f"needs at least {need}"
                )

    def sturm_length(self, k: int) -> int:
        return k * self.index // 12 + 2

    def to_json(self) -> dict:
        d = {
            "label": self.label,
            "p": self.p,
            "cusp_width": self.cusp_width,
            "index": self.index,
            "generators": [{"weight": g.weight, "coeffs": list(g.coeffs)} for g in self.generators],
        }
        if self.dimension_table is not None:
            d["dimension_table"] = {str(w): n for w, n in sorted(self.dimension_table.items())}
        return d


def parse_manifest(data: dict, p: int | None = None) -> GeneratorManifest:
    """Build a manifest from decoded JSON; ``p`` overrides the file's modulus."""
    try:
        p = int(p if p is not None else data["p"])
        check_modulus(p)
        gens = tuple(
            Generator(int(g["weight"]), tuple(int(c) % p for c in g["coeffs"]))
            for g in data["generators"]
        )
        table = data.get("dimension_table")
        if table is not None:
            table = {int(w): int(n) for w, n in table.items()}
        return GeneratorManifest(
            label=str(data["label"]),
            p=p,
            cusp_width=int(data["cusp_width"]),
            index=int(data["index"]),
            generators=gens,
            dimension_table=table,
        )
    except (KeyError, TypeError) as exc:
        raise ManifestError(f"malformed manifest: {exc!r}") from exc


def load_manifest(path: str | Path, p: int | None = None) -> GeneratorManifest:
    with open(path, encoding="utf-8") as fh:
        return parse_manifest(json.load(fh), p)


def shipped_level1_manifest(p: int = 5) -> GeneratorManifest:
    """The bundled manifest with E4 and E6 as generators (level one)."""
    text = resources.files("modpforms").joinpath("data/level1_manifest.json").read_text("utf-8")
    return parse_manifest(json.loads(text), p)


def monomial_exponents(weights: Sequence[int], k: int) -> list[tuple[int, ...]]:
    """All exponent vectors e >= 0 with sum(e_i * weights[i]) == k."""
    if not weights:
        return [()] if k == 0 else []
    w, rest = weights[0], weights[1:]
    return [
        (a,) + tail
        for a in range(k // w + 1)
        for tail in monomial_exponents(rest, k - a * w)
    ]


def _monomial_span(m: GeneratorManifest, k: int, n: int) -> FpMatrix:
    exps = monomial_exponents([g.weight for g in m.generators], k)
    if not exps:
        raise WeightNotRepresentable(f"no monomial in the generators of {m.label!r} has weight {k}")
    short = [g.weight for g in m.generators if len(g.coeffs) < n]
    if short:
        raise ManifestPrecisionError(
            f"weight {k} needs generators to precision {n}; weights {short} are shorter"
        )
    gens = [QExp(m.p, g.coeffs[:n]) for g in m.generators]
    cache: dict[tuple[int, int], QExp] = {}

    def gpow(i: int, e: int) -> QExp:
        if (i, e) not in cache:
            cache[(i, e)] = gens[i] ** e
        return cache[(i, e)]

    rows = []
    for e in exps:
        f = QExp.one(m.p, n)
        for i, a in enumerate(e):
            if a:
                f = f * gpow(i, a)
        rows.append(f.coeffs)
    return FpMatrix(m.p, tuple(rows), n)


def _space_dim(m: GeneratorManifest, k: int, computed: int) -> tuple[int, str]:
    if m.dimension_table is None or k not in m.dimension_table:
        return computed, "rank_only"
    d = m.dimension_table[k]
    if d != computed:
        raise ManifestError(
            f"dimension table gives dim M_{k} = {d} but the generator monomials span {computed}"
        )
    return d, "table"


def verify_manifest(
    m: GeneratorManifest, k: int, *, allow_below_range: bool = False
) -> SurjectivityReport:
    """The level-one pipeline for the ring described by a manifest."""
    p = m.p
    _check_weight(p, k, allow_below_range)
    wt = target_weight(k, p)
    kp = wt.k_prime
    _certify(kp <= k and (k - kp) % (p - 1) == 0, f"k' = {kp} not below k = {k} mod p-1")

    length = m.sturm_length(k)
    n_src = p * length
    src = rref(_monomial_span(m, k, n_src))
    tgt = rref(_monomial_span(m, kp, length))
    dim_k, src_kind = _space_dim(m, k, src.rank)
    dim_kp, tgt_kind = _space_dim(m, kp, tgt.rank)
    _certify(all(c < length for c in src.pivots),
             "truncation to the Sturm length is not injective on the source span")

    basis = src.echelon.rows[: src.rank]
    images = [u_slice(QExp(p, r)) for r in basis]
    _certify(all(f.prec >= length for f in images), "U-images shorter than the Sturm length")
    target = FpMatrix(p, tgt.echelon.rows[: tgt.rank], length)
    image_rank, contained = _compare(images, target, length)
    kinds = {src_kind, tgt_kind}
    return SurjectivityReport(
        p, k, wt.k0, kp, dim_k, dim_kp, image_rank, contained,
        contained and image_rank == dim_kp, n_src, wt.serre_bound,
        hypothesis_flag(p, k),
        source=f"manifest:{m.label}",
        dimension_source="table" if kinds == {"table"} else "rank_only",
    )


def level1_manifest_data(n_coeffs: int, max_table_weight: int) -> dict:
    """Integer E4/E6 expansions and level-one dimensions, as manifest JSON."""
    from .level1 import _sigma_table

    s3, s5 = _sigma_table(n_coeffs, 3), _sigma_table(n_coeffs, 5)
    return {
        "label": "SL2(Z)",
        "p": 5,
        "cusp_width": 1,
        "index": 1,
        "generators": [
            {"weight": 4, "coeffs": [1] + [240 * s3[m] for m in range(1, n_coeffs)]},
            {"weight": 6, "coeffs": [1] + [-504 * s5[m] for m in range(1, n_coeffs)]},
        ],
        "dimension_table": {str(w): dim_Mk(w) for w in range(0, max_table_weight + 1, 2)},
    }


__all__ = [
    "CertificationError", "Generator", "GeneratorManifest", "ManifestError",
    "ManifestPrecisionError", "ScanSummary", "SurjectivityReport", "VERDICT_FIELDS",
    "WeightNotRepresentable", "default_workers", "hypothesis_flag",
    "level1_manifest_data", "load_manifest", "monomial_exponents", "parse_manifest",
    "scan_level1", "shipped_level1_manifest", "summarize", "verify_level1", "verify_manifest",
]
