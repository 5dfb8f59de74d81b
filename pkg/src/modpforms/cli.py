"""Command-line driver.

Exit status: 0 when every verdict in the run is positive, 1 when some
verdict is negative, 2 for usage errors, 3 for computational guards
(precision shortfall, enumeration cap), 4 if a certification step fails.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from typing import Any, Sequence

from .cartier_p1 import SearchSpaceTooLarge, TwistConfig, tango_search, verify_trace_surjective
from .harness import (
    CertificationError,
    default_workers,
    load_manifest,
    scan_level1,
    summarize,
    verify_level1,
    verify_manifest,
)
from .level1 import PrecisionError, dim_Mk, victor_miller_basis
from .qseries import u_slice

EXIT_OK, EXIT_VERDICT, EXIT_USAGE, EXIT_GUARD, EXIT_INTERNAL = 0, 1, 2, 3, 4


def _dump(obj: Any) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _table(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    cells = [list(map(str, header))] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _report_table(reports) -> str:
    rows = [
        (r.p, r.k, r.k0, r.k_prime, f"{r.dim_k}->{r.dim_k_prime}", r.image_rank,
         "surjective" if r.surjective else ("NOT CONTAINED" if not r.contained else "NOT ONTO"))
        for r in reports
    ]
    out = _table(("p", "k", "k0", "k'", "dims", "rank", "verdict"), rows)
    s = summarize(reports)
    return out + f"{s.total} weights, {s.failures} failures ({s.within_theorem_failures} within theorem hypotheses)\n"


def _reports_out(reports, fmt: str) -> tuple[str, int]:
    text = _dump([r.to_dict() for r in reports]) if fmt == "json" else _report_table(reports)
    return text, EXIT_OK if all(r.surjective for r in reports) else EXIT_VERDICT


def cmd_verify_up(a) -> tuple[str, int]:
    return _reports_out([verify_level1(a.p, a.k, allow_below_range=a.allow_below_range)], a.format)


def cmd_scan_up(a) -> tuple[str, int]:
    kmin = a.kmin if a.kmin is not None else a.p + 2
    workers = a.workers if a.workers is not None else default_workers()
    return _reports_out(scan_level1(a.p, kmin, a.kmax, workers=workers), a.format)


def _basis(a):
    prec = a.precision if a.precision is not None else a.p * (dim_Mk(a.k) + 2)
    return victor_miller_basis(a.k, prec, a.p)


def cmd_basis(a) -> tuple[str, int]:
    fs = _basis(a)
    if a.format == "json":
        return _dump({"k": fs.k, "p": fs.p, "precision": fs.prec, "dim": fs.dim,
                      "rows": [list(r) for r in fs.basis.rows]}), EXIT_OK
    lines = [f"M_{fs.k} over F_{fs.p}: dim {fs.dim}, precision {fs.prec}"]
    lines += [f"f_{i} = {f}" for i, f in enumerate(fs.rows())]
    return "\n".join(lines) + "\n", EXIT_OK


def cmd_u_apply(a) -> tuple[str, int]:
    fs = _basis(a)
    if not 0 <= a.basis_row < fs.dim:
        raise ValueError(f"basis row {a.basis_row} out of range: dim M_{a.k} = {fs.dim}")
    f = fs.row(a.basis_row)
    uf = u_slice(f)
    if a.format == "json":
        return _dump({"p": a.p, "k": a.k, "basis_row": a.basis_row, "source_precision": f.prec,
                      "precision": uf.prec, "coeffs": list(uf.coeffs)}), EXIT_OK
    return f"U(f_{a.basis_row}) = {uf}\n", EXIT_OK


def _parse_points(text: str) -> tuple[int, ...]:
    text = text.strip()
    return tuple(int(x) for x in text.split(",") if x.strip()) if text else ()


def cmd_cartier_verify(a) -> tuple[str, int]:
    rep = verify_trace_surjective(TwistConfig(a.p, a.d, _parse_points(a.S)))
    code = EXIT_OK if rep.surjective else EXIT_VERDICT
    if a.format == "json":
        d = asdict(rep)
        d["S"] = list(d["S"])
        return _dump(d), code
    row = (rep.p, rep.d, "{" + ",".join(map(str, rep.S)) + "}", rep.source_dim, rep.target_dim,
           rep.rank, "surjective" if rep.surjective else "NOT ONTO")
    return _table(("p", "d", "S", "src", "tgt", "rank", "verdict"), [row]), code


def cmd_tango_search(a) -> tuple[str, int]:
    workers = a.workers if a.workers is not None else 1
    res = tango_search(a.p, a.max_deg, workers=workers)
    code = EXIT_OK if res.max_value == -1 and res.violations == 0 else EXIT_VERDICT
    if a.format == "json":
        d = asdict(res)
        d["witness_coeffs"] = list(d["witness_coeffs"])
        return _dump(d), code
    return (f"p={res.p} max_deg={res.max_deg}: max_value {res.max_value} "
            f"(witness coeffs {list(res.witness_coeffs)}, {res.candidates} candidates, "
            f"{res.violations} above -1)\n"), code


def cmd_manifest_verify(a) -> tuple[str, int]:
    m = load_manifest(a.manifest, p=a.p)
    reports = [verify_manifest(m, k, allow_below_range=a.allow_below_range) for k in a.k]
    return _reports_out(reports, a.format)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modpforms",
        description="Exact checks on mod-p modular forms and the Cartier operator on P^1.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(func=func)
        sp.add_argument("--format", choices=("json", "table"), default="table")
        return sp

    sp = add("verify-up", cmd_verify_up, "check U: M_k -> M_k' is onto (level one)")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--allow-below-range", action="store_true",
                    help="permit k < p+2 (reported as outside_theorem)")

    sp = add("scan-up", cmd_scan_up, "verify-up over every even k in a range")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--kmin", type=int, default=None, help="default p+2")
    sp.add_argument("--kmax", type=int, required=True)
    sp.add_argument("--workers", type=int, default=None,
                    help="worker processes (default: $MODPFORMS_WORKERS or CPU count)")

    for name, func, help in (("basis", cmd_basis, "Victor-Miller basis of M_k mod p"),
                             ("u-apply", cmd_u_apply, "apply U to one basis form")):
        sp = add(name, func, help)
        sp.add_argument("--p", type=int, required=True)
        sp.add_argument("--k", type=int, required=True)
        sp.add_argument("--precision", type=int, default=None,
                        help="number of q-expansion coefficients (default p*(dim+2))")
        if name == "u-apply":
            sp.add_argument("--basis-row", type=int, required=True)

    sp = add("cartier-verify", cmd_cartier_verify,
             "surjectivity of C: H0(Omega(S) L^p) -> H0(Omega(S) L) on P^1")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--d", type=int, required=True, help="L = O(d * infinity)")
    sp.add_argument("--S", default="", help="comma-separated points of F_p, e.g. 0,1")

    sp = add("tango-search", cmd_tango_search, "exhaustive Tango sum maximum over polynomials")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--max-deg", type=int, required=True)
    sp.add_argument("--workers", type=int, default=None)

    sp = add("manifest-verify", cmd_manifest_verify, "verify-up for a generator manifest")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--k", type=int, nargs="+", required=True)
    sp.add_argument("--p", type=int, default=None, help="override the manifest's prime")
    sp.add_argument("--allow-below-range", action="store_true")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text, code = args.func(args)
    except (PrecisionError, SearchSpaceTooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except CertificationError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
