import json
import os
import subprocess
import sys

import pytest

from modpforms.cli import EXIT_GUARD, EXIT_OK, EXIT_USAGE, EXIT_VERDICT, main
from modpforms.harness import VERDICT_FIELDS, level1_manifest_data, verify_level1
from modpforms.level1 import victor_miller_basis
from modpforms.qseries import u_slice


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_scan_json(capsys):
    code, out, _ = run(capsys, "scan-up", "--p", "5", "--kmax", "60", "--format", "json",
                       "--workers", "1")
    assert code == EXIT_OK
    reports = json.loads(out)
    assert [r["k"] for r in reports] == list(range(8, 61, 2))
    assert all(r["surjective"] for r in reports)
    assert set(VERDICT_FIELDS) <= set(reports[0])


def test_scan_table_has_summary(capsys):
    code, out, _ = run(capsys, "scan-up", "--p", "7", "--kmin", "10", "--kmax", "20",
                       "--workers", "1")
    assert code == EXIT_OK
    assert out.splitlines()[0].split() == ["p", "k", "k0", "k'", "dims", "rank", "verdict"]
    assert "0 failures" in out


def test_scan_negative_verdict_exit(capsys):
    # p = 3 level one is outside the theorem and some weights fail
    code, _, _ = run(capsys, "scan-up", "--p", "3", "--kmax", "40", "--workers", "1")
    assert code == EXIT_VERDICT


def test_verify_up(capsys):
    code, out, _ = run(capsys, "verify-up", "--p", "5", "--k", "16", "--format", "json")
    assert code == EXIT_OK
    assert json.loads(out) == [verify_level1(5, 16).to_dict()]


def test_verify_up_below_range(capsys):
    code, _, err = run(capsys, "verify-up", "--p", "11", "--k", "12")
    assert code == EXIT_USAGE and "below the range" in err
    code, out, _ = run(capsys, "verify-up", "--p", "11", "--k", "12", "--allow-below-range",
                       "--format", "json")
    assert code == EXIT_OK and json.loads(out)[0]["hypothesis_flag"] == "outside_theorem"


def test_u_apply(capsys):
    code, out, _ = run(capsys, "u-apply", "--p", "5", "--k", "16", "--basis-row", "1",
                       "--format", "json")
    assert code == EXIT_OK
    d = json.loads(out)
    fs = victor_miller_basis(16, 20, 5)
    assert d["coeffs"] == list(u_slice(fs.row(1)).coeffs)
    code, out, _ = run(capsys, "u-apply", "--p", "5", "--k", "16", "--basis-row", "0")
    assert out.startswith("U(f_0) = ")


def test_u_apply_bad_row(capsys):
    code, _, _ = run(capsys, "u-apply", "--p", "5", "--k", "16", "--basis-row", "2")
    assert code == EXIT_USAGE


def test_basis_precision_guard(capsys):
    code, _, err = run(capsys, "basis", "--p", "5", "--k", "48", "--precision", "3")
    assert code == EXIT_GUARD


def test_basis(capsys):
    code, out, _ = run(capsys, "basis", "--p", "7", "--k", "12", "--precision", "6",
                       "--format", "json")
    d = json.loads(out)
    assert code == EXIT_OK and d["dim"] == 2 and d["rows"][1][:3] == [0, 1, 4]


def test_tango(capsys):
    code, out, _ = run(capsys, "tango-search", "--p", "3", "--max-deg", "4")
    assert code == EXIT_OK and "max_value -1" in out
    code, out, _ = run(capsys, "tango-search", "--p", "3", "--max-deg", "4", "--format", "json")
    d = json.loads(out)
    assert {"p", "max_deg", "max_value", "witness_coeffs"} <= set(d) and d["max_value"] == -1


def test_tango_guard(capsys):
    code, _, _ = run(capsys, "tango-search", "--p", "11", "--max-deg", "8")
    assert code == EXIT_GUARD


def test_cartier_verify(capsys):
    code, out, _ = run(capsys, "cartier-verify", "--p", "5", "--d", "0", "--S", "0,1",
                       "--format", "json")
    d = json.loads(out)
    assert code == EXIT_OK
    assert d == {"p": 5, "d": 0, "S": [0, 1], "source_dim": 1, "target_dim": 1, "rank": 1,
                 "surjective": True, "contained": True}


def test_cartier_verify_rejects(capsys):
    assert run(capsys, "cartier-verify", "--p", "5", "--d", "-1", "--S", "0")[0] == EXIT_USAGE
    assert run(capsys, "cartier-verify", "--p", "6", "--d", "1")[0] == EXIT_USAGE


def test_manifest_verify(capsys, tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps(level1_manifest_data(200, 100)))
    code, out, _ = run(capsys, "manifest-verify", "--manifest", str(path), "--k", "16", "26",
                       "--format", "json")
    assert code == EXIT_OK
    reports = json.loads(out)
    assert [r["source"] for r in reports] == ["manifest:SL2(Z)"] * 2
    for r in reports:
        assert {f: r[f] for f in VERDICT_FIELDS} == verify_level1(5, r["k"]).verdict()


def test_manifest_verify_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"label": "wt2", "p": 5, "cusp_width": 1, "index": 6,
                               "generators": [{"weight": 2, "coeffs": list(range(60))}]}))
    code, _, err = run(capsys, "manifest-verify", "--manifest", str(bad), "--k", "3",
                       "--allow-below-range")
    assert code == EXIT_USAGE and "weight 3" in err
    short = tmp_path / "short.json"
    short.write_text(json.dumps(level1_manifest_data(12, 100)))
    assert run(capsys, "manifest-verify", "--manifest", str(short), "--k", "36")[0] == EXIT_GUARD
    assert run(capsys, "manifest-verify", "--manifest", str(tmp_path / "none.json"),
               "--k", "16")[0] == EXIT_USAGE


def test_usage_error_exit():
    with pytest.raises(SystemExit) as exc:
        main(["scan-up"])
    assert exc.value.code == EXIT_USAGE


def _cli(*argv, env_workers):
    env = dict(os.environ, MODPFORMS_WORKERS=str(env_workers))
    return subprocess.run([sys.executable, "-m", "modpforms", *argv], env=env,
                          capture_output=True, check=False)


def test_deterministic_output_across_worker_counts():
    args = ("scan-up", "--p", "7", "--kmax", "60", "--format", "json")
    a, b, c = _cli(*args, env_workers=1), _cli(*args, env_workers=8), _cli(*args, env_workers=1)
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout == c.stdout
