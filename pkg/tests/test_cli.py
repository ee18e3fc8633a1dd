import json
import subprocess
import sys
from pathlib import Path

import pytest

from periodring.cli import EXIT_FAIL, EXIT_OK, EXIT_PARSE, EXIT_PRECISION, PROFILE_ENV, parse_spec, run

SPECS = Path(__file__).resolve().parent.parent / "specs"
TATE = str(SPECS / "tate_curve.json")
KUMMER = str(SPECS / "kummer.json")
SURFACE = str(SPECS / "tate_surface.json")


def doc(**motive):
    base = {"p": "5", "motive": {"r": "1", "s": "1",
                                 "u": [[{"valuation": "1", "unit": ["6"], "name": "q"}]]}}
    base["motive"].update(motive)
    return base


def test_periods_json_golden():
    out, code = run(["periods", TATE, "--json"])
    assert code == EXIT_OK
    rep = json.loads(out)
    assert rep["period_matrix"]["canonical"] == "[[t, 0], [l[q], 1]]"
    assert rep["comparison_matrix"]["canonical"] == "[[t^-1, -l[q]*t^-1], [0, 1]]"
    assert rep["inverse_check"] is True


def test_json_output_is_deterministic():
    a, _ = run(["periods", SURFACE, "--json"])
    b, _ = run(["periods", SURFACE, "--json"])
    assert a == b


def test_text_output():
    out, code = run(["periods", TATE])
    assert code == EXIT_OK and "canonical: [[t, 0], [l[q], 1]]" in out


def test_monodromy_verb():
    rep = json.loads(run(["monodromy", SURFACE, "--json"])[0])
    assert rep["rows"] == ["dlog1", "dlog2", "ds1", "ds2"]
    assert rep["matrix"][0][2] == "1" and rep["matrix"][1][3] == "1"
    assert sum(v != "0" for row in rep["matrix"] for v in row) == 2


def test_frobenius_verb():
    out, code = run(["frobenius", KUMMER, "--json"])
    assert code == EXIT_OK
    assert json.loads(out)["matrix"]["canonical"] == "[[1/2, 1/2*logK[a]], [0, 1]]"


def test_frobenius_needs_a_unit():
    out, code = run(["frobenius", TATE])
    assert code == EXIT_FAIL and "verification failure" in out


def test_galois_check_verb():
    out, code = run(["galois-check", KUMMER, "--concrete", "--samples", "3", "--json"])
    assert code == EXIT_OK
    rep = json.loads(out)
    assert all(s["symbolic_zero"] and s["concrete_ok"] for s in rep["samples"])


def test_limit_verify_verb():
    out, code = run(["limit-verify", KUMMER, "--json"])
    assert code == EXIT_OK
    assert all(r["status"] == "PASS" for r in json.loads(out)["pairs"])


def test_raynaud_verb():
    out, code = run(["raynaud-shape", "5b", "--json"])
    assert code == EXIT_OK and json.loads(out)["case"] == "iv"
    assert run(["raynaud-shape", "7"])[1] == EXIT_PARSE


def test_precision_exhaustion_exit_code():
    out, code = run(["periods", KUMMER, "--depth", "2", "--level", "1", "--concrete"])
    assert code == EXIT_PRECISION
    assert run(["periods", KUMMER, "--depth", "4", "--level", "3", "--concrete"])[1] == EXIT_PRECISION


@pytest.mark.parametrize("argv", [["periods", "missing.json"], ["periods", TATE, "--depth", "9"],
                                  ["periods", TATE, "--fil", "6"]])
def test_parse_errors(argv):
    assert run(argv)[1] == EXIT_PARSE


def test_force_lifts_the_guard():
    out, code = run(["periods", TATE, "--fil", "6", "--force"])
    assert code == EXIT_OK


def test_argparse_errors_exit_4():
    with pytest.raises(SystemExit) as exc:
        run(["bogus"])
    assert exc.value.code == EXIT_PARSE


@pytest.mark.parametrize("bad", [
    {"p": 5},
    {"p": "4", "motive": doc()["motive"]},
    doc(u=[[{"valuation": 1.0, "unit": ["6"]}]]),
    doc(u=[[{"valuation": "1", "unit": ["5"]}]]),
    doc(r="2"),
])
def test_spec_validation(bad):
    with pytest.raises(ValueError):
        parse_spec(bad)


def test_overrides_beat_spec_and_profile(monkeypatch):
    monkeypatch.setenv(PROFILE_ENV, "fast")
    s = parse_spec(doc())
    assert (s.m, s.N, s.depth) == (10, 2, 2)
    s = parse_spec(dict(doc(), precision={"m": "14"}), {"m": 20})
    assert s.m == 20
    assert parse_spec(dict(doc(), precision={"m": "14"})).m == 14
    monkeypatch.setenv(PROFILE_ENV, "nonsense")
    with pytest.raises(ValueError):
        parse_spec(doc())


def test_stdin_and_malformed_json():
    bad = subprocess.run([sys.executable, "-m", "periodring", "periods", "-"], input='{"p": 5,',
                         capture_output=True, text=True)
    assert bad.returncode == EXIT_PARSE
    assert "-:1:" in bad.stderr or "-:2:" in bad.stderr


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "periodring", "periods", TATE], capture_output=True, text=True)
    assert res.returncode == 0 and "l[q]" in res.stdout
