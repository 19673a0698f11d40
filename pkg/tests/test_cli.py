import csv
import json
from fractions import Fraction as F

import pytest

from groupcut import PeriodicPWL, gmi, pi_k, rat
from groupcut.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_construct_pi_k(tmp_path, capsys):
    out = tmp_path / "f.json"
    code, stdout, _ = run(capsys, "construct", "pi-k", "--k", "4", "--b", "1/2",
                          "--out", str(out))
    assert code == 0
    assert "slopes (4)" in stdout
    assert PeriodicPWL.from_json(out.read_text()) == pi_k(4, F(1, 2))


def test_construct_gmi_and_round_trip_bytes(tmp_path, capsys):
    out = tmp_path / "g.json"
    assert run(capsys, "construct", "gmi", "--b", "1/3", "--out", str(out))[0] == 0
    blob = out.read_text()
    reserialized = json.dumps(PeriodicPWL.from_json(blob).to_dict(), indent=2) + "\n"
    assert reserialized == blob


def test_construct_rejects_bad_params(capsys):
    code, _, err = run(capsys, "construct", "pi-k", "--k", "1", "--b", "1/2")
    assert code == 2 and "k must be" in err
    code, _, err = run(capsys, "construct", "gmi", "--b", "0.5")
    assert code == 2
    code, _, err = run(capsys, "construct", "pi-k", "--b", "1/2")
    assert code == 2 and "--k" in err


def test_construct_pi_inf_prints_bound(tmp_path, capsys):
    out = tmp_path / "p.json"
    code, stdout, _ = run(capsys, "construct", "pi-inf", "--b", "1/2", "--K", "4",
                          "--out", str(out))
    assert code == 0
    assert "7/64" in stdout


def test_eval_1d_and_merged(tmp_path, capsys):
    f = tmp_path / "f.json"
    run(capsys, "construct", "gmi", "--b", "1/2", "--out", str(f))
    code, stdout, _ = run(capsys, "eval", str(f), "--x", "1/4")
    assert code == 0 and stdout.strip() == "1/2"
    m = tmp_path / "m.json"
    run(capsys, "construct", "phi-m", "--m", "2", "--b", "1/2", "--out", str(m))
    code, stdout, _ = run(capsys, "eval", str(m), "--x", "1/4,1/4")
    assert code == 0 and stdout.strip() == "1/2"


def test_verify_exit_codes(tmp_path, capsys):
    f = tmp_path / "f.json"
    run(capsys, "construct", "pi-k", "--k", "4", "--b", "1/2", "--out", str(f))
    code, stdout, _ = run(capsys, "verify", "minimal", str(f), "--b", "1/2")
    assert code == 0 and json.loads(stdout)["verdict"] == "pass"
    code, stdout, _ = run(capsys, "verify", "slopes", str(f), "--k", "4", "--b", "1/2")
    assert code == 0
    g = tmp_path / "g.json"
    run(capsys, "construct", "gmi", "--b", "1/3", "--out", str(g))
    code, stdout, _ = run(capsys, "verify", "symmetry", str(g), "--b", "1/2")
    assert code == 1
    assert json.loads(stdout)["witness"] is not None


def test_verify_parse_failure_is_usage_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "verify", "subadditive", str(bad))[0] == 2
    missing = tmp_path / "nope.json"
    assert run(capsys, "verify", "subadditive", str(missing))[0] == 2


def test_certify_modes(tmp_path, capsys):
    f = tmp_path / "f.json"
    run(capsys, "construct", "pi-k", "--k", "4", "--b", "1/2", "--out", str(f))
    code, stdout, _ = run(capsys, "certify", str(f), "--b", "1/2",
                          "--mode", "replay", "--k", "4")
    assert code == 0
    code, stdout, _ = run(capsys, "certify", str(f), "--b", "1/2",
                          "--mode", "pwl-perturbation", "--refine", "8")
    assert code == 0
    res = json.loads(stdout)
    assert res["verdict"] == "certified_unique"
    assert "perturbation" in res["note"]
    g = tmp_path / "g.json"
    run(capsys, "construct", "gmi", "--b", "1/2", "--out", str(g))
    assert run(capsys, "certify", str(g), "--b", "1/2", "--mode", "two-slope")[0] == 0


def test_certify_non_minimal_fails_first(tmp_path, capsys):
    g = tmp_path / "g.json"
    run(capsys, "construct", "gmi", "--b", "1/3", "--out", str(g))
    code, stdout, _ = run(capsys, "certify", str(g), "--b", "1/2",
                          "--mode", "two-slope")
    assert code == 1
    assert json.loads(stdout)["stage"] == "minimality"


def test_merge_verb(tmp_path, capsys):
    g = tmp_path / "g.json"
    out = tmp_path / "m.json"
    run(capsys, "construct", "gmi", "--b", "1/2", "--out", str(g))
    code, stdout, _ = run(capsys, "merge", str(g), str(g), "--b1", "1/2",
                          "--b2", "1/2", "--out", str(out))
    assert code == 0 and "arity 2" in stdout
    obj = json.loads(out.read_text())
    assert obj["kind"] == "merge"
    # merge that function over the previous result
    out2 = tmp_path / "m2.json"
    code, stdout, _ = run(capsys, "merge", str(g), str(out), "--b1", "1/2",
                          "--out", str(out2))
    assert code == 0 and "arity 3" in stdout


def test_merge_non_minimal_outer_exits_1(tmp_path, capsys):
    g = tmp_path / "g.json"
    bad = tmp_path / "bad.json"
    run(capsys, "construct", "gmi", "--b", "1/2", "--out", str(g))
    run(capsys, "construct", "gmi", "--b", "1/3", "--out", str(bad))
    # parameter mismatch makes the outer non-minimal for b1=1/2
    code, stdout, _ = run(capsys, "merge", str(bad), str(g), "--b1", "1/2",
                          "--b2", "1/2", "--out", str(tmp_path / "x.json"))
    assert code == 1
    assert json.loads(stdout)["verdict"] == "fail"


def test_plot_csv_contains_exact_breakpoints(tmp_path, capsys):
    f = tmp_path / "f.json"
    out = tmp_path / "f.csv"
    run(capsys, "construct", "pi-k", "--k", "3", "--b", "1/2", "--out", str(f))
    assert run(capsys, "plot", str(f), "--out", str(out), "--samples", "16")[0] == 0
    rows = list(csv.DictReader(out.open()))
    bp_rows = [(rat(r["x"]), rat(r["value"])) for r in rows
               if r["kind"] == "breakpoint"]
    expected = pi_k(3, F(1, 2))
    assert bp_rows == list(zip(expected.breakpoints, expected.values))


def test_plot_svg(tmp_path, capsys):
    f = tmp_path / "f.json"
    out = tmp_path / "f.svg"
    run(capsys, "construct", "pi-k", "--k", "2", "--b", "1/2", "--out", str(f))
    assert run(capsys, "plot", str(f), "--out", str(out))[0] == 0
    text = out.read_text()
    assert text.startswith("<svg") and "polyline" in text
    assert run(capsys, "plot", str(f), "--out", str(tmp_path / "f.txt"))[0] == 2


def test_unknown_verb_and_flags(capsys):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "construct", "gmi")[0] == 2   # missing --b
