import csv
import io
import json
import math
import subprocess
import sys

import pytest

from cirmax.cli import fmt, main

CIR = ["--alpha", "1", "--beta", "1", "--sigma", "1", "--x0", "0.5", "--t", "1"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_tail_two_methods(capsys):
    code, out, _ = run(capsys, "tail", *CIR, "--z", "3", "--method", "bromwich,eigen")
    assert code == 0
    r = rows(out)
    assert [x["method"] for x in r] == ["bromwich", "eigen"]
    vb, ve = float(r[0]["value"]), float(r[1]["value"])
    assert abs(vb - ve) < 1e-6 * vb


def test_tail_json(capsys):
    code, out, _ = run(capsys, "tail", *CIR, "--z", "2,3", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["schema"] == 1 and len(doc["rows"]) == 2


def test_numbers_round_trip():
    for v in (0.1, 1 / 3, 2.718281828459045e-123, 7.0):
        assert float(fmt(v)) == v
    assert fmt(None) == "" and fmt(True) == "true" and fmt(3) == "3"


def test_zeros(capsys):
    code, out, _ = run(capsys, "zeros", "--b", "1", "--x", "30", "--count", "5")
    r = rows(out)
    assert code == 0 and len(r) == 5
    s0 = float(r[0]["s_k"])
    assert 0 < s0 and abs(s0 / (30 * math.exp(-30)) - 1) < 0.2


def test_verify_positivity(capsys):
    code, out, _ = run(capsys, "verify-positivity", "--a", "1", "--b", "1", "--depth", "40")
    doc = json.loads(out)
    assert code == 0 and doc["schema"] == 1
    assert doc["recA_violations"] == [] and doc["recG_violations"] == []
    assert doc["nonneg"]["violations"] == []


def test_verify_positivity_outside_region(capsys):
    code, out, _ = run(capsys, "verify-positivity", "--a", "1/2", "--b", "1", "--depth", "10")
    doc = json.loads(out)
    assert code == 0 and doc["nonneg"]["region_verified"] is False


def test_asymp(capsys):
    code, out, _ = run(capsys, "asymp", *CIR, "--z", "10,20", "--mode", "both")
    r = rows(out)
    assert code == 0 and len(r) == 2 and "ratio_fixed_y" in r[0]


def test_compare_with_plot(capsys, tmp_path):
    pytest.importorskip("matplotlib")
    fig = tmp_path / "tail.png"
    code, out, _ = run(capsys, "compare", *CIR, "--z", "2,3", "--mc-paths", "2000", "--mc-steps", "64",
                       "--plot", str(fig))
    r = rows(out)
    assert code == 0 and fig.stat().st_size > 0
    assert float(r[0]["dev_eigen_bromwich"]) < 1e-6


def test_mc_command(capsys, monkeypatch):
    monkeypatch.setenv("CIRMAX_THREADS", "2")
    code, out, _ = run(capsys, "mc", *CIR, "--z", "2", "--paths", "1000", "--steps", "16", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["rows"][0]["n_paths"] == 1000


def test_scan_preset(capsys):
    code, out, _ = run(capsys, "scan-conjecture", "--preset", "--vmax", "1", "--vstep", "0.25")
    doc = json.loads(out)
    assert code == 0 and len(doc["reports"]) == 10 and doc["gating"] is False


def test_output_file(capsys, tmp_path):
    path = tmp_path / "z.csv"
    code, out, _ = run(capsys, "zeros", "--b", "2", "--x", "5", "--count", "2", "-o", str(path))
    assert code == 0 and out == ""
    assert len(rows(path.read_text())) == 2


@pytest.mark.parametrize("argv", [
    ["tail", "--z", "3"],
    ["tail", *CIR, "--z", "3", "--method", "simpson"],
    ["tail", *CIR, "--z", "abc"],
    ["nope"],
])
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_invalid_parameters_are_usage_errors(capsys):
    code, _, err = run(capsys, "tail", "--alpha", "1", "--beta", "-1", "--sigma", "1", "--x0", "0.5",
                       "--t", "1", "--z", "3")
    assert code == 2 and err.startswith("cirmax tail:")


def test_check_failure_exit_code(capsys):
    # a negative agreement threshold cannot be met
    code, _, err = run(capsys, "tail", *CIR, "--z", "3", "--method", "bromwich,eigen", "--agree", "-1")
    assert code == 1 and "differ" in err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "cirmax", "zeros", "--b", "1", "--x", "5", "--count", "2"],
                         capture_output=True, text=True, timeout=120)
    assert res.returncode == 0 and res.stdout.startswith("k,s_k")
