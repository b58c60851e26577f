import csv
import io
import json
import math
import subprocess
import sys

import pytest

from pstchain import chainfile, design, propagate
from pstchain.cli import UsageError, parse_real, parse_spectrum

HALF_TIME_MAG = 0.3535533905932737


def run(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "pstchain", *map(str, args)],
        capture_output=True, text=True, cwd=cwd,
    )


def run_json(*args, code=0, cwd=None):
    p = run(*args, cwd=cwd)
    assert p.returncode == code, p.stderr
    return json.loads(p.stdout)


@pytest.fixture
def m1_file(tmp_path):
    path = tmp_path / "m1.json"
    p = run("design", "--spectrum", "1,2,3,4", "--out", path)
    assert p.returncode == 0, p.stderr
    return path


@pytest.fixture
def odd5_file(tmp_path):
    path = tmp_path / "odd5.json"
    assert run("design", "--spectrum", "5,2,1,0,-3", "--out", path).returncode == 0
    return path


class TestParsing:
    def test_integers_exact(self):
        assert parse_spectrum("1,2,3,4").exact

    def test_rationals_exact(self):
        s = parse_spectrum("3/2,1,1/2")
        assert s.exact and str(s.values[0]) == "3/2"

    def test_decimals_float(self):
        assert not parse_spectrum("1.5,0").exact

    def test_pi_expression(self):
        assert parse_real("pi/2") == math.pi / 2
        assert parse_real("2*pi") == 2 * math.pi

    @pytest.mark.parametrize("bad", ["__import__('os')", "pi()", "x", ""])
    def test_rejects_non_numbers(self, bad):
        with pytest.raises(UsageError):
            parse_real(bad)


class TestCheck:
    def test_m_family(self):
        doc = run_json("check", "--spectrum", "1,2,3,4")
        assert doc["certified"] and doc["tau"] == math.pi and doc["phi"] == 0.0

    def test_even_quotient(self):
        doc = run_json("check", "--spectrum", "3,1,0", code=2)
        assert doc["certified"] is False and doc["offending_gap_index"] == 0

    def test_unit_gap(self):
        doc = run_json("check", "--spectrum", "5,2,1,0,-3")
        assert doc["delta"] == 1.0 and doc["odd_multipliers"] == [3, 1, 1, 3]

    def test_malformed(self):
        assert run("check", "--spectrum", "1,two,3").returncode == 64

    def test_missing_argument(self):
        assert run("check").returncode == 64

    def test_duplicate(self):
        assert run("check", "--spectrum", "1,1").returncode == 2

    def test_indeterminate(self):
        p = run("check", "--spectrum", f"0,-1,{-2 - 1 / 3e6!r}")
        assert p.returncode == 3


class TestDesign:
    def test_m1_chain_file(self, m1_file):
        doc = json.loads(m1_file.read_text())
        assert list(doc) == ["version", "n", "lambda", "omega", "metadata"]
        assert max(abs(v - 2.5) for v in doc["lambda"]) < 1e-13
        assert max(abs(a - b) for a, b in zip(doc["omega"], [0.8660254037844386, 1, 0.8660254037844386])) < 1e-13
        assert doc["metadata"]["spectrum"] == [4, 3, 2, 1]

    def test_m2(self, tmp_path):
        path = tmp_path / "m2.json"
        assert run("design", "--spectrum", "1,2,3,6", "--out", path).returncode == 0
        lam = json.loads(path.read_text())["lambda"]
        assert max(abs(a - b) for a, b in zip(lam, [2.25, 3.75, 3.75, 2.25])) < 1e-13

    def test_single_site(self, tmp_path):
        path = tmp_path / "one.json"
        assert run("design", "--spectrum", "7", "--out", path).returncode == 0
        doc = json.loads(path.read_text())
        assert doc["n"] == 1 and doc["lambda"] == [7.0] and doc["omega"] == []

    def test_rejected(self, tmp_path):
        p = run("design", "--spectrum", "3,1,0", "--out", tmp_path / "x.json")
        assert p.returncode == 2 and not (tmp_path / "x.json").exists()

    def test_round_trip_report(self, tmp_path):
        p = run("design", "--spectrum", "1,2,3,4", "--out", tmp_path / "a.json")
        assert "round-trip" in p.stderr
        assert json.loads(p.stdout)["max_relative_eigenvalue_error"] < 1e-12

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        pa = run("design", "--spectrum", "5,2,1,0,-3", "--out", a)
        pb = run("design", "--spectrum", "5,2,1,0,-3", "--out", b)
        assert a.read_bytes() == b.read_bytes()
        assert pa.stdout.replace(str(a), "") == pb.stdout.replace(str(b), "")

    def test_canonical_round_trip(self, odd5_file):
        text = odd5_file.read_text()
        assert chainfile.canonicalize(text) == text
        chain, meta = chainfile.loads(text)
        again = chainfile.dumps(chainfile.chain_to_dict(
            chain, meta["spectrum"], meta["tau"], meta["phi"], meta["generator"]))
        assert again == text

    def test_design_then_check(self, odd5_file):
        meta = json.loads(odd5_file.read_text())["metadata"]
        spec = ",".join(str(v) for v in meta["spectrum"])
        doc = run_json("check", "--spectrum", spec)
        assert abs(doc["tau"] - meta["tau"]) <= 1e-12
        assert abs(doc["phi"] - meta["phi"]) <= 1e-12

    def test_float_spectrum_check(self, tmp_path):
        path = tmp_path / "f.json"
        assert run("design", "--spectrum", "1.5,0.5,-0.5", "--out", path).returncode == 0
        meta = json.loads(path.read_text())["metadata"]
        doc = run_json("check", "--spectrum", ",".join(repr(v) for v in meta["spectrum"]))
        assert abs(doc["tau"] - meta["tau"]) <= 1e-12 and abs(doc["phi"] - meta["phi"]) <= 1e-12


def _rows(text):
    return list(csv.reader(io.StringIO(text)))


class TestFidelity:
    def test_full_transfer(self, m1_file, tmp_path):
        out = tmp_path / "sweep.csv"
        p = run("fidelity", "--chain", m1_file, "--from", 1, "--to", 4,
                "--t-max", "pi", "--steps", 2, "--csv-out", out)
        assert p.returncode == 0
        raw = out.read_bytes()
        assert b"\r" not in raw
        rows = _rows(raw.decode())
        assert rows[0] == ["t", "magnitude", "phase"]
        assert len(rows) == 3
        assert abs(float(rows[-1][1]) - 1) <= 1e-9

    def test_same_site(self, m1_file):
        p = run("fidelity", "--chain", m1_file, "--from", 2, "--to", 2, "--t-max", 1, "--steps", 5)
        rows = _rows(p.stdout)
        assert float(rows[1][0]) == 0.0 and abs(float(rows[1][1]) - 1) < 1e-14

    def test_half_time(self, m1_file):
        p = run("fidelity", "--chain", m1_file, "--from", 1, "--to", 4, "--t-max", "pi", "--steps", 3)
        rows = _rows(p.stdout)
        assert float(rows[2][0]) == math.pi / 2
        chain, _ = chainfile.loads(m1_file.read_text())
        assert abs(float(rows[2][1]) - abs(propagate(chain, math.pi / 2).amplitude(4, 1))) < 1e-13
        assert abs(float(rows[2][1]) - HALF_TIME_MAG) < 1e-12

    def test_monotone_times(self, m1_file):
        rows = _rows(run("fidelity", "--chain", m1_file, "--from", 1, "--to", 4,
                         "--t-max", 5, "--steps", 50).stdout)[1:]
        ts = [float(r[0]) for r in rows]
        assert ts == sorted(ts) and len(set(ts)) == 50

    def test_bad_site(self, m1_file):
        assert run("fidelity", "--chain", m1_file, "--from", 0, "--to", 4, "--t-max", 1).returncode == 64

    def test_bad_steps(self, m1_file):
        assert run("fidelity", "--chain", m1_file, "--from", 1, "--to", 4,
                   "--t-max", 1, "--steps", 1).returncode == 64

    def test_missing_file(self, tmp_path):
        assert run("fidelity", "--chain", tmp_path / "nope.json", "--from", 1, "--to", 1,
                   "--t-max", 1).returncode == 64


class TestGate:
    def test_fermion(self, m1_file):
        doc = run_json("gate", "--chain", m1_file, "--site", 1, "--statistics", "fermion")
        assert doc["analytic"][3][3][0] == -1.0
        assert doc["max_deviation"] <= 1e-8

    def test_boson(self, m1_file):
        doc = run_json("gate", "--chain", m1_file, "--site", 1, "--statistics", "boson")
        assert doc["analytic"][3][3][0] == 1.0

    def test_odd5(self, odd5_file):
        doc = run_json("gate", "--chain", odd5_file, "--site", 2, "--statistics", "fermion")
        assert doc["max_deviation"] <= 1e-8

    def test_centre_site(self, odd5_file):
        assert run("gate", "--chain", odd5_file, "--site", 3, "--statistics", "fermion").returncode == 2

    def test_bad_statistics(self, m1_file):
        assert run("gate", "--chain", m1_file, "--site", 1, "--statistics", "anyon").returncode == 64

    def test_uncertifiable_chain(self, tmp_path):
        path = tmp_path / "u.json"
        path.write_text(chainfile.dumps({"version": 1, "n": 3, "lambda": [0.0, 0.0, 0.0],
                                          "omega": [1.0, 1.0]}))
        # spectrum {sqrt2, 0, -sqrt2} certifies; an unequal chain does not
        assert run("gate", "--chain", path, "--site", 1, "--statistics", "boson").returncode == 0
        path.write_text(chainfile.dumps({"version": 1, "n": 3, "lambda": [0.0, 0.0, 0.0],
                                          "omega": [1.0, 2.0]}))
        assert run("gate", "--chain", path, "--site", 1, "--statistics", "boson").returncode in (2, 3)


class TestProtocol:
    def test_p1_odd(self):
        doc = run_json("protocol", "p1-odd", "--half-spectrum", "1,-1", "--steps", 5)
        assert abs(doc["final"]["concurrence"] - 1) <= 1e-8
        assert doc["trajectory"][0]["concurrence"] < 1e-12

    def test_p1_even(self):
        doc = run_json("protocol", "p1-even", "--half-spectrum", "1,-1", "--steps", 3)
        assert abs(doc["final"]["concurrence"] - 1) <= 1e-8

    def test_p1_odd_from_chain(self, tmp_path):
        doc = run_json("protocol", "p1-odd", "--half-spectrum", "1,2,3,4", "--steps", 2)
        path = tmp_path / "p1.json"
        path.write_text(chainfile.dumps({"version": 1, "n": doc["n"], "lambda": doc["lambda"],
                                          "omega": doc["omega"]}))
        again = run_json("protocol", "p1-odd", "--chain", path, "--steps", 2)
        assert abs(again["final"]["concurrence"] - 1) <= 1e-6

    def test_parity_mismatch(self, m1_file):
        assert run("protocol", "p1-odd", "--chain", m1_file).returncode == 64

    def test_p2_fermion(self, m1_file):
        doc = run_json("protocol", "p2", "--chain", m1_file, "--statistics", "fermion")
        assert doc["concurrence_before"] == 0.0
        assert abs(doc["concurrence_after"] - 1) <= 1e-9

    def test_p2_boson(self, m1_file):
        doc = run_json("protocol", "p2", "--chain", m1_file, "--statistics", "boson")
        assert doc["concurrence_after"] <= 1e-10

    def test_p2_explicit_state(self, m1_file):
        doc = run_json("protocol", "p2", "--chain", m1_file, "--state", "1,0,0,0")
        assert doc["concurrence_after"] == 0.0

    def test_p2_bad_state(self, m1_file):
        assert run("protocol", "p2", "--chain", m1_file, "--state", "1,1,0,0").returncode == 64

    def test_p1_needs_input(self):
        assert run("protocol", "p1-odd").returncode == 64


class TestRevival:
    def test_gaussian_default(self):
        doc = run_json("revival")
        assert doc["relative_deviation"] <= 1e-6
        assert doc["mirror_time"] == math.pi / (math.pi**2 / 2)

    def test_single_mode(self):
        assert run("revival", "--modes", 1).returncode == 64
        doc = run_json("revival", "--coefficients", "1")
        assert doc["max_deviation"] < 1e-14

    def test_two_modes(self):
        h = repr(1 / math.sqrt(2))
        doc = run_json("revival", "--coefficients", f"{h},{h}")
        assert doc["max_deviation"] <= 1e-12

    def test_truncation(self):
        doc = run_json("revival", "--modes", 8, code=3)
        assert doc["error"] == "truncation" and doc["tail"] > 1e-12

    def test_deterministic(self):
        assert run("revival", "--modes", 16, "--sigma", 0.1).stdout == \
            run("revival", "--modes", 16, "--sigma", 0.1).stdout


def test_version():
    p = run("--version")
    assert p.returncode == 0 and "pstchain" in p.stdout


def test_console_entry_point_matches_module():
    from pstchain.cli import main
    assert main(["check", "--spectrum", "3,1,0"]) == 2
