import csv
import io
import json
from pathlib import Path

import pytest

from starkres.cli import EXIT_CONFIG, EXIT_NUMERIC, dumps, fmt, main

POT = Path(__file__).resolve().parents[1] / "potentials"
BARRIER = str(POT / "square_barrier.json")
WELL = str(POT / "square_well.json")
ZERO = str(POT / "zero.json")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_airy(capsys):
    code, out, _ = run(capsys, "airy", "--re", "-1.5", "--im", "0.2", "--format", "json")
    assert code == 0
    (row,) = json.loads(out)
    assert complex(row["re_value"], row["im_value"]) == pytest.approx(0.4782953594927809 + 0.06183115649403309j, rel=1e-12)


def test_scattering(capsys):
    code, out, _ = run(capsys, "scattering", "--potential", BARRIER, "--k-grid", "0.5:2:4")
    assert code == 0 and len(rows(out)) == 4


def test_spectrum(capsys):
    code, out, _ = run(capsys, "spectrum", "--potential", WELL)
    (row,) = json.loads(out)
    assert code == 0 and row["lambda0"] == pytest.approx(-1.2077956677267891, abs=1e-12)


def test_scan_finds_the_known_roots(capsys):
    code, out, _ = run(capsys, "scan", "--potential", BARRIER, "--f", "0.1",
                       "--re-k", "0.9:1.1", "--im-k", "-0.3:-1e-5")
    assert code == 0
    r = rows(out)
    assert len(r) == 2
    ks = [complex(float(x["re_k"]), float(x["im_k"])) for x in r]
    assert abs(ks[0] - (0.95043042280914842 - 0.00083624669476475616j)) < 1e-10


def test_scan_of_free_potential_is_header_only(capsys):
    code, out, _ = run(capsys, "scan", "--potential", ZERO, "--f", "0.1",
                       "--re-k", "0.3:2", "--im-k", "-0.6:-0.001")
    assert code == 0 and out.strip().count("\n") == 0 and out.strip()


@pytest.mark.parametrize("family, extra", [
    ("positive-axis", ["--window", "0.9:1.1"]),
    ("line", ["--window", "0.9:1.1"]),
    ("bound-state", []),
])
def test_string_families(capsys, family, extra):
    pot = WELL if family == "bound-state" else BARRIER
    f = "0.3" if family == "bound-state" else "0.1"
    code, out, _ = run(capsys, "string", "--potential", pot, "--f", f, "--family", family,
                       "--refine", *extra)
    assert code == 0
    r = rows(out)
    assert r and all(float(x["abs_diff"]) < 0.05 for x in r)


def test_output_file(tmp_path, capsys):
    dest = tmp_path / "s.json"
    code, out, _ = run(capsys, "spectrum", "--potential", WELL, "--format", "json",
                       "--output", str(dest))
    assert code == 0 and out == ""
    assert json.loads(dest.read_text())


def test_runs_are_reproducible(capsys, monkeypatch):
    argv = ["scan", "--potential", BARRIER, "--f", "0.1,0.05", "--re-k", "0.9:1.1",
            "--im-k", "-0.3:-1e-5"]
    monkeypatch.setenv("STARK_THREADS", "1")
    _, a, _ = run(capsys, *argv)
    monkeypatch.setenv("STARK_THREADS", "2")
    _, b, _ = run(capsys, *argv)
    assert a == b


@pytest.mark.parametrize("argv", [
    ["spectrum", "--potential", "/nonexistent.json"],
    ["scan", "--potential", BARRIER, "--f", "-0.1", "--re-k", "0.9:1.1", "--im-k", "-0.3:-0.01"],
    ["scan", "--potential", BARRIER, "--f", "0.1", "--re-k", "1.1:0.9", "--im-k", "-0.3:-0.01"],
    ["string", "--potential", BARRIER, "--f", "0.1", "--family", "sideways"],
    ["bogus"],
])
def test_configuration_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_CONFIG and "configuration error" in err


def test_numeric_failure(capsys):
    code, _, err = run(capsys, "string", "--potential", ZERO, "--f", "0.1",
                       "--family", "positive-axis", "--window", "0.9:1.1")
    assert code == EXIT_NUMERIC and "FTooSmallError" in err


def test_bad_thread_count(capsys, monkeypatch):
    monkeypatch.setenv("STARK_THREADS", "0")
    code, _, _ = run(capsys, "scan", "--potential", BARRIER, "--f", "0.1,0.05",
                     "--re-k", "0.9:1.1", "--im-k", "-0.3:-1e-5")
    assert code == EXIT_CONFIG


def test_number_formatting_round_trips():
    x = 0.1 + 0.2
    assert float(fmt(x)) == x
    assert json.loads(dumps({"k": 1 - 2j})) == {"k": {"re": 1.0, "im": -2.0}}


def test_verify_exit_code_and_report(capsys):
    code, out, err = run(capsys, "verify", "--potential", WELL, "--f-list", "0.2,0.1,0.05")
    assert code == 0
    assert [line.split()[0] for line in err.splitlines()] == [f"A{i}" for i in range(1, 10)]
    assert json.loads(out)["overall"] is True
