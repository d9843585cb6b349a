from __future__ import annotations

import json

import pytest

from hermitian_spherical.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_field(capsys):
    code, out, _ = run(capsys, "field", "-p", "2", "-d", "2")
    assert code == 0 and out.splitlines()[0] == "RP, s=2, l=1, q=2"
    code, out, _ = run(capsys, "field", "-p", "2", "-d", "-5")
    assert out.splitlines()[0] == "RU, s=1, l=0, q=2"


def test_field_square_defect(capsys):
    code, _, err = run(capsys, "field", "-p", "2", "-d", "4")
    assert code == 2 and "SquareDefect" in err


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["bogus"])
    assert exc.value.code == 1
    code, _, err = run(capsys, "spherical", "-p", "2", "-d", "2")
    assert code == 1
    code, _, _ = run(capsys, "classify", "-p", "2", "-d", "2", "1;2")
    assert code == 1


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", "-p", "2", "-d", "2", "pi^3*5;1;0")
    assert code == 0 and out.splitlines()[0] == "Diagonal(3,0,Delta,1)"
    code, out, _ = run(capsys, "classify", "-p", "2", "-d", "2", "pi^2;1;0")
    assert "lam1 - lam2 = s" in out
    code, _, err = run(capsys, "classify", "-p", "2", "-d", "2", "0;0;0")
    assert code == 2 and "SingularMatrix" in err


def test_spherical_closed_and_oracle_agree(capsys):
    z = "0.1,0.2;0.4,-0.3"
    _, a, _ = run(capsys, "spherical", "-p", "2", "-d", "2", "--rep", "Hyperbolic0", "--z", z)
    _, b, _ = run(capsys, "spherical", "-p", "2", "-d", "2", "--matrix", "0;0;1,0",
                  "--mode", "oracle", "--z", z)
    assert a.splitlines()[1].split("+/-")[0] == b.splitlines()[1].split("+/-")[0]


def test_spherical_records(capsys):
    code, out, _ = run(capsys, "spherical", "-p", "2", "-d", "2", "--rep", "DeltaPlane",
                       "--format", "records")
    rec = json.loads(out)
    assert code == 0 and rec["function"]["num"] == [[2, 1, 0, 2, -2]]


def test_spherical_unramified(capsys):
    code, _, err = run(capsys, "spherical", "-p", "2", "-d", "5", "--rep", "Hyperbolic0")
    assert code == 2 and "WrongCase" in err


def test_verify_and_mutation(capsys):
    code, out, _ = run(capsys, "verify", "-p", "2", "-d", "-5")
    assert code == 0 and out.strip().endswith("0 failed")
    code, out, _ = run(capsys, "verify", "-p", "2", "-d", "2", "--mutate")
    assert code == 3 and "FAIL" in out


def test_verify_deterministic(capsys):
    _, a, _ = run(capsys, "verify", "-p", "2", "-d", "-5", "--format", "records")
    _, b, _ = run(capsys, "verify", "-p", "2", "-d", "-5", "--format", "records")
    assert a == b and json.loads(a)


def test_integral(capsys):
    code, out, _ = run(capsys, "integral", "-p", "2", "-d", "2", "--eta", "1")
    assert code == 0 and "equal: True" in out
    code, out, _ = run(capsys, "integral", "-p", "2", "-d", "5", "--kind", "measure", "-n", "2")
    assert code == 0 and "3/16" in out
    code, out, _ = run(capsys, "integral", "-p", "2", "-d", "2", "--kind", "character",
                       "-n", "3")
    assert code == 0 and "= 1" in out and "warning" in out
