import json
import os

import pytest

from homformal.algebras import FIXTURE_KEYS, fixture
from homformal.cli import (ParseError, load_algebra, main, parse_algebra,
                           serialize_algebra)

FIXDIR = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def _path(key):
    return os.path.join(FIXDIR, key + ".alg")


def test_round_trip_all_fixtures():
    for key in FIXTURE_KEYS:
        A = fixture(key)
        text = serialize_algebra(A)
        B = parse_algebra(text)
        assert serialize_algebra(B) == text
        assert B.species == A.species
        assert list(B.space.names) == list(A.space.names)
        assert B.d.cols == A.d.cols
        assert B.products == A.products
        assert B.unit == A.unit


def test_shipped_files_match_corpus():
    for key in FIXTURE_KEYS:
        with open(_path(key), encoding="utf-8") as fh:
            A = parse_algebra(fh.read())
        assert serialize_algebra(A) == serialize_algebra(fixture(key))


def test_product_in_differential_is_syntax_error():
    text = ("species Com\nbasis:\none 0\nx 1\ny 1\nz 1\nxy 2\n"
            "unit one\nd z = x*y\n")
    with pytest.raises(ParseError) as err:
        parse_algebra(text)
    assert err.value.line == 9


def test_unknown_name_rejected():
    with pytest.raises(ParseError):
        parse_algebra("species Lie\nbasis:\nx 1\nproducts:\n[x, w] = x\n")


def test_minimal_file():
    A = parse_algebra("species Lie\nbasis:\nx 1\n")
    assert A.space.dim == 1 and A.d.is_zero()


def test_rationals_round_trip():
    text = ("species Ass\nbasis:\na 0\nb 0\nc 1\n"
            "d a = 3/2*c - b... ")
    with pytest.raises(ParseError):
        parse_algebra(text)
    A = parse_algebra("species Ass\nbasis:\na 0\nb 1\nd a = -2/3*b\n")
    from fractions import Fraction
    assert A.d.cols["a"] == {"b": Fraction(-2, 3)}
    assert "d a = -2/3*b" in serialize_algebra(A)


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["check", _path("F1")]) == 0
    capsys.readouterr()
    bad = tmp_path / "bad.alg"
    bad.write_text("species Com\nbasis:\nx 1\nd x = x*x\n")
    assert main(["check", str(bad)]) == 2
    out = json.loads(capsys.readouterr().out)
    assert out["error"]["exit_code"] == 2
    assert main(["check", str(tmp_path / "missing.alg")]) == 2
    capsys.readouterr()
    assert main(["envelope", _path("F2")]) == 2  # not a Lie algebra
    capsys.readouterr()


def test_cli_fixture_name_resolution(capsys):
    # bare fixture names resolve against the shipped fixture directory
    assert main(["check", "F5.alg"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["result"]["passed"]


def test_cli_out_flag_and_text_format(tmp_path, capsys):
    target = tmp_path / "report.json"
    assert main(["cohomology", _path("F2"), "--out", str(target)]) == 0
    rep = json.loads(target.read_text())
    assert rep["result"]["dims_by_degree"] == {"0": 1, "1": 2, "2": 2, "3": 1}
    assert main(["cohomology", _path("F2"), "--format", "text"]) == 0
    text = capsys.readouterr().out
    assert "dims_by_degree" in text


def test_cli_reports_are_deterministic(capsys):
    outs = []
    for _ in range(2):
        assert main(["obstructions", _path("F2"), "--arity-bound", "4"]) == 0
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]
