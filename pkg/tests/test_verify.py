import json
import math

import pytest

from fgkit import verify
from fgkit.errors import IoError
from fgkit.verify import CSV_FIELDS, CheckCase, ConfigError, SuiteReport, dumps_report, parse_report, run_suite


def test_residual_definition():
    assert verify.residual(1.0, 1.0) == 0
    assert verify.residual(1e-20, 0.0) == 1e-20
    assert verify.residual(100.0, 101.0) == pytest.approx(1 / 101)


def test_tolerance_must_be_positive():
    with pytest.raises(ConfigError):
        CheckCase("x", "mellin", {}, 0.0)
    with pytest.raises(ConfigError):
        verify.load_config({"tolerance": 0})
    with pytest.raises(ConfigError):
        verify.load_config({"families": ["bogus"]})


def test_empty_selection_gives_empty_report():
    r = run_suite({"families": []})
    assert r.cases == [] and r.summary == {"passed": 0, "failed": 0}
    assert dumps_report(r).startswith('{"cases":[],"summary":{"passed":0,"failed":0}')


def test_every_family_has_default_cases():
    fams = {c.family for c in verify.build_cases(verify.default_config())}
    assert fams == set(verify.FAMILIES)


def test_family_filter_and_ordering():
    r = run_suite({"families": ["mellin"]})
    assert {c.family for c in r.cases} == {"mellin"}
    assert [c.id for c in r.cases] == sorted(c.id for c in r.cases)
    assert r.ok


def test_rational_identity_example_case():
    r = run_suite({"families": ["prop27"], "grids": {"d": [3], "lambda0": [0.25], "lambda": [1.0]}})
    (case,) = r.cases
    assert case.passed and case.residual <= 1e-6


def test_failures_are_entries_not_exceptions():
    r = run_suite({"families": ["prop27"], "grids": {"d": [2], "lambda0": [0.25], "lambda": [1.0]}})
    (case,) = r.cases
    assert not case.passed and case.error and math.isnan(case.residual)


def _same(a: SuiteReport, b: SuiteReport, fields):
    for x, y in zip(a.cases, b.cases):
        for f in fields:
            u, v = getattr(x, f), getattr(y, f)
            assert (isinstance(u, float) and math.isnan(u) and math.isnan(v)) or u == v, (x.id, f)
    assert len(a.cases) == len(b.cases)


def test_json_round_trip_and_determinism(tmp_path):
    sel = {"families": ["mellin", "legendre_reduction_d3"]}
    a, b = run_suite(sel), run_suite(sel)
    assert [c.residual for c in a.cases] == [c.residual for c in b.cases]
    path = tmp_path / "r.json"
    verify.emit_report(a, "json", path)
    back = parse_report(path.read_text(), "json")
    _same(a, back, ("id", "family", "parameters", "tolerance", "residual", "passed", "runtime_ms", "error"))
    assert json.loads(path.read_text())["summary"] == a.summary


def test_csv_schema_and_round_trip():
    r = run_suite({"families": ["mellin"]})
    text = dumps_report(r, "csv")
    assert text.splitlines()[0] == "id,family,residual,tolerance,passed,runtime_ms"
    assert ",".join(CSV_FIELDS) == text.splitlines()[0]
    _same(r, parse_report(text, "csv"), ("id", "family", "tolerance", "residual", "passed", "runtime_ms"))


def test_emit_to_bad_path():
    with pytest.raises(IoError):
        verify.emit_report(SuiteReport(), "json", "/nonexistent/dir/r.json")


def test_parallel_matches_serial():
    sel = {"families": ["legendre_reduction_d3"]}
    a = run_suite(sel)
    b = run_suite(dict(sel, workers=2))
    assert [(c.id, c.residual) for c in a.cases] == [(c.id, c.residual) for c in b.cases]
