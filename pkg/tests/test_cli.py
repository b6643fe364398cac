import json

import pytest

from fgkit.cli import UsageError, format_value, main, parse_complex, parse_grid


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out.strip(), err


def test_parse_complex():
    assert parse_complex("2") == 2
    assert parse_complex("0.5+1i") == 0.5 + 1j
    assert parse_complex("1e-3-2e+1i") == 1e-3 - 20j
    assert parse_complex("-3i") == -3j
    assert parse_complex("i") == 1j
    with pytest.raises(UsageError):
        parse_complex("abc")


def test_parse_grid():
    assert list(parse_grid("0:1:3")) == [0.0, 0.5, 1.0]
    with pytest.raises(UsageError, match="empty grid"):
        parse_grid("0:1:0")


def test_format_value_is_two_columns():
    assert format_value(-0.125) == "-0.125 0"
    assert format_value(-0.0 + 1j / 3) == "0 0.333333333333333"


def test_eval_examples(capsys):
    assert run(capsys, "eval", "--fn", "omega", "--d", "3")[:2] == (0, "12.566370614359172")
    assert run(capsys, "eval", "--fn", "P", "--d", "3", "--lambda", "2", "--x", "0.5")[:2] == (0, "-0.125 0")
    assert run(capsys, "eval", "--fn", "h_d", "--d", "3", "--lambda", "4")[:2] == (0, "9 0")


def test_eval_complex_degree(capsys):
    code, out, _ = run(capsys, "eval", "--fn", "Q", "--d", "3", "--lambda", "0.5+1i", "--x", "2")
    assert code == 0 and len(out.split()) == 2


def test_eval_domain_error_exit_2(capsys):
    code, _, err = run(capsys, "eval", "--fn", "delta_psi", "--d", "3", "--lambda", "0.3", "--x", "0.5")
    assert code == 2 and err.startswith("error")
    assert run(capsys, "eval", "--fn", "P", "--d", "3", "--lambda", "2")[0] == 2
    assert run(capsys, "eval", "--fn", "nope")[0] == 2


def test_transform_spherical_laplace(capsys):
    code, out, _ = run(capsys, "transform", "spherical-laplace", "--kernel",
                       '{"type":"elementary","d":3,"lambda0":0.3}', "--grid", "2:2:1")
    header, row = out.splitlines()
    assert code == 0 and header == "x,re,im,error"
    assert abs(float(row.split(",")[1]) + 0.721049) < 1e-6


def test_transform_abel_of_constant_json(capsys):
    code, out, _ = run(capsys, "transform", "abel", "--kernel", '{"type":"constant","d":3}',
                       "--grid", "1", "--format", "json")
    (row,) = json.loads(out)["rows"]
    assert code == 0 and abs(row["re"] - 1.264241) < 1e-6


def test_transform_errors(capsys):
    k = '{"type":"constant","d":3}'
    code, _, err = run(capsys, "transform", "abel", "--kernel", k, "--grid", "0:1:0")
    assert code == 2 and "empty grid" in err
    code, _, err = run(capsys, "transform", "laplace", "--kernel", k, "--grid=-1:0:2")
    assert code == 2 and "Re(lam)" in err
    assert run(capsys, "transform", "abel", "--kernel", "{bad", "--grid", "1")[0] == 2


def test_transform_to_file(tmp_path, capsys):
    out = tmp_path / "t.csv"
    code, _, _ = run(capsys, "transform", "laplace", "--kernel", '{"type":"exponential","d":3,"a":2}',
                     "--grid", "1:3:3", "--out", str(out))
    lines = out.read_text().splitlines()
    assert code == 0 and len(lines) == 4 and lines[2].split(",")[1] == "0.25"


def test_verify_filter_and_exit_codes(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, err = run(capsys, "verify", "--family", "mellin", "--out", str(out))
    doc = json.loads(out.read_text())
    assert code == 0 and {c["family"] for c in doc["cases"]} == {"mellin"}
    assert run(capsys, "verify", '{"tolerance": 0}')[0] == 2
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"families": ["mellin"], "tolerance": 1e-30}))
    assert run(capsys, "verify", str(cfg))[0] == 1
