import csv
import io
import json
import math
import shutil
import subprocess

import pytest

from frkt.cli import Config, fmt, fmt_c, parse_complex, run
from frkt.errors import ConfigError, FrktError


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def all_finite(table):
    for row in table[1:]:
        for cell in row:
            if cell == "":
                continue
            assert math.isfinite(float(cell))


# ---------------------------------------------------------------- examples


def test_xi_at_one(capsys):
    code, out, _ = call(capsys, "specfun", "xi", "--u", "1")
    assert code == 0
    assert rows(out) == [["u", "xi", "dxi"], ["1", "0", "2"]]


def test_sieve_psi(capsys):
    code, out, _ = call(capsys, "sieve", "psi", "--x", "100", "--y", "5")
    assert code == 0
    assert out == "34\n"


def test_a0_at_z_one(capsys):
    code, out, _ = call(capsys, "coeffs", "a", "--z", "1", "--J", "0")
    assert code == 0
    j, re, im = rows(out)[1]
    assert j == "0" and abs(float(re) - 1) < 1e-9 and float(im) == 0


def test_console_script():
    exe = shutil.which("frkt")
    if exe is None:
        pytest.skip("console script not installed")
    res = subprocess.run([exe, "sieve", "psi", "--x", "100", "--y", "5"], capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout == "34\n"


# ------------------------------------------------------------- exit codes


def test_domain_error_exit_one(capsys):
    code, out, err = call(capsys, "specfun", "xi", "--u", "0")
    assert code == 1 and out == "" and err.startswith("frkt:")
    code, _, _ = call(capsys, "sieve", "psi", "--x", "0", "--y", "5")
    assert code == 1


def test_usage_error_exit_two(capsys):
    with pytest.raises(SystemExit) as e:
        run(["specfun", "nope"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        run(["coeffs", "a", "--z", "one"])
    assert e.value.code == 2
    capsys.readouterr()


def test_bad_config_exit_two(capsys, tmp_path):
    code, _, err = call(capsys, "coeffs", "a", "--z", "1", "--beta", "0.5")
    assert code == 2 and "beta" in err
    code, _, err = call(capsys, "coeffs", "a", "--z", "1", "--euler-P", "10")
    assert code == 2 and "euler_P" in err
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"gamma": 1}))
    code, _, err = call(capsys, "coeffs", "a", "--z", "1", "--config", str(bad))
    assert code == 2 and "gamma" in err
    code, _, err = call(capsys, "coeffs", "a", "--z", "1", "--constant", "oops")
    assert code == 2


# ----------------------------------------------------------------- config


def test_config_file_and_flag_override(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"beta": 0.25, "euler_P": 5000, "constants": {"c_28": 0.5}}))
    cfg = Config.load(path)
    assert cfg.beta == 0.25 and cfg.euler_P == 5000
    assert cfg.constants["c_28"] == 0.5 and "c0_14" in cfg.constants
    cfg = Config.load(path, {"beta": 0.1, "delta": None})
    assert cfg.beta == 0.1 and cfg.delta == 0.2


@pytest.mark.parametrize(
    "data, name",
    [({"beta": "x"}, "beta"), ({"cheb_degree": 3.5}, "cheb_degree"), ({"quad_tol": -1}, "quad_tol"), ([1], "config")],
)
def test_config_validation(tmp_path, data, name):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(data))
    with pytest.raises(ConfigError) as e:
        Config.load(path)
    assert e.value.field == name


def test_config_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        Config.load(tmp_path / "absent.json")


def test_out_flag(capsys, tmp_path):
    dest = tmp_path / "o.csv"
    code, out, _ = call(capsys, "specfun", "xi", "--u", "2", "--out", str(dest))
    assert code == 0 and out == ""
    assert dest.read_text().startswith("u,xi,dxi\n")


# ------------------------------------------------------------- formatting


def test_parse_complex():
    assert parse_complex("1.5-2i") == 1.5 - 2j
    assert parse_complex("3") == 3
    assert parse_complex("i") == 1j
    assert parse_complex(" 0.5 + 0.5I ") == 0.5 + 0.5j


def test_fmt():
    assert fmt(-0.0) == "0"
    assert fmt(0.1) == "0.10000000000000001"
    assert fmt_c(1 - 2j) == "1-2i"
    with pytest.raises(FrktError):
        fmt(float("nan"))


# ------------------------------------------------------------ subcommands


@pytest.mark.parametrize(
    "argv",
    [
        ["specfun", "zeta0", "--w", "3+2i"],
        ["specfun", "I", "--w=-12+19i"],
        ["specfun", "J", "--s", "2"],
        ["specfun", "rho-hat", "--s", "1+1i", "--z", "1.6+0.5i"],
        ["specfun", "zeta", "--s", "2", "--y", "100"],
        ["dde", "solve", "--z", "0.7", "--vmax", "3", "--step", "0.25"],
        ["dde", "jumps", "--z", "2", "--J", "3"],
        ["dde", "psi", "--z", "1", "--v", "3", "--j", "1"],
        ["coeffs", "B", "--z", "0.5+0.5i", "--euler-P", "2000"],
        ["sieve", "hist", "--x", "1000", "--y", "20"],
    ],
)
def test_outputs_finite_and_repeatable(capsys, argv):
    code, first, _ = call(capsys, *argv)
    assert code == 0
    table = rows(first)
    assert len(table) >= 2
    all_finite(table)
    code, second, _ = call(capsys, *argv)
    assert first == second


def test_psi_with_twist(capsys):
    code, out, _ = call(capsys, "sieve", "psi", "--x", "100", "--y", "5", "--z", "-1")
    assert code == 0
    assert rows(out)[1][2:] == ["4", "0"]


def test_cache_round_trip(capsys, tmp_path):
    path = tmp_path / "c.bin"
    code, _, _ = call(capsys, "sieve", "cache", "--x", "5000", "--path", str(path))
    assert code == 0 and path.stat().st_size > 0
    _, a, _ = call(capsys, "sieve", "psi", "--x", "5000", "--y", "30", "--cache", str(path))
    _, b, _ = call(capsys, "sieve", "psi", "--x", "5000", "--y", "30")
    assert a == b


def test_compare(capsys):
    code, out, _ = call(capsys, "compare", "--x", "3000", "--y", "30", "50", "--J", "1")
    assert code == 0
    table = rows(out)
    assert table[0] == ["x", "y", "u", "exact", "lambda", "mainJ0", "mainJ", "envelope", "x_eval"]
    assert len(table) == 3
    all_finite(table)
    assert table[1][-1] == "3000.5"
    _, out, _ = call(capsys, "compare", "--x", "3000", "--y", "30", "--no-half")
    assert rows(out)[1][-1] == "3000"


def test_compare_complex_z_adds_imaginary_columns(capsys):
    code, out, _ = call(capsys, "compare", "--x", "2000", "--y", "40", "--z", "0.5+0.5i", "--J", "1")
    assert code == 0
    head = rows(out)[0]
    assert head[-4:] == ["exact_im", "lambda_im", "mainJ0_im", "mainJ_im"]


def test_compare_workers_match_serial(capsys):
    argv = ["compare", "--x", "2000", "3000", "--y", "30", "--J", "1"]
    _, serial, _ = call(capsys, *argv)
    _, par, _ = call(capsys, *argv, "--workers", "2")
    assert serial == par


def test_omega(capsys):
    code, out, _ = call(capsys, "omega", "--x", "100000", "--y", "100")
    assert code == 0
    table = rows(out)
    assert table[0] == ["k", "count", "gauss", "tilted", "in_range_2_6"]
    all_finite(table)
    counts = [int(r[1]) for r in table[1:]]
    code, psi, _ = call(capsys, "sieve", "psi", "--x", "100000", "--y", "100")
    assert sum(counts) == int(psi)
    assert any(r[3] for r in table[1:])
    assert {r[4] for r in table[1:]} <= {"0", "1"}


def test_report(capsys, tmp_path):
    dest = tmp_path / "r.json"
    code, _, _ = call(capsys, "report", "--only", "1", "5", "--out", str(dest))
    assert code == 0
    rep = json.loads(dest.read_text())
    assert set(rep) == {"inputs", "outputs", "tolerances", "checks", "all_passed"}
    assert [c["id"] for c in rep["checks"]] == [1, 5]
    assert rep["all_passed"] is True
    assert rep["inputs"]["config"]["beta"] == 0.3
