import csv
import io
import subprocess
import sys

import pytest

from snakeineq.cli import (
    EXIT_FAIL,
    EXIT_OK,
    EXIT_USAGE,
    UsageError,
    fmt,
    main,
    parse_doubling,
    parse_int_list,
    read_config,
)


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_int_list():
    assert parse_int_list("7") == [7]
    assert parse_int_list("3..6") == [3, 4, 5, 6]
    assert parse_int_list("21,41, 81") == [21, 41, 81]
    with pytest.raises(UsageError):
        parse_int_list("a..b")
    with pytest.raises(UsageError):
        parse_int_list("9..3")


def test_parse_doubling():
    assert parse_doubling("21..321") == [21, 41, 81, 161, 321]
    assert parse_doubling("22..322") == [22, 42, 82, 162, 322]
    assert parse_doubling("5,9") == [5, 9]


def test_fmt_round_trip():
    assert fmt(-0.0) == "0.0"
    v = 0.1 + 0.2
    assert float(fmt(v)) == v
    assert fmt(3) == "3"


def test_snake_unit(capsys):
    code, out, _ = run(["snake", "--case", "unit", "--n", "7"], capsys)
    assert code == EXIT_OK
    assert "coefficients=0.0,0.0,0.0,0.0,0.0,0.0,0.0,1.0" in out
    assert "0.9009688679024" in out  # cos(pi/7)
    assert "positivity_k0=0" in out


def test_snake_sqrt1mx2(capsys):
    code, out, _ = run(["snake", "--case", "sqrt1mx2", "--n", "10"], capsys)
    assert code == EXIT_OK
    assert "coefficients=0.0,0.0,0.0,0.0,0.0,0.0,0.0,0.0,-0.5,0.0,0.5" in out


def test_snake_case1(capsys):
    code, out, _ = run(["snake", "--case", "case1", "--a", "1", "--b", "1", "--n", "8"], capsys)
    assert code == EXIT_OK and "positivity_k0=" in out


def test_snake_constraint_violation(capsys):
    code, _, err = run(["snake", "--case", "case8", "--a", "3", "--n", "8"], capsys)
    assert code == EXIT_USAGE
    assert err.startswith("error:") and err.count("\n") == 1


def test_unknown_case_is_usage_error(capsys):
    code, _, _ = run(["snake", "--case", "nope", "--n", "8"], capsys)
    assert code == EXIT_USAGE


def test_bad_flag_is_usage_error(capsys):
    code, _, _ = run(["snake", "--bogus"], capsys)
    assert code == EXIT_USAGE


def test_verify_theorem_main_case8(capsys):
    code, out, _ = run(["verify", "theorem-main", "--case", "case8", "--n", "8..14", "--k", "1..3",
                        "--format", "csv"], capsys)
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 21
    assert {r["verdict"] for r in rows} == {"ConfirmsTheoremMain"}


def test_verify_expectation_failure_exit_1(capsys):
    code, out, _ = run(["verify", "theorem-main", "--case", "mu_m", "--m", "2", "--n", "8",
                        "--k", "1"], capsys)
    assert code == EXIT_FAIL and "PositivityFails" in out
    code, _, _ = run(["verify", "theorem-main", "--case", "mu_m", "--m", "2", "--n", "8",
                      "--k", "1", "--expect", "PositivityFails"], capsys)
    assert code == EXIT_OK


def test_verify_tau_max(capsys):
    code, out, _ = run(["verify", "tau-max", "--n", "3..8", "--format", "csv"], capsys)
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["pass"] for r in rows] == ["True"] * 6


def test_verify_fg(capsys):
    assert run(["verify", "fg"], capsys)[0] == EXIT_OK


def test_verify_small_suites(capsys):
    assert run(["verify", "tau-second", "--n", "3..6"], capsys)[0] == EXIT_OK
    assert run(["verify", "psi", "--count", "5", "--seed", "3"], capsys)[0] == EXIT_OK
    assert run(["verify", "interlacing", "--n", "3..5", "--t", "0.3,-0.4"], capsys)[0] == EXIT_OK
    assert run(["verify", "prop-dd", "--n", "3"], capsys)[0] == EXIT_OK


def test_growth_log_factor(capsys):
    code, out, _ = run(["growth", "--m", "2", "--k", "1", "--n", "22,42,82,162,322"], capsys)
    assert code == EXIT_OK
    assert out.startswith("n,markov,ds_lower,")
    assert "log_factor=True" in out


def test_growth_parity_suggestion(capsys):
    code, _, err = run(["growth", "--m", "1", "--k", "1", "--n", "20,40,80,160"], capsys)
    assert code == EXIT_USAGE
    assert "parity condition violated" in err and "21,41,81,161" in err


def test_growth_m2_k2_range(capsys):
    code, out, _ = run(["growth", "--m", "2", "--k", "2", "--n", "21..321"], capsys)
    assert code == EXIT_OK
    line = [l for l in out.splitlines() if l.startswith("# markov_exponent=")][0]
    assert float(line.split("=")[1].split()[0]) == pytest.approx(2.0, abs=0.1)


def test_scan_out_header(tmp_path, capsys):
    path = tmp_path / "tau6.csv"
    code, out, _ = run(["scan", "tau", "--n", "6", "--out", str(path), "--csv-points", "21"], capsys)
    assert code == EXIT_OK and "global_max=36.0" in out
    assert path.read_text().splitlines()[0] == "n,x,t,tau,tau_dx,tau_dxx,domain_tag"


def test_scan_n1(capsys):
    code, out, _ = run(["scan", "tau", "--n", "1"], capsys)
    assert code == EXIT_OK and "global_max=1.0" in out and "local_extrema=0" in out


def test_scan_bad_grid(capsys):
    assert run(["scan", "tau", "--n", "3", "--grid", "10"], capsys)[0] == EXIT_USAGE


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# batch\n[snake]\ncase = unit\nn = 5\nformat = csv\n")
    code, out, _ = run(["snake", "--config", str(cfg)], capsys)
    assert code == EXIT_OK and "case=unit n=5" in out and "index,x,sign" in out
    code, out, _ = run(["snake", "--config", str(cfg), "--n", "4"], capsys)
    assert "case=unit n=4" in out


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    with pytest.raises(UsageError, match="unknown key"):
        read_config(str(cfg))
    assert run(["snake", "--config", str(cfg)], capsys)[0] == EXIT_USAGE


def test_config_missing_file(capsys):
    assert run(["snake", "--config", "/nonexistent/x.cfg"], capsys)[0] == EXIT_USAGE


def test_deterministic_output(capsys):
    argv = ["verify", "theorem-main", "--case", "case3", "--n", "8,9", "--k", "2,3", "--format", "csv"]
    _, first, _ = run(argv, capsys)
    _, second, _ = run(argv, capsys)
    assert first == second


def test_thread_count_does_not_change_output():
    argv = [sys.executable, "-m", "snakeineq.cli", "verify", "theorem-main", "--case", "case8",
            "--n", "8..10", "--k", "1,2", "--format", "csv"]
    one = subprocess.run(argv, capture_output=True, text=True, env={"SNAKEINEQ_THREADS": "1", "PATH": ""})
    many = subprocess.run(argv, capture_output=True, text=True, env={"SNAKEINEQ_THREADS": "4", "PATH": ""})
    assert one.returncode == many.returncode == 0
    assert one.stdout == many.stdout
