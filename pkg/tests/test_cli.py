import csv
import io
import subprocess
import sys

import numpy as np
import pytest

from oscsum import cli, forms
from oscsum.acceptance import pair_tables
from oscsum.quad import PhaseSpec
from oscsum.twist import TwistSpec, default_window, eval_twist_sum


def run_cli(argv, capsys):
    code = cli.run(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def rows(text):
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.reader(io.StringIO("\n".join(lines))))


def test_exppair(capsys):
    code, out, _ = run_cli(["exppair", "--depth", "4"], capsys)
    assert code == 0
    assert out.startswith("# config: ")
    table = rows(out)
    assert table[0] == ["p", "q", "value", "derivation"]
    assert table[-1][:2] == ["13/194", "76/97"]


def test_config_line_echoes_options_but_not_threads(capsys):
    _, one, _ = run_cli(["exppair", "--depth", "3", "--threads", "1"], capsys)
    _, four, _ = run_cli(["exppair", "--depth", "3", "--threads", "4"], capsys)
    assert one == four
    config = one.splitlines()[0]
    assert "depth=3" in config and "objective=" in config and "threads" not in config


def test_twist_matches_library(capsys, pair):
    code, out, _ = run_cli(["twist", "--weights", "12,16", "--phase", "log", "--alpha", "1",
                            "--t", "64", "--X", "4096"], capsys)
    assert code == 0
    header, row = rows(out)
    values = dict(zip(header, row))
    f, g = pair
    S = eval_twist_sum(f, g, TwistSpec(PhaseSpec("log", 1.0), 64.0, 4096.0, default_window(64.0)))
    assert float(values["S_re"]) == S.real and float(values["S_im"]) == S.imag
    assert values["in_regime"] == "1"


def test_usage_errors(capsys):
    assert run_cli(["bogus"], capsys)[0] == 2
    assert run_cli(["twist", "--t", "64"], capsys)[0] == 2
    assert run_cli(["exppair", "--unknown-flag"], capsys)[0] == 2
    assert run_cli(["twist", "--weights", "12", "--t", "1", "--X", "10"], capsys)[0] == 2


def test_library_errors_are_usage_errors(capsys):
    code, _, err = run_cli(["coeffs", "--weight", "14", "--N", "10"], capsys)
    assert code == 2 and "error" in err


def test_failed_check_exit_code(capsys):
    code, _, err = run_cli(["delta-check", "--Q", "30", "--nmax", "3", "--tol", "1e-30"], capsys)
    assert code == 1 and "deltamethod.dfi_delta" in err


def test_coeffs_round_trip(capsys, tmp_path):
    path = tmp_path / "c.csv"
    code, _, _ = run_cli(["coeffs", "--weight", "16", "--N", "500", "--output", str(path),
                          "--cache-dir", str(tmp_path / "cache")], capsys)
    assert code == 0
    table = rows(path.read_text())
    values = np.array([float(v) for _, v in table[1:]])
    assert np.array_equal(values, forms.build_eigenform(16, 500).values[1:])


def test_phase_check_aliases(capsys):
    code_a, out_a, _ = run_cli(["phase-check", "--lemma", "3.6", "--grid", "1000"], capsys)
    code_b, out_b, _ = run_cli(["phase-check", "--lemma", "stationary", "--grid", "1000"], capsys)
    assert code_a == code_b == 0
    assert rows(out_a) == rows(out_b)


def test_verify_all_fast(capsys):
    assert cli.verify_all("fast") == 0


def test_verify_all_fault_injection(capsys):
    code, _, err = run_cli(["verify-all", "fast", "--fault", "coefficients"], capsys)
    assert code == 1
    assert "first failure: forms.verify_hecke" in err


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "oscsum.cli", "exppair", "--depth", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "# config:" in proc.stdout
