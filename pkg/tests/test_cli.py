import io
import json
import subprocess
import sys

import numpy as np
import pytest

from lobkn import cli
from lobkn import io as lio
from lobkn.kinetics import KineticParams

from oracles import random_log


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def columns(text):
    rows = [line.split() for line in text.splitlines() if line and not line.startswith("#")]
    return np.array(rows, dtype=float)


@pytest.fixture(scope="module")
def stationary_log(tmp_path_factory):
    p = tmp_path_factory.mktemp("cli") / "stationary.csv"
    assert cli.main(["synth", "--seed", "2", "--n-events", "40000", "--out", str(p)]) == 0
    return p


@pytest.fixture(scope="module")
def crash_log(tmp_path_factory):
    p = tmp_path_factory.mktemp("cli") / "crash.csv"
    assert cli.main(["synth", "--scenario", "flash_crash", "--out", str(p)]) == 0
    return p


def test_synth_is_deterministic(tmp_path, stationary_log):
    again = tmp_path / "again.csv"
    assert cli.main(["synth", "--seed", "2", "--n-events", "40000", "--out", str(again)]) == 0
    assert again.read_bytes() == stationary_log.read_bytes()
    assert stationary_log.read_text().startswith(lio.HEADER + "\n")


def test_replay(stationary_log, capsys):
    code, out, _ = run(["replay", stationary_log], capsys)
    assert code == 0
    data = columns(out)
    assert data.shape[1] == 5
    assert np.array_equal(data[:, 0], np.arange(1, len(data) + 1))
    assert np.all(data[:, 2] < data[:, 3])
    assert "# transactions" in out


@pytest.mark.parametrize("argv", [
    ["spectrum", "--depths", "0,50,100"],
    ["corr"],
    ["mfp"],
    ["kappa"],
    ["rates"],
    ["detect"],
    ["profile", "--ticks", "500,1000"],
    ["knudsen"],
])
@pytest.mark.invariant
def test_subcommands_run_and_are_byte_stable(stationary_log, capsys, argv):
    code1, out1, err1 = run(argv[:1] + [stationary_log] + argv[1:], capsys)
    assert code1 == 0, err1
    code2, out2, _ = run(argv[:1] + [stationary_log] + argv[1:], capsys)
    assert out1 == out2 and out1


def test_corr_reports_gamma_c(stationary_log, capsys):
    _, out, _ = run(["corr", stationary_log], capsys)
    assert "minus gamma_c" in out and "plus gamma_c" in out
    data = columns(out)
    assert data.shape[1] == 5 and data[0, 0] == -10 and data[-1, 0] == 100


def test_knudsen_defaults(stationary_log, capsys):
    _, out, _ = run(["knudsen", stationary_log], capsys)
    first = json.loads(out.splitlines()[0])
    assert first["config"] == KineticParams(18, 18, k=4, S=100).fingerprint()
    assert {"Kn_minus", "Kn_plus", "Kn_sym", "lambda_minus", "flags", "symbol"} <= set(first)
    _, out2, _ = run(["knudsen", stationary_log, "--k", "4", "--window-s", "100"], capsys)
    assert out2 == out


def test_detect_on_crash_fixture(crash_log, capsys):
    code, out, _ = run(["detect", crash_log, "--gamma-c-minus", "4", "--gamma-c-plus", "4",
                        "--theta-lambda", "-0.044"], capsys)
    assert code == 0
    rows = [line.split() for line in out.splitlines() if not line.startswith("#")]
    assert any(r[0] == "minus" for r in rows)
    assert "theta_lambda -0.044 (given)" in out


def test_short_log_exits_3(tmp_path, capsys):
    p = tmp_path / "short.csv"
    with open(p, "w") as fh:
        lio.write_event_log(random_log(0, 700), fh)
    code, _, err = run(["corr", p], capsys)
    assert code == 3 and "insufficient data" in err
    code, _, _ = run(["knudsen", p], capsys)
    assert code == 3


def test_input_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text(lio.HEADER + "\n1,B,100,A,1\n2,B,100,Q,1\n")
    code, _, err = run(["replay", bad], capsys)
    assert code == 2 and "line 3" in err
    code, _, err = run(["replay", tmp_path / "missing.csv"], capsys)
    assert code == 2
    code, _, _ = run(["replay"], capsys)
    assert code == 2
    code, _, _ = run(["frobnicate"], capsys)
    assert code == 2
    invalid = tmp_path / "invalid.csv"
    invalid.write_text(lio.HEADER + "\n1,B,100,C,1\n")
    code, _, err = run(["replay", invalid], capsys)
    assert code == 2 and "cancel" in err
    code, _, _ = run(["synth", "--n-events", "10"], capsys)
    assert code == 2


def test_profile_rejects_unknown_tick(stationary_log, capsys):
    code, _, err = run(["profile", stationary_log, "--ticks", "99999999"], capsys)
    assert code == 2


def test_console_script_reads_stdin(stationary_log):
    text = stationary_log.read_text()
    res = subprocess.run([sys.executable, "-m", "lobkn.cli", "replay", "-"], input=text,
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert columns(res.stdout).shape[1] == 5
