"""Command-line behavior, including a full run/replay round trip."""
import contextlib
import io
import json
import os
from argparse import Namespace

import pytest

from fogmind.cli import BROKER_ENV, _broker_arg, _parse_broker, main
from fogmind.qr import DISCREPANCY_NOTE


@pytest.fixture(autouse=True)
def no_ambient_broker(monkeypatch):
    monkeypatch.delenv(BROKER_ENV, raising=False)


@pytest.fixture(scope="module")
def cli_run(tmp_path_factory):
    """One CLI scenario run shared by the tests below."""
    out = tmp_path_factory.mktemp("cli") / "run"
    stashed = os.environ.pop(BROKER_ENV, None)
    buf = io.StringIO()
    try:
        with contextlib.redirect_stdout(buf):
            code = main(["run", "--scenario", "rain_umbrella", "--out", str(out)])
    finally:
        if stashed is not None:
            os.environ[BROKER_ENV] = stashed
    return code, buf.getvalue(), out


def test_run_reports_progress(cli_run):
    code, stdout, out = cli_run
    assert code == 0
    assert "scenario rain_umbrella: 40 ticks" in stdout
    assert (out / "dispatch.log").exists()
    readings = (out / "readings.jsonl").read_text().splitlines()
    assert readings
    for line in readings:
        json.loads(line)


def test_replay_reproduces_dispatch_log(cli_run, tmp_path):
    code, _, out = cli_run
    assert code == 0
    assert main(["replay", str(out / "readings.jsonl"),
                 "--out", str(tmp_path / "replay")]) == 0
    original = (out / "dispatch.log").read_bytes()
    replayed = (tmp_path / "replay" / "dispatch.log").read_bytes()
    assert original == replayed
    assert original  # a trivially empty log would satisfy equality


def test_unknown_scenario_fails_cleanly(capsys):
    assert main(["run", "--scenario", "no_such_thing"]) == 1
    assert capsys.readouterr().err.startswith("error:")


# -- qr-size ----------------------------------------------------------------


def test_qr_size_default_output(capsys):
    assert main(["qr-size"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "L_min1 = 25.20 mm  (scan-distance bound, factor 10)"
    assert lines[1] == ("L_min2 = 16.20 mm  (sensor bound: 210 px per side "
                        "on a 4406.4 px sensor width)")
    assert lines[2] == "L_min  = 25.20 mm"
    assert lines[3] == DISCREPANCY_NOTE


def test_qr_size_other_config_has_no_note(capsys):
    assert main(["qr-size", "--dscan", "400"]) == 0
    out = capsys.readouterr().out
    assert "L_min1 = 33.60 mm" in out
    assert "frequently cited" not in out


def test_qr_size_derating_flags(capsys):
    assert main(["qr-size", "--low-light", "--off-angle"]) == 0
    out = capsys.readouterr().out
    assert "factor 8" in out
    assert "L_min1 = 31.50 mm" in out  # 300/8 * 21/25


def test_qr_size_rejects_out_of_range_factor(capsys):
    assert main(["qr-size", "--kdis", "5"]) == 1
    assert capsys.readouterr().err.startswith("error:")


# -- rules check --------------------------------------------------------------


def test_rules_check_shipped_rulebook(capsys):
    assert main(["rules", "check", "default.rules"]) == 0
    captured = capsys.readouterr()
    assert captured.out == "OK, 20 rules\n"
    assert captured.err == ""


def test_rules_check_accepts_a_path(tmp_path, capsys):
    from fogmind.rules.defaults import default_rules_text

    path = tmp_path / "copy.rules"
    path.write_text(default_rules_text())
    assert main(["rules", "check", str(path)]) == 0
    assert "OK, 20 rules" in capsys.readouterr().out


def test_rules_check_emits_warnings(tmp_path, capsys):
    path = tmp_path / "empty.rules"
    path.write_text(
        "VAR soil input linguistic pct RANGE 0 100\n"
        "LABEL dry GAUSS 0 50\n")
    assert main(["rules", "check", str(path)]) == 0
    captured = capsys.readouterr()
    assert captured.out == "OK, 0 rules\n"
    assert "warning:" in captured.err


def test_rules_check_missing_file(capsys):
    assert main(["rules", "check", "missing.rules"]) == 1
    assert "no such rulebook" in capsys.readouterr().err


# -- broker addressing ----------------------------------------------------------


@pytest.mark.parametrize(
    "url,expected",
    [
        ("tcp://127.0.0.1:1883", ("127.0.0.1", 1883)),
        ("localhost:99", ("localhost", 99)),
        ("tcp://broker.lan:18830", ("broker.lan", 18830)),
    ],
)
def test_parse_broker(url, expected):
    assert _parse_broker(url) == expected


@pytest.mark.parametrize("bad", ["nope", "tcp://host:", "tcp://host:abc", ":1883x"])
def test_parse_broker_rejects_junk(bad):
    with pytest.raises(ValueError):
        _parse_broker(bad)


def test_broker_flag_beats_environment(monkeypatch):
    monkeypatch.setenv(BROKER_ENV, "tcp://env-host:1000")
    assert _broker_arg(Namespace(broker="tcp://flag-host:2000")) == ("flag-host", 2000)
    assert _broker_arg(Namespace(broker=None)) == ("env-host", 1000)
    monkeypatch.delenv(BROKER_ENV)
    assert _broker_arg(Namespace(broker=None)) is None
