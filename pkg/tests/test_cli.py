import subprocess
import sys

import pytest

from gcsl.cli import main
from gcsl.report import parse_records

from conftest import GOLDEN, data_path


def run(*argv):
    return main(list(argv))


def test_translate_matches_golden(tmp_path, capsys):
    assert run("translate", "--contract", data_path("req3.gcsl"), "--model", data_path("fire.sosm"),
               "--time-bound", "7months") == 0
    assert capsys.readouterr().out == (GOLDEN / "req3_7months.bltl").read_text()


def test_parse_dump_and_pretty(capsys):
    assert run("parse", data_path("reqs.gcsl")) == 0
    assert "Contract" in capsys.readouterr().out
    assert run("parse", data_path("reqs.gcsl"), "--pretty") == 0
    assert "contract req2" in capsys.readouterr().out


def test_simulate_monitor_eval(tmp_path, capsys):
    trace = tmp_path / "run.trace"
    assert run("simulate", "--model", data_path("coin.sosm"), "--seed", "3", "--horizon", "1",
               "-o", str(trace)) == 0
    formula = tmp_path / "f.bltl"
    formula.write_text("G<=1 ({coin.heads} | !{coin.heads})\n")
    assert run("monitor", "--formula", str(formula), "--trace", str(trace)) == 0
    assert capsys.readouterr().out == "holds\n"
    formula.write_text("G<=1 false\n")
    assert run("monitor", "--formula", str(formula), "--trace", str(trace)) == 1
    assert capsys.readouterr().out.startswith("violated at t=0.0")
    assert run("eval", "--expr", "coin.heads or not coin.heads", "--trace", str(trace)) == 0
    assert capsys.readouterr().out == "true\n"


def test_monitor_trace_too_short_is_an_error(tmp_path, capsys):
    trace = tmp_path / "run.trace"
    run("simulate", "--model", data_path("coin.sosm"), "--horizon", "1", "-o", str(trace))
    formula = tmp_path / "f.bltl"
    formula.write_text("F<=5 {coin.heads}\n")
    assert run("monitor", "--formula", str(formula), "--trace", str(trace)) == 2
    assert "needs the trace to cover 5" in capsys.readouterr().err


def test_check_records_and_exit_codes(capsys):
    args = ("check", "--model", data_path("fire.sosm"), "--contract", data_path("reqs.gcsl"),
            "--time-bound", "4months", "--mode", "fixed:20", "--seed", "1", "--format", "records")
    code = run(*args)
    records = parse_records(capsys.readouterr().out)
    assert [r["contract"] for r in records] == ["req1", "req2"]
    assert records[0]["p_hat"] == 1.0 and records[0]["verdict"] == "holds"
    assert len(records[1]["seeds"]) == 20
    expected = 1 if "violated" in {r["verdict"] for r in records} else 0
    assert code == expected


def test_check_undecided_exit(capsys, tmp_path):
    contract = tmp_path / "c.gcsl"
    contract.write_text("contract wide Goal: always [true] Confidence: 50%\n")
    code = run("check", "--model", data_path("coin.sosm"), "--contract", str(contract),
               "--time-bound", "1", "--mode", "chernoff:0.6,0.5", "--seed", "0")
    out = capsys.readouterr().out
    # p_hat = 1 lies within the precision band 0.6 of the 0.5 threshold
    assert "verdict     undecided" in out and code == 3


def test_seed_from_environment(monkeypatch, tmp_path):
    a, b = tmp_path / "a.trace", tmp_path / "b.trace"
    monkeypatch.setenv("GCSL_SEED", "77")
    run("simulate", "--model", data_path("fire.sosm"), "--horizon", "30", "-o", str(a))
    monkeypatch.delenv("GCSL_SEED")
    run("simulate", "--model", data_path("fire.sosm"), "--horizon", "30", "--seed", "77", "-o", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_config_file_fills_options(tmp_path, capsys):
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text(f"model: {data_path('fire.sosm')}\ntime-bound: 7months\n")
    assert run("--config", str(cfg), "translate", "--contract", data_path("req3.gcsl")) == 0
    assert capsys.readouterr().out == (GOLDEN / "req3_7months.bltl").read_text()


@pytest.mark.parametrize("argv,message", [
    (("translate", "--contract", "x.gcsl"), "missing required option"),
    (("check", "--model", "m", "--contract", "c", "--time-bound", "1", "--mode", "sprt"), "cannot read"),
    (("simulate", "--model", "nowhere.sosm", "--horizon", "1"), "cannot read"),
])
def test_usage_errors(argv, message, capsys):
    assert run(*argv) == 2
    assert message in capsys.readouterr().err


def test_bad_mode(capsys):
    code = run("check", "--model", data_path("coin.sosm"), "--contract", data_path("reqs.gcsl"),
               "--time-bound", "1", "--mode", "sprt:3")
    assert code == 2 and "--mode" in capsys.readouterr().err


def test_unknown_flag_and_missing_command(capsys):
    assert run("simulate", "--bogus") == 2
    assert run() == 2
    assert "usage" in capsys.readouterr().err


def test_parse_error_location(tmp_path, capsys):
    bad = tmp_path / "bad.gcsl"
    bad.write_text("contract C\nGoal: always [x.p\nConfidence: 90%\n")
    assert run("parse", str(bad)) == 2
    assert "3:" in capsys.readouterr().err


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "gcsl", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "translate" in out.stdout
