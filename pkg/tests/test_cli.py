import json
import subprocess
import sys

import pytest

from puosc import cli, verify


def run(*argv):
    """Run the CLI in-process; returns (exit code, stdout, stderr)."""
    proc = subprocess.run([sys.executable, "-m", "puosc", *argv], capture_output=True, text=True)
    return proc.returncode, proc.stdout, proc.stderr


def test_coeffs_example():
    code, out, _ = run("coeffs", "--w1", "1.41421356", "--w2", "1")
    assert code == 0
    rep = json.loads(out)
    assert rep["result"]["a"] == pytest.approx(1, abs=1e-8)
    assert rep["result"]["b"] == pytest.approx(1, abs=1e-8)
    assert rep["result"]["c"] == pytest.approx(2, abs=1e-8)
    assert rep["pass"] and all(c["status"] == "pass" for c in rep["checks"])
    assert rep["command"]["name"] == "coeffs"


def test_caustic_exit_code():
    code, out, err = run("kernel", "--model", "pu", "--w1", "2", "--w2", "1", "--T", "1.5707963")
    assert code == 1
    assert "omega1" in err


@pytest.mark.parametrize(
    "argv,flag",
    [
        (["coeffs", "--w1", "1", "--w2", "2"], "--w1"),
        (["coeffs", "--w2", "-1"], "--w2"),
        (["kernel", "--T", "1", "--eps", "1.5"], "--eps"),
        (["classical", "--dt", "-0.1"], "--dt"),
        (["verify", "--parallel", "0"], "--parallel"),
        (["coeffs", "--bogus", "1"], "--bogus"),
        (["spectrum", "--format", "xml"], "--format"),
    ],
)
def test_usage_errors(argv, flag):
    code, _, err = run(*argv)
    assert code == 2
    assert flag in err


def test_spectrum_csv():
    code, out, _ = run("spectrum", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "m,n,E"
    assert len(lines) == 11


def test_brackets_text():
    code, out, _ = run("brackets", "--system", "equal")
    assert code == 0
    assert "{xdd,p0}* = -1/2*w^2" in out
    assert "{xdd,p2}* = 1/2" in out
    assert "p0 = 3/2*w^2*xd + xddd" in out


def test_brackets_json():
    code, out, _ = run("brackets", "--format", "json")
    rep = json.loads(out)
    assert code == 0
    assert rep["result"]["dirac"] == {"x,p0": "1", "xdd,p2": "1"}


def test_equalfreq():
    code, out, _ = run("equalfreq")
    assert code == 0
    assert json.loads(out)["result"]["geometric_mult"] == [1, 1]


def test_classical_report_and_csv(tmp_path):
    out_file = tmp_path / "traj.csv"
    code, _, _ = run("classical", "--steps", "50", "--format", "csv", "--out", str(out_file))
    assert code == 0
    assert out_file.read_text().splitlines()[0].startswith("t,x_re")
    code, out, _ = run("classical")
    assert code == 0 and json.loads(out)["pass"]


def test_unwritable_output(tmp_path):
    code, _, err = run("coeffs", "--out", str(tmp_path / "missing" / "x.json"))
    assert code == 2
    assert "--out" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["coeffs"],
        ["spectrum", "--format", "csv"],
        ["kernel", "--model", "pu", "--T", "1", "--x1", "0.3+0.1j"],
        ["classical", "--seed", "3"],
    ],
)
def test_byte_identical(argv):
    assert run(*argv)[1] == run(*argv)[1]


def test_in_process_main(capsys):
    assert cli.main(["kernel", "--T", "1.0", "--eps", "0.3", "--q2", "0.5"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["result"]["eps"] == 0.3


def test_verify_suite_cli(capsys):
    assert cli.main(["verify", "--suite", "brackets"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert len(rep["checks"]) >= 5
    assert {"name", "anchor", "status", "measured", "tolerance"} <= set(rep["checks"][0])


def test_failing_check_gives_exit_1(monkeypatch, capsys):
    bad = verify.Check("always fails", "core", "test", 0.0, "<", lambda rng: 1.0)
    monkeypatch.setattr(verify, "_REGISTRY", verify._REGISTRY + [bad])
    assert cli.main(["verify", "--suite", "core"]) == 1
    rep = json.loads(capsys.readouterr().out)
    assert rep["pass"] is False


def test_crashing_check_is_reported():
    def boom(rng):
        raise RuntimeError("boom")

    rec = verify.evaluate(verify.Check("boom", "core", "test", 1.0, "<", boom), None)
    assert rec.status.startswith("error")


def test_verify_registry_size():
    assert len(verify.registry("all")) >= 25
    assert {c.suite for c in verify.registry()} == set(verify.SUITES)
    with pytest.raises(ValueError):
        verify.registry("nope")


def test_verify_parallel_is_deterministic():
    seq = [r.as_dict() for r in verify.run_suite("core", seed=7)]
    par = [r.as_dict() for r in verify.run_suite("core", seed=7, parallel=4)]
    assert seq == par
