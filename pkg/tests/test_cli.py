import json
import math

import pytest

from povm_realism import cli


def run(capsys, *argv):
    code = cli.run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_threshold_human(capsys):
    code, out, _ = run(capsys, "threshold", "--quantity", "lgi", "--gamma", "0")
    assert code == 0 and out.strip() == "0.816497"


def test_chsh_test_example(capsys):
    code, out, _ = run(capsys, "chsh-test", "--state", "singlet", "--lambda", "0.7071067811", "--gamma", "0.29")
    assert code == 0 and out.strip() == "criterion=1.0000, violated=false"


def test_chsh_test_json_custom_state(capsys):
    code, out, _ = run(capsys, "chsh-test", "--tmat", "[[-0.5,0,0],[0,-0.5,0],[0,0,-0.5]]",
                       "--lambda", "1", "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["criterion"] == pytest.approx(math.sqrt(0.5)) and d["violated"] is False


def test_mr_json_full_precision(capsys):
    code, out, _ = run(capsys, "mr", "--quantity", "lgi", "--lambda", "0.9", "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["value"] == pytest.approx(1.215, abs=1e-14) and "k_nsit" in d


def test_mr_overrides(capsys):
    code, out, _ = run(capsys, "mr", "--quantity", "nsit", "--lambda", "1", "--omega-dt", "0")
    assert code == 0 and float(out) == pytest.approx(0.0, abs=1e-12)


def test_invalid_parameters_exit_2(capsys):
    code, _, err = run(capsys, "chsh-test", "--lambda", "0.8", "--gamma", "0.3")
    assert code == 2 and "|lambda|+|gamma| must be <= 1" in err
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys)[0] == 2
    assert run(capsys, "chsh-test", "--lambda", "1", "--tmat", "[1,2")[0] == 2
    assert run(capsys, "chsh-test", "--lambda", "1", "--tmat", "[[-1,0,0],[0,-1,0],[0,0,1]]")[0] == 2


def test_seed_env(capsys, monkeypatch):
    monkeypatch.setenv(cli.SEED_ENV, "5")
    _, a, _ = run(capsys, "chsh-test", "--random", "--lambda", "1", "--format", "json")
    _, b, _ = run(capsys, "chsh-test", "--random", "--lambda", "1", "--format", "json", "--seed", "5")
    _, c, _ = run(capsys, "chsh-test", "--random", "--lambda", "1", "--format", "json", "--seed", "6")
    assert a == b != c
    monkeypatch.setenv(cli.SEED_ENV, "x")
    assert run(capsys, "chsh-test", "--random", "--lambda", "1")[0] == 2


def test_sweep_writes_file(capsys, tmp_path):
    code, out, _ = run(capsys, "sweep", "--quantity", "lgi", "--step", "0.1", "--out-dir", str(tmp_path))
    assert code == 0
    path = tmp_path / "lgi_0.1.csv"
    assert path.read_text().startswith("lambda,gamma,valid,value,violated\n")


def test_threshold_curve_csv(capsys):
    code, out, _ = run(capsys, "threshold", "--quantity", "lgi", "--gamma-min", "-0.1",
                       "--gamma-max", "0.1", "--gamma-step", "0.1", "--format", "csv")
    assert code == 0 and len(out.splitlines()) == 4


def test_chsh_max(capsys):
    code, out, _ = run(capsys, "chsh-max", "--lambda", "1", "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["numeric"] == pytest.approx(2 * math.sqrt(2), abs=1e-6)


def test_verify_corollary(capsys):
    code, out, _ = run(capsys, "verify-corollary", "--samples", "50", "--step", "0.1")
    assert code == 0 and "counterexamples=0" in out


def test_output_file(capsys, tmp_path):
    target = tmp_path / "o.txt"
    code, out, _ = run(capsys, "mr", "--quantity", "nsit", "--lambda", "1", "--output", str(target))
    assert code == 0 and out == "" and target.read_text() == "0.5\n"
