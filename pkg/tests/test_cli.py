import io
import json
import shutil
from pathlib import Path

import pytest

from coevolve.cli import main

INPUTS = Path(__file__).resolve().parent.parent / "inputs"


@pytest.fixture
def inputs(tmp_path):
    for f in INPUTS.iterdir():
        shutil.copy(f, tmp_path / f.name)
    return tmp_path


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out)
    return code, out.getvalue()


def test_analyze(inputs):
    code, text = run("analyze", inputs / "pd.txt", "--format", "json")
    assert code == 0
    diag = json.loads(text)["diagnostics"]
    assert diag["punishment_actions"] == ["D"] and diag["deviation_gains"]["C"] == 1


@pytest.mark.parametrize("env, code", [("pd_env_c2.json", 0), ("pd_env_c05.json", 1)])
def test_certify_pure_exit_codes(inputs, env, code):
    assert run("certify", inputs / env, "--pure", "C")[0] == code


def test_certify_interdependent(inputs):
    assert run("certify", inputs / "pd_env_c2.json", "--pure", "C", "--interdependent")[0] == 0


def test_configuration_check_is_inconclusive_without_a_refutation(inputs):
    cfg = inputs / "rps_cfg.json"
    assert run("construct", inputs / "rps_env.json", "--rps", "--out", cfg)[0] == 0
    assert run("certify", inputs / "rps_env.json", "--config", cfg)[0] == 2


def test_refute_cooperators(inputs):
    code, text = run("refute", inputs / "pd_env_c05.json", inputs / "pd_cooperators.json", "--format", "json")
    assert code == 1
    assert json.loads(text)["verdict"]["status"] == "refuted"


def test_usage_errors():
    assert run()[0] == 64
    assert run("certify")[0] == 64
    assert run("frobnicate")[0] == 64


def test_data_errors(inputs, capsys):
    bad = inputs / "bad.txt"
    bad.write_text("actions: a b\n1 2\n3 q\n")
    assert run("analyze", bad)[0] == 65
    assert "bad.txt:3:3" in capsys.readouterr().err
    assert run("analyze", inputs / "missing.txt")[0] == 65


def test_json_reports_are_byte_identical(inputs):
    argv = ("refute", inputs / "pd_env_c05.json", inputs / "pd_cooperators.json", "--format", "json", "--all")
    assert run(*argv)[1] == run(*argv)[1]
    sim = ("simulate", inputs / "pd_env_c05.json", inputs / "pd_cooperators.json",
           "--mutants", inputs / "pd_mutants.json", "--horizon", "20", "--format", "json")
    a, b = run(*sim), run(*sim)
    assert a == b and a[0] == 0


def test_construct_round_trip_and_hawk_dove_cases(inputs):
    code, text = run("construct", inputs / "hd_env.json", "--hawk-dove", "1/2", "2/5", "--format", "json")
    body = json.loads(text)
    assert code == 0 and body["round_trip_identical"] and body["balanced"]
    assert run("construct", inputs / "hd_env.json", "--hawk-dove", "3/10", "2/5")[0] == 1
    code, text = run("construct", inputs / "rps_example_env.json", "--rps-example", "1/2", "--format", "json")
    assert code == 0 and json.loads(text)["round_trip_identical"]


def test_simulate_writes_csv(inputs):
    cfg = inputs / "rps_cfg.json"
    run("construct", inputs / "rps_env.json", "--rps", "--out", cfg)
    csv_path = inputs / "traj.csv"
    code, _ = run("simulate", inputs / "rps_env.json", cfg, "--horizon", "5", "--radius", "0.001",
                  "--csv", csv_path)
    assert code == 0
    assert csv_path.read_text().startswith("time,x_")
