import json
import os
import subprocess
import sys

import pytest

from sumprodlab.cli import main, parse_args
from sumprodlab.errors import UsageError


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def strip_wall_time(doc):
    doc["provenance"].pop("wall_time", None)
    return doc


def test_sumprod_gp_example(capsys):
    code, out, _ = run_cli(capsys, "sumprod", "--family", "gp", "--n", "8")
    doc = json.loads(out)
    assert code == 0
    assert doc["quantities"]["|A.A|"] == 15
    assert doc["schema"] == 1


def test_sumprod_over_fp(capsys):
    code, out, _ = run_cli(capsys, "sumprod", "--family", "random", "--n", "12", "--p", "101", "--seed", "4")
    doc = json.loads(out)
    assert code == 0
    assert any(c["name"].startswith("Cauchy-Davenport") for c in doc["checks"])


def test_reports_are_deterministic(capsys):
    argv = ("sumprod", "--family", "random", "--n", "10", "--seed", "7")
    _, a, _ = run_cli(capsys, *argv)
    _, b, _ = run_cli(capsys, *argv)
    assert strip_wall_time(json.loads(a)) == strip_wall_time(json.loads(b))
    _, c, _ = run_cli(capsys, "sumprod", "--family", "random", "--n", "10", "--seed", "8")
    assert json.loads(c)["quantities"]["A"] != json.loads(a)["quantities"]["A"]


def test_conjecture_histogram(capsys):
    code, out, _ = run_cli(capsys, "conjecture", "--p", "3", "--x", "auto")
    assert code == 0
    hist = json.loads(out)["histogram"]["A"]
    expected = {18: 6561, 27: 2916, 54: 486, 81: 108, 162: 18, 243: 4, 486: 1}
    assert {int(k): v for k, v in hist.items() if int(k) in expected} == expected
    code, out, _ = run_cli(capsys, "conjecture", "--format", "csv")
    rows = out.splitlines()
    assert rows[0] == "n,count" and "18,6561" in rows and "486,1" in rows


@pytest.mark.parametrize(
    "argv",
    [
        ("bisectors", "--p", "5"),
        ("bisectors", "--p", "9"),
        ("conjecture", "--k", "2"),
        ("conjecture", "--p", "7"),
        ("spectral", "--p", "7"),
        ("sumprod", "--budget-tuples", "0"),
        ("sumprod", "--n", "0"),
        ("frobnicate",),
        ("sumprod", "--format", "xml"),
    ],
)
def test_usage_and_resource_errors_exit_1(capsys, argv):
    code, out, err = run_cli(capsys, *argv)
    assert code == 1 and out == "" and "sumprodlab:" in err


def test_tuple_budget_aborts_before_output(capsys, tmp_path):
    target = tmp_path / "r.json"
    code, out, err = run_cli(capsys, "incidence", "--n", "10", "--budget-tuples", "100", "--out", str(target))
    assert code == 1 and "ResourceLimit" in err
    assert out == "" and not target.exists()


def test_seconds_budget_aborts(capsys):
    code, _, err = run_cli(capsys, "bisectors", "--budget-seconds", "1e-9", "--samples", "10", "--centres", "2")
    assert code == 1 and "ResourceLimit" in err


def test_config_file_defaults_and_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"family": "gp", "n": 5}))
    args = parse_args(["sumprod", "--config", str(cfg)])
    assert (args.family, args.n) == ("gp", 5)
    args = parse_args(["sumprod", "--config", str(cfg), "--n", "9"])
    assert (args.family, args.n) == ("gp", 9)
    code, out, _ = run_cli(capsys, "sumprod", "--config", str(cfg))
    assert code == 0 and json.loads(out)["quantities"]["|A.A|"] == 9
    cfg.write_text(json.dumps({"colour": "red"}))
    with pytest.raises(UsageError):
        parse_args(["sumprod", "--config", str(cfg)])


def test_out_file_and_csv_checks(tmp_path, capsys):
    target = tmp_path / "checks.csv"
    code, out, _ = run_cli(capsys, "sumprod", "--family", "ap", "--n", "6", "--format", "csv", "--out", str(target))
    assert code == 0 and out == ""
    lines = target.read_text().splitlines()
    assert lines[0] == "section,name,lhs,relation,rhs,asserted,verdict"
    assert any("2n - 1" in ln and ln.endswith(",pass") for ln in lines[1:])


def test_incidence_reports_the_literal_chain_failure(capsys):
    # the literal Solymosi inequality fails for this family (see the decisions ledger): exit 2
    code, out, err = run_cli(capsys, "incidence", "--family", "ap", "--n", "8", "--st-n", "4")
    doc = json.loads(out)
    assert code == 2 and "FAILED solymosi" in err
    names = {c["name"]: c["verdict"] for c in doc["sections"]["solymosi"]["checks"]}
    assert names["n 2^i0 <= |A+A|^2"]


@pytest.mark.slow
def test_bisectors_command_passes(capsys):
    code, out, err = run_cli(capsys, "bisectors", "--p", "3", "--samples", "200", "--centres", "10")
    assert code == 0, err


def test_module_entry_point():
    env = dict(os.environ)
    res = subprocess.run([sys.executable, "-m", "sumprodlab", "sumprod", "--family", "ap", "--n", "4"],
                         capture_output=True, text=True, env=env, timeout=300)
    assert res.returncode == 0
    assert json.loads(res.stdout)["quantities"]["|A+A|"] == 7
