import json
import subprocess
import sys

import pytest

from phigamma import cli, suites
from phigamma.errors import InvalidConfig, UnknownSuite
from phigamma.suites import CheckResult, RunConfig, run_suite


def test_case_two_needs_positive_rank(capsys):
    assert cli.main(["heckesurnul", "--p", "3", "--r", "0", "--case", "2"]) == 2
    assert "r >= 1" in capsys.readouterr().err
    with pytest.raises(InvalidConfig):
        run_suite("heckesurnul", RunConfig(p=3, r=0, case=2))


def test_unknown_suite(capsys):
    assert cli.main(["nonsense"]) == 2
    with pytest.raises(UnknownSuite):
        run_suite("nonsense")


@pytest.mark.parametrize(
    "flags,needle",
    [
        (["--p", "3", "--prec-p", "1", "--prec-x", "60"], "p^M > N"),
        (["--p", "3", "--r", "3"], "r <= p - 1"),
        (["--trials", "0"], "trials >= 1"),
        (["--p", "2"], "p must be"),
    ],
)
def test_config_errors_name_the_constraint(flags, needle, capsys):
    assert cli.main(["series-identities", *flags]) == 2
    assert needle in capsys.readouterr().err


def test_series_identities_text(capsys):
    assert cli.main(["series-identities", "--p", "3", "--prec-x", "81"]) == 0
    out = capsys.readouterr().out
    for t in range(3):
        assert f"PASS series/p=3/psi-monomial-{t}" in out
    assert "prec_x = 81" in out and "seed = 0" in out
    assert "not verified" in out


def test_json_lines_are_deterministic(tmp_path):
    paths = []
    for k, jobs in enumerate(("1", "3")):
        path = tmp_path / f"r{k}.jsonl"
        code = cli.main(["ind-structure", "--p", "3", "--format", "json-lines", "--out", str(path), "--seed", "7", "--jobs", jobs])
        assert code == 0
        paths.append(path)
    a, b = (x.read_bytes() for x in paths)
    assert a == b
    records = [json.loads(line) for line in a.decode().splitlines()]
    assert records[0]["record"] == "config" and records[0]["seed"] == 7
    assert records[-1] == {"record": "summary", "checks": len(records) - 2 - len(suites.CITED), "failed": 0, "passed": True}
    ids = [r["id"] for r in records if r["record"] == "check" and r.get("status") == "verified"]
    assert ids == sorted(ids)
    assert any(r.get("status") == "cited, not verified" for r in records)


def test_config_file_and_override(tmp_path, capsys):
    conf = tmp_path / "run.conf"
    conf.write_text("# a run\np = 5\nprec-x = 40\nseed = 3\n")
    assert cli.main(["series-identities", "--config", str(conf), "--seed", "4"]) == 0
    out = capsys.readouterr().out
    assert "p = 5" in out and "prec_x = 40" in out and "seed = 4" in out
    conf.write_text("p = 5\nbogus = 1\n")
    assert cli.main(["series-identities", "--config", str(conf)]) == 2


def test_lambda_coordinates():
    args = cli.build_parser().parse_args(["rho-lattice", "--p", "5", "--lambda", "1,2"])
    assert cli.config_from_args(args).lam == 11


def test_failure_exit_code(monkeypatch, capsys):
    def broken(cfg):
        return [CheckResult("broken/one", False, "1 = 2", payload={"seed": cfg.seed})]

    monkeypatch.setitem(suites._RUNNERS, "series-identities", broken)
    assert cli.main(["series-identities", "--p", "3"]) == 1
    out = capsys.readouterr().out
    assert "FAIL broken/one" in out and "replay" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "phigamma", "series-identities", "--p", "5"], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "checks passed" in proc.stdout
