import json
import subprocess
import sys

import pytest

from ctrlscape import suites
from ctrlscape.cli import run
from ctrlscape.domains import Domain


def test_critvals_exit_zero(capsys):
    assert run(["critvals", "--dim", "3"]) == 0
    assert "PASS  gradient_vanishes" in capsys.readouterr().out


def test_json_and_csv_outputs(tmp_path):
    out = tmp_path / "r.json"
    code = run(["signatures", "--domain", "sympl", "--dim", "2", "--rotations", "1",
                "--out", str(out), "--csv-dir", str(tmp_path / "csv"), "--quiet"])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["schema_version"] == 1
    assert doc["manifest"]["command"] == "signatures" and doc["manifest"]["domain"] == "sympl"
    assert {"checks", "tables", "notices", "timing", "passed"} <= set(doc)
    assert doc["notices"] and {"paper_claim", "paper_location", "measured", "verdict"} == set(
        doc["notices"][0])
    assert (tmp_path / "csv" / "signatures.csv").exists()
    assert (tmp_path / "csv" / "discrepancy_notices.csv").exists()


def test_trials_max_iters_one_fails(tmp_path):
    out = tmp_path / "t.json"
    assert run(["trials", "--dim", "3", "--trials", "3", "--max-iters", "1", "--quiet",
                "--out", str(out)]) == 1
    rows = json.loads(out.read_text())["tables"]["trials"]
    assert {r["termination"] for r in rows} == {"MaxIters"}


def test_trials_config_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"max_iters": 1}))
    assert run(["trials", "--dim", "2", "--trials", "2", "--config", str(cfg), "--quiet"]) == 1


def test_usage_errors_exit_two():
    with pytest.raises(SystemExit) as exc:
        run(["critvals", "--domain", "quaternion"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        run(["trials", "--backtrack-factor", "2.0"])
    assert exc.value.code == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "ctrlscape", "critvals", "--dim", "2", "--quiet"],
                         capture_output=True)
    assert res.returncode == 0


@pytest.mark.parametrize("make", [
    lambda: suites.cmd_gradcheck(Domain("sym", 3), samples=10, seed=5),
    lambda: suites.cmd_trials(Domain("sympl", 2), trials=4, seed=5),
    lambda: suites.cmd_target_invariance(Domain("sym", 3), samples=2, seed=5),
])
def test_numeric_payload_is_reproducible(make):
    assert make().numeric_payload() == make().numeric_payload()
