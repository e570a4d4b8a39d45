import csv
import io
import json
import shutil
import subprocess

import pytest

from coherent_constraints.cli import HEADER, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_list(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0
    assert "su2-kernel" in out and "coherent_constraints.models.su2" in out


def test_run_su2_rank(capsys):
    code, out, _ = run(capsys, "run", "--name", "su2-kernel", "--set", "s=1")
    assert code == 0
    rows = _rows(out)
    assert rows[0] == HEADER
    rank = next(r for r in rows if r[0] == "rank")
    assert rank[1] == "3" and rank[-1] == "true"


def test_full_precision_values(capsys):
    _, out, _ = run(capsys, "run", "--name", "second-class")
    value = _rows(out)[1][1]
    assert len(value.replace("-", "").replace(".", "").split("e")[0]) >= 15


def test_reruns_are_bit_identical(capsys):
    _, a, _ = run(capsys, "run", "--name", "monte-carlo-average", "--seed", "4")
    _, b, _ = run(capsys, "run", "--name", "monte-carlo-average", "--seed", "4")
    assert a == b


def test_gauge_independence_passes(capsys):
    code, out, _ = run(capsys, "run", "--name", "gauge-independence", "--set", "seeds=3")
    assert code == 0 and out.strip().endswith("true")


def test_json_output(capsys, tmp_path):
    path = tmp_path / "out.json"
    code, out, _ = run(capsys, "run", "--name", "noncompact-analogue", "--format", "json", "--out", str(path))
    assert code == 0 and out == ""
    data = json.loads(path.read_text())
    assert data[0]["pass"] is True and set(data[0]) == set(HEADER)


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "exp.ini"
    cfg.write_text("[su2-kernel]\ns = 0.5\nseed = 2\n")
    code, out, _ = run(capsys, "run", "--config", str(cfg))
    assert code == 0
    assert next(r for r in _rows(out) if r[0] == "rank")[1] == "2"


@pytest.mark.parametrize("argv", [
    ("run", "--name", "no-such-experiment"),
    ("run", "--name", "su2-kernel", "--set", "spin=1"),
    ("run", "--name", "su2-kernel", "--set", "s"),
    ("run", "--name", "su2-kernel", "--set", "s=abc"),
    ("run",),
    ("verify", "--criteria", "42"),
    ("frobnicate",),
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err


def test_tightened_tolerance_fails(capsys):
    code, _, err = run(capsys, "run", "--name", "overlap-oracle", "--tol-scale", "1e-30")
    assert code == 1 and "FAIL" in err
    code, out, err = run(capsys, "verify", "--criteria", "1,12", "--tol-scale", "1e-30")
    assert code == 1 and "[FAIL]" in out and "failing criteria" in err


def test_verify_fast_suite(capsys, tmp_path):
    path = tmp_path / "rows.csv"
    code, out, _ = run(capsys, "verify", "--suite", "fast", "--out", str(path))
    assert code == 0
    assert out.count("[PASS]") == 11 and "[FAIL]" not in out
    assert _rows(path.read_text())[0] == HEADER


@pytest.mark.skipif(shutil.which("coherent-constraints") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["coherent-constraints", "run", "--name", "noncompact-analogue"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.startswith(",".join(HEADER))
