import json
import os
import subprocess
import sys

import pytest

from padictheta.cli import main
from padictheta.config import ConfigError, default_config_path, load_config


def _files(d):
    out = {}
    for name in sorted(os.listdir(d)):
        with open(os.path.join(d, name), "rb") as fh:
            out[name] = fh.read()
    return out


def test_table1_rerun_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["table1", "--out", str(a)]) == 0
    assert main(["table1", "--out", str(b), "--threads", "3"]) == 0
    fa, fb = _files(a), _files(b)
    assert fa.keys() == fb.keys()
    assert fa["table1.csv"] == fb["table1.csv"]
    ra, rb = json.loads(fa["report.json"]), json.loads(fb["report.json"])
    ra.pop("threads"), rb.pop("threads")
    assert ra == rb
    header = fa["table1.csv"].decode().splitlines()[0]
    assert header == "D,theta_plus_L0,theta_minus_L0,theta_plus_L1,theta_minus_L1"
    assert len(fa["table1.csv"].decode().splitlines()) == 18
    summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert summary["status"] == "pass" and summary["t"] == 1


def test_validate_with_empty_target_lists(tmp_path):
    text = open(default_config_path()).read()
    text = text.replace(
        "table1_D = [2, 5, 6, 7, 8, 11, 13, 15, 18, 19, 20, 21, 24, 26, 28, 31, 32]", "table1_D = []"
    ).replace("table2_D = [2, 5, 6, 7, 8, 11, 13, 15, 18, 19, 20, 21, 24, 26, 28]", "table2_D = []")
    cfg_path = tmp_path / "empty.toml"
    cfg_path.write_text(text)
    assert load_config(str(cfg_path)).table1_D == []
    out = tmp_path / "out"
    assert main(["validate", "--config", str(cfg_path), "--out", str(out)]) == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["t"] == 1
    assert rep["stages"]["validate"]["reports"]["hensel_root"] == {"mod_p2": 17, "mod_p3": 311}


@pytest.mark.parametrize(
    "edit, field",
    [
        (("\np = 7\n", "\np = 2\n"), "padic.p"),
        (('seed = 3', 'seed = "3"'), "padic.seed"),
        (('lattice = "order"', 'lattice = "maximal"'), "phi[0].lattice"),
        (('gamma = "2/7,3/28,3/14,3/28"', 'gamma = "2/7,3/28"'), "unit.gamma"),
        (('bound = 1372', ''), "bound"),
    ],
)
def test_config_errors_cite_the_field(edit, field):
    text = open(default_config_path()).read()
    assert edit[0] in text
    with pytest.raises(ConfigError) as err:
        load_config(text=text.replace(edit[0], edit[1], 1))
    assert field in str(err.value)


def test_bad_config_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text("[algebra\n")
    assert main(["validate", "--config", str(bad)]) == 2
    assert "error" in capsys.readouterr().err


def test_failing_check_gives_nonzero_exit(tmp_path):
    text = open(default_config_path()).read()
    # a unit outside the order makes validation fail
    text = text.replace('gamma = "2/7,3/28,3/14,3/28"', 'gamma = "2/7,-3/28,3/14,3/28"')
    cfg_path = tmp_path / "g.toml"
    cfg_path.write_text(text)
    assert main(["validate", "--config", str(cfg_path)]) != 0


def test_module_entry_point(tmp_path):
    res = subprocess.run(
        [sys.executable, "-m", "padictheta", "validate", "--out", str(tmp_path)],
        capture_output=True,
        text=True,
        timeout=300,
    )
    assert res.returncode == 0, res.stderr
    assert json.loads(res.stdout)["stages"] == {"validate": "pass"}


@pytest.mark.slow
def test_table2_from_cached_series_matches_fresh_run(tmp_path):
    out = tmp_path / "run"
    assert main(["table2", "--out", str(out)]) == 0
    fresh = _files(out)
    os.remove(out / "table2.csv")
    assert main(["table2", "--out", str(out)]) == 0
    again = _files(out)
    assert again["table2.csv"] == fresh["table2.csv"]
    assert again["series_theta0p.json"] == fresh["series_theta0p.json"]
    assert again["table2.csv"].decode().splitlines()[0] == "D,theta0p_over_p,U,U2,pr_plus,pr_minus,e_ord"
