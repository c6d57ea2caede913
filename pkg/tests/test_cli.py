import csv
import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from micz_lab import cli
from micz_lab.claims import REGISTRY

BRACKETS = """
task = "check-brackets"
system = "osc-aniso"
seed = 42
[params]
omega = 1.2
delta_omega_sq = 0.3
eps_el = 0.2
[states]
count = 100
[output]
dir = "{out}"
name = "brackets"
"""

SIMULATE = """
task = "simulate"
system = "osc-iso"
[params]
omega = 1.0
[states]
explicit = [[0.3, 0.1, -0.2, 0.25, 0.4, -0.3, 0.2, 0.1]]
[integrator]
t_end = 6.283185307179586
rtol = 1e-10
atol = 1e-12
[output]
dir = "{out}"
name = "sim"
"""


def _write(tmp_path, text, name="cfg.toml"):
    p = tmp_path / name
    p.write_text(text.format(out=tmp_path.as_posix()))
    return str(p)


def test_check_brackets_run(tmp_path):
    assert cli.main(["run", _write(tmp_path, BRACKETS)]) == 0
    summary = json.loads((tmp_path / "brackets.json").read_text())
    assert summary["passed"]
    assert summary["checks"]
    assert max(c["value"] for c in summary["checks"]) <= 1e-9
    assert "sampling_bounds" in summary


def test_simulate_closes_after_one_period(tmp_path):
    assert cli.main(["run", _write(tmp_path, SIMULATE)]) == 0
    with open(tmp_path / "sim.csv") as fh:
        rows = list(csv.reader(fh))
    header, first, last = rows[0], rows[1], rows[-1]
    assert header[:9] == ["t", "re_z1", "im_z1", "re_z2", "im_z2", "re_pi1", "im_pi1", "re_pi2", "im_pi2"]
    assert "H" in header
    assert_allclose(float(last[0]), 2 * np.pi)
    assert_allclose([float(v) for v in last[1:9]], [float(v) for v in first[1:9]], atol=1e-6)


def test_missing_system_is_a_config_error(tmp_path, capsys):
    text = BRACKETS.replace('system = "osc-aniso"\n', "")
    assert cli.main(["run", _write(tmp_path, text)]) == 2
    assert "system" in capsys.readouterr().err


def test_missing_t_end_names_the_field(tmp_path, capsys):
    text = SIMULATE.replace("t_end = 6.283185307179586\n", "")
    assert cli.main(["run", _write(tmp_path, text)]) == 2
    assert "integrator.t_end" in capsys.readouterr().err


def test_unknown_key_is_rejected():
    with pytest.raises(cli.ConfigError) as exc:
        cli.parse_config('task = "laplace-check"\n[params]\nomega = 1.0\nmass = 2.0\n')
    assert exc.value.field == "params.mass"


def test_malformed_toml_reports_location():
    with pytest.raises(cli.ConfigError) as exc:
        cli.parse_config('task = "simulate"\nsystem = \n')
    assert "line 2" in str(exc.value)


def test_wrong_curvature_for_system():
    with pytest.raises(cli.ConfigError) as exc:
        cli.parse_config('task = "check-brackets"\nsystem = "higgs"\n[params]\nomega = 1.0\n')
    assert exc.value.field == "params.curvature"


def test_missing_config_file(tmp_path):
    assert cli.main(["run", str(tmp_path / "absent.toml")]) == 2


def test_repeated_runs_are_identical(tmp_path):
    path = _write(tmp_path, BRACKETS)
    cli.main(["run", path])
    first = json.loads((tmp_path / "brackets.json").read_text())
    cli.main(["run", path])
    second = json.loads((tmp_path / "brackets.json").read_text())
    assert cli.dumps(cli.strip_timestamp(first)) == cli.dumps(cli.strip_timestamp(second))


def test_output_directory_override(tmp_path, monkeypatch):
    other = tmp_path / "elsewhere"
    monkeypatch.setenv(cli.OUTPUT_ENV, str(other))
    assert cli.main(["run", _write(tmp_path, BRACKETS)]) == 0
    assert (other / "brackets.json").exists()
    assert not (tmp_path / "brackets.json").exists()


@pytest.mark.parametrize("body", [
    'task = "ks-verify"\nseed = 1\n[params]\nomega = 1.0\ndelta_omega_sq = 0.2\neps_el = 0.1\nR0 = 1.3\n'
    '[states]\ncount = 20\n[ks]\nsource = "pseudosphere"\n',
    'task = "separation-verify"\nseed = 2\n[params]\ngamma = 0.8\ndelta_omega_sq = 0.3\neps_el = 0.1\n'
    'R0 = 1.2\ncurvature = "pseudosphere"\n[states]\ncount = 30\n',
    'task = "laplace-check"\nseed = 3\n[laplace]\nr0 = 1.2\npoints = 5\n',
    'task = "flat-limit"\nseed = 4\n[params]\nomega = 1.0\ndelta_omega_sq = 0.3\neps_el = 0.2\n'
    'curvature = "sphere"\n[flat_limit]\npairs = 3\n',
])
def test_other_tasks_pass(tmp_path, body):
    text = body + '[output]\ndir = "{out}"\n'
    assert cli.main(["run", _write(tmp_path, text)]) == 0


def _summary(checks):
    return {"checks": checks}


def _check(cid, passed, value=0.0):
    c = REGISTRY[cid]
    return {"claim": cid, "system": c.system, "anchor": c.anchor, "value": value, "band": c.band(),
            "passed": passed}


def test_report_single_passing_summary(tmp_path):
    (tmp_path / "a.json").write_text(json.dumps(_summary([_check("ks:bracket-image", True, 1e-12)])))
    assert cli.main(["report", str(tmp_path / "*.json"), "--out", str(tmp_path / "rep")]) == 0
    rep = json.loads((tmp_path / "rep" / "report.json").read_text())
    rows = [r for rows in rep["tables"].values() for r in rows]
    assert len(rows) == 1 and rows[0]["passed"]
    assert rows[0]["anchor"] == REGISTRY["ks:bracket-image"].anchor


def test_report_sorts_failures_first(tmp_path):
    checks = [_check("involution:osc-aniso:J", True), _check("involution:osc-aniso:A_hidden", False, 1.0)]
    (tmp_path / "a.json").write_text(json.dumps(_summary(checks)))
    assert cli.main(["report", str(tmp_path / "*.json"), "--out", str(tmp_path)]) == 1
    rows = json.loads((tmp_path / "report.json").read_text())["tables"]["osc-aniso"]
    assert [r["passed"] for r in rows] == [False, True]


def test_report_flags_unregistered_anchor(tmp_path):
    c = _check("ks:bracket-image", True)
    c["anchor"] = "somewhere-else"
    (tmp_path / "a.json").write_text(json.dumps(_summary([c])))
    assert cli.main(["report", str(tmp_path / "*.json"), "--out", str(tmp_path)]) == 1


def test_report_lists_unreadable_files(tmp_path):
    (tmp_path / "good.json").write_text(json.dumps(_summary([_check("ks:bracket-image", True)])))
    (tmp_path / "bad.json").write_text("{not json")
    assert cli.main(["report", str(tmp_path / "*.json"), "--out", str(tmp_path / "rep")]) == 1
    rep = json.loads((tmp_path / "rep" / "report.json").read_text())
    assert len(rep["unreadable"]) == 1 and "bad.json" in rep["unreadable"][0]
    assert "## unreadable" in (tmp_path / "rep" / "report.md").read_text()


def test_registry_claims_have_one_anchor_and_band():
    anchors = [c.anchor for c in REGISTRY.values()]
    assert all(anchors)
    assert all(c.lo is not None or c.hi is not None for c in REGISTRY.values())
