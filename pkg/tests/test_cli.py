import json
import shutil
import subprocess

import pytest

from twb.cli import bundled_scenarios, dumps, explain, main
from twb.scenario import load_scenario, run_scenario, strip_timing

SCENARIOS = [name for name, _, _ in bundled_scenarios()]

CUBIC = {
    "schema": 1, "name": "zl", "instance": "finring", "bounds": {"K": 2, "N": 1},
    "objects": {"R": {"zmod": 2}, "E": {"trunc_poly": ["R", 3]}},
    "morphisms": {"q": {"augmentation": "E"}, "z": {"inclusion": "E"}},
    "bundles": {"V": {"construct": ["q", "z"]}, "W": {"zero_lift": "V"}},
    "tasks": [{"id": "good", "op": "check-bundle", "bundle": "V"},
              {"id": "bad", "op": "check-bundle", "bundle": "W"}],
}


def write(tmp_path, data, name="s.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_bundled_scenarios_are_listed(capsys):
    assert {"trivial.json", "cring_classify.json", "fail_linear.json", "cdc.json"} <= set(SCENARIOS)
    assert main(["examples"]) == 0
    out = capsys.readouterr().out
    assert all(name in out for name in SCENARIOS)


@pytest.mark.parametrize("name", SCENARIOS)
def test_bundled_scenarios_pass(name, tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["run", name, "--json", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["status"] == "pass"
    assert all(t["status"] == "pass" for t in report["tasks"])


def test_theorem_task_reports_iso_true(tmp_path, capsys):
    out = tmp_path / "r.json"
    main(["run", "cring_classify.json", "--json", str(out)])
    assert "iso: true" in capsys.readouterr().out
    task = next(t for t in json.loads(out.read_text())["tasks"] if t["id"] == "theorem")
    assert task["result"]["iso"] is True


def test_fail_linear_report_fields(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["run", "fail_linear.json", "--json", str(out)]) == 0
    k3 = json.loads(out.read_text())["tasks"][0]["result"]
    assert k3["linear_maps"] == 4 and k3["inducing_bundle_maps"] == 0


def test_verification_failure_exits_1_and_explain_shows_witness(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["run", write(tmp_path, CUBIC), "--json", str(out)]) == 1
    capsys.readouterr()
    assert main(["explain", str(out), "bad"]) == 0
    text = capsys.readouterr().out
    assert "FAIL universality" in text and "injective: false" in text and "witness:" in text
    assert "anchor: vertical lift universality" in text
    assert main(["explain", str(out), "good"]) == 0
    good = json.loads(out.read_text())["tasks"][0]
    n = sum(v["status"] != "skip" for v in good["verdicts"])
    assert f"all {n} equations verified" in capsys.readouterr().out


def test_explain_failing_equation_shows_both_tables():
    report, code = run_scenario(_linear_scenario())
    assert code == 1
    text = explain(report, "lin")
    assert "FAIL linear-lambda" in text and "lhs_table" in text and "rhs_table" in text


def _linear_scenario():
    return {
        "schema": 1, "instance": "finring",
        "objects": {"R": {"zmod": 3}, "TR": {"tangent": "R"}},
        "bundles": {"T": {"tangent": "R"}, "W": {"zero_lift": "T"}},
        "tasks": [{"id": "lin", "op": "linear", "g": {"identity": "TR"}, "f": {"identity": "R"},
                   "source": "T", "target": "W"}],
    }


def test_explain_probe_only(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["run", "cdc.json", "--json", str(out)]) == 0
    capsys.readouterr()
    main(["explain", str(out), "curved"])
    text = capsys.readouterr().out
    assert "probe-only universality" in text and "probe family: 8 seeded rational points (seed 0)" in text
    assert "caveat: probe-only" in text


def test_explain_unknown_task(tmp_path, capsys):
    out = tmp_path / "r.json"
    main(["run", "trivial.json", "--json", str(out)])
    assert main(["explain", str(out), "nope"]) == 2
    assert "unknown task id 'nope'" in capsys.readouterr().err


@pytest.mark.parametrize("text,fragment", [
    ('{"schema": 1', "invalid JSON"),
    ('{"schema": 2, "instance": "finring", "tasks": [{"id": "a", "op": "construct"}]}', "unsupported schema"),
    ('{"schema": 1, "instance": "sets", "tasks": [{"id": "a", "op": "construct"}]}', "unknown instance"),
    ('{"schema": 1, "instance": "finring", "tasks": [{"id": "a", "op": "fly"}]}', "unknown op"),
    ('{"schema": 1, "instance": "finring", "tasks": [{"id": "a", "op": "check-bundle", "bundle": "B"}]}',
     "unknown bundle 'B'"),
    ('{"schema": 1, "instance": "polycdc", "morphisms": {"f": {"poly": ["x1^^2"], "dom": 1}}, '
     '"tasks": [{"id": "a", "op": "check-tangent", "morphisms": ["f"]}]}', "<here>"),
    ('{"schema": 1, "instance": "finring", "bounds": {"N": 0}, "tasks": [{"id": "a", "op": "construct"}]}',
     "bound N"),
    ('{"schema": 1, "instance": "finring", "objects": {"A": "B", "B": "A"}, '
     '"tasks": [{"id": "a", "op": "check-tangent", "objects": ["A"]}]}', "in terms of itself"),
])
def test_parse_errors_exit_2(tmp_path, capsys, text, fragment):
    path = tmp_path / "s.json"
    path.write_text(text)
    assert main(["run", str(path)]) == 2
    assert fragment in capsys.readouterr().err


def test_missing_file_exits_2(capsys):
    assert main(["run", "/nonexistent/s.json"]) == 2


def test_budget_exhaustion_exits_3_with_report(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["run", "cring_classify.json", "--max-carrier", "20", "--json", str(out)]) == 3
    report = json.loads(out.read_text())
    assert report["status"] == "resource"
    err = report["tasks"][0]["error"]
    assert err["type"] == "resource" and err["budget"] == 20


def test_env_budget(monkeypatch, tmp_path, capsys):
    monkeypatch.setenv("TWB_MAX_CARRIER", "20")
    assert main(["run", "cring_classify.json"]) == 3


def test_bounds_and_seed_flags(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["run", "trivial.json", "--bounds", "1,1", "--seed", "7", "--json", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["bounds"]["K"] == 1 and report["bounds"]["N"] == 1 and report["seed"] == 7
    assert main(["run", "trivial.json", "--bounds", "x"]) == 2


def test_skipped_checks_carry_reason_codes(tmp_path):
    data = load_scenario_from_bundle("tangent_axioms.json")
    report, code = run_scenario(data)
    skipped = [s for t in report["tasks"] for s in t["skipped"]]
    assert skipped and all(s["reason"] == "budget" for s in skipped)
    assert code == 0


def load_scenario_from_bundle(name):
    path = next(p for n, _, p in bundled_scenarios() if n == name)
    return load_scenario(path)


@pytest.mark.parametrize("name", SCENARIOS)
def test_reports_are_deterministic(name):
    data = load_scenario_from_bundle(name)
    a, _ = run_scenario(data, seed=1)
    b, _ = run_scenario(data, seed=1)
    assert "timing" in a
    assert dumps(strip_timing(a)) == dumps(strip_timing(b))


@pytest.mark.skipif(shutil.which("twb") is None, reason="console script not installed")
def test_console_script(tmp_path):
    res = subprocess.run(["twb", "run", "trivial.json"], capture_output=True, text=True, cwd=tmp_path)
    assert res.returncode == 0 and "overall: pass" in res.stdout
