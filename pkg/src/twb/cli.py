"""Command-line front end: ``twb run``, ``twb explain`` and ``twb examples``."""
from __future__ import annotations

import argparse
import json
import sys
from importlib import resources

from .errors import InputError, ResourceError
from .scenario import load_scenario, run_scenario

EXIT_PASS, EXIT_FAIL, EXIT_PARSE, EXIT_RESOURCE = 0, 1, 2, 3


def scenario_dir():
    return resources.files("twb") / "scenarios"


def bundled_scenarios():
    """(name, description, path) for every shipped scenario, sorted by name."""
    out = []
    for entry in sorted(scenario_dir().iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".json"):
            data = json.loads(entry.read_text())
            out.append((entry.name, data.get("description", ""), str(entry)))
    return out


def _resolve(path):
    """A scenario path, falling back to the bundled copy for bare names."""
    from pathlib import Path

    p = Path(path)
    if p.exists() or p.parent != Path("."):
        return p
    bundled = scenario_dir() / p.name
    return Path(str(bundled)) if bundled.is_file() else p


def dumps(report) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _parse_bounds(text):
    try:
        k, n = (int(x) for x in text.split(","))
    except ValueError:
        raise InputError(f"--bounds expects K,N (got {text!r})")
    if k < 0 or n < 1:
        raise InputError("--bounds needs K >= 0 and N >= 1")
    return k, n


def summarize(report) -> str:
    lines = [f"scenario {report['scenario'] or '(unnamed)'} [{report['instance']}] "
             f"K={report['bounds']['K']} N={report['bounds']['N']} seed={report['seed']}"]
    for t in report["tasks"]:
        res = t.get("result", {})
        extra = ", ".join(f"{k}: {_fmt(v)}" for k, v in res.items() if not isinstance(v, (dict, list)))
        skipped = f" ({len(t['skipped'])} skipped)" if t.get("skipped") else ""
        lines.append(f"  {t['status']:<8} {t['id']} [{t['op']}]{skipped}" + (f"  {extra}" if extra else ""))
        if "error" in t:
            lines.append(f"           {t['error']['type']}: {t['error']['message']}")
    lines.append(f"overall: {report['status']}")
    return "\n".join(lines)


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def cmd_run(args) -> int:
    try:
        data = load_scenario(_resolve(args.scenario))
        K, N = _parse_bounds(args.bounds) if args.bounds else (None, None)
        report, code = run_scenario(data, K=K, N=N, max_carrier=args.max_carrier, seed=args.seed)
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(dumps(report))
    print(summarize(report))
    return code


def explain(report: dict, task_id: str) -> str:
    task = next((t for t in report.get("tasks", []) if t["id"] == task_id), None)
    if task is None:
        known = ", ".join(t["id"] for t in report.get("tasks", []))
        raise InputError(f"unknown task id {task_id!r} (known: {known})")
    lines = [f"task {task['id']} [{task['op']}]: {task['status']}"]
    if "error" in task:
        lines.append(f"  {task['error']['type']}: {task['error']['message']}")
    verdicts = task.get("verdicts", [])
    failing = [v for v in verdicts if v["status"] == "fail"]
    probes = [v for v in verdicts if v["status"] == "probe-only"]
    checked = [v for v in verdicts if v["status"] != "skip"]
    for v in failing:
        lines.append(f"  FAIL {v['name']} on {v['subject']}")
        lines.append(f"    anchor: {v['anchor']}")
        lines.extend("    " + s for s in _detail_lines(v.get("detail", {})))
    for v in probes:
        lines.append(f"  probe-only {v['name']} on {v['subject']}")
        lines.append(f"    anchor: {v['anchor']}")
        det = v.get("detail", {})
        lines.append(f"    probe family: {det.get('probes', '?')} seeded rational points (seed {det.get('seed', '?')})")
        lines.append(f"    caveat: probe-only; {det.get('caveat', 'checked at sample points, not proved')}")
    if not failing and task["status"] == "pass":
        lines.append(f"  all {len(checked)} equations verified")
    for s in task.get("skipped", []):
        lines.append(f"  skipped {s['name']} on {s['subject']}: {s['reason']}")
    return "\n".join(lines)


def _detail_lines(detail, indent=""):
    out = []
    for key in sorted(detail):
        val = detail[key]
        if isinstance(val, dict):
            out.append(f"{indent}{key}:")
            out.extend(_detail_lines(val, indent + "  "))
        elif isinstance(val, list) and val and isinstance(val[0], dict):
            out.append(f"{indent}{key}:")
            for item in val:
                out.append(f"{indent}  - " + ", ".join(f"{k}={_fmt(item[k])}" for k in sorted(item)))
        else:
            out.append(f"{indent}{key}: {_fmt(val)}")
    return out


def cmd_explain(args) -> int:
    try:
        with open(args.report) as fh:
            report = json.load(fh)
        print(explain(report, args.task_id))
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read report: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    return EXIT_PASS


def cmd_examples(args) -> int:
    for name, desc, path in bundled_scenarios():
        print(f"{name:<24} {desc}")
    print(f"\n(bundled in {scenario_dir()}; run with `twb run <name>`)")
    return EXIT_PASS


def build_parser():
    ap = argparse.ArgumentParser(prog="twb", description="Tangent-category workbench for differential bundles.")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="execute a scenario file")
    run.add_argument("scenario", help="scenario JSON (a bare bundled name such as trivial.json also works)")
    run.add_argument("--json", metavar="OUT", help="write the machine-readable report here")
    run.add_argument("--bounds", metavar="K,N", help="override the scenario bounds")
    run.add_argument("--max-carrier", type=int, metavar="B", help="carrier budget (default: $TWB_MAX_CARRIER)")
    run.add_argument("--seed", type=int, default=0, help="seed for probe selection (default 0)")
    run.set_defaults(func=cmd_run)
    ex = sub.add_parser("explain", help="explain one task of a JSON report")
    ex.add_argument("report")
    ex.add_argument("task_id")
    ex.set_defaults(func=cmd_explain)
    ls = sub.add_parser("examples", help="list bundled scenarios")
    ls.set_defaults(func=cmd_examples)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
