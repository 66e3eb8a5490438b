"""Scenario files: JSON descriptions of objects, maps, bundles and tasks.

A scenario is executed task by task; each task yields a JSON-ready record
with a status, a result summary and the verdicts it produced.
"""
from __future__ import annotations

import json
import time
from pathlib import Path

import numpy as np

from . import bundles as B
from .core import CheckReport, Verdict, check_tangent_axioms
from .errors import (
    ConstructionError,
    CorollaryViolation,
    HypothesisViolation,
    InputError,
    PreconditionError,
    ResourceError,
    SectionError,
    TheoremViolation,
    UnsupportedLimit,
)

SCHEMA = 1
REPORT_SCHEMA = 1
OPS = ("check-tangent", "construct", "check-bundle", "theorem-iso", "reconstruct-sigma", "linear",
       "induced-linear", "corollary", "tangent-space", "counterexample", "classify")


class ScenarioError(InputError):
    """The scenario file does not follow the schema."""


def load_scenario(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ScenarioError(f"no such scenario file: {path}")
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno} column {exc.colno})")
    validate(data)
    return data


def validate(data):
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object")
    if data.get("schema") != SCHEMA:
        raise ScenarioError(f"unsupported schema {data.get('schema')!r} (expected {SCHEMA})")
    if data.get("instance") not in ("finring", "trivial-finring", "polycdc"):
        raise ScenarioError(f"unknown instance {data.get('instance')!r}")
    tasks = data.get("tasks")
    if not isinstance(tasks, list) or not tasks:
        raise ScenarioError("scenario needs a non-empty task list")
    seen = set()
    for t in tasks:
        if not isinstance(t, dict) or "id" not in t or "op" not in t:
            raise ScenarioError(f"task {t!r} needs an id and an op")
        if t["op"] not in OPS:
            raise ScenarioError(f"task {t['id']}: unknown op {t['op']!r}")
        if t["id"] in seen:
            raise ScenarioError(f"duplicate task id {t['id']!r}")
        seen.add(t["id"])
    bounds = data.get("bounds", {})
    for k in ("K", "N", "max_carrier"):
        if k in bounds and (not isinstance(bounds[k], int) or bounds[k] < (1 if k != "K" else 0)):
            raise ScenarioError(f"bound {k} must be a positive integer")


# ---------------------------------------------------------------- workspace


class Workspace:
    """Named objects, modules, maps and bundles built from a scenario."""

    def __init__(self, data, max_carrier=None, seed=0):
        kind = data["instance"]
        if kind == "polycdc":
            from .polycdc import PolyCDC

            self.inst = PolyCDC(max_carrier=max_carrier, seed=seed)
        elif kind == "trivial-finring":
            from .finring import TrivialInstance

            self.inst = TrivialInstance(max_carrier=max_carrier)
        else:
            from .finring import FinRingInstance

            self.inst = FinRingInstance(max_carrier=max_carrier)
        self.kind = kind
        # names resolve lazily, so sections may refer to each other in any order
        self._terms = {}
        self._build = {"object": self.obj, "module": self.module, "morphism": self.mor, "bundle": self.bundle}
        self.objects, self.modules, self.morphisms, self.bundles = {}, {}, {}, {}
        self._tables = {"object": self.objects, "module": self.modules, "morphism": self.morphisms,
                        "bundle": self.bundles}
        self._pending = set()
        self.unavailable = {}  # (what, name) -> ResourceError raised while building it
        for what, section in (("object", "objects"), ("module", "modules"), ("morphism", "morphisms"),
                              ("bundle", "bundles")):
            terms = data.get(section, {})
            if not isinstance(terms, dict):
                raise ScenarioError(f"{section} must be an object mapping names to terms")
            self._terms[what] = terms
        for what, terms in self._terms.items():
            for name in terms:
                try:
                    self._get(self._tables[what], name, what)
                except ResourceError:
                    pass  # recorded; tasks that use the name report it

    # lookups
    def _get(self, table, name, what):
        if (what, name) in self.unavailable:
            raise self.unavailable[(what, name)]
        if isinstance(name, str) and name not in table and name in self._terms.get(what, {}):
            if (what, name) in self._pending:
                raise ScenarioError(f"{what} {name!r} is defined in terms of itself")
            self._pending.add((what, name))
            term = self._terms[what][name]
            try:
                built = self.bundle(term, name) if what == "bundle" else self._build[what](term)
            except ResourceError as exc:
                self.unavailable[(what, name)] = exc
                raise
            finally:
                self._pending.discard((what, name))
            table[name] = built
        if not isinstance(name, str) or name not in table:
            raise ScenarioError(f"unknown {what} {name!r}")
        return table[name]

    def obj(self, term):
        if isinstance(term, str):
            return self._get(self.objects, term, "object")
        if not isinstance(term, dict) or len(term) != 1:
            raise ScenarioError(f"bad object term {term!r}")
        (op, arg), = term.items()
        if self.kind == "polycdc":
            from .polycdc import Space

            if op == "space" and isinstance(arg, int) and arg >= 0:
                return Space(arg)
            if op == "tangent":
                return self.inst.T(self.obj(arg))
            raise ScenarioError(f"unknown polycdc object term {op!r}")
        from . import finring as F

        if op == "zmod":
            return F.zmod(_int(arg, "zmod"))
        if op == "product":
            a, b = _args(arg, 2, "product")
            return F.product(self.obj(a), self.obj(b))
        if op == "trunc_poly":
            a, k = _args(arg, 2, "trunc_poly")
            return F.trunc_poly(self.obj(a), _int(k, "trunc_poly degree"))
        if op == "tangent":
            return self.inst.T(self.obj(arg))
        if op == "square_zero_carrier":
            r, m = _args(arg, 2, "square_zero_carrier")
            return F.square_zero_carrier(self.obj(r), self._get(self.modules, m, "module"))
        if op == "tables":
            if not isinstance(arg, dict) or "add" not in arg or "mul" not in arg:
                raise ScenarioError("tables term needs add and mul")
            return F.from_tables(arg["add"], arg["mul"], name=arg.get("name", "tables"))
        raise ScenarioError(f"unknown ring constructor {op!r}")

    def module(self, term):
        from . import finring as F

        if isinstance(term, str):
            return self._get(self.modules, term, "module")
        if not isinstance(term, dict) or len(term) != 1:
            raise ScenarioError(f"bad module term {term!r}")
        (op, arg), = term.items()
        if op == "free":
            return F.free_module(self.obj(arg))
        if op == "zero":
            return F.zero_module(self.obj(arg))
        if op == "quotient":
            r, ideal = _args(arg, 2, "quotient")
            return F.quotient_module(self.obj(r), ideal)
        if op == "kernel":
            q, z = _args(arg, 2, "kernel")
            return F.kernel_module(self.mor(q), self.mor(z))
        if op == "sum":
            a, b = _args(arg, 2, "sum")
            return F.direct_sum(self.module(a), self.module(b))
        raise ScenarioError(f"unknown module constructor {op!r}")

    def mor(self, term):
        if isinstance(term, str):
            return self._get(self.morphisms, term, "morphism")
        if not isinstance(term, dict):
            raise ScenarioError(f"bad morphism term {term!r}")
        inst = self.inst
        if "poly" in term:
            from .polycdc import PolyMor, Space, parse_poly

            dom = _int(term.get("dom"), "dom")
            texts = term["poly"]
            if not isinstance(texts, list):
                raise ScenarioError("poly needs a list of expressions")
            return PolyMor(Space(dom), Space(len(texts)), [parse_poly(t, dom) for t in texts])
        if "table" in term:
            from .finring import ring_hom

            dom, cod = self.obj(term.get("dom")), self.obj(term.get("cod"))
            return ring_hom(dom, cod, term["table"], name=term.get("name"))
        if len(term) != 1:
            raise ScenarioError(f"bad morphism term {term!r}")
        (op, arg), = term.items()
        if op == "identity":
            return inst.identity(self.obj(arg))
        if op == "p":
            return inst.p(self.obj(arg))
        if op == "zero":
            return inst.zero(self.obj(arg))
        if op == "lift":
            return inst.lift(self.obj(arg))
        if op == "T":
            return inst.Tmor(self.mor(arg))
        if op == "compose":
            f, g = _args(arg, 2, "compose")
            return inst.compose(self.mor(f), self.mor(g))
        if op == "augmentation":
            return self.obj(arg).augmentation()
        if op == "inclusion":
            return self.obj(arg).inclusion()
        if op == "to_terminal":
            return inst.to_terminal(self.obj(arg))
        if op == "point":
            if self.kind != "polycdc":
                raise ScenarioError("points are only available in the polycdc instance")
            return inst.point(arg)
        raise ScenarioError(f"unknown morphism constructor {op!r}")

    def bundle(self, term, name="bundle"):
        if isinstance(term, str):
            return self._get(self.bundles, term, "bundle")
        if not isinstance(term, dict) or len(term) != 1:
            raise ScenarioError(f"bad bundle term {term!r}")
        (op, arg), = term.items()
        inst = self.inst
        if op == "trivial":
            return B.trivial_bundle(inst, self.obj(arg))
        if op == "tangent":
            return B.tangent_bundle(inst, self.obj(arg))
        if op == "construct":
            q, z = _args(arg, 2, "construct")
            return B.construct_bundle(inst, self.mor(q), self.mor(z), name=name)
        if op == "square_zero":
            from .finring import square_zero_bundle

            r, m = _args(arg, 2, "square_zero")
            return square_zero_bundle(inst, self.obj(r), self._get(self.modules, m, "module"))
        if op == "transport":
            b, phi, psi = _args(arg, 3, "transport")
            return B.transport_bundle(inst, self.bundle(b), self.mor(phi), self.mor(psi), name=name)
        if op == "zero_lift":
            # same (q, z, sigma) with lambda replaced by q z 0_E; not a bundle
            b = self.bundle(arg)
            lam = inst.compose(inst.compose(b.q, b.z), inst.zero(b.total))
            return B.DifferentialBundle(inst, b.q, b.z, b.sigma, lam, name)
        if op == "projection":
            from .polycdc import projection_bundle

            m, f = _args(arg, 2, "projection")
            return projection_bundle(inst, _int(m, "base dim"), _int(f, "fibre dim"))
        raise ScenarioError(f"unknown bundle constructor {op!r}")


def _int(x, what):
    if not isinstance(x, int) or isinstance(x, bool):
        raise ScenarioError(f"{what} must be an integer, got {x!r}")
    return x


def _args(arg, n, what):
    if not isinstance(arg, list) or len(arg) != n:
        raise ScenarioError(f"{what} takes a list of {n} arguments")
    return arg


# ---------------------------------------------------------------- tasks


def _verdicts(rep: CheckReport):
    return [v.to_dict() for v in rep.verdicts]


def _record(rep: CheckReport, result=None, ok=None):
    skipped = [{"name": v.name, "subject": v.subject, "reason": v.reason} for v in rep.skipped]
    passed = rep.passed if ok is None else ok
    return {"status": "pass" if passed else "fail", "result": result or {}, "verdicts": _verdicts(rep),
            "skipped": skipped}


def _bounds(task, defaults):
    K = task.get("K", defaults["K"])
    N = task.get("N", defaults["N"])
    return K, N


def run_task(ws: Workspace, task: dict, bounds: dict) -> dict:
    op = task["op"]
    inst = ws.inst
    K, N = _bounds(task, bounds)
    if op == "check-tangent":
        objs = [ws.obj(o) for o in task.get("objects", [])]
        mors = [ws.mor(m) for m in task.get("morphisms", [])]
        rep = check_tangent_axioms(inst, objs, mors, N=task.get("N", 1))
        return _record(rep, {"equations": len(rep.verdicts), "failures": len(rep.failures)})
    if op == "construct":
        q, z = ws.mor(task["q"]), ws.mor(task["z"])
        target = task.get("as", task["id"])
        try:
            b = B.construct_bundle(inst, q, z, K, N, name=target)
        except ResourceError as exc:
            ws.unavailable[("bundle", target)] = exc
            raise
        ws.bundles[target] = b
        rep = CheckReport("construct", bounds={"K": K, "N": N})
        rep.verdicts.append(Verdict("construct", "pass", B.anchor("construct"), b.name,
                                    detail={"hypotheses": b.hypotheses}))
        result = {"total": _size(inst, b.total), "base": _size(inst, b.base)}
        return _record(rep, result)
    if op == "check-bundle":
        b = ws.bundle(task["bundle"])
        rep = B.check_bundle(inst, b, K, N)
        return _record(rep, {"equations": len(rep.verdicts), "failures": len(rep.failures)})
    if op == "theorem-iso":
        b = ws.bundle(task["bundle"])
        rep = B.theorem_report(inst, b, K, N)
        v = rep.verdicts[0]
        return _record(rep, {"iso": v.status == "pass", "total": _size(inst, b.total)})
    if op == "reconstruct-sigma":
        b = ws.bundle(task["bundle"])
        rep = CheckReport("reconstruct-sigma")
        try:
            s = B.reconstruct_sigma(inst, b.q, b.z, b.lam, K, N)
            same = inst.equal(s, b.sigma)
            detail = {} if same else inst.difference(s, b.sigma)
            rep.verdicts.append(Verdict("sigma-determined", "pass" if same else "fail",
                                        B.anchor("sigma-determined"), b.name, detail=detail))
        except CorollaryViolation as exc:
            same = False
            rep.verdicts.append(Verdict("sigma-determined", "fail", B.anchor("sigma-determined"), b.name,
                                        detail={"message": str(exc)}))
        return _record(rep, {"equal_to_stored": same})
    if op == "linear":
        b1, b2 = ws.bundle(task["source"]), ws.bundle(task["target"])
        m = B.LinearBundleMap(ws.mor(task["g"]), ws.mor(task["f"]), b1, b2)
        rep = B.verify_linear(inst, m)
        return _record(rep, {"linear": rep.passed})
    if op == "induced-linear":
        q, z = (ws.mor(x) for x in task["source"])
        q2, z2 = (ws.mor(x) for x in task["target"])
        m = B.induced_linear(inst, ws.mor(task["g"]), ws.mor(task["f"]), q, z, q2, z2, K, N)
        return _record(m.verified, {"linear": m.ok})
    if op == "corollary":
        if "bundle" in task:
            b = ws.bundle(task["bundle"])
            q, z, lam = b.q, b.z, b.lam
            if task.get("mutate") == "zero-lift":
                lam = inst.compose(inst.compose(q, z), inst.zero(b.total))
            elif task.get("mutate") is not None:
                raise ScenarioError(f"unknown mutation {task['mutate']!r}")
        else:
            q, z, lam = ws.mor(task["q"]), ws.mor(task["z"]), ws.mor(task["lambda"])
        rep = B.corollary_check(inst, q, z, lam, K, N, shortcut=task.get("shortcut"))
        verdict = "accept" if rep.passed else "reject"
        expect = task.get("expect", "accept")
        rejected_at = sorted({(v.subject, v.detail.get("n")) for v in rep.failures}, key=str)
        return _record(rep, {"verdict": verdict, "expected": expect,
                             "rejected_at": [f"{s} n={n}" for s, n in rejected_at]}, ok=verdict == expect)
    if op == "tangent-space":
        E = ws.obj(task["object"])
        z = ws.mor(task["point"])
        b = B.tangent_space(inst, E, z, K, N)
        rep = B.check_bundle(inst, b, K, N)
        return _record(rep, {"total": _size(inst, b.total), "base": _size(inst, b.base)})
    if op == "counterexample":
        from .finring import counterexample_ex_fail

        R = ws.obj(task["ring"])
        k = _int(task.get("k", 3), "k")
        res = counterexample_ex_fail(inst, R, k)
        expect = task.get("expect", "counterexample" if k >= 3 else "degenerate")
        ok = res["counterexample"] if expect == "counterexample" else not res["counterexample"]
        rep = CheckReport("counterexample")
        rep.verdicts.append(Verdict("counterexample", "pass" if ok else "fail", B.anchor("counterexample"),
                                    f"{R.name}, k={k}", detail={"expected": expect}))
        return _record(rep, res)
    if op == "classify":
        from .finring import classify_bundle_maps, small_modules

        R = ws.obj(task["ring"])
        if "modules" in task:
            a, b = _args(task["modules"], 2, "modules")
            pairs = [(ws._get(ws.modules, a, "module"), ws._get(ws.modules, b, "module"))]
        else:
            mods = small_modules(R, _int(task.get("max_size", 4), "max_size"))
            pairs = [(a, b) for a in mods for b in mods]
        rep = CheckReport("classify")
        rows = []
        for M, M2 in pairs:
            res = classify_bundle_maps(inst, R, M, M2)
            rows.append(res)
            rep.verdicts.append(Verdict("classify", "pass" if res["bijection"] else "fail", B.anchor("classify"),
                                        f"{M.name} -> {M2.name}",
                                        detail={"linear_maps": res["linear_maps"],
                                                "module_homs": res["module_homs"]}))
        return _record(rep, {"pairs": len(rows), "all_bijective": all(r["bijection"] for r in rows)})
    raise ScenarioError(f"unknown op {op!r}")


def _size(inst, X):
    s = inst.size(X)
    return s if s is not None else getattr(X, "name", repr(X))


def run_scenario(data: dict, K=None, N=None, max_carrier=None, seed=0):
    """Execute every task; returns (report dict, exit code)."""
    validate(data)
    b = dict(data.get("bounds", {}))
    bounds = {"K": K if K is not None else b.get("K", 2), "N": N if N is not None else b.get("N", 2)}
    mc = max_carrier if max_carrier is not None else b.get("max_carrier")
    ws = Workspace(data, max_carrier=mc, seed=seed)
    bounds["max_carrier"] = ws.inst.max_carrier
    report = {
        "report_schema": REPORT_SCHEMA,
        "scenario": data.get("name", ""),
        "instance": data["instance"],
        "bounds": bounds,
        "seed": seed,
        "tasks": [],
        "timing": {},
    }
    worst = 0
    for task in data["tasks"]:
        t0 = time.perf_counter()
        try:
            rec = run_task(ws, task, bounds)
        except ResourceError as exc:
            rec = {"status": "resource", "result": {}, "verdicts": [], "skipped": [],
                   "error": {"type": "resource", "message": str(exc), "needed": exc.needed,
                             "budget": exc.budget}}
        except (SectionError, PreconditionError, HypothesisViolation, TheoremViolation, CorollaryViolation,
                ConstructionError, UnsupportedLimit) as exc:
            rec = {"status": "fail", "result": {}, "verdicts": [], "skipped": [],
                   "error": {"type": type(exc).__name__, "message": str(exc)}}
        except KeyError as exc:
            raise ScenarioError(f"task {task['id']}: missing field {exc}") from exc
        report["timing"][task["id"]] = round(time.perf_counter() - t0, 6)
        rec = {"id": task["id"], "op": task["op"], **rec}
        report["tasks"].append(_jsonable(rec))
        if rec["status"] == "fail":
            worst = 1
        elif rec["status"] == "resource" and worst == 0:
            worst = 3
    report["status"] = {0: "pass", 1: "fail", 3: "resource"}[worst]
    return report, worst


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, (str, int, float, bool)) or x is None:
        return x
    return str(x)


def strip_timing(report: dict) -> dict:
    return {k: v for k, v in report.items() if k != "timing"}
