"""Scenario files: declarative TOML in, deterministic files out.

A scenario declares systems, contracts, input signals, arcs, and hybrid time
domains, followed by an ordered list of tasks that exercise them (simulation,
monitoring, composition, invariance, harnesses).  Later tasks may refer to
the products of earlier ones by task name.  Running a scenario produces JSON
reports and trajectory CSVs plus a manifest; reruns are byte-identical.

Expressions use the small arithmetic language of :mod:`.expressions`; sets
use the box-literal grammar of :mod:`.sets`.  ``render_scenario`` is the
inverse of ``parse_scenario`` up to formatting normalization:
``parse(render(s))`` equals ``s``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .arcs import HybridArc, classify, sample_arc, to_csv
from .composition import (
    cascade,
    cascade_contract,
    feedback,
    harness_cascade_theorem,
    harness_feedback_theorem,
)
from .contracts import (
    AGContract,
    SATISFIED,
    UNKNOWN,
    VIOLATED,
    check_strong,
    check_weak,
    feedback_compat,
    lift_weak_to_strong,
    verdict_report,
)
from .expressions import affine_coefficients, compile_expression, parse_expression
from .hybrid_time import HybridTimeDomain, shared_domain, to_triples
from .invariance import InvarianceProblem, certificate, check_invariant_relative
from .sets import format_box_literal, parse_box_literal, product, subset, whole
from .systems import (
    HybridSystemDesc,
    InputSignal,
    SimPolicy,
    _representative_points,
    enumerate_branches,
    enumerate_feedback_branches,
    simulate,
    simulate_feedback,
    validate,
)


class ScenarioError(ValueError):
    """Malformed scenario file or unresolved reference."""


# ---------------------------------------------------------------------------
# Schema: canonical key order per section (also the closed set of legal keys)

_POLICY_KEYS = ("dt", "event_tol", "overlap", "max_time", "max_jumps",
                "max_branches", "align_coincident_jumps", "kickstart")
_SYSTEM_KEYS = ("dims", "W", "X", "Y", "C", "D", "F", "G", "h", "X0",
                "assumption1", "lipschitz")
_CONTRACT_KEYS = ("AW", "GX", "GY")
_INPUT_KEYS = ("expr", "range")
_ARC_KEYS = ("breaks", "dt", "final_open", "w", "x", "y")
_DOMAIN_KEYS = ("breaks",)
_TASK_KEYS = (
    "name", "kind", "system", "first", "second", "contract",
    "contract_first", "contract_second", "input", "arcs", "x0", "enumerate",
    "theorem", "declared_strong", "beta", "eps", "K", "delta_min",
    "domains", "align", "boundary_resolution", "aw_resolution",
    "jumpset_resolution", "cone_tol",
    # per-task policy overrides
    "dt", "event_tol", "overlap", "max_time", "max_jumps", "max_branches",
    "kickstart",
)
_POLICY_OVERRIDE_KEYS = ("dt", "event_tol", "overlap", "max_time",
                         "max_jumps", "max_branches", "kickstart")

_TASK_KINDS = ("simulate", "feedback", "check_weak", "check_strong", "lift",
               "cascade", "invariance", "harness", "shared_domain")

_OVERLAP_RULES = {
    "jump": "jump_priority",
    "flow": "flow_priority",
    "enumerate": "enumerate",
    "jump_priority": "jump_priority",
    "flow_priority": "flow_priority",
}


@dataclass(slots=True)
class Scenario:
    """A parsed scenario: compiled registries plus the normalized raw
    document (kept for rendering)."""

    name: str
    raw: dict
    policy: SimPolicy
    systems: dict[str, HybridSystemDesc] = field(default_factory=dict)
    contracts: dict[str, AGContract] = field(default_factory=dict)
    inputs: dict[str, InputSignal] = field(default_factory=dict)
    arcs: dict[str, HybridArc] = field(default_factory=dict)
    domains: dict[str, HybridTimeDomain] = field(default_factory=dict)
    tasks: list[dict] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Parsing


def _check_keys(tbl: dict, allowed, where: str) -> None:
    for k in tbl:
        if k not in allowed:
            raise ScenarioError(f"unknown key {k!r} in {where}")


def _compile_policy(tbl: dict) -> SimPolicy:
    _check_keys(tbl, _POLICY_KEYS, "[policy]")
    kw = {}
    for k, v in tbl.items():
        if k == "overlap":
            if v not in _OVERLAP_RULES:
                raise ScenarioError(f"unknown overlap rule {v!r}")
            kw["overlap_rule"] = _OVERLAP_RULES[v]
        else:
            kw[k] = v
    return SimPolicy(**kw)


def _rows(value, count: int, where: str) -> list[str]:
    if not isinstance(value, list) or len(value) != count \
            or not all(isinstance(r, str) for r in value):
        raise ScenarioError(f"{where} must be a list of {count} expressions")
    return value


def _vector_fn(texts: list[str], variables: list[str]):
    asts = [parse_expression(t, variables) for t in texts]
    fns = [compile_expression(a, variables) for a in asts]
    return asts, (lambda *args: tuple(f(*args) for f in fns))


def _affine_rows(asts, variables: list[str]):
    """Affine metadata rows ``(const, {var_index: coef})``, or None if any
    row is not affine."""
    rows = []
    for ast in asts:
        got = affine_coefficients(ast, variables)
        if got is None:
            return None
        const, by_name = got
        rows.append((const, {variables.index(k): v
                             for k, v in by_name.items()}))
    return tuple(rows)


def _parse_set(text, dims: int, label: str):
    try:
        return parse_box_literal(text, dims)
    except ValueError as exc:
        raise ScenarioError(f"{label}: {exc}") from exc


def _compile_system(name: str, tbl: dict) -> HybridSystemDesc:
    where = f"[system.{name}]"
    _check_keys(tbl, _SYSTEM_KEYS, where)
    for k in ("dims", "W", "X", "Y", "C", "D", "F", "G", "h", "X0"):
        if k not in tbl:
            raise ScenarioError(f"{where} is missing {k!r}")
    dims = tbl["dims"]
    if (not isinstance(dims, list) or len(dims) != 3
            or not all(isinstance(d, int) and d >= 1 for d in dims)):
        raise ScenarioError(f"{where}: dims must be three positive integers")
    m, n, p = dims
    W = _parse_set(tbl["W"], m, f"{where}.W")
    X = _parse_set(tbl["X"], n, f"{where}.X")
    Y = _parse_set(tbl["Y"], p, f"{where}.Y")

    def flow_jump_set(text, label):
        S = _parse_set(text, None, label)
        if S.dims == n:           # condition on x only: free input part
            return product(S, whole(m))
        if S.dims == n + m:
            return S
        raise ScenarioError(
            f"{label} must have {n} or {n + m} dims, got {S.dims}")

    C = flow_jump_set(tbl["C"], f"{where}.C")
    D = flow_jump_set(tbl["D"], f"{where}.D")
    X0 = _parse_set(tbl["X0"], n, f"{where}.X0")

    xw = [f"x{i + 1}" for i in range(n)] + [f"w{i + 1}" for i in range(m)]
    xs = xw[:n]

    def selections(value, rows, label):
        if not isinstance(value, list) or not value:
            raise ScenarioError(f"{label} must be a non-empty list")
        fns, metas = [], []
        for k, sel in enumerate(value):
            texts = _rows(sel, rows, f"{label}[{k}]")
            asts, vec = _vector_fn(texts, xw)
            fns.append(lambda x, w, _v=vec: _v(*x, *w))
            metas.append(_affine_rows(asts, xw))
        affine = tuple(metas) if all(mm is not None for mm in metas) else None
        return tuple(fns), affine

    F, f_affine = selections(tbl["F"], n, f"{where}.F")
    G, g_affine = selections(tbl["G"], n, f"{where}.G")
    h_texts = _rows(tbl["h"], p, f"{where}.h")
    h_asts, h_vec = _vector_fn(h_texts, xs)
    h_affine = _affine_rows(h_asts, xs)

    desc = HybridSystemDesc(
        dims=(m, n, p), W=W, X=X, Y=Y, C=C, D=D,
        F=F, G=G, h=lambda x, _v=h_vec: _v(*x), X0=X0, name=name,
        assumption1=bool(tbl.get("assumption1", False)),
        lipschitz=bool(tbl.get("lipschitz", False)),
        f_affine=f_affine, g_affine=g_affine, h_affine=h_affine,
    )
    return validate(desc)


def _compile_contract(name: str, tbl: dict) -> AGContract:
    where = f"[contract.{name}]"
    _check_keys(tbl, _CONTRACT_KEYS, where)
    for k in _CONTRACT_KEYS:
        if k not in tbl:
            raise ScenarioError(f"{where} is missing {k!r}")
    return AGContract(
        _parse_set(tbl["AW"], None, f"{where}.AW"),
        _parse_set(tbl["GX"], None, f"{where}.GX"),
        _parse_set(tbl["GY"], None, f"{where}.GY"),
        name=name,
    )


def _compile_input(name: str, tbl: dict) -> InputSignal:
    where = f"[input.{name}]"
    _check_keys(tbl, _INPUT_KEYS, where)
    if "expr" not in tbl or "range" not in tbl:
        raise ScenarioError(f"{where} needs 'expr' and 'range'")
    texts = tbl["expr"]
    if not isinstance(texts, list) or not texts:
        raise ScenarioError(f"{where}.expr must be a non-empty list")
    _, vec = _vector_fn(texts, ["t", "j"])
    rng = _parse_set(tbl["range"], len(texts), f"{where}.range")
    return InputSignal(lambda t, j, _v=vec: _v(t, float(j)), rng, name=name)


def _domain_from_breaks(breaks, where: str, final_open: bool = False
                        ) -> HybridTimeDomain:
    if not isinstance(breaks, list) or len(breaks) < 2:
        raise ScenarioError(f"{where}.breaks needs at least two entries")
    return HybridTimeDomain(tuple(float(b) for b in breaks),
                            final_open=final_open)


def _compile_arc(name: str, tbl: dict, default_dt: float) -> HybridArc:
    where = f"[arc.{name}]"
    _check_keys(tbl, _ARC_KEYS, where)
    for k in ("breaks", "w", "x", "y"):
        if k not in tbl:
            raise ScenarioError(f"{where} is missing {k!r}")
    domain = _domain_from_breaks(tbl["breaks"], where,
                                 bool(tbl.get("final_open", False)))
    dt = float(tbl.get("dt", default_dt))
    m, n, p = len(tbl["w"]), len(tbl["x"]), len(tbl["y"])
    _, w_vec = _vector_fn(_rows(tbl["w"], m, f"{where}.w"), ["t", "j"])
    xvars = ["t", "j"] + [f"w{i + 1}" for i in range(m)]
    _, x_vec = _vector_fn(_rows(tbl["x"], n, f"{where}.x"), xvars)
    yvars = ["t", "j"] + [f"x{i + 1}" for i in range(n)]
    _, y_vec = _vector_fn(_rows(tbl["y"], p, f"{where}.y"), yvars)

    def w_fn(t, j):
        return w_vec(t, float(j))

    def x_fn(t, j):
        return x_vec(t, float(j), *w_fn(t, j))

    def y_fn(t, j):
        return y_vec(t, float(j), *x_fn(t, j))

    return sample_arc(domain, dt, w_fn, x_fn, y_fn, (m, n, p))


def _validate_task(task: dict, index: int, known: dict[str, set]) -> None:
    where = f"[[task]] #{index}"
    _check_keys(task, _TASK_KEYS, where)
    name = task.get("name")
    if not isinstance(name, str) or not name:
        raise ScenarioError(f"{where} needs a non-empty 'name'")
    if name in known["task"]:
        raise ScenarioError(f"duplicate task name {name!r}")
    kind = task.get("kind")
    if kind not in _TASK_KINDS:
        raise ScenarioError(f"{where}: unknown kind {kind!r}")
    where = f"task {name!r}"

    def need(key, registry):
        val = task.get(key)
        if not isinstance(val, str):
            raise ScenarioError(f"{where} needs {key!r}")
        pools = {"system": ("system",), "input": ("input",),
                 "contract": ("contract", "task"),
                 "arcs": ("arc", "task"),
                 "domain": ("domain", "arc")}[registry]
        if not any(val in known[p] for p in pools):
            raise ScenarioError(f"{where}: {key} = {val!r} is not declared "
                                "and is not an earlier task")

    if kind in ("simulate", "feedback"):
        need("system", "system")
        if kind == "simulate":
            need("input", "input")
    elif kind in ("check_weak", "check_strong"):
        need("arcs", "arcs")
        need("contract", "contract")
    elif kind == "lift":
        need("contract", "contract")
        need("system", "system")
        for k in ("beta", "eps"):
            if not isinstance(task.get(k), (int, float)):
                raise ScenarioError(f"{where} needs numeric {k!r}")
    elif kind == "cascade":
        for k in ("first", "second"):
            if task.get(k) not in known["system"]:
                raise ScenarioError(f"{where}: {k} must name a system")
        for k in ("contract_first", "contract_second"):
            val = task.get(k)
            if not (val in known["contract"] or val in known["task"]):
                raise ScenarioError(f"{where}: {k} must name a contract")
    elif kind == "invariance":
        need("system", "system")
        need("contract", "contract")
        if not isinstance(task.get("K"), str):
            raise ScenarioError(f"{where} needs a box literal 'K'")
    elif kind == "harness":
        theorem = task.get("theorem")
        if theorem == "feedback":
            need("system", "system")
            need("contract", "contract")
        elif theorem == "cascade":
            for k in ("first", "second"):
                if task.get(k) not in known["system"]:
                    raise ScenarioError(f"{where}: {k} must name a system")
            for k in ("contract_first", "contract_second"):
                val = task.get(k)
                if not (val in known["contract"] or val in known["task"]):
                    raise ScenarioError(f"{where}: {k} must name a contract")
        else:
            raise ScenarioError(
                f"{where}: theorem must be 'feedback' or 'cascade'")
    elif kind == "shared_domain":
        doms = task.get("domains")
        if not (isinstance(doms, list) and len(doms) == 2
                and all(isinstance(d, str) for d in doms)):
            raise ScenarioError(f"{where}: domains must list two names")
        for d in doms:
            if d not in known["domain"] and d not in known["arc"]:
                raise ScenarioError(f"{where}: unknown domain {d!r}")
    known["task"].add(name)


def parse_scenario(text: str) -> Scenario:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"TOML syntax error: {exc}") from exc
    allowed_top = {"name", "policy", "system", "contract", "input", "arc",
                   "domain", "task"}
    _check_keys(raw, allowed_top, "scenario")
    name = raw.get("name", "")
    policy = _compile_policy(raw.get("policy", {}))
    sc = Scenario(name=name, raw=raw, policy=policy)
    for sname, tbl in raw.get("system", {}).items():
        try:
            sc.systems[sname] = _compile_system(sname, tbl)
        except (ValueError, TypeError) as exc:
            raise ScenarioError(f"[system.{sname}]: {exc}") from exc
    for cname, tbl in raw.get("contract", {}).items():
        sc.contracts[cname] = _compile_contract(cname, tbl)
    for iname, tbl in raw.get("input", {}).items():
        sc.inputs[iname] = _compile_input(iname, tbl)
    for aname, tbl in raw.get("arc", {}).items():
        sc.arcs[aname] = _compile_arc(aname, tbl, policy.dt)
    for dname, tbl in raw.get("domain", {}).items():
        _check_keys(tbl, _DOMAIN_KEYS, f"[domain.{dname}]")
        sc.domains[dname] = _domain_from_breaks(tbl.get("breaks"),
                                                f"[domain.{dname}]")
    tasks = raw.get("task", [])
    if not isinstance(tasks, list):
        raise ScenarioError("'task' must be an array of tables")
    known = {
        "system": set(sc.systems), "contract": set(sc.contracts),
        "input": set(sc.inputs), "arc": set(sc.arcs),
        "domain": set(sc.domains), "task": set(),
    }
    for i, task in enumerate(tasks):
        _validate_task(task, i, known)
        sc.tasks.append(dict(task))
    return sc


def load_scenario(source: str | Path) -> Scenario:
    """Load from a file path or a ``builtin:<name>`` reference."""
    if isinstance(source, str) and source.startswith("builtin:"):
        key = source.split(":", 1)[1]
        if key not in BUILTIN_SCENARIOS:
            raise ScenarioError(
                f"unknown builtin {key!r}; available: "
                + ", ".join(sorted(BUILTIN_SCENARIOS)))
        return parse_scenario(BUILTIN_SCENARIOS[key])
    return parse_scenario(Path(source).read_text())


# ---------------------------------------------------------------------------
# Rendering (canonical TOML, the inverse of parsing)


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, list):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise ScenarioError(f"cannot render value {v!r}")


def _render_table(lines: list[str], header: str, tbl: dict, keys) -> None:
    lines.append(header)
    for k in keys:
        if k in tbl:
            lines.append(f"{k} = {_toml_value(tbl[k])}")
    lines.append("")


def render_scenario(sc: Scenario) -> str:
    raw = sc.raw
    lines: list[str] = []
    if raw.get("name"):
        lines.append(f"name = {_toml_value(raw['name'])}")
        lines.append("")
    if "policy" in raw:
        _render_table(lines, "[policy]", raw["policy"], _POLICY_KEYS)
    for section, keys in (("system", _SYSTEM_KEYS),
                          ("contract", _CONTRACT_KEYS),
                          ("input", _INPUT_KEYS),
                          ("arc", _ARC_KEYS),
                          ("domain", _DOMAIN_KEYS)):
        for name, tbl in raw.get(section, {}).items():
            _render_table(lines, f"[{section}.{name}]", tbl, keys)
    for task in raw.get("task", []):
        _render_table(lines, "[[task]]", task, _TASK_KEYS)
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Running


def _task_policy(policy: SimPolicy, task: dict) -> SimPolicy:
    kw = {}
    for k in _POLICY_OVERRIDE_KEYS:
        if k in task:
            if k == "overlap":
                kw["overlap_rule"] = _OVERLAP_RULES[task[k]]
            else:
                kw[k] = task[k]
    return replace(policy, **kw) if kw else policy


def _resolve_arcs(sc: Scenario, products: dict, ref: str):
    if ref in sc.arcs:
        return [(ref, sc.arcs[ref])]
    got = products.get(ref)
    if got is None or not got.get("arcs"):
        raise ScenarioError(f"{ref!r} names no arcs")
    return [(f"{ref}/{label}", arc) for label, arc in got["arcs"]]


def _resolve_contract(sc: Scenario, products: dict, ref: str) -> AGContract:
    if ref in sc.contracts:
        return sc.contracts[ref]
    got = products.get(ref)
    if got is None or got.get("contract") is None:
        raise ScenarioError(f"{ref!r} names no contract")
    return got["contract"]


def _arc_summary(arc: HybridArc, pol: SimPolicy) -> dict:
    kind = classify(arc, (pol.max_time, pol.max_jumps))
    last = arc.segments[-1]
    return {
        "breaks": [float(b) for b in arc.domain.breaks],
        "jump_times": [float(t) for t in arc.domain.jump_times],
        "sup": [float(arc.domain.sup_t), int(arc.domain.sup_j)],
        "classification": kind.kind.value,
        "budget_exhausted": bool(arc.budget_exhausted),
        "points": int(sum(s.times.shape[0] for s in arc.segments)),
        "final_state": [float(v) for v in last.x[-1]],
    }


def _run_simulation_task(sc: Scenario, task: dict, policy: SimPolicy) -> dict:
    pol = _task_policy(policy, task)
    desc = sc.systems[task["system"]]
    closed = task["kind"] == "feedback"
    sig = None if closed else sc.inputs[task["input"]]
    if "x0" in task:
        x0s = [tuple(float(v) for v in task["x0"])]
    else:
        x0s = _representative_points(desc.X0)
    arcs, rows, truncated = [], [], False
    for x0 in x0s:
        if task.get("enumerate", False):
            if closed:
                branches, trunc = enumerate_feedback_branches(desc, x0, pol)
            else:
                branches, trunc = enumerate_branches(desc, sig, x0, pol)
            truncated = truncated or trunc
        else:
            arc = simulate_feedback(desc, x0, pol) if closed \
                else simulate(desc, sig, x0, pol)
            branches = [arc]
        for arc in branches:
            label = f"arc{len(arcs)}"
            arcs.append((label, arc))
            rows.append({"arc": label, "x0": [float(v) for v in x0],
                         **_arc_summary(arc, pol)})
    report = {"system": task["system"], "closed_loop": closed,
              "input": None if closed else task["input"],
              "branch_count": len(arcs), "truncated": truncated,
              "arcs": rows}
    return {"status": "ok", "ok": True, "report": report, "arcs": arcs}


def _run_check_task(sc: Scenario, task: dict, policy: SimPolicy,
                    products: dict) -> dict:
    pairs = _resolve_arcs(sc, products, task["arcs"])
    c = _resolve_contract(sc, products, task["contract"])
    strong = task["kind"] == "check_strong"
    delta_min = task.get("delta_min")
    rows, statuses = [], []
    for label, arc in pairs:
        v = check_strong(arc, c, delta_min) if strong else check_weak(arc, c)
        statuses.append(v.status)
        rows.append({"arc": label, **verdict_report(v)})
    if all(s == SATISFIED for s in statuses):
        status = SATISFIED
    elif VIOLATED in statuses:
        status = VIOLATED
    else:
        status = UNKNOWN
    report = {"contract": task["contract"], "mode":
              "strong" if strong else "weak", "delta_min": delta_min,
              "results": rows,
              "counts": {s: statuses.count(s)
                         for s in (SATISFIED, VIOLATED, UNKNOWN)}}
    return {"status": status, "ok": status == SATISFIED, "report": report,
            "arcs": []}


def _run_lift_task(sc: Scenario, task: dict, products: dict) -> dict:
    import warnings as _warnings

    c = _resolve_contract(sc, products, task["contract"])
    Y = sc.systems[task["system"]].Y
    with _warnings.catch_warnings(record=True) as caught:
        _warnings.simplefilter("always")
        lifted = lift_weak_to_strong(c, float(task["beta"]),
                                     float(task["eps"]), Y)
    compat_ok, compat = feedback_compat(lifted, 0.0, Y)
    report = {
        "beta": float(task["beta"]), "eps": float(task["eps"]),
        "strict_margin_warning": bool(caught),
        "lifted": {"AW": format_box_literal(lifted.a_w),
                   "GX": format_box_literal(lifted.g_x),
                   "GY": format_box_literal(lifted.g_y)},
        "g_y_equals_a_w": subset(lifted.g_y, lifted.a_w)
        and subset(lifted.a_w, lifted.g_y),
        "feedback_compat": {"ok": compat_ok, **compat},
    }
    return {"status": "ok", "ok": True, "report": report, "arcs": [],
            "contract": lifted}


def _run_cascade_task(sc: Scenario, task: dict, products: dict) -> dict:
    h1, h2 = sc.systems[task["first"]], sc.systems[task["second"]]
    c1 = _resolve_contract(sc, products, task["contract_first"])
    c2 = _resolve_contract(sc, products, task["contract_second"])
    cs = cascade(h1, h2)
    cc = cascade_contract(c1, c2)
    report = {
        "first": task["first"], "second": task["second"],
        "dims": list(cs.dims),
        "contract": {"AW": format_box_literal(cc.a_w),
                     "GX": format_box_literal(cc.g_x),
                     "GY": format_box_literal(cc.g_y)},
    }
    return {"status": "ok", "ok": True, "report": report, "arcs": [],
            "contract": cc}


def _run_invariance_task(sc: Scenario, task: dict, policy: SimPolicy,
                         products: dict) -> dict:
    desc = sc.systems[task["system"]]
    c = _resolve_contract(sc, products, task["contract"])
    n = desc.dims[1]
    K = parse_box_literal(task["K"], n)
    kw = {}
    for k in ("boundary_resolution", "aw_resolution", "jumpset_resolution",
              "cone_tol"):
        if k in task:
            kw[k] = task[k]
    prob = InvarianceProblem(desc, c, K, **kw)
    verdict = check_invariant_relative(prob, _task_policy(policy, task))
    report = certificate(prob, verdict)
    ok = verdict.overall == "pre_invariant_certified_at_resolution"
    return {"status": verdict.overall, "ok": ok, "report": report,
            "arcs": list(verdict.simulations)}


def _run_harness_task(sc: Scenario, task: dict, policy: SimPolicy,
                      products: dict) -> dict:
    pol = _task_policy(policy, task)
    if task["theorem"] == "feedback":
        desc = sc.systems[task["system"]]
        c = _resolve_contract(sc, products, task["contract"])
        report = harness_feedback_theorem(desc, c, pol,
                                          task.get("declared_strong"))
    else:
        h1, h2 = sc.systems[task["first"]], sc.systems[task["second"]]
        c1 = _resolve_contract(sc, products, task["contract_first"])
        c2 = _resolve_contract(sc, products, task["contract_second"])
        report = harness_cascade_theorem(h1, c1, h2, c2, pol)
    ok = bool(report.get("ok", False))
    return {"status": "ok" if ok else "counterexamples", "ok": ok,
            "report": report, "arcs": []}


def _run_shared_domain_task(sc: Scenario, task: dict) -> dict:
    def resolve(name: str) -> HybridTimeDomain:
        if name in sc.domains:
            return sc.domains[name]
        return sc.arcs[name].domain

    d1, d2 = (resolve(nm) for nm in task["domains"])
    merged = shared_domain(d1, d2, bool(task.get("align", False)))

    def dom_report(E: HybridTimeDomain) -> dict:
        return {"breaks": [float(b) for b in E.breaks],
                "jump_times": [float(t) for t in E.jump_times],
                "sup": [float(E.sup_t), int(E.sup_j)],
                "length": float(E.sup_t) + float(E.sup_j),
                "triples": to_triples(E)}

    report = {"inputs": {nm: dom_report(resolve(nm))
                         for nm in task["domains"]},
              "align": bool(task.get("align", False)),
              "merged": dom_report(merged)}
    return {"status": "ok", "ok": True, "report": report, "arcs": []}


def run_scenario(sc: Scenario, policy_overrides: dict | None = None
                 ) -> list[dict]:
    """Execute every task in order; each result carries ``name``, ``kind``,
    ``status``, ``ok``, a JSON-ready ``report``, and produced arcs.

    A failing task (bad data, unattainable configuration) yields status
    ``error`` and does not stop the remaining tasks.
    """
    policy = sc.policy
    if policy_overrides:
        kw = dict(policy_overrides)
        if "overlap" in kw:
            kw["overlap_rule"] = _OVERLAP_RULES[kw.pop("overlap")]
        policy = replace(policy, **kw)
    products: dict[str, dict] = {}
    results = []
    for task in sc.tasks:
        kind = task["kind"]
        try:
            if kind in ("simulate", "feedback"):
                res = _run_simulation_task(sc, task, policy)
            elif kind in ("check_weak", "check_strong"):
                res = _run_check_task(sc, task, policy, products)
            elif kind == "lift":
                res = _run_lift_task(sc, task, products)
            elif kind == "cascade":
                res = _run_cascade_task(sc, task, products)
            elif kind == "invariance":
                res = _run_invariance_task(sc, task, policy, products)
            elif kind == "harness":
                res = _run_harness_task(sc, task, policy, products)
            else:
                res = _run_shared_domain_task(sc, task)
        except Exception as exc:  # noqa: BLE001 - reported, not hidden
            res = {"status": "error", "ok": False, "arcs": [],
                   "report": {"error": f"{type(exc).__name__}: {exc}"}}
        res["name"] = task["name"]
        res["kind"] = kind
        products[task["name"]] = res
        results.append(res)
    return results


# ---------------------------------------------------------------------------
# Output files


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return int(obj)
    if isinstance(obj, float):
        return float(obj)
    if hasattr(obj, "item"):  # numpy scalar
        return obj.item()
    return str(obj)


def _dump_json(data) -> str:
    return json.dumps(_jsonable(data), indent=2, sort_keys=True) + "\n"


def write_outputs(sc: Scenario, results: list[dict],
                  outdir: str | Path) -> dict:
    """Write one JSON report per task plus one CSV per produced arc, then a
    manifest listing exactly those files.  Deterministic: rerunning the same
    scenario writes byte-identical content (no timestamps, sorted keys)."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {"scenario": sc.name, "tasks": []}
    for res in results:
        files = []
        report_name = f"{res['name']}.json"
        (out / report_name).write_text(_dump_json(res["report"]))
        files.append(report_name)
        for label, arc in res["arcs"]:
            csv_name = f"{res['name']}_{label}.csv"
            (out / csv_name).write_text(to_csv(arc))
            files.append(csv_name)
        manifest["tasks"].append({"name": res["name"], "kind": res["kind"],
                                  "status": res["status"],
                                  "ok": bool(res["ok"]), "files": files})
    (out / "manifest.json").write_text(_dump_json(manifest))
    return manifest


def exit_code(results: list[dict]) -> int:
    """0 when every task passed, 2 on any operational error, else 1."""
    if any(r["status"] == "error" for r in results):
        return 2
    if all(r["ok"] for r in results):
        return 0
    return 1


# ---------------------------------------------------------------------------
# Built-in scenarios: the worked examples as runnable files


_EXAMPLE1 = """\
name = "example1"

[policy]
dt = 0.001
max_time = 3.0
max_jumps = 8
max_branches = 8

[system.plant]
dims = [1, 1, 1]
W = "(-inf, inf)"
X = "(-inf, inf)"
Y = "(-inf, inf)"
C = "[-1, 1]"
D = "(-2, 2)"
F = [["cbrt(w1)"]]
G = [["0.5 * w1"]]
h = ["x1"]
X0 = "[0, 0]"
assumption1 = true

[contract.c]
AW = "[0, 0]"
GX = "[0, 0]"
GY = "[0, 0]"

[input.zero]
expr = ["0"]
range = "[0, 0]"

[[task]]
name = "open_loop"
kind = "simulate"
system = "plant"
input = "zero"
enumerate = true

[[task]]
name = "weak_zero"
kind = "check_weak"
arcs = "open_loop"
contract = "c"

[[task]]
name = "closed_loop"
kind = "feedback"
system = "plant"
enumerate = true
kickstart = true

[[task]]
name = "thm_feedback"
kind = "harness"
theorem = "feedback"
system = "plant"
contract = "c"
kickstart = true
"""

_EXAMPLE2 = """\
name = "example2"

[policy]
dt = 0.001

[contract.c]
AW = "[0, 0]"
GX = "[0, 0]"
GY = "[0, 0]"

[arc.zero]
breaks = [0.0, 1.0, 2.0, 3.0, 4.0]
dt = 0.25
w = ["0"]
x = ["0"]
y = ["0"]

[arc.horizon_probe]
breaks = [0.0, 1.0, 2.0, 3.0]
dt = 0.001
w = ["max(0, t - 2)"]
x = ["0.75 * pow(max(0, t - 2), 4 / 3)"]
y = ["x1 * min(1, max(0, 1000000000 * (t - 2.5)))"]

[[task]]
name = "strong_zero"
kind = "check_strong"
arcs = "zero"
contract = "c"

[[task]]
name = "strong_probe"
kind = "check_strong"
arcs = "horizon_probe"
contract = "c"

[[task]]
name = "weak_probe"
kind = "check_weak"
arcs = "horizon_probe"
contract = "c"
"""

_EXAMPLE3 = """\
name = "example3"

[policy]
dt = 0.001
max_time = 10.0
max_jumps = 6
max_branches = 6

[system.plant]
dims = [1, 1, 1]
W = "[0, inf)"
X = "[0, inf)"
Y = "[0, inf)"
C = "(-0.9, 0.9)"
D = "union of (-inf, -0.9], [0.9, inf)"
F = [["sqrt(w1) - x1"]]
G = [["0.1 * w1"]]
h = ["x1"]
X0 = "[0, 0.1]"
assumption1 = true

[contract.c]
AW = "[0, 121]"
GX = "[0, 11]"
GY = "[0, 11]"

[[task]]
name = "lifted"
kind = "lift"
system = "plant"
contract = "c"
beta = 110.0
eps = 110.0

[[task]]
name = "closed_loop"
kind = "feedback"
system = "plant"
enumerate = true
max_time = 7.0
kickstart = true

[[task]]
name = "weak_all"
kind = "check_weak"
arcs = "closed_loop"
contract = "c"

[[task]]
name = "thm_feedback"
kind = "harness"
theorem = "feedback"
system = "plant"
contract = "c"
kickstart = true
max_time = 2.5
"""

_EXAMPLE4 = """\
name = "example4"

[policy]
dt = 0.001
overlap = "flow"
max_time = 10.0
max_jumps = 4
max_branches = 4

[system.plant]
dims = [1, 1, 1]
W = "(-inf, inf)"
X = "(-inf, inf)"
Y = "(-inf, inf)"
C = "[-1, 1]"
D = "[0, 0]"
F = [["-2 * x1 - 2 * w1"]]
G = [["0.5 * x1"]]
h = ["x1"]
X0 = "[-1, 1]"
assumption1 = true
lipschitz = true

[contract.c]
AW = "[-1, 1]"
GX = "[-1, 1]"
GY = "[-1, 1]"

[[task]]
name = "invariant"
kind = "invariance"
system = "plant"
contract = "c"
K = "[-1, 1]"

[[task]]
name = "decay"
kind = "feedback"
system = "plant"
x0 = [1.0]
"""

_SHARED_DOMAIN = """\
name = "shared_domain_example"

[domain.E1]
breaks = [0.0, 1.0, 1.5, 1.5, 2.0]

[domain.E2]
breaks = [0.0, 0.5, 2.0]

[[task]]
name = "merge"
kind = "shared_domain"
domains = ["E1", "E2"]
"""

BUILTIN_SCENARIOS = {
    "example1": _EXAMPLE1,
    "example2": _EXAMPLE2,
    "example3": _EXAMPLE3,
    "example4": _EXAMPLE4,
    "shared_domain_example": _SHARED_DOMAIN,
}
