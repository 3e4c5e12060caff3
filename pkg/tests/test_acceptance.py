"""End-to-end acceptance checks over the worked examples and randomized laws.

Each test pins the observable behavior of one capability: the time-domain
merge, the three worked hybrid systems (cube-root growth, square-root
relaxation, linear decay with halving jumps), integrator convergence, the
monitor laws on randomized arcs, the theorem harnesses, and byte-identical
reruns of the builtin scenarios.
"""

import hashlib
import random
from dataclasses import replace
from time import perf_counter

import pytest

from hybridcontracts.arcs import sample_arc
from hybridcontracts.composition import (
    harness_cascade_theorem,
    harness_feedback_theorem,
)
from hybridcontracts.contracts import (
    SATISFIED,
    AGContract,
    check_strong,
    check_weak,
)
from hybridcontracts.hybrid_time import HybridTimeDomain, shared_domain
from hybridcontracts.scenario_io import (
    BUILTIN_SCENARIOS,
    load_scenario,
    run_scenario,
    write_outputs,
)
from hybridcontracts.sets import (
    Membership,
    empty,
    expand,
    interval,
    membership,
    parse_box_literal,
    product,
    subset,
    whole,
)
from hybridcontracts.systems import (
    HybridSystemDesc,
    InputSignal,
    SimPolicy,
    enumerate_feedback_branches,
    simulate,
    validate,
)

from oracles import (
    CBRT_CROSSING_T,
    E1_BREAKS,
    E2_BREAKS,
    E12_BREAKS,
    E12_JUMP_TIMES,
    EXP_MINUS_2,
    HORIZON_PROBE_DELTA,
    HORIZON_PROBE_HORIZON,
    EXAMPLE3_FIRST_JUMP_REF,
    CBRT_CROSSING_DECOY,
    POST_JUMP_EXAMPLE3,
    SQRT_CROSSING_FROM_0,
    cbrt_growth,
    linear_decay,
    sqrt_relax,
)


@pytest.fixture(scope="module")
def builtin_runs():
    """One timed run of every builtin scenario, shared across criteria."""
    out = {}
    for name in sorted(BUILTIN_SCENARIOS):
        sc = load_scenario(f"builtin:{name}")
        t0 = perf_counter()
        results = run_scenario(sc)
        out[name] = (sc, results, perf_counter() - t0)
    return out


def _by_name(results):
    return {r["name"]: r for r in results}


# ---------------------------------------------------------------------------
# 1. shared time domain of the running example, bit exact and fast


def test_criterion_1_shared_domain_merge():
    E1 = HybridTimeDomain(E1_BREAKS)
    E2 = HybridTimeDomain(E2_BREAKS)
    merged = shared_domain(E1, E2)
    assert merged.breaks == E12_BREAKS
    assert merged.jump_times == E12_JUMP_TIMES == (0.5, 1.0, 1.5, 1.5)
    assert (merged.sup_t, merged.sup_j) == (2.0, 4)

    best = min(_timed(lambda: shared_domain(E1, E2)) for _ in range(5))
    assert best < 1e-3  # well under a millisecond


def _timed(fn):
    t0 = perf_counter()
    fn()
    return perf_counter() - t0


# ---------------------------------------------------------------------------
# 2. cube-root growth: nonunique escape from the origin


def test_criterion_2_cbrt_escape(builtin_runs):
    sc, results, _ = builtin_runs["example1"]
    by = _by_name(results)

    # every enumerated open-loop arc under w = 0 satisfies the contract
    weak = by["weak_zero"]
    assert weak["status"] == "satisfied"
    counts = weak["report"]["counts"]
    assert counts["violated"] == 0 and counts["unknown"] == 0
    assert counts["satisfied"] == len(weak["report"]["results"]) >= 1

    # a synthetic arc whose output leaves the guarantee right at the
    # assumption horizon is strongly violated exactly there
    dom = HybridTimeDomain((0.0, 2.0))
    ramp = sample_arc(
        dom, 0.1,
        lambda t, j: (0.0 if t <= 1.0 else 1.0,),
        lambda t, j: (max(0.0, t - 1.0),),
        lambda t, j: (max(0.0, t - 1.0),),
        (1, 1, 1))
    v = check_strong(ramp, sc.contracts["c"])
    assert v.status == "violated"
    assert v.assumption_horizon == (1.0, 0)
    assert v.first_violation == (1.0, 0, "output")

    # closed loop at fine resolution: the kicked branch follows (2t/3)^(3/2)
    desc = sc.systems["plant"]
    pol = replace(sc.policy, dt=1e-4, max_time=1.6, max_jumps=1,
                  max_branches=4, kickstart=True)
    t0 = perf_counter()
    branches, _ = enumerate_feedback_branches(desc, (0.0,), pol)
    elapsed = perf_counter() - t0
    assert elapsed < 1.0

    flat = [a for a in branches if not a.domain.jump_times]
    kicked = [a for a in branches if a.domain.jump_times]
    assert flat and kicked  # both solutions from x = 0 are real
    assert all(abs(a.eval(1.5, 0)[1][0]) < 1e-6 for a in flat)

    arc = kicked[0]
    for t in (0.5, 1.0, 1.5):
        assert arc.eval(t, 0)[1][0] == pytest.approx(cbrt_growth(t),
                                                     abs=1e-4)
    assert arc.eval(1.5, 0)[1][0] == pytest.approx(1.0, abs=1e-4)

    # the state guarantee {0} fails for every t > 0 along the escape, so
    # the closed loop does not weakly satisfy the contract beyond t = 0
    g_x = sc.contracts["c"].g_x
    for t in (1e-3, 0.1, 0.75, 1.5):
        assert membership(g_x, (arc.eval(t, 0)[1][0],)) is Membership.OUT

    # measured first jump: the flow reaches the boundary at t = 3/2; the
    # printed value (3/2)^(2/3) is not consistent with the flow map
    jt = arc.domain.jump_times[0]
    assert abs(jt - CBRT_CROSSING_T) < 5e-4
    assert abs(jt - CBRT_CROSSING_DECOY) > 0.18


# ---------------------------------------------------------------------------
# 3. declared arcs: strong satisfaction with an exact continuation witness


def test_criterion_3_declared_arc_monitoring(builtin_runs):
    _, results, elapsed = builtin_runs["example2"]
    by = _by_name(results)
    assert elapsed < 1.0

    assert by["strong_zero"]["status"] == "satisfied"
    assert by["weak_probe"]["status"] == "satisfied"

    probe = by["strong_probe"]
    assert probe["status"] == "satisfied"
    row = probe["report"]["results"][0]
    assert row["horizon"] == {"t": HORIZON_PROBE_HORIZON[0],
                              "j": HORIZON_PROBE_HORIZON[1]}
    assert row["delta_witness"] == HORIZON_PROBE_DELTA  # exactly 0.5


# ---------------------------------------------------------------------------
# 4. square-root relaxation: lift, escape curve, first jump, containment


def test_criterion_4_sqrt_relaxation(builtin_runs):
    sc, results, elapsed = builtin_runs["example3"]
    by = _by_name(results)
    assert elapsed < 2.0

    lift = by["lifted"]["report"]
    assert lift["strict_margin_warning"] is True  # eps == beta == 110
    assert lift["g_y_equals_a_w"] is True
    target = interval(0.0, 121.0)
    for key in ("AW", "GY"):
        box = parse_box_literal(lift["lifted"][key], 1)
        assert subset(box, target) and subset(target, box)
    assert lift["feedback_compat"]["ok"] is True

    closed = by["closed_loop"]
    arcs = dict(closed["arcs"])
    rows = closed["report"]["arcs"]
    kicked_row = next(r for r in rows
                      if r["x0"] == [0.0] and r["jump_times"])
    arc = arcs[kicked_row["arc"]]

    # the escape from 0 follows (1 - e^(-t/2))^2 until the first jump
    jt = kicked_row["jump_times"][0]
    assert abs(jt - EXAMPLE3_FIRST_JUMP_REF) <= 5e-3
    assert abs(jt - SQRT_CROSSING_FROM_0) <= 2e-3
    steps = 120
    for i in range(steps + 1):
        t = jt * i / steps
        assert arc.eval(t, 0)[1][0] == pytest.approx(sqrt_relax(t), abs=1e-3)

    # jump relaxation: x+ = 0.1 w lands at 0.0900
    assert arc.eval(jt, 1)[1][0] == pytest.approx(POST_JUMP_EXAMPLE3,
                                                  abs=1e-3)

    # every feedback arc (all starts, all branches) stays inside [0, 11]
    for label, a in closed["arcs"]:
        for _, _, _, x, _ in a.grid_points():
            assert -1e-9 <= x[0] <= 11.0 + 1e-9, label
    assert by["weak_all"]["status"] == "satisfied"


# ---------------------------------------------------------------------------
# 5. linear decay with halving jumps: certified pre-invariance


def test_criterion_5_invariance_certificate(builtin_runs):
    _, results, elapsed = builtin_runs["example4"]
    by = _by_name(results)
    assert elapsed < 1.0

    inv = by["invariant"]
    assert inv["status"] == "pre_invariant_certified_at_resolution"
    rep = inv["report"]
    for key in ("i", "ii", "iii"):
        assert rep["conditions"][key]["status"] == "verified"
        assert rep["conditions"][key]["arithmetic"] == "exact_interval"

    # flow directions on the boundary of [-1, 1]: -2x - 2w over w in [-1, 1]
    cells = rep["conditions"]["iii"]["details"]["cells"]
    assert [c["interval"] for c in cells] == [[[0.0, 4.0]], [[-4.0, 0.0]]]
    assert [c["cone"] for c in cells] == [["nonneg"], ["nonpos"]]

    assert rep["conclusions"]["weak_satisfaction"] is True
    assert rep["conclusions"]["feedback_containment"] is True

    confirmations = rep["confirmations"]
    assert sorted(c["x0"][0] for c in confirmations) == [-1.0, 0.0, 1.0]
    assert all(c["stayed_in_g_x"] for c in confirmations)

    # the closed loop from x0 = 1 is x(t) = e^(-4t): check t = 1/2
    decay_arc = dict(by["decay"]["arcs"])["arc0"]
    assert decay_arc.eval(0.5, 0)[1][0] == pytest.approx(EXP_MINUS_2,
                                                         abs=1e-5)


# ---------------------------------------------------------------------------
# 6. integrator order: halving dt cuts the error by at least 8x


def test_criterion_6_integrator_convergence():
    box = interval(-10.0, 10.0)
    desc = validate(HybridSystemDesc(
        dims=(1, 1, 1), W=interval(-1.0, 1.0), X=box, Y=box,
        C=product(box, whole(1)), D=empty(2),
        F=(lambda x, w: (-4.0 * x[0],),),
        G=(lambda x, w: (x[0],),),
        h=lambda x: (x[0],),
        X0=interval(1.0, 1.0),
        name="decay4"))
    zero = InputSignal(lambda t, j: (0.0,), interval(0.0, 0.0), name="zero")

    errors = []
    for dt in (1e-3, 5e-4):
        arc = simulate(desc, zero, (1.0,), SimPolicy(dt=dt, max_time=0.5))
        t_end = arc.segments[-1].times[-1]
        assert t_end == 0.5
        errors.append(abs(arc.segments[-1].x[-1][0] - linear_decay(0.5)))
    assert errors[0] / errors[1] >= 8.0
    assert errors[0] < 1e-9


# ---------------------------------------------------------------------------
# 7. monitor laws on 1000 randomized arcs and box contracts


def test_criterion_7_randomized_monitor_laws():
    rng = random.Random(70)

    def rand_box():
        c = rng.uniform(-2.5, 2.5)
        r = rng.uniform(0.2, 4.0)
        return interval(c - r, c + r,
                        lo_strict=rng.random() < 0.2,
                        hi_strict=rng.random() < 0.2)

    def rand_arc():
        T = rng.uniform(1.0, 3.0)
        jumps = sorted(rng.uniform(0.1, T - 0.1)
                       for _ in range(rng.randint(0, 3)))
        if jumps and rng.random() < 0.2:
            jumps.insert(0, jumps[0])  # occasionally two jumps at one time
        dom = HybridTimeDomain((0.0, *jumps, T))
        coef = [[(rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2))
                 for _ in range(dom.num_intervals)] for _ in range(3)]

        def channel(k):
            rows = coef[k]
            return lambda t, j: (rows[j][0] + rows[j][1] * t,)

        dt = rng.choice((0.1, 0.2, 0.25))
        return sample_arc(dom, dt, channel(0), channel(1), channel(2),
                          (1, 1, 1))

    weak_sat = strong_sat = 0
    for case in range(1000):
        arc = rand_arc()
        c = AGContract(rand_box(), rand_box(), rand_box())
        s = check_strong(arc, c)
        w = check_weak(arc, c)
        if s.status == SATISFIED:
            strong_sat += 1
            assert w.status == SATISFIED, \
                f"case {case}: strong satisfied but weak was {w.status}"

        eps = rng.uniform(0.0, 1.5)
        wide = AGContract(c.a_w, expand(c.g_x, eps), expand(c.g_y, eps))
        if w.status == SATISFIED:
            weak_sat += 1
            assert check_weak(arc, wide).status == SATISFIED, \
                f"case {case}: widening the guarantees broke weak"
        if s.status == SATISFIED:
            assert check_strong(arc, wide).status == SATISFIED, \
                f"case {case}: widening the guarantees broke strong"

    # the generator must actually exercise the laws, not pass vacuously
    assert weak_sat >= 100
    assert strong_sat >= 30


# ---------------------------------------------------------------------------
# 8. theorem harnesses: no implication counterexamples anywhere


def _stable_affine_instance(rng, tag):
    a = -rng.uniform(0.5, 3.0)
    b = rng.uniform(-0.45, 0.45)
    box2 = interval(-2.0, 2.0)
    return validate(HybridSystemDesc(
        dims=(1, 1, 1), W=box2, X=box2, Y=box2,
        C=product(box2, whole(1)), D=empty(2),
        F=(lambda x, w, _a=a, _b=b: (_a * x[0] + _b * w[0],),),
        G=(lambda x, w: (0.0,),),
        h=lambda x: (x[0],),
        X0=interval(-rng.uniform(0.05, 0.5), rng.uniform(0.05, 0.5)),
        assumption1=True, lipschitz=True,
        f_affine=(((0.0, {0: a, 1: b}),),),
        g_affine=(((0.0, {}),),),
        h_affine=((0.0, {0: 1.0}),),
        name=f"affine_{tag}"))


def test_criterion_8_harness_implications(builtin_runs):
    # the builtin harness tasks never report an implication counterexample
    # (the square-root example honestly reports its premise as unmet, which
    # is a gap in the worked numbers, not a counterexample)
    for name in ("example1", "example3"):
        _, results, _ = builtin_runs[name]
        rep = _by_name(results)["thm_feedback"]["report"]
        assert rep["counterexamples"] == [], name
    # the cube-root system satisfies its contract weakly but not strongly:
    # the probed premise fails, the escaping closed-loop branch is reported
    # as a violation, and no implication counterexample exists
    e1 = _by_name(builtin_runs["example1"][1])["thm_feedback"]["report"]
    assert e1["premise_strong"] is False
    assert e1["violations"] and e1["ok"] is True
    e3 = _by_name(builtin_runs["example3"][1])["thm_feedback"]["report"]
    assert e3["premise_strong"] is False  # the declared assumptions overshoot
    assert e3["violations"] == []         # yet containment held empirically

    # randomized stable affine instances, fixed seed and pinned policy
    rng = random.Random(81)
    pol = SimPolicy(dt=0.01, max_time=1.0, max_jumps=3, max_branches=4)
    unit = AGContract(interval(-1.0, 1.0), interval(-1.0, 1.0),
                      interval(-1.0, 1.0))
    instances = [_stable_affine_instance(rng, i) for i in range(100)]

    premises = 0
    for desc in instances:
        rep = harness_feedback_theorem(desc, unit, pol)
        assert rep["counterexamples"] == [], desc.name
        assert rep["violations"] == [], desc.name
        premises += bool(rep["premise_strong"])
    assert premises == 100  # every instance exercises the full implication

    holds = 0
    for h1, h2 in zip(instances[0::2], instances[1::2]):
        rep = harness_cascade_theorem(h1, unit, h2, unit, pol,
                                      x0s=[(0.0, 0.0)])
        assert rep["applicable"] is True
        assert rep["counterexamples"] == [], (h1.name, h2.name)
        holds += sum(out == "holds"
                     for case in rep["cases"]
                     for out in case["implications"].values())
    assert holds > 0


# ---------------------------------------------------------------------------
# 9. reruns of every builtin produce byte-identical files


def test_criterion_9_reruns_byte_identical(builtin_runs, tmp_path):
    def digests(directory):
        return {p.name: hashlib.sha256(p.read_bytes()).hexdigest()
                for p in directory.iterdir()}

    for name, (sc, results, _) in builtin_runs.items():
        first = tmp_path / name / "first"
        second = tmp_path / name / "second"
        write_outputs(sc, results, first)
        fresh = load_scenario(f"builtin:{name}")
        write_outputs(fresh, run_scenario(fresh), second)
        da, db = digests(first), digests(second)
        assert set(da) == set(db), name
        assert da == db, name
        assert "manifest.json" in da
