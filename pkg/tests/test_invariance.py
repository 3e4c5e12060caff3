"""Pre-invariance certificates: exact and sampled condition checks."""

import json

import pytest

from hybridcontracts.composition import feedback
from hybridcontracts.contracts import AGContract
from hybridcontracts.invariance import (
    EXACT,
    FALSIFIED,
    SAMPLED,
    VERIFIED,
    InvarianceProblem,
    certificate,
    check_condition_i,
    check_condition_ii,
    check_condition_iii,
    check_invariant_relative,
)
from hybridcontracts.sets import empty, interval, point, product, union, whole
from hybridcontracts.systems import HybridSystemDesc, SimPolicy, validate

CONTRACT = AGContract(interval(-1, 1), interval(-1, 1), interval(-1, 1))
FAST = SimPolicy(dt=0.01, max_time=2.0, max_jumps=4)


def plant(**overrides):
    """x' = -2x - 2w, jumps halve the state from D = {0}; identity output.

    Under w = h(x) the box [-1, 1] traps every motion.
    """
    w = interval(-2, 2)
    kw = dict(
        dims=(1, 1, 1), W=w, X=interval(-2, 2), Y=interval(-2, 2),
        C=product(interval(-1, 1), w),
        D=product(interval(0, 0), w),
        F=(lambda x, w_: (-2.0 * x[0] - 2.0 * w_[0],),),
        G=(lambda x, w_: (0.5 * x[0],),),
        h=lambda x: (x[0],),
        X0=interval(-1, 1),
        assumption1=True, lipschitz=True,
        f_affine=(((0.0, {0: -2.0, 1: -2.0}),),),
        g_affine=(((0.0, {0: 0.5}),),),
        h_affine=((0.0, {0: 1.0}),),
        name="plant",
    )
    kw.update(overrides)
    return validate(HybridSystemDesc(**kw))


def problem(desc=None, K=None, contract=CONTRACT):
    return InvarianceProblem(desc or plant(), contract,
                             K or interval(-1, 1))


# ---------------------------------------------------------------------------
# problem construction


def test_accepts_prebuilt_feedback_system():
    fb = feedback(plant())
    p = InvarianceProblem(fb, CONTRACT, interval(-1, 1))
    assert p.fb is fb


def test_requires_compact_assumptions():
    unbounded = AGContract(whole(1), interval(-1, 1), interval(-1, 1))
    with pytest.raises(ValueError):
        problem(contract=unbounded)
    open_sided = AGContract(interval(-1, 1, hi_strict=True),
                            interval(-1, 1), interval(-1, 1))
    with pytest.raises(ValueError):
        problem(contract=open_sided)


def test_requires_single_closed_box_K():
    with pytest.raises(ValueError):
        problem(K=union(interval(-1, 0), interval(0.5, 1)))
    with pytest.raises(ValueError):
        problem(K=interval(-1, 1, lo_strict=True))
    with pytest.raises(ValueError):
        problem(K=empty(1))


def test_requires_box_substitution_for_h():
    w = interval(-10, 10)
    square = validate(HybridSystemDesc(
        dims=(1, 1, 1), W=w, X=interval(-5, 5), Y=interval(0, 10),
        C=product(interval(-5, 5), interval(0, 1)), D=empty(2),
        F=(lambda x, w_: (0.0,),),
        G=(lambda x, w_: (x[0],),),
        h=lambda x: (x[0] * x[0],),
        X0=point(0.5),
    ))
    with pytest.raises(ValueError):
        InvarianceProblem(square, CONTRACT, interval(0, 0.5))


def test_rejects_K_outside_flow_and_jump_sets():
    with pytest.raises(ValueError):
        problem(K=interval(4, 5))


# ---------------------------------------------------------------------------
# the certified case


def test_certified_box_all_exact():
    p = problem()
    v = check_invariant_relative(p, FAST)
    for cond in (v.cond_i, v.cond_ii, v.cond_iii):
        assert cond.status == VERIFIED
        assert cond.arithmetic == EXACT
    assert v.overall == "pre_invariant_certified_at_resolution"
    assert v.conclusions["weak_satisfaction"]
    assert v.conclusions["feedback_containment"]
    assert v.conclusions["g_y_in_a_w"]
    assert v.counterexample is None
    assert len(v.confirmations) == 3  # X0 representatives -1, 1, midpoint
    assert all(c["stayed_in_g_x"] for c in v.confirmations)
    assert [label for label, _ in v.simulations] == \
        [c["label"] for c in v.confirmations]


def test_boundary_cells_and_cone_intervals():
    ciii = check_condition_iii(problem())
    cells = ciii.details["cells"]
    assert len(cells) == 2  # the two endpoints of a 1-D box
    lo, hi = cells
    assert lo["cone"] == ["nonneg"]
    assert lo["interval"] == [[0.0, 4.0]]   # -2x - 2w at x = -1, w in [-1,1]
    assert hi["cone"] == ["nonpos"]
    assert hi["interval"] == [[-4.0, 0.0]]
    assert lo["ok"] and hi["ok"]


def test_conclusions_need_declared_regularity():
    v = check_invariant_relative(problem(plant(assumption1=False)), FAST)
    assert v.overall == "pre_invariant_certified_at_resolution"
    assert not v.conclusions["weak_satisfaction"]
    assert not v.conclusions["feedback_containment"]

    v = check_invariant_relative(problem(plant(lipschitz=False)), FAST)
    assert v.conclusions["weak_satisfaction"]
    assert not v.conclusions["feedback_containment"]


# ---------------------------------------------------------------------------
# falsification


def test_condition_i_witnesses():
    ci = check_condition_i(problem(K=interval(-0.5, 0.5)))
    assert ci.status == FALSIFIED
    assert ci.witness["kind"] == "x0_outside_K"

    narrow = AGContract(interval(-1, 1), interval(-0.2, 0.2), interval(-1, 1))
    ci = check_condition_i(problem(plant(X0=point(0.0)), contract=narrow))
    assert ci.status == FALSIFIED
    assert ci.witness["kind"] == "K_outside_G_X"

    doubled = plant(h=lambda x: (2.0 * x[0],), h_affine=((0.0, {0: 2.0}),),
                    X0=point(0.0))
    ci = check_condition_i(problem(doubled))
    assert ci.status == FALSIFIED
    assert ci.witness["kind"] == "h_image_outside_G_Y"
    assert abs(ci.witness["y"][0]) == 2.0  # attained at a corner of K


def test_jump_escape_falsifies_condition_ii():
    desc = plant(D=product(interval(1, 1), interval(-2, 2)),
                 G=(lambda x, w_: (3.0 * x[0],),),
                 g_affine=(((0.0, {0: 3.0}),),),
                 X0=point(0.0))
    p = problem(desc)
    cii = check_condition_ii(p)
    assert cii.status == FALSIFIED
    assert cii.arithmetic == EXACT
    assert cii.witness["kind"] == "jump_escapes_K"
    assert cii.witness["target"] == [3.0]

    v = check_invariant_relative(p, FAST)
    assert v.overall == "falsified"
    assert v.counterexample is not None
    assert v.counterexample["left_K"]


def test_outward_flow_falsifies_condition_iii():
    w10 = interval(-10, 10)
    desc = plant(W=w10, X=w10, Y=w10,
                 C=product(w10, w10),
                 D=product(interval(5, 5), w10),
                 F=(lambda x, w_: (x[0],),),
                 f_affine=(((0.0, {0: 1.0}),),),
                 X0=point(0.0))
    p = problem(desc)
    ciii = check_condition_iii(p)
    assert ciii.status == FALSIFIED
    assert ciii.arithmetic == EXACT
    assert ciii.witness["kind"] == "flow_leaves_cone"
    assert ciii.witness["x"] == [-1.0]
    assert ciii.witness["velocity"] == [-1.0]  # points out of K at the floor

    v = check_invariant_relative(p, FAST)
    assert v.overall == "falsified"
    assert v.counterexample is not None
    assert v.counterexample["left_K"]


# ---------------------------------------------------------------------------
# sampled arithmetic


def test_sampled_paths_without_affine_data():
    p = problem(plant(f_affine=None, g_affine=None))
    cii = check_condition_ii(p)
    assert cii.status == VERIFIED
    assert cii.arithmetic == SAMPLED
    assert cii.details["samples"] > 0
    ciii = check_condition_iii(p)
    assert ciii.status == VERIFIED
    assert ciii.arithmetic == SAMPLED
    assert ciii.details["samples"] > 0
    assert ciii.details["closure_taken"] is False


def test_sampled_falsification():
    desc = plant(F=(lambda x, w_: (x[0],),), f_affine=None,
                 D=product(interval(5, 5), interval(-2, 2)),
                 X0=point(0.0))
    ciii = check_condition_iii(problem(desc))
    assert ciii.status == FALSIFIED
    assert ciii.arithmetic == SAMPLED
    assert ciii.witness["kind"] == "flow_leaves_cone"


def test_union_flow_intersection_is_structural():
    w = interval(-2, 2)
    desc = plant(C=product(union(interval(-2, -1), interval(1, 2)), w))
    p = problem(desc, K=interval(-2, 2))
    with pytest.raises(ValueError):
        check_condition_iii(p)


# ---------------------------------------------------------------------------
# certificate serialization


def test_certificate_is_serializable():
    p = problem()
    v = check_invariant_relative(p, FAST)
    cert = certificate(p, v)
    blob = json.dumps(cert, sort_keys=True)
    assert json.loads(blob) == json.loads(json.dumps(cert, sort_keys=True))
    assert cert["overall"] == "pre_invariant_certified_at_resolution"
    assert set(cert["conditions"]) == {"i", "ii", "iii"}
    assert cert["resolutions"] == {"boundary": 16, "assumption": 8,
                                   "jumpset": 8}
    assert cert["K"] == "[-1, 1]"
