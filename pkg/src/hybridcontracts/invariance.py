"""Certificates of forward pre-invariance of a box relative to a contract.

A closed box K is pre-invariant relative to a contract when (i) it traps the
initial set inside the state/output guarantees, (ii) every jump from K under
assumed inputs lands back in K, and (iii) along the boundary of K within the
closed-loop flow set, every assumed flow direction points into the tangent
cone.  The three conditions are checked either by exact interval arithmetic
(affine dynamics — the verdict is then exact) or on sampling grids at the
declared resolutions (the verdict is then "at resolution").

Condition checks never raise on failure: they return a verdict carrying a
re-checked witness.  Structural impossibilities (unbounded assumption set,
union-shaped flow intersection) are construction-time errors instead.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .composition import FeedbackSystem, feedback
from .contracts import AGContract
from .sets import (
    Box,
    BoxSet,
    Face,
    SignCone,
    SignConstraint,
    closure,
    contains,
    format_box_literal,
    in_cone,
    intersect,
    sample_boundary,
    subset,
    tangent_cone,
)
from .systems import (
    HybridSystemDesc,
    SimPolicy,
    _FeedbackPlant,
    _representative_points,
    _run_single,
    _single_rule,
)

VERIFIED = "verified"
FALSIFIED = "falsified"
UNKNOWN = "unknown"

EXACT = "exact_interval"
SAMPLED = "sampled_grid"


@dataclass(frozen=True, slots=True)
class ConditionVerdict:
    status: str                # verified | falsified | unknown
    arithmetic: str            # exact_interval | sampled_grid
    witness: dict | None = None
    details: dict = field(default_factory=dict)


@dataclass(slots=True)
class InvarianceProblem:
    """One pre-invariance question: is K invariant for this system under
    this contract's assumptions?

    ``system`` may be an open-loop description (its loop is closed here) or
    an already-built :class:`FeedbackSystem`.  The assumption set must be
    compact; K must be a single closed box.
    """

    system: HybridSystemDesc | FeedbackSystem
    contract: AGContract
    K: BoxSet
    boundary_resolution: int = 16
    aw_resolution: int = 8
    jumpset_resolution: int = 8
    cone_tol: float | None = None
    fb: FeedbackSystem = field(init=False)

    def __post_init__(self) -> None:
        fb = self.system if isinstance(self.system, FeedbackSystem) \
            else feedback(self.system)
        self.fb = fb
        a_w = self.contract.a_w
        if not (a_w.bounded and a_w.closed):
            raise ValueError(
                "assumption set must be compact (bounded with closed faces)"
            )
        live = [p for p in self.K.pieces if not p.is_empty]
        if len(live) != 1:
            raise ValueError("K must be a single nonempty box")
        if not live[0].closed:
            raise ValueError("K must be closed")
        if fb.c_f is None or fb.d_f is None:
            raise ValueError(
                "flow/jump sets admit no box substitution through h; "
                "the invariance checker needs box forms"
            )
        base = fb.base
        if self.K.dims != base.dims[1]:
            raise ValueError(
                f"K has {self.K.dims} dims, state space has {base.dims[1]}"
            )
        # K must sit inside closure(C_f) u D_f, probed at representative
        # points: outside both, neither flowing nor jumping is defined.
        cbar = closure(fb.c_f)
        for pt in _representative_points(self.K):
            if not (contains(cbar, pt) or contains(fb.d_f, pt)):
                raise ValueError(
                    f"K point {pt} lies outside closure(C_f) u D_f"
                )


@dataclass(slots=True)
class InvarianceVerdict:
    cond_i: ConditionVerdict
    cond_ii: ConditionVerdict
    cond_iii: ConditionVerdict
    overall: str  # pre_invariant_certified_at_resolution | falsified | unknown
    conclusions: dict
    confirmations: list
    counterexample: dict | None
    simulations: list  # (label, HybridArc) pairs for persistence


# ---------------------------------------------------------------------------
# Shared numeric helpers


def _linspace(lo: float, hi: float, r: int) -> list[float]:
    if lo == hi:
        return [lo]
    r = max(2, r)
    step = (hi - lo) / (r - 1)
    vals = [lo + i * step for i in range(r - 1)]
    vals.append(hi)
    return vals


def _grid(S: BoxSet, resolution: int) -> list[tuple[float, ...]]:
    """Deterministic lattice over the (closures of the) pieces of S."""
    pts: list[tuple[float, ...]] = []
    seen = set()
    for piece in S.pieces:
        if piece.is_empty:
            continue
        axes = []
        for f in piece.faces:
            if not f.bounded:
                raise ValueError("cannot grid an unbounded set")
            axes.append(_linspace(f.lo, f.hi, resolution))
        for pt in itertools.product(*axes):
            if pt not in seen:
                seen.add(pt)
                pts.append(pt)
    return pts


def _affine_interval(row, var_intervals) -> tuple[float, float]:
    """Tight range of const + sum(coef * var) over per-variable intervals."""
    const, coefs = row
    lo = hi = float(const)
    for k, a in coefs.items():
        vlo, vhi = var_intervals[k]
        if a >= 0.0:
            lo += a * vlo
            hi += a * vhi
        else:
            lo += a * vhi
            hi += a * vlo
    return lo, hi


def _attaining_point(row, var_intervals, want_hi: bool) -> list[float]:
    """A corner of the variable box attaining the requested extreme."""
    _, coefs = row
    pt = []
    for k, (vlo, vhi) in enumerate(var_intervals):
        a = coefs.get(k, 0.0)
        take_hi = (a >= 0.0) == want_hi
        pt.append(vhi if take_hi else vlo)
    return pt


def _piece_intervals(piece) -> list[tuple[float, float]]:
    return [(f.lo, f.hi) for f in piece.faces]


def _witness_point(S: BoxSet, predicate) -> tuple[float, ...] | None:
    for pt in _representative_points(S):
        if predicate(pt):
            return pt
    return None


# ---------------------------------------------------------------------------
# Condition (i): X0 <= K <= G_X n h^-1(G_Y)


def check_condition_i(p: InvarianceProblem) -> ConditionVerdict:
    base = p.fb.base
    c = p.contract
    if not subset(base.X0, p.K):
        w = _witness_point(base.X0, lambda pt: not contains(p.K, pt))
        return ConditionVerdict(
            FALSIFIED, EXACT,
            {"kind": "x0_outside_K", "x": list(w) if w else None},
        )
    if not subset(p.K, c.g_x):
        w = _witness_point(p.K, lambda pt: not contains(c.g_x, pt))
        return ConditionVerdict(
            FALSIFIED, EXACT,
            {"kind": "K_outside_G_X", "x": list(w) if w else None},
        )
    # h(K) <= G_Y: exact interval image for affine h, grid otherwise; the
    # grid runs in both cases so a falsifying sample is always concrete.
    arithmetic = SAMPLED
    if base.h_affine is not None:
        arithmetic = EXACT
        for piece in p.K.pieces:
            if piece.is_empty:
                continue
            var_ints = _piece_intervals(piece)
            img = [_affine_interval(row, var_ints) for row in base.h_affine]
            for r, (ilo, ihi) in enumerate(img):
                for want_hi in (False, True):
                    corner = _attaining_point(base.h_affine[r], var_ints,
                                              want_hi)
                    y = tuple(base.h(tuple(corner)))
                    if not contains(c.g_y, y):
                        return ConditionVerdict(
                            FALSIFIED, EXACT,
                            {"kind": "h_image_outside_G_Y",
                             "x": corner, "y": list(y)},
                            {"image_interval": [list(iv) for iv in img]},
                        )
    for pt in _grid(p.K, p.boundary_resolution):
        y = tuple(base.h(pt))
        if not contains(c.g_y, y):
            return ConditionVerdict(
                FALSIFIED, SAMPLED,
                {"kind": "h_image_outside_G_Y", "x": list(pt), "y": list(y)},
            )
    return ConditionVerdict(VERIFIED, arithmetic)


# ---------------------------------------------------------------------------
# Condition (ii): G(K n D_f, A_W) <= K


def check_condition_ii(p: InvarianceProblem) -> ConditionVerdict:
    base = p.fb.base
    kd = intersect(p.K, p.fb.d_f)
    if kd.is_empty:
        return ConditionVerdict(VERIFIED, EXACT, None,
                                {"note": "K n D_f is empty"})
    a_w = p.contract.a_w
    n = base.dims[1]

    if base.g_affine is not None:
        ok = True
        for piece in kd.pieces:
            if piece.is_empty:
                continue
            for wp in a_w.pieces:
                if wp.is_empty:
                    continue
                var_ints = _piece_intervals(piece) + _piece_intervals(wp)
                for sel, rows in enumerate(base.g_affine):
                    img = [_affine_interval(row, var_ints) for row in rows]
                    landing = BoxSet(
                        n, (Box(tuple(Face(ilo, ihi) for ilo, ihi in img)),))
                    if subset(landing, p.K):
                        continue
                    ok = False
                    # find the offending row/extreme and certify a witness
                    for r, (ilo, ihi) in enumerate(img):
                        for want_hi in (False, True):
                            corner = _attaining_point(rows[r], var_ints,
                                                      want_hi)
                            x_w = tuple(corner)
                            xs, ws = x_w[:n], x_w[n:]
                            tgt = tuple(float(v)
                                        for v in base.G[sel](xs, ws))
                            if (contains(kd, xs) and contains(a_w, ws)
                                    and not contains(p.K, tgt)):
                                return ConditionVerdict(
                                    FALSIFIED, EXACT,
                                    {"kind": "jump_escapes_K",
                                     "x": list(xs), "w": list(ws),
                                     "selection": sel,
                                     "target": list(tgt)},
                                )
        if ok:
            return ConditionVerdict(VERIFIED, EXACT)
        # interval test failed but no corner witness was certifiable
        # (over-approximation at strict faces): fall through to sampling

    xs_grid = [pt for pt in _grid(kd, p.jumpset_resolution)
               if contains(kd, pt)]
    ws_grid = _grid(a_w, p.aw_resolution)
    for xs in xs_grid:
        for ws in ws_grid:
            for sel, g in enumerate(base.G):
                tgt = tuple(float(v) for v in g(xs, ws))
                if not contains(p.K, tgt):
                    # certify outside the loop
                    re_tgt = tuple(float(v) for v in g(xs, ws))
                    if not contains(p.K, re_tgt):
                        return ConditionVerdict(
                            FALSIFIED, SAMPLED,
                            {"kind": "jump_escapes_K", "x": list(xs),
                             "w": list(ws), "selection": sel,
                             "target": list(re_tgt)},
                        )
    if base.g_affine is not None:
        # exact test was inconclusive and sampling found nothing
        return ConditionVerdict(
            UNKNOWN, EXACT, None,
            {"note": "interval image exceeds K only at strict faces"},
        )
    return ConditionVerdict(VERIFIED, SAMPLED,
                            details={"samples": len(xs_grid) * len(ws_grid)})


# ---------------------------------------------------------------------------
# Condition (iii): F(x, A_W) inside the tangent cone on the boundary


_CONE_NAMES = {
    SignConstraint.FREE: "free",
    SignConstraint.NONNEG: "nonneg",
    SignConstraint.NONPOS: "nonpos",
    SignConstraint.ZERO: "zero",
}


def _boundary_cells(piece):
    """All boundary cells of a closed box: per dimension pin to lo, hi, or
    leave free; a cell is on the boundary when at least one non-degenerate
    dimension is pinned (degenerate dimensions are always pinned)."""
    options = []
    for f in piece.faces:
        if f.degenerate:
            options.append((("point", f.lo),))
        else:
            options.append((("lo", f.lo), ("hi", f.hi), ("free", None)))
    for combo in itertools.product(*options):
        pinned = any(tag in ("lo", "hi") for tag, _ in combo)
        degenerate_only = all(tag == "point" for tag, _ in combo)
        if pinned or degenerate_only:
            yield combo


def _cell_cone(combo):
    cons = []
    for tag, _ in combo:
        if tag == "lo":
            cons.append(SignConstraint.NONNEG)
        elif tag == "hi":
            cons.append(SignConstraint.NONPOS)
        elif tag == "point":
            cons.append(SignConstraint.ZERO)
        else:
            cons.append(SignConstraint.FREE)
    return cons


def check_condition_iii(p: InvarianceProblem) -> ConditionVerdict:
    base = p.fb.base
    kc = intersect(p.K, p.fb.c_f)
    live = [piece for piece in kc.pieces if not piece.is_empty]
    if not live:
        return ConditionVerdict(VERIFIED, EXACT, None,
                                {"note": "K n C_f is empty"})
    if len(live) > 1:
        raise ValueError("K n C_f must be a single box, got a union")
    piece = closure(BoxSet(kc.dims, (live[0],))).pieces[0]
    closure_taken = not live[0].closed
    a_w = p.contract.a_w
    cone_tol = p.cone_tol

    if base.f_affine is not None:
        tol = 0.0 if cone_tol is None else cone_tol
        cells = []
        ok = True
        first_bad = None
        for combo in _boundary_cells(piece):
            cone = _cell_cone(combo)
            x_ints = []
            for (tag, v), f in zip(combo, piece.faces):
                if tag in ("lo", "hi", "point"):
                    x_ints.append((v, v))
                else:
                    x_ints.append((f.lo, f.hi))
            for wp in a_w.pieces:
                if wp.is_empty:
                    continue
                var_ints = x_ints + _piece_intervals(wp)
                for sel, rows in enumerate(base.f_affine):
                    img = [_affine_interval(row, var_ints) for row in rows]
                    cell_ok = True
                    bad_row = None
                    for r, (ilo, ihi) in enumerate(img):
                        c = cone[r]
                        if c is SignConstraint.NONNEG and ilo < -tol:
                            cell_ok = False
                        elif c is SignConstraint.NONPOS and ihi > tol:
                            cell_ok = False
                        elif c is SignConstraint.ZERO and (
                                ilo < -tol or ihi > tol):
                            cell_ok = False
                        if not cell_ok:
                            bad_row = r
                            break
                    cells.append({
                        "cell": [list(iv) for iv in x_ints],
                        "cone": [_CONE_NAMES[c] for c in cone],
                        "selection": sel,
                        "interval": [list(iv) for iv in img],
                        "ok": cell_ok,
                    })
                    if not cell_ok and first_bad is None:
                        want_hi = cone[bad_row] is not SignConstraint.NONNEG
                        corner = _attaining_point(rows[bad_row], var_ints,
                                                  want_hi)
                        n = base.dims[1]
                        first_bad = (tuple(corner[:n]), tuple(corner[n:]),
                                     sel, cone)
                    ok = ok and cell_ok
        if ok:
            return ConditionVerdict(VERIFIED, EXACT, None, {"cells": cells})
        xs, ws, sel, cone = first_bad
        v = tuple(float(u) for u in base.F[sel](xs, ws))
        if not in_cone(SignCone(tuple(cone)), v, tol):
            return ConditionVerdict(
                FALSIFIED, EXACT,
                {"kind": "flow_leaves_cone", "x": list(xs), "w": list(ws),
                 "selection": sel, "velocity": list(v)},
                {"cells": cells},
            )
        return ConditionVerdict(UNKNOWN, EXACT, None, {"cells": cells})

    # sampled path
    tol = 1e-9 if cone_tol is None else cone_tol
    kc_closed = BoxSet(kc.dims, (piece,))
    ws_grid = _grid(a_w, p.aw_resolution)
    checked = 0
    for xs in sample_boundary(kc_closed, p.boundary_resolution):
        cone = tangent_cone(kc_closed, xs)
        for ws in ws_grid:
            for sel, f in enumerate(base.F):
                v = tuple(float(u) for u in f(xs, ws))
                checked += 1
                if not in_cone(cone, v, tol):
                    v2 = tuple(float(u) for u in f(xs, ws))
                    if not in_cone(cone, v2, tol):
                        return ConditionVerdict(
                            FALSIFIED, SAMPLED,
                            {"kind": "flow_leaves_cone", "x": list(xs),
                             "w": list(ws), "selection": sel,
                             "velocity": list(v2)},
                            {"closure_taken": closure_taken},
                        )
    return ConditionVerdict(VERIFIED, SAMPLED, None,
                            {"samples": checked,
                             "closure_taken": closure_taken})


# ---------------------------------------------------------------------------
# Aggregate


def check_invariant_relative(p: InvarianceProblem,
                             policy: SimPolicy | None = None
                             ) -> InvarianceVerdict:
    """Aggregate the three conditions and draw the licensed conclusions.

    When everything is verified, the weak-satisfaction conclusion is set if
    the scenario declared the regularity assumption, and the feedback
    containment conclusion additionally needs declared Lipschitz data plus
    G_Y <= A_W.  Verification is complemented by simulation: confirmation
    feedback runs from the initial set's representative points (certified
    problems), or a counterexample run from the falsifying witness.
    """
    if policy is None:
        policy = SimPolicy()
    base = p.fb.base
    ci = check_condition_i(p)
    cii = check_condition_ii(p)
    ciii = check_condition_iii(p)
    statuses = (ci.status, cii.status, ciii.status)
    if all(s == VERIFIED for s in statuses):
        overall = "pre_invariant_certified_at_resolution"
    elif FALSIFIED in statuses:
        overall = "falsified"
    else:
        overall = "unknown"

    g_y_in_a_w = subset(p.contract.g_y, p.contract.a_w)
    prop2 = overall == "pre_invariant_certified_at_resolution" \
        and base.assumption1
    thm5 = prop2 and base.lipschitz and g_y_in_a_w
    conclusions = {
        "weak_satisfaction": prop2,
        "feedback_containment": thm5,
        "assumption1_declared": base.assumption1,
        "lipschitz_declared": base.lipschitz,
        "g_y_in_a_w": g_y_in_a_w,
    }

    confirmations = []
    counterexample = None
    simulations = []
    plant = _FeedbackPlant(base)
    rule = _single_rule(policy)
    if overall == "pre_invariant_certified_at_resolution":
        for idx, x0 in enumerate(_representative_points(base.X0)):
            arc = _run_single(plant, x0, policy, rule)
            stayed = all(contains(p.contract.g_x, tuple(x))
                         for _, _, _, x, _ in arc.grid_points())
            label = f"confirm_{idx}"
            confirmations.append({"x0": list(x0), "stayed_in_g_x": stayed,
                                  "label": label})
            simulations.append((label, arc))
    else:
        witness = next((cv.witness for cv in (ci, cii, ciii)
                        if cv.status == FALSIFIED and cv.witness), None)
        if witness is not None and witness.get("x") is not None:
            x0 = tuple(float(v) for v in witness["x"])
            try:
                arc = _run_single(plant, x0, policy, rule)
                left = not all(contains(p.K, tuple(x))
                               for _, _, _, x, _ in arc.grid_points())
                counterexample = {"x0": list(x0), "left_K": left,
                                  "label": "counterexample"}
                simulations.append(("counterexample", arc))
            except Exception as exc:  # witness may not admit any arc
                counterexample = {"x0": list(x0), "left_K": None,
                                  "error": str(exc)}

    return InvarianceVerdict(ci, cii, ciii, overall, conclusions,
                             confirmations, counterexample, simulations)


def certificate(p: InvarianceProblem, v: InvarianceVerdict) -> dict:
    """Serializable certificate: problem data, per-condition verdicts with
    witnesses and arithmetic path, conclusions, and simulation summaries."""
    def cond(cv: ConditionVerdict) -> dict:
        return {"status": cv.status, "arithmetic": cv.arithmetic,
                "witness": cv.witness, "details": cv.details}

    return {
        "K": format_box_literal(p.K),
        "resolutions": {
            "boundary": p.boundary_resolution,
            "assumption": p.aw_resolution,
            "jumpset": p.jumpset_resolution,
        },
        "cone_tol": p.cone_tol,
        "conditions": {"i": cond(v.cond_i), "ii": cond(v.cond_ii),
                       "iii": cond(v.cond_iii)},
        "overall": v.overall,
        "conclusions": v.conclusions,
        "confirmations": v.confirmations,
        "counterexample": v.counterexample,
    }
