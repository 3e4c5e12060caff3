"""Cascade and feedback composition of systems and contracts.

Cascade composition wires the first component's output to the second
component's input and co-simulates both with a common integrator step, so
``y1(t, j) = w2(t, j)`` holds at every grid point (and at every integrator
stage).  Feedback composition closes a single system's loop, ``w = h(x)``,
and derives the closed-loop flow/jump sets by substitution.

The harness functions at the bottom are executable forms of the composition
theorems: they enumerate branch arcs, evaluate the theorem's premises and
conclusion with the contract monitors, and report any branch where proven
premises meet a violated conclusion (which would indicate an implementation
bug, never a refutation of the theorem).
"""

from __future__ import annotations

from dataclasses import dataclass

from .arcs import ArcSegment, HybridArc, arc_from_segments
from .contracts import (
    SATISFIED,
    VIOLATED,
    AGContract,
    check_strong,
    check_weak,
    feedback_compat,
    verdict_report,
)
from .sets import (
    Box,
    BoxSet,
    closure,
    contains,
    empty,
    point,
    product,
    subset,
    union,
    _face_intersect,
)
from .systems import (
    HybridSystemDesc,
    InputSignal,
    SimPolicy,
    SimulationError,
    _enumerate_plant,
    _representative_points,
    _run_single,
    _single_rule,
    _start_state,
    constant_input,
    simulate,
)
from .systems import (
    enumerate_branches,
    enumerate_feedback_branches,
    simulate_feedback,
)

import numpy as np


# ---------------------------------------------------------------------------
# Cascade


@dataclass(frozen=True, slots=True)
class CascadeSystem:
    """Two systems wired output-to-input: ``y1 -> w2``."""

    first: HybridSystemDesc
    second: HybridSystemDesc

    @property
    def dims(self) -> tuple[int, int, int]:
        m1 = self.first.dims[0]
        n = self.first.dims[1] + self.second.dims[1]
        p2 = self.second.dims[2]
        return (m1, n, p2)


def cascade(h1: HybridSystemDesc, h2: HybridSystemDesc) -> CascadeSystem:
    if h1.dims[2] != h2.dims[0]:
        raise ValueError(
            f"first output has {h1.dims[2]} dims, second input {h2.dims[0]}"
        )
    if not subset(h1.Y, h2.W):
        raise ValueError("alphabet mismatch: Y1 is not contained in W2")
    return CascadeSystem(h1, h2)


def cascade_contract(c1: AGContract, c2: AGContract) -> AGContract:
    """The composite contract (A_W1, G_X1 x G_X2, G_Y2).

    Valid only under the interface hypothesis G_Y1 <= A_W2.
    """
    if not subset(c1.g_y, c2.a_w):
        raise ValueError("G_Y1 is not contained in A_W2")
    name = ""
    if c1.name or c2.name:
        name = f"{c1.name or 'c1'}>>{c2.name or 'c2'}"
    return AGContract(c1.a_w, product(c1.g_x, c2.g_x), c2.g_y, name=name)


class _CascadePlant:
    """Simulator plant for the composite: state (x1, x2), input w1.

    The second component's input is recomputed as h1(x1) wherever the state
    is evaluated, including RK4 stages, which keeps the feed exact.  A jump
    fires whenever either component's jump set is reached; with
    ``align_coincident_jumps`` both components jump together when both are
    ready, otherwise they jump sequentially (first component first).
    """

    __slots__ = ("first", "second", "_n1", "signal", "align",
                 "_c1bar", "_c2bar", "_nf2")

    def __init__(self, cs: CascadeSystem, signal: InputSignal, align: bool):
        self.first = cs.first
        self.second = cs.second
        self._n1 = cs.first.dims[1]
        self.signal = signal
        self.align = align
        self._c1bar = closure(cs.first.C)
        self._c2bar = closure(cs.second.C)
        self._nf2 = len(cs.second.F)

    @property
    def dims(self):
        m1 = self.first.dims[0]
        return (m1, self._n1 + self.second.dims[1], self.second.dims[2])

    def _split(self, x):
        return x[:self._n1], x[self._n1:]

    def w_at(self, t, j, x):
        return tuple(self.signal.evaluator(t, j))

    def n_flow_selections(self):
        return len(self.first.F) * self._nf2

    def deriv(self, t, j, x, sel):
        s1, s2 = divmod(sel, self._nf2)
        x1, x2 = self._split(x)
        w1 = self.w_at(t, j, x)
        w2 = tuple(self.first.h(x1))
        return tuple(self.first.F[s1](x1, w1)) + tuple(self.second.F[s2](x2, w2))

    def in_C(self, x, w):
        x1, x2 = self._split(x)
        if not contains(self.first.C, tuple(x1) + tuple(w)):
            return False
        w2 = tuple(self.first.h(x1))
        return contains(self.second.C, tuple(x2) + w2)

    def in_C_closure(self, x, w, tol):
        x1, x2 = self._split(x)
        if not contains(self._c1bar, tuple(x1) + tuple(w), tol):
            return False
        w2 = tuple(self.first.h(x1))
        return contains(self._c2bar, tuple(x2) + w2, tol)

    def _ready(self, x, w):
        x1, x2 = self._split(x)
        w2 = tuple(self.first.h(x1))
        d1 = contains(self.first.D, tuple(x1) + tuple(w))
        d2 = contains(self.second.D, tuple(x2) + w2)
        return x1, x2, w2, d1, d2

    def in_D(self, x, w):
        _, _, _, d1, d2 = self._ready(x, w)
        return d1 or d2

    def jump_targets(self, t, j, x, w):
        x1, x2, w2, d1, d2 = self._ready(x, w)
        out = []
        if self.align and d1 and d2:
            for g1 in self.first.G:
                t1 = tuple(float(v) for v in g1(x1, w))
                for g2 in self.second.G:
                    out.append(t1 + tuple(float(v) for v in g2(x2, w2)))
            return out
        if d1:
            for g1 in self.first.G:
                out.append(tuple(float(v) for v in g1(x1, w)) + tuple(x2))
        if d2:
            for g2 in self.second.G:
                out.append(tuple(x1) + tuple(float(v) for v in g2(x2, w2)))
        return out

    def output(self, t, j, x, w):
        _, x2 = self._split(x)
        return tuple(self.second.h(x2))


def _cascade_x0(cs: CascadeSystem, x0) -> tuple[float, ...]:
    x = tuple(float(v) for v in x0)
    n1 = cs.first.dims[1]
    if len(x) != n1 + cs.second.dims[1]:
        raise SimulationError(f"composite x0 needs {n1 + cs.second.dims[1]} dims")
    if not contains(cs.first.X0, x[:n1]) or not contains(cs.second.X0, x[n1:]):
        raise SimulationError("x0 outside the component initial sets")
    return x


def simulate_cascade(cs: CascadeSystem, input: InputSignal, x0,
                     policy: SimPolicy) -> HybridArc:
    """Co-simulate the composite from stacked initial state (x1, x2)."""
    x = _cascade_x0(cs, x0)
    if not subset(input.range, cs.first.W):
        raise SimulationError("input range is not contained in W1")
    plant = _CascadePlant(cs, input, policy.align_coincident_jumps)
    return _run_single(plant, _start_state(x, policy), policy,
                       _single_rule(policy))


def enumerate_cascade_branches(cs: CascadeSystem, input: InputSignal, x0,
                               policy: SimPolicy) -> tuple[list[HybridArc], bool]:
    x = _cascade_x0(cs, x0)
    if not subset(input.range, cs.first.W):
        raise SimulationError("input range is not contained in W1")
    plant = _CascadePlant(cs, input, policy.align_coincident_jumps)
    return _enumerate_plant(plant, x, policy)


def split_cascade_arc(cs: CascadeSystem, arc: HybridArc
                      ) -> tuple[HybridArc, HybridArc]:
    """Project a composite arc onto its components.

    Both live on the composite's (shared) domain; at a jump of the other
    component a projected state simply holds its value.  The second
    component's recorded input is exactly the first's output.
    """
    n1 = cs.first.dims[1]
    segs1, segs2 = [], []
    for seg in arc.segments:
        x1 = seg.x[:, :n1]
        x2 = seg.x[:, n1:]
        y1 = np.array([tuple(cs.first.h(tuple(row))) for row in x1])
        segs1.append(ArcSegment(seg.times.copy(), seg.w.copy(), x1.copy(), y1))
        segs2.append(ArcSegment(seg.times.copy(), y1.copy(), x2.copy(),
                                seg.y.copy()))
    a1 = arc_from_segments(segs1, cs.first.dims,
                           budget_exhausted=arc.budget_exhausted,
                           final_open=arc.domain.final_open)
    a2 = arc_from_segments(segs2, cs.second.dims,
                           budget_exhausted=arc.budget_exhausted,
                           final_open=arc.domain.final_open)
    return a1, a2


# ---------------------------------------------------------------------------
# Feedback


@dataclass(frozen=True, slots=True)
class FeedbackSystem:
    """Loop closure w = h(x) of a system with Y <= W.

    ``c_f``/``d_f`` are the closed-loop flow/jump sets as box sets over x
    when the output map admits an exact box substitution (diagonal affine
    h); the membership predicates below are always exact regardless.
    """

    base: HybridSystemDesc
    c_f: BoxSet | None
    d_f: BoxSet | None

    def in_c_f(self, x) -> bool:
        x = tuple(x)
        return contains(self.base.C, x + tuple(self.base.h(x)))

    def in_d_f(self, x) -> bool:
        x = tuple(x)
        return contains(self.base.D, x + tuple(self.base.h(x)))

    def f_f(self, x, sel: int = 0):
        x = tuple(x)
        return tuple(self.base.F[sel](x, tuple(self.base.h(x))))

    def g_f(self, x, sel: int = 0):
        x = tuple(x)
        return tuple(self.base.G[sel](x, tuple(self.base.h(x))))

    def simulate(self, x0, policy: SimPolicy) -> HybridArc:
        return simulate_feedback(self.base, x0, policy)

    def enumerate(self, x0, policy: SimPolicy) -> tuple[list[HybridArc], bool]:
        return enumerate_feedback_branches(self.base, x0, policy)


def _exact_face_holds(f, v: float) -> bool:
    lo_ok = v > f.lo if f.lo_strict else v >= f.lo
    hi_ok = v < f.hi if f.hi_strict else v <= f.hi
    return lo_ok and hi_ok


def _substitute_output_box(S: BoxSet, h_affine, n: int) -> BoxSet | None:
    """Pull the w-part of a set over (x, w) back through w = h(x).

    Exact when every component of h is affine in at most one state
    coordinate (which covers identity and diagonal scalings); returns None
    otherwise, leaving only the pointwise membership route.
    """
    if h_affine is None:
        return None
    rows = []
    for const, coefs in h_affine:
        nz = [(k, a) for k, a in coefs.items() if a != 0.0]
        if len(nz) > 1:
            return None
        rows.append((float(const), nz[0] if nz else None))
    pieces = []
    for piece in S.pieces:
        faces = list(piece.faces[:n])
        keep = True
        for i, f in enumerate(piece.faces[n:]):
            const, nz = rows[i]
            if nz is None:
                if not _exact_face_holds(f, const):
                    keep = False
                    break
                continue
            k, a = nz
            lo = (f.lo - const) / a
            hi = (f.hi - const) / a
            lo_s, hi_s = f.lo_strict, f.hi_strict
            if a < 0:
                lo, hi, lo_s, hi_s = hi, lo, hi_s, lo_s
            pulled = type(f)(lo, hi, lo_s, hi_s)
            merged = _face_intersect(faces[k], pulled)
            if merged is None:
                keep = False
                break
            faces[k] = merged
        if keep:
            pieces.append(Box(tuple(faces)))
    if not pieces:
        return empty(n)
    return BoxSet(n, tuple(pieces))


def feedback(h: HybridSystemDesc) -> FeedbackSystem:
    """Close the loop of a system whose output alphabet fits its input."""
    m, n, p = h.dims
    if p != m:
        raise ValueError(f"output has {p} dims but input expects {m}")
    if not subset(h.Y, h.W):
        raise ValueError("alphabet mismatch: Y is not contained in W")
    c_f = _substitute_output_box(h.C, h.h_affine, n)
    d_f = _substitute_output_box(h.D, h.h_affine, n)
    return FeedbackSystem(h, c_f, d_f)


# ---------------------------------------------------------------------------
# Probe inputs shared by the theorem harnesses


def _escape_point(a_w: BoxSet, W: BoxSet) -> tuple[float, ...] | None:
    """A point of W just outside the assumption set, if one exists."""
    import math

    for piece in a_w.pieces:
        if piece.is_empty:
            continue
        base = []
        for f in piece.faces:
            if f.bounded:
                base.append(0.5 * (f.lo + f.hi))
            elif not math.isinf(f.lo):
                base.append(f.lo)
            elif not math.isinf(f.hi):
                base.append(f.hi)
            else:
                base.append(0.0)
        for k, f in enumerate(piece.faces):
            for cand in (f.hi + 1.0 if not math.isinf(f.hi) else None,
                         f.lo - 1.0 if not math.isinf(f.lo) else None):
                if cand is None:
                    continue
                probe = tuple(base[:k]) + (cand,) + tuple(base[k + 1:])
                if contains(W, probe) and not contains(a_w, probe):
                    return probe
    return None


def _switched_input(w_in, w_out, t_switch: float, rng: BoxSet) -> InputSignal:
    w_in = tuple(float(v) for v in w_in)
    w_out = tuple(float(v) for v in w_out)

    def evaluator(t, j, _a=w_in, _b=w_out, _s=t_switch):
        return _a if t <= _s else _b

    return InputSignal(evaluator, rng, name="switched")


def probe_inputs(a_w: BoxSet, W: BoxSet, max_time: float) -> list[InputSignal]:
    """Deterministic probe signals for premise checks: constants at the
    assumption set's representative points, plus signals that hold such a
    value and then step outside the assumptions mid-run (these exercise the
    post-horizon clauses of the strong monitor)."""
    reps = _representative_points(a_w)
    signals = [constant_input(r) for r in reps]
    esc = _escape_point(a_w, W)
    if esc is not None:
        t_switch = 0.5 * max_time
        for r in reps:
            rng = union(point(*r), point(*esc))
            signals.append(_switched_input(r, esc, t_switch, rng))
    return signals


def _status(verdict) -> str:
    return verdict.status


# ---------------------------------------------------------------------------
# Theorem harnesses


def harness_cascade_theorem(h1: HybridSystemDesc, c1: AGContract,
                            h2: HybridSystemDesc, c2: AGContract,
                            policy: SimPolicy,
                            inputs: list[InputSignal] | None = None,
                            x0s: list | None = None) -> dict:
    """Exercise the cascade composition theorems on enumerated branches.

    For every probe input and initial state, enumerates composite branch
    arcs, splits each into component arcs, and evaluates three implications:
    weak+weak => composite weak, strong+weak => composite strong, and
    weak+strong => composite strong.  A counterexample entry is recorded
    only when an implication's premises are satisfied verdicts and its
    conclusion is violated.
    """
    report: dict = {"kind": "cascade", "hypotheses": {}, "cases": [],
                    "counterexamples": [], "branch_count": 0,
                    "truncated": False}
    try:
        cs = cascade(h1, h2)
        cc = cascade_contract(c1, c2)
        report["hypotheses"]["y1_in_w2"] = True
        report["hypotheses"]["g_y1_in_a_w2"] = True
    except ValueError as exc:
        key = "g_y1_in_a_w2" if "G_Y1" in str(exc) else "y1_in_w2"
        report["hypotheses"][key] = False
        report["applicable"] = False
        report["reason"] = str(exc)
        return report
    report["applicable"] = True

    if inputs is None:
        inputs = probe_inputs(c1.a_w, h1.W, policy.max_time)
    if x0s is None:
        x0s = [a + b
               for a in _representative_points(h1.X0)
               for b in _representative_points(h2.X0)]

    implications = (
        ("thm1_weak_weak", "weak", "weak", "weak"),
        ("thm2_strong_first", "strong", "weak", "strong"),
        ("thm2_strong_second", "weak", "strong", "strong"),
    )
    case_index = 0
    for sig in inputs:
        for x0 in x0s:
            try:
                branches, truncated = enumerate_cascade_branches(
                    cs, sig, x0, policy)
            except SimulationError:
                continue
            report["truncated"] = report["truncated"] or truncated
            for b_idx, arc in enumerate(branches):
                report["branch_count"] += 1
                a1, a2 = split_cascade_arc(cs, arc)
                verdicts = {
                    "h1_weak": check_weak(a1, c1),
                    "h1_strong": check_strong(a1, c1, policy.dt),
                    "h2_weak": check_weak(a2, c2),
                    "h2_strong": check_strong(a2, c2, policy.dt),
                    "composite_weak": check_weak(arc, cc),
                    "composite_strong": check_strong(arc, cc, policy.dt),
                }
                case = {
                    "case": case_index,
                    "input": sig.name,
                    "x0": list(x0),
                    "branch": b_idx,
                    "verdicts": {k: verdict_report(v)
                                 for k, v in verdicts.items()},
                    "implications": {},
                }
                for name, sem1, sem2, semc in implications:
                    p1 = verdicts[f"h1_{sem1}"].status
                    p2 = verdicts[f"h2_{sem2}"].status
                    conc = verdicts[f"composite_{semc}"].status
                    if p1 != SATISFIED or p2 != SATISFIED:
                        outcome = "vacuous"
                    elif conc == SATISFIED:
                        outcome = "holds"
                    elif conc == VIOLATED:
                        outcome = "counterexample"
                        report["counterexamples"].append(
                            {"case": case_index, "implication": name})
                    else:
                        outcome = "undecided"
                    case["implications"][name] = outcome
                report["cases"].append(case)
                case_index += 1
    report["ok"] = not report["counterexamples"]
    return report


def harness_feedback_theorem(h: HybridSystemDesc, c: AGContract,
                             policy: SimPolicy,
                             declared_strong: bool | None = None) -> dict:
    """Exercise the feedback containment theorem.

    Hypotheses: G_Y <= A_W and G_Y closed.  Premise: the open loop strongly
    satisfies the contract — taken from ``declared_strong`` when given,
    otherwise probed by strong-checking every enumerated open-loop branch
    under deterministic probe inputs (strong satisfaction quantifies over
    all solution pairs, so a single overlap resolution is not enough).
    Conclusion: every enumerated feedback arc keeps x inside G_X.  When the
    hypotheses or premise fail, the conclusion is still evaluated and any
    escaping arc is reported (that is the informative gap).
    """
    ok_incl, compat = feedback_compat(c, 0.0, h.Y)
    hyps = {"g_y_in_a_w": ok_incl, "g_y_closed": compat["g_y_closed"]}
    report: dict = {"kind": "feedback", "hypotheses": hyps,
                    "violations": [], "counterexamples": [],
                    "branch_count": 0, "truncated": False}

    if declared_strong is not None:
        premise = bool(declared_strong)
        report["premise_source"] = "declared"
    else:
        premise = True
        report["premise_source"] = "probed"
        probes = []
        for sig in probe_inputs(c.a_w, h.W, policy.max_time):
            for x0 in _representative_points(h.X0):
                try:
                    arcs, _ = enumerate_branches(h, sig, x0, policy)
                except SimulationError:
                    continue
                for b_idx, arc in enumerate(arcs):
                    v = check_strong(arc, c, policy.dt)
                    probes.append({"input": sig.name, "x0": list(x0),
                                   "branch": b_idx,
                                   "verdict": verdict_report(v)})
                    if v.status != SATISFIED:
                        premise = False
        report["probes"] = probes
    report["premise_strong"] = premise
    applicable = premise and all(hyps.values())
    report["applicable"] = applicable

    try:
        fb = feedback(h)
    except ValueError as exc:
        report["applicable"] = False
        report["reason"] = str(exc)
        report["ok"] = True
        return report

    for x0 in _representative_points(h.X0):
        try:
            branches, truncated = fb.enumerate(x0, policy)
        except SimulationError:
            continue
        report["truncated"] = report["truncated"] or truncated
        for b_idx, arc in enumerate(branches):
            report["branch_count"] += 1
            hit = None
            for t, j, w, x, y in arc.grid_points():
                if not contains(c.g_x, tuple(x)):
                    hit = {"x0": list(x0), "branch": b_idx, "t": float(t),
                           "j": int(j), "x": [float(v) for v in x]}
                    break
            if hit is not None:
                report["violations"].append(hit)
                if applicable:
                    report["counterexamples"].append(hit)
    report["ok"] = not report["counterexamples"]
    return report
