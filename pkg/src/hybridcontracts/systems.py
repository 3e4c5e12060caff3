"""Hybrid system descriptions and a fixed-step simulator.

A system couples flow dynamics ``xdot = F(x, w)`` on a flow set ``C`` with
resets ``x+ = G(x, w)`` on a jump set ``D`` (both subsets of (x, w)-space),
an output map ``y = h(x)``, and alphabet boxes ``W, X, Y`` plus an initial
set ``X0``.  ``F`` and ``G`` are finite selection lists standing in for
set-valued right-hand sides.

The integrator is classical fixed-step fourth-order Runge-Kutta with
bisection-based event localization (flow-set exit, jump-set entry).  It is
deliberately written on plain floats and tuples: the acceptance runtime
budgets put tens of thousands of steps inside a second, which rules out
per-step array allocation.

Nondeterminism where ``C`` and ``D`` overlap is resolved by the policy's
``overlap_rule``: ``jump_priority`` (default), ``flow_priority``, or
``enumerate``, which explores both choices (and every F/G selection)
depth-first up to a branch budget.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .arcs import ArcSegment, HybridArc, arc_from_segments
from .sets import BoxSet, closure, contains, subset

_KICK = 1e-12  # kickstart perturbation selecting nontrivial branches at
               # non-unique equilibria (e.g. cube-root flows at x = 0)


class ValidationError(ValueError):
    """A system description is internally inconsistent."""


class SimulationError(RuntimeError):
    """A simulation could not start or produced a non-finite value."""


@dataclass(frozen=True, slots=True)
class SimPolicy:
    dt: float = 1e-3
    event_tol: float = 1e-9
    overlap_rule: str = "jump_priority"
    max_time: float = 10.0
    max_jumps: int = 50
    max_branches: int = 16
    align_coincident_jumps: bool = False
    kickstart: bool = False

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.event_tol <= 0:
            raise ValueError("event_tol must be positive")
        if self.overlap_rule not in ("jump_priority", "flow_priority", "enumerate"):
            raise ValueError(f"unknown overlap_rule {self.overlap_rule!r}")
        if self.max_time <= 0:
            raise ValueError("max_time must be positive")
        if self.max_jumps < 0:
            raise ValueError("max_jumps must be nonnegative")
        if self.max_branches < 1:
            raise ValueError("max_branches must be at least 1")


@dataclass(frozen=True, slots=True)
class InputSignal:
    """Exogenous input ``w(t, j)`` with its declared range (a subset of W)."""

    evaluator: object  # (t, j) -> w tuple
    range: BoxSet
    name: str = ""


def constant_input(values, range: BoxSet | None = None) -> InputSignal:
    vals = tuple(float(v) for v in values)
    if range is None:
        from .sets import point

        range = point(*vals)
    return InputSignal(lambda t, j: vals, range, name="const")


@dataclass(slots=True)
class HybridSystemDesc:
    dims: tuple[int, int, int]  # (m, n, p)
    W: BoxSet
    X: BoxSet
    Y: BoxSet
    C: BoxSet  # over (x, w)-space: n + m dims
    D: BoxSet
    F: tuple  # flow selections, each (x, w) -> xdot
    G: tuple  # jump selections, each (x, w) -> xplus
    h: object  # x -> y
    X0: BoxSet
    name: str = ""
    assumption1: bool = False  # declared, not machine-checked
    lipschitz: bool = False    # declared: F and h locally Lipschitz
    # Optional affine forms enabling exact set-valued arithmetic downstream.
    # Each is a tuple over selections (f/g) or a single row list (h); a row
    # is (const, {var_index: coef}) with variables indexed x first, then w.
    f_affine: tuple | None = None
    g_affine: tuple | None = None
    h_affine: tuple | None = None  # rows over x indices only


def _representative_points(S: BoxSet) -> list[tuple[float, ...]]:
    """Finite probe points per piece: finite bound values plus a midpoint
    (clamped one unit inward when a face is unbounded)."""
    pts: list[tuple[float, ...]] = []
    for piece in S.pieces:
        if piece.is_empty:
            continue
        axes = []
        for f in piece.faces:
            cands = []
            if not math.isinf(f.lo):
                cands.append(f.lo)
            if not math.isinf(f.hi) and f.hi != f.lo:
                cands.append(f.hi)
            if f.bounded:
                mid = 0.5 * (f.lo + f.hi)
                if mid not in cands:
                    cands.append(mid)
            elif not math.isinf(f.lo):
                cands.append(f.lo + 1.0)
            elif not math.isinf(f.hi):
                cands.append(f.hi - 1.0)
            else:
                cands.append(0.0)
            axes.append(cands)
        pts.extend(itertools.product(*axes))
    return pts


def validate(desc: HybridSystemDesc) -> HybridSystemDesc:
    """Check dimensional consistency and sampled admissibility of X0.

    Rejects empty initial sets and initial sets that miss the closure of the
    flow set and the jump set at every probe point; also probes that the
    output map lands in Y on X0.
    """
    m, n, p = desc.dims
    if m < 1 or n < 1 or p < 1:
        raise ValidationError(f"dims must be positive, got {desc.dims}")
    checks = [
        ("W", desc.W, m), ("X", desc.X, n), ("Y", desc.Y, p),
        ("C", desc.C, n + m), ("D", desc.D, n + m), ("X0", desc.X0, n),
    ]
    for label, S, want in checks:
        if S.dims != want:
            raise ValidationError(f"{label} has {S.dims} dims, expected {want}")
    if desc.X0.is_empty:
        raise ValidationError("X0 is empty")
    if not desc.F:
        raise ValidationError("at least one flow selection is required")
    if not desc.G:
        raise ValidationError("at least one jump selection is required")
    if not subset(desc.X0, desc.X):
        raise ValidationError("X0 is not contained in X")
    c_closed = closure(desc.C)
    x_probes = _representative_points(desc.X0)
    w_probes = _representative_points(desc.W) or [(0.0,) * m]
    admissible = any(
        contains(c_closed, x + w) or contains(desc.D, x + w)
        for x in x_probes
        for w in w_probes
    )
    if not admissible:
        raise ValidationError(
            "initial set lies outside closure(C) u D at every probe point"
        )
    for x in x_probes:
        y = tuple(desc.h(x))
        if len(y) != p:
            raise ValidationError(f"h returned {len(y)} dims, expected {p}")
        if not contains(desc.Y, y):
            raise ValidationError(f"h({x}) = {y} falls outside Y")
    return desc


# ---------------------------------------------------------------------------
# Plants: the simulator's view of a system.  Open-loop and feedback closures
# reduce to this interface (cascades provide their own in composition), so a
# single engine serves all of them.


class _OpenLoopPlant:
    __slots__ = ("desc", "signal", "_c", "_cbar", "_d")

    def __init__(self, desc: HybridSystemDesc, signal: InputSignal):
        self.desc = desc
        self.signal = signal
        self._c = desc.C
        self._cbar = closure(desc.C)
        self._d = desc.D

    @property
    def dims(self):
        return self.desc.dims

    def w_at(self, t, j, x):
        return tuple(self.signal.evaluator(t, j))

    def deriv(self, t, j, x, sel):
        return self.desc.F[sel](x, self.w_at(t, j, x))

    def n_flow_selections(self):
        return len(self.desc.F)

    def in_C(self, x, w):
        return contains(self._c, x + w)

    def in_C_closure(self, x, w, tol):
        return contains(self._cbar, x + w, tol)

    def in_D(self, x, w):
        return contains(self._d, x + w)

    def jump_targets(self, t, j, x, w):
        return [tuple(float(v) for v in g(x, w)) for g in self.desc.G]

    def output(self, t, j, x, w):
        return tuple(self.desc.h(x))


class _FeedbackPlant(_OpenLoopPlant):
    """Closed loop w = h(x); arcs record w = y = h(x) at every grid point,
    so they replay as arcs of the base system."""

    def __init__(self, desc: HybridSystemDesc):
        super().__init__(desc, InputSignal(None, desc.W, name="feedback"))

    def w_at(self, t, j, x):
        return tuple(self.desc.h(x))

    def deriv(self, t, j, x, sel):
        return self.desc.F[sel](x, tuple(self.desc.h(x)))

    def output(self, t, j, x, w):
        return w


# ---------------------------------------------------------------------------
# Engine


def _rk4(plant, t, j, x, h, sel):
    d = plant.deriv
    k1 = d(t, j, x, sel)
    th = t + 0.5 * h
    k2 = d(th, j, tuple(xi + 0.5 * h * ki for xi, ki in zip(x, k1)), sel)
    k3 = d(th, j, tuple(xi + 0.5 * h * ki for xi, ki in zip(x, k2)), sel)
    k4 = d(t + h, j, tuple(xi + h * ki for xi, ki in zip(x, k3)), sel)
    s = h / 6.0
    return tuple(
        xi + s * (a + 2.0 * b + 2.0 * c + e)
        for xi, a, b, c, e in zip(x, k1, k2, k3, k4)
    )


def _check_finite(x):
    for v in x:
        if not math.isfinite(v):
            raise SimulationError(f"evaluator produced non-finite state {x}")
    return x


def _state_dist(a, b):
    return math.sqrt(sum((u - v) ** 2 for u, v in zip(a, b)))


def _bisect_event(plant, t0, j, x0, h_full, sel, inside, policy):
    """Localize the boundary of ``inside`` along one integration step.

    ``inside(x, w)`` holds at step length 0 and fails at ``h_full``.  Returns
    ``(h_in, x_in, h_out, x_out)`` bracketing the event with the two states
    within ``event_tol`` of each other (or as close as float time allows).
    Partial steps always restart from ``(t0, x0)`` so the located state lies
    on the true RK4 trajectory of the step.
    """
    lo, x_lo = 0.0, x0
    hi = h_full
    x_hi = _check_finite(_rk4(plant, t0, j, x0, h_full, sel))
    for _ in range(200):
        if _state_dist(x_lo, x_hi) <= policy.event_tol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        x_mid = _check_finite(_rk4(plant, t0, j, x0, mid, sel))
        if inside(x_mid, plant.w_at(t0 + mid, j, x_mid)):
            lo, x_lo = mid, x_mid
        else:
            hi, x_hi = mid, x_mid
    return lo, x_lo, hi, x_hi


# Flow-segment stop reasons
_JUMP = "jump"          # jump fires at the last recorded point
_DEAD = "dead"          # neither flow nor jump possible; arc ends
_TIME = "time"          # max_time reached while still able to flow
_D_ENTRY = "d_entry"    # enumerate only: D entered mid-flow, branch point


def _flow_interval(plant, t0, j, x0, policy, rule, sel):
    """Integrate within interval ``j`` from ``(t0, x0)`` until an event.

    Returns ``(times, states, reason)`` with the start point included.  The
    grid is anchored at ``t0`` (``t = t0 + k*dt``), so repeated partial steps
    do not accumulate rounding.  Under ``rule='enumerate'`` a ``_D_ENTRY``
    event is reported each time the flow enters the jump set from outside;
    restarting from the returned entry point resumes past it, because the
    entry detector only fires on an outside-to-inside transition.
    """
    times = [t0]
    states = [x0]
    t, x = t0, x0
    w = plant.w_at(t, j, x)
    in_c = plant.in_C(x, w)
    in_d = plant.in_D(x, w)
    if in_d and (rule == "jump_priority" or not in_c):
        return times, states, _JUMP
    if not in_c:
        return times, states, _DEAD
    if t >= policy.max_time:
        return times, states, _TIME
    was_in_d = in_d
    k = 0
    while True:
        t_next = t0 + (k + 1) * policy.dt
        if t_next >= policy.max_time:
            t_next = policy.max_time
        h = t_next - t
        if h <= 0:
            return times, states, _TIME
        x_next = _check_finite(_rk4(plant, t, j, x, h, sel))
        w_next = plant.w_at(t_next, j, x_next)
        if not plant.in_C(x_next, w_next):
            # flow-set exit: keep the last inside state
            h_in, x_in, _, _ = _bisect_event(
                plant, t, j, x, h, sel,
                lambda xs, ws: plant.in_C(xs, ws), policy,
            )
            if h_in > 0.0:
                times.append(t + h_in)
                states.append(x_in)
            w_in = plant.w_at(times[-1], j, states[-1])
            if plant.in_D(states[-1], w_in):
                return times, states, _JUMP
            return times, states, _DEAD
        in_d_next = plant.in_D(x_next, w_next)
        if in_d_next and not was_in_d and rule != "flow_priority":
            # jump-set entry: keep the first inside-D state
            _, _, h_entry, x_entry = _bisect_event(
                plant, t, j, x, h, sel,
                lambda xs, ws: not plant.in_D(xs, ws), policy,
            )
            times.append(t + h_entry)
            states.append(x_entry)
            if rule == "jump_priority":
                return times, states, _JUMP
            return times, states, _D_ENTRY
        times.append(t_next)
        states.append(x_next)
        t, x = t_next, x_next
        k += 1
        was_in_d = in_d_next
        if t >= policy.max_time:
            return times, states, _TIME


def _finish_segment(plant, j, times, states):
    w_rows = [plant.w_at(t, j, x) for t, x in zip(times, states)]
    y_rows = [plant.output(t, j, x, w) for t, x, w in zip(times, states, w_rows)]
    return ArcSegment(
        np.array(times), np.array(w_rows), np.array(states), np.array(y_rows)
    )


def _run_single(plant, x0, policy, rule, flow_sel=0, jump_sel=0):
    """One deterministic branch (fixed overlap rule and selections)."""
    t, j = 0.0, 0
    x = _check_finite(tuple(float(v) for v in x0))
    w = plant.w_at(t, j, x)
    if not (plant.in_C_closure(x, w, policy.event_tol) or plant.in_D(x, w)):
        raise SimulationError(
            f"initial pair (x, w) = ({x}, {w}) outside closure(C) u D"
        )
    segments = []
    budget = False
    while True:
        times, states, reason = _flow_interval(
            plant, t, j, x, policy, rule, flow_sel
        )
        segments.append(_finish_segment(plant, j, times, states))
        t, x = times[-1], states[-1]
        if reason == _JUMP:
            if j >= policy.max_jumps:
                budget = True
                break
            w = plant.w_at(t, j, x)
            targets = plant.jump_targets(t, j, x, w)
            x = _check_finite(targets[min(jump_sel, len(targets) - 1)])
            j += 1
            continue
        if reason == _TIME:
            budget = True
        break
    return arc_from_segments(
        segments, plant.dims, budget_exhausted=budget, final_open=budget
    )


def _start_state(x0, policy):
    x = tuple(float(v) for v in x0)
    if policy.kickstart:
        x = tuple(v + _KICK for v in x)
    return x


def _single_rule(policy):
    # `enumerate` has no meaning for a single trajectory; fall back to the
    # default priority so `simulate` stays total in every policy.
    rule = policy.overlap_rule
    return "jump_priority" if rule == "enumerate" else rule


def simulate(
    desc: HybridSystemDesc,
    input: InputSignal,
    x0,
    policy: SimPolicy,
) -> HybridArc:
    """Simulate one arc of the open-loop system from ``x0 in X0``."""
    if not contains(desc.X0, tuple(float(v) for v in x0)):
        raise SimulationError(f"x0 = {tuple(x0)} outside X0")
    if not subset(input.range, desc.W):
        raise SimulationError("input range is not contained in W")
    plant = _OpenLoopPlant(desc, input)
    return _run_single(plant, _start_state(x0, policy), policy, _single_rule(policy))


def simulate_feedback(desc: HybridSystemDesc, x0, policy: SimPolicy) -> HybridArc:
    """Simulate the feedback closure (w = h(x)) from ``x0 in X0``."""
    if not contains(desc.X0, tuple(float(v) for v in x0)):
        raise SimulationError(f"x0 = {tuple(x0)} outside X0")
    plant = _FeedbackPlant(desc)
    return _run_single(plant, _start_state(x0, policy), policy, _single_rule(policy))


# ---------------------------------------------------------------------------
# Branch enumeration


def _signature(arc: HybridArc):
    """Collapsed trajectory trace used to deduplicate branches: rounded
    (t, x) pairs with consecutive duplicates removed.  Stutter jumps and
    re-parametrizations of the same trace collide on purpose."""
    out = []
    for seg in arc.segments:
        for i in range(seg.times.shape[0]):
            item = (round(float(seg.times[i]), 12),
                    tuple(round(float(v), 12) for v in seg.x[i]))
            if not out or out[-1] != item:
                out.append(item)
    return tuple(out)


class _Enumerator:
    """Depth-first exploration of the branch tree.

    Branch points are (a) interval starts inside ``C n D`` (every flow
    selection, then every jump selection, in declaration order) and (b)
    jump-set entries during flow (continue flowing first, then each jump).
    Flow continuation past an entry runs iteratively, so chattering in and
    out of D cannot blow the recursion; recursion depth is bounded by the
    jump budget.
    """

    def __init__(self, plant, policy):
        self.plant = plant
        self.policy = policy
        self.arcs: list[HybridArc] = []
        self.seen = set()
        self.truncated = False

    def _full(self):
        if len(self.arcs) >= self.policy.max_branches:
            self.truncated = True
            return True
        return False

    def _emit(self, segments, budget):
        arc = arc_from_segments(
            segments, self.plant.dims,
            budget_exhausted=budget, final_open=budget,
        )
        sig = _signature(arc)
        if sig in self.seen:
            return
        if self._full():
            return
        self.seen.add(sig)
        self.arcs.append(arc)

    def start_interval(self, t, j, x, done):
        if self._full():
            return
        plant = self.plant
        w = plant.w_at(t, j, x)
        in_c = plant.in_C(x, w)
        in_d = plant.in_D(x, w)
        if in_c:
            for sel in range(plant.n_flow_selections()):
                self.flow_branch(t, j, x, done, sel)
        if in_d:
            seg = _finish_segment(plant, j, [t], [x])
            self.jump_branches(t, j, x, done + [seg],
                               can_flow=in_c, forced=not in_c)
        elif not in_c:
            seg = _finish_segment(plant, j, [t], [x])
            self._emit(done + [seg], budget=False)

    def flow_branch(self, t, j, x, done, sel):
        if self._full():
            return
        plant, policy = self.plant, self.policy
        part_t, part_x = [t], [x]
        entry_marks = []  # prefix lengths at deferred jump-set entries
        cur_t, cur_x = t, x
        while True:
            times, states, reason = _flow_interval(
                plant, cur_t, j, cur_x, policy, "enumerate", sel
            )
            part_t.extend(times[1:])
            part_x.extend(states[1:])
            if reason == _D_ENTRY:
                entry_marks.append(len(part_t))
                cur_t, cur_x = part_t[-1], part_x[-1]
                continue
            break
        seg = _finish_segment(plant, j, part_t, part_x)
        if reason == _JUMP:
            self.jump_branches(part_t[-1], j, part_x[-1], done + [seg],
                               can_flow=False, forced=True)
        else:
            self._emit(done + [seg], budget=(reason == _TIME))
        for mark in entry_marks:
            if self._full():
                return
            seg_cut = _finish_segment(plant, j, part_t[:mark], part_x[:mark])
            self.jump_branches(part_t[mark - 1], j, part_x[mark - 1],
                               done + [seg_cut], can_flow=True, forced=False)

    def jump_branches(self, t, j, x, done, can_flow, forced):
        if self._full():
            return
        plant, policy = self.plant, self.policy
        if j >= policy.max_jumps:
            if forced:
                self._emit(done, budget=True)
            return
        w = plant.w_at(t, j, x)
        taken = []
        for tgt in plant.jump_targets(t, j, x, w):
            tgt = _check_finite(tgt)
            if tgt in taken:
                continue
            if tgt == x and can_flow:
                continue  # stutter jump: flowing covers this trace
            taken.append(tgt)
            self.start_interval(t, j + 1, tgt, done)
        if not taken and forced:
            self._emit(done, budget=False)


def _enumerate_plant(plant, x0, policy):
    enum = _Enumerator(plant, policy)
    seeds = [tuple(float(v) for v in x0)]
    if policy.kickstart:
        seeds.append(tuple(v + _KICK for v in seeds[0]))
    admissible = 0
    for seed in seeds:
        w = plant.w_at(0.0, 0, seed)
        if not (plant.in_C_closure(seed, w, policy.event_tol)
                or plant.in_D(seed, w)):
            continue
        admissible += 1
        enum.start_interval(0.0, 0, seed, [])
    if admissible == 0:
        raise SimulationError("no admissible start state")
    return enum.arcs, enum.truncated


def enumerate_branches(
    desc: HybridSystemDesc,
    input: InputSignal,
    x0,
    policy: SimPolicy,
) -> tuple[list[HybridArc], bool]:
    """All distinct arcs reachable from ``x0`` under every overlap choice and
    every F/G selection, deduplicated by trajectory trace and capped at
    ``policy.max_branches`` (the second return value reports truncation)."""
    if not contains(desc.X0, tuple(float(v) for v in x0)):
        raise SimulationError(f"x0 = {tuple(x0)} outside X0")
    if not subset(input.range, desc.W):
        raise SimulationError("input range is not contained in W")
    return _enumerate_plant(_OpenLoopPlant(desc, input), x0, policy)


def enumerate_feedback_branches(
    desc: HybridSystemDesc,
    x0,
    policy: SimPolicy,
) -> tuple[list[HybridArc], bool]:
    """Branch enumeration for the feedback closure (w = h(x))."""
    if not contains(desc.X0, tuple(float(v) for v in x0)):
        raise SimulationError(f"x0 = {tuple(x0)} outside X0")
    return _enumerate_plant(_FeedbackPlant(desc), x0, policy)


# ---------------------------------------------------------------------------
# Replay checking: a simulated arc must re-verify against the raw data


def replay_check(arc: HybridArc, desc: HybridSystemDesc,
                 policy: SimPolicy | None = None) -> dict:
    """Re-verify an arc against the system data it claims to solve.

    Checks, per grid point: (x, w) in closure(C) within ``event_tol`` and
    y in Y; per consecutive sample pair: the finite-difference derivative
    matches some flow selection (evaluated at the midpoint state) within
    ``10 * dt``; per jump: (x, w) in D within tolerance and the landing
    state equal to some jump selection exactly.  Returns a report listing
    every offending point; it does not raise.
    """
    if policy is None:
        policy = SimPolicy()
    tol = policy.event_tol
    deriv_tol = 10.0 * policy.dt
    cbar = closure(desc.C)
    violations = []
    checked = 0

    def flag(t, j, kind, detail):
        violations.append({"t": float(t), "j": int(j),
                           "kind": kind, "detail": detail})

    first = arc.segments[0]
    x00 = tuple(first.x[0])
    w00 = tuple(first.w[0])
    if not (contains(cbar, x00 + w00, tol) or contains(desc.D, x00 + w00, tol)):
        flag(first.times[0], 0, "initial", "start pair outside closure(C) u D")

    for j, seg in enumerate(arc.segments):
        npts = seg.times.shape[0]
        for i in range(npts):
            checked += 1
            t = float(seg.times[i])
            x = tuple(seg.x[i])
            w = tuple(seg.w[i])
            y = tuple(seg.y[i])
            if not contains(cbar, x + w, tol):
                flag(t, j, "flow_set", f"(x, w) = {x + w} outside closure(C)")
            if not contains(desc.Y, y, tol):
                flag(t, j, "output_range", f"y = {y} outside Y")
        for i in range(npts - 1):
            dt_i = float(seg.times[i + 1] - seg.times[i])
            if dt_i <= 0.0:
                continue
            xi = seg.x[i]
            xn = seg.x[i + 1]
            num = tuple((float(b) - float(a)) / dt_i for a, b in zip(xi, xn))
            xm = tuple(0.5 * (float(a) + float(b)) for a, b in zip(xi, xn))
            wm = tuple(0.5 * (float(a) + float(b))
                       for a, b in zip(seg.w[i], seg.w[i + 1]))
            err = min(
                max(abs(nv - float(fv)) for nv, fv in zip(num, f(xm, wm)))
                for f in desc.F
            )
            if err > deriv_tol:
                flag(seg.times[i], j, "flow_map",
                     f"derivative off by {err:.3e} (allowed {deriv_tol:.3e})")
    for j in range(len(arc.segments) - 1):
        seg = arc.segments[j]
        x_end = tuple(seg.x[-1])
        w_end = tuple(seg.w[-1])
        t_end = float(seg.times[-1])
        if not contains(desc.D, x_end + w_end, tol):
            flag(t_end, j, "jump_set", f"(x, w) = {x_end + w_end} outside D")
        landing = tuple(arc.segments[j + 1].x[0])
        if not any(tuple(float(v) for v in g(x_end, w_end)) == landing
                   for g in desc.G):
            flag(t_end, j, "jump_map",
                 f"landing {landing} matches no jump selection")
    return {"ok": not violations, "checked_points": checked,
            "violations": violations}
