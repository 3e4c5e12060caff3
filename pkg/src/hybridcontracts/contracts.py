"""Assume-guarantee contracts and their satisfaction monitors.

A contract constrains a system's input/state/output alphabets by three box
sets: assumptions ``A_W`` on the input and guarantees ``G_X``, ``G_Y`` on
state and output.  ``check_weak`` decides whether an arc honours the
guarantees for as long as the input honoured the assumptions; ``check_strong``
additionally demands the output guarantee at the start and for a positive
margin past the point where the assumptions broke down.

Monitors are three-valued.  Membership failures that occur only within the
face tolerance of a set boundary yield ``unknown`` rather than ``violated``:
soundness over decisiveness near boundaries.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

from .arcs import HybridArc
from .sets import BoxSet, Membership, expand, intersect, membership, subset

SATISFIED = "satisfied"
VIOLATED = "violated"
UNKNOWN = "unknown"


class LiftStrictnessWarning(UserWarning):
    """The weak-to-strong lift was applied at eps == beta.

    The lift's margin argument needs eps strictly above the jump variation
    bound beta; equality is accepted (the worked examples use it) but the
    resulting strong contract sits exactly on the boundary of validity.
    """


@dataclass(frozen=True, slots=True)
class AGContract:
    a_w: BoxSet   # assumptions on the input alphabet
    g_x: BoxSet   # guarantees on the state alphabet
    g_y: BoxSet   # guarantees on the output alphabet
    name: str = ""

    @property
    def g_y_closed(self) -> bool:
        return all(
            not f.lo_strict and not f.hi_strict
            for piece in self.g_y.pieces
            for f in piece.faces
        )


def check_alphabets(c: AGContract, desc) -> None:
    """Raise if the contract's sets do not live inside the system alphabets."""
    if (c.a_w.dims, c.g_x.dims, c.g_y.dims) != tuple(desc.dims):
        raise ValueError(
            f"contract dims ({c.a_w.dims}, {c.g_x.dims}, {c.g_y.dims}) "
            f"do not match system dims {tuple(desc.dims)}"
        )
    for label, small, big in (("A_W", c.a_w, desc.W),
                              ("G_X", c.g_x, desc.X),
                              ("G_Y", c.g_y, desc.Y)):
        if not subset(small, big):
            raise ValueError(f"{label} is not contained in the system alphabet")


@dataclass(frozen=True, slots=True)
class Verdict:
    status: str
    first_violation: tuple | None = None    # (t, j, which)
    assumption_horizon: tuple | None = None  # (t, j)
    delta_witness: float | None = None


def verdict_report(v: Verdict) -> dict:
    """Serializable form: {status, first_violation:{t,j,which}, horizon:{t,j},
    delta_witness}."""
    fv = None
    if v.first_violation is not None:
        t, j, which = v.first_violation
        fv = {"t": float(t), "j": int(j), "which": which}
    hz = None
    if v.assumption_horizon is not None:
        t, j = v.assumption_horizon
        hz = {"t": float(t), "j": int(j)}
    dw = None if v.delta_witness is None else float(v.delta_witness)
    return {"status": v.status, "first_violation": fv,
            "horizon": hz, "delta_witness": dw}


def _check_arc_dims(arc: HybridArc, c: AGContract) -> None:
    m, n, p = arc.dims
    if c.a_w.dims != m or c.g_x.dims != n or c.g_y.dims != p:
        raise ValueError(
            f"contract dims ({c.a_w.dims}, {c.g_x.dims}, {c.g_y.dims}) "
            f"do not match arc dims {arc.dims}"
        )


def _prefix_scan(arc: HybridArc, c: AGContract):
    """Walk grid points in domain order while the assumption holds.

    Returns ``(horizon, horizon_index, first_violation, border_seen, points)``
    where ``points`` is the materialized grid walk, ``horizon_index`` the
    index of the last assumption-satisfying prefix point (-1 when even the
    start fails), and ``first_violation``/``border_seen`` summarize the
    guarantee checks over that prefix (state checked before output at each
    point, earliest offence wins).
    """
    points = list(arc.grid_points())
    horizon_index = -1
    for i, (t, j, w, x, y) in enumerate(points):
        if membership(c.a_w, tuple(w)) is Membership.OUT:
            break
        horizon_index = i
    first_violation = None
    border_seen = None
    for i in range(horizon_index + 1):
        t, j, w, x, y = points[i]
        for which, value, box in (("state", tuple(x), c.g_x),
                                  ("output", tuple(y), c.g_y)):
            mem = membership(box, value)
            if mem is Membership.OUT:
                first_violation = (float(t), int(j), which)
                break
            if mem is Membership.BORDER and border_seen is None:
                border_seen = (float(t), int(j), which)
        if first_violation is not None:
            break
    horizon = None
    if horizon_index >= 0:
        t, j, _, _, _ = points[horizon_index]
        horizon = (float(t), int(j))
    return horizon, horizon_index, first_violation, border_seen, points


def check_weak(arc: HybridArc, c: AGContract) -> Verdict:
    """Decide weak satisfaction of the contract on one arc.

    The assumption horizon is the largest grid point (T, J), in domain
    order, such that w stayed in ``A_W`` at every point up to it; the
    guarantees must then hold at every grid point of that prefix.  An empty
    horizon (assumption broken at the start) satisfies vacuously.
    """
    _check_arc_dims(arc, c)
    horizon, _, violation, border, _ = _prefix_scan(arc, c)
    if violation is not None:
        return Verdict(VIOLATED, violation, horizon)
    if border is not None:
        return Verdict(UNKNOWN, None, horizon)
    return Verdict(SATISFIED, None, horizon)


def _default_delta_min(arc: HybridArc) -> float:
    gap = 0.0
    for seg in arc.segments:
        ts = seg.times
        for i in range(ts.shape[0] - 1):
            gap = max(gap, float(ts[i + 1] - ts[i]))
    return gap if gap > 0.0 else 1e-9


def check_strong(arc: HybridArc, c: AGContract,
                 delta_min: float | None = None) -> Verdict:
    """Decide strong satisfaction of the contract on one arc.

    Beyond the weak conditions this requires the output guarantee at the
    very first sample regardless of the assumptions, and a continuation
    after the assumption horizon (T, J): across the jump, if the domain
    continues at (T, J+1); otherwise for some delta >= delta_min of extra
    flow time, certified by scanning the grid points of interval J past T.
    ``delta_min`` defaults to the arc's own grid step.

    The reported ``delta_witness`` is the largest delta verified on the
    grid; it is present only when the verdict draws on a flow continuation.
    """
    _check_arc_dims(arc, c)
    if delta_min is not None and delta_min <= 0:
        raise ValueError("delta_min must be positive")
    horizon, hidx, violation, border, points = _prefix_scan(arc, c)

    first = arc.segments[0]
    y0 = tuple(first.y[0])
    mem0 = membership(c.g_y, y0)
    if mem0 is Membership.OUT:
        return Verdict(VIOLATED, (float(first.times[0]), 0, "initial_output"),
                       horizon)
    if violation is not None:
        return Verdict(VIOLATED, violation, horizon)

    if horizon is None:
        if border is not None or mem0 is Membership.BORDER:
            return Verdict(UNKNOWN, None, None)
        return Verdict(SATISFIED, None, None)

    t_h, j_h = horizon
    if hidx == len(points) - 1:
        # assumption held through the last sample; nothing follows in the
        # domain, so the continuation requirement is vacuous
        status = UNKNOWN if (border is not None or mem0 is Membership.BORDER) \
            else SATISFIED
        return Verdict(status, None, horizon, None)

    nxt_t, nxt_j, _, _, nxt_y = points[hidx + 1]
    if nxt_j != j_h:
        # domain continues by a jump at the horizon: check the landing output
        mem = membership(c.g_y, tuple(nxt_y))
        if mem is Membership.OUT:
            return Verdict(VIOLATED, (float(nxt_t), int(nxt_j), "output"),
                           horizon)
        if mem is Membership.BORDER or border is not None \
                or mem0 is Membership.BORDER:
            return Verdict(UNKNOWN, None, horizon)
        return Verdict(SATISFIED, None, horizon)

    # flow continuation: scan contiguous in-guarantee outputs past T in
    # interval J
    if delta_min is None:
        delta_min = _default_delta_min(arc)
    delta = 0.0
    scan_border = False
    i = hidx + 1
    while i < len(points):
        t, j, _, _, y = points[i]
        if j != j_h:
            break
        mem = membership(c.g_y, tuple(y))
        if mem is Membership.OUT:
            break
        if mem is Membership.BORDER:
            scan_border = True
            break
        delta = float(t) - t_h
        i += 1
    if delta <= 0.0:
        if scan_border:
            return Verdict(UNKNOWN, None, horizon)
        return Verdict(VIOLATED, (t_h, j_h, "output"), horizon)
    if delta < delta_min:
        return Verdict(UNKNOWN, None, horizon, None)
    if border is not None or mem0 is Membership.BORDER:
        return Verdict(UNKNOWN, None, horizon, None)
    return Verdict(SATISFIED, None, horizon, delta)


def lift_weak_to_strong(c: AGContract, beta: float, eps: float,
                        Y: BoxSet) -> AGContract:
    """Widen the output guarantee so weak satisfaction upgrades to strong.

    If outputs vary by at most ``beta`` across any jump, every system weakly
    satisfying ``(A_W, G_X, G_Y)`` strongly satisfies
    ``(A_W, G_X, expand(G_Y, eps) n Y)`` for ``eps >= beta``; equality is
    accepted with a :class:`LiftStrictnessWarning`.
    """
    if beta < 0 or eps < 0:
        raise ValueError("beta and eps must be nonnegative")
    if eps < beta:
        raise ValueError(f"eps = {eps} must be at least beta = {beta}")
    if eps == beta:
        warnings.warn(
            f"lift applied at eps == beta == {beta}; the margin argument "
            "needs strict inequality", LiftStrictnessWarning, stacklevel=2,
        )
    g_y = intersect(expand(c.g_y, eps), Y)
    suffix = "_lifted" if c.name else ""
    return AGContract(c.a_w, c.g_x, g_y, name=c.name + suffix)


def feedback_compat(c: AGContract, eps: float, Y: BoxSet) -> tuple[bool, dict]:
    """Check the loop-closure inclusion expand(G_Y, eps) n Y <= A_W.

    Returns the inclusion flag plus a report that also states whether G_Y
    is closed (both are hypotheses of the feedback containment results).
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    widened = intersect(expand(c.g_y, eps), Y)
    ok = subset(widened, c.a_w)
    report = {
        "inclusion": ok,
        "g_y_closed": c.g_y_closed,
        "eps": float(eps),
    }
    return ok, report
