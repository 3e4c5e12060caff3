"""Hybrid arcs: sampled (w, x, y) signals over a hybrid time domain.

An arc stores one segment per domain interval.  A segment is a time grid
(including both interval endpoints; a single sample for zero-length
intervals) with the input, state and output vectors at each grid point.
Values between grid points are linearly interpolated; values at grid points
are exact.  Arrays are marked read-only after construction: arcs are
immutable and safe to share.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .hybrid_time import HybridTimeDomain, embed_map


class ArcKind(Enum):
    COMPLETE_BUDGET_TRUNCATED = "complete_budget_truncated"
    COMPACT_MAXIMAL_CANDIDATE = "compact_maximal_candidate"
    ZENO_SUSPECT = "zeno_suspect"


@dataclass(frozen=True, slots=True)
class ArcClassification:
    kind: ArcKind
    budget_used: tuple[float, int]


@dataclass(slots=True)
class ArcSegment:
    """Samples over one domain interval ``[t_j, t_{j+1}] x {j}``."""

    times: np.ndarray  # shape (k,), nondecreasing, k >= 1
    w: np.ndarray      # shape (k, m)
    x: np.ndarray      # shape (k, n)
    y: np.ndarray      # shape (k, p)

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        self.w = np.atleast_2d(np.asarray(self.w, dtype=float))
        self.x = np.atleast_2d(np.asarray(self.x, dtype=float))
        self.y = np.atleast_2d(np.asarray(self.y, dtype=float))
        k = self.times.shape[0]
        if k < 1:
            raise ValueError("segment needs at least one sample")
        for name, arr in (("w", self.w), ("x", self.x), ("y", self.y)):
            if arr.shape[0] != k:
                raise ValueError(f"{name} has {arr.shape[0]} rows, expected {k}")
        if k > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("segment times must be strictly increasing")
        for arr in (self.times, self.w, self.x, self.y):
            arr.flags.writeable = False


@dataclass(slots=True)
class HybridArc:
    domain: HybridTimeDomain
    segments: tuple[ArcSegment, ...]
    dims: tuple[int, int, int]  # (m, n, p)
    budget_exhausted: bool = False

    def __post_init__(self) -> None:
        if len(self.segments) != self.domain.num_intervals:
            raise ValueError(
                f"{len(self.segments)} segments for "
                f"{self.domain.num_intervals} domain intervals"
            )
        m, n, p = self.dims
        for j, seg in enumerate(self.segments):
            lo, hi = self.domain.interval(j)
            if seg.times[0] != lo or seg.times[-1] != hi:
                raise ValueError(
                    f"segment {j} spans [{seg.times[0]}, {seg.times[-1]}], "
                    f"domain interval is [{lo}, {hi}]"
                )
            if seg.w.shape[1] != m or seg.x.shape[1] != n or seg.y.shape[1] != p:
                raise ValueError(f"segment {j} disagrees with dims {self.dims}")

    # -- evaluation ---------------------------------------------------------

    def eval(self, t: float, j: int) -> tuple[tuple[float, ...], ...]:
        """``(w, x, y)`` at hybrid time ``(t, j)``; linear between grid
        points, exact at them."""
        if not self.domain.contains(t, j):
            raise ValueError(f"({t}, {j}) outside the arc domain")
        seg = self.segments[j]
        times = seg.times
        if times.shape[0] == 1:
            i = 0
            lam = 0.0
            lo = hi = 0
        else:
            i = int(np.searchsorted(times, t, side="left"))
            if i < times.shape[0] and times[i] == t:
                lo = hi = i
                lam = 0.0
            else:
                lo, hi = i - 1, i
                lam = (t - times[lo]) / (times[hi] - times[lo])

        def _at(arr: np.ndarray) -> tuple[float, ...]:
            if lo == hi:
                return tuple(arr[lo])
            return tuple(arr[lo] * (1.0 - lam) + arr[hi] * lam)

        return _at(seg.w), _at(seg.x), _at(seg.y)

    def grid_points(self):
        """Yield ``(t, j, w_row, x_row, y_row)`` in lexicographic (j, t)
        order."""
        for j, seg in enumerate(self.segments):
            for i in range(seg.times.shape[0]):
                yield seg.times[i], j, seg.w[i], seg.x[i], seg.y[i]


def arc_from_segments(
    segments, dims, budget_exhausted: bool = False, final_open: bool = False
) -> HybridArc:
    """Assemble an arc, deriving the domain from the segment endpoints."""
    segs = tuple(segments)
    breaks = [segs[0].times[0]] + [s.times[-1] for s in segs]
    domain = HybridTimeDomain(tuple(float(b) for b in breaks), final_open=final_open)
    return HybridArc(domain, segs, tuple(dims), budget_exhausted=budget_exhausted)


def sample_arc(domain: HybridTimeDomain, dt: float, w_fn, x_fn, y_fn,
               dims: tuple[int, int, int]) -> HybridArc:
    """Sample ``(t, j) -> vector`` functions on a regular grid of step ``dt``
    over each interval of ``domain`` (endpoints always included)."""
    segments = []
    for j in range(domain.num_intervals):
        lo, hi = domain.interval(j)
        if hi == lo:
            times = np.array([lo])
        else:
            steps = max(1, int(round((hi - lo) / dt)))
            times = lo + (hi - lo) * np.arange(steps + 1) / steps
            times[0], times[-1] = lo, hi
        w = np.array([w_fn(t, j) for t in times], dtype=float)
        x = np.array([x_fn(t, j) for t in times], dtype=float)
        y = np.array([y_fn(t, j) for t in times], dtype=float)
        segments.append(ArcSegment(times, w, x, y))
    return HybridArc(domain, tuple(segments), dims)


def reparametrize(arc: HybridArc, E: HybridTimeDomain) -> HybridArc:
    """Re-express ``arc`` on the refined domain ``E``.

    ``E`` must contain the arc's jump times as a sub-multiset (as produced by
    ``shared_domain``).  At jumps of ``E`` foreign to the arc the value is
    held unchanged across the jump; native samples are preserved exactly and
    cut points are linearly interpolated.
    """
    carriers = embed_map(arc.domain, E)
    segments: list[ArcSegment] = []
    for jp in range(E.num_intervals):
        lo, hi = E.interval(jp)
        native = arc.segments[carriers[jp]]
        times = native.times
        mask = (times > lo) & (times < hi)
        grid = [lo] + [float(t) for t in times[mask]] + ([hi] if hi > lo else [])
        if hi == lo:
            grid = [lo]
        rows_w, rows_x, rows_y = [], [], []
        for t in grid:
            w, x, y = _eval_segment(native, t)
            rows_w.append(w)
            rows_x.append(x)
            rows_y.append(y)
        segments.append(
            ArcSegment(np.array(grid), np.array(rows_w), np.array(rows_x),
                       np.array(rows_y))
        )
    return HybridArc(E, tuple(segments), arc.dims,
                     budget_exhausted=arc.budget_exhausted)


def _eval_segment(seg: ArcSegment, t: float):
    times = seg.times
    if times.shape[0] == 1:
        return seg.w[0], seg.x[0], seg.y[0]
    i = int(np.searchsorted(times, t, side="left"))
    if i < times.shape[0] and times[i] == t:
        return seg.w[i], seg.x[i], seg.y[i]
    lo, hi = i - 1, i
    lam = (t - times[lo]) / (times[hi] - times[lo])
    mix = lambda arr: arr[lo] * (1.0 - lam) + arr[hi] * lam
    return mix(seg.w), mix(seg.x), mix(seg.y)


def max_jump_variation(arc: HybridArc) -> float:
    """Largest Euclidean change of the output across any single jump
    (0 for flow-only arcs)."""
    worst = 0.0
    for j in range(arc.domain.num_intervals - 1):
        before = arc.segments[j].y[-1]
        after = arc.segments[j + 1].y[0]
        worst = max(worst, float(np.linalg.norm(after - before)))
    return worst


def classify(
    arc: HybridArc,
    budget: tuple[float, int],
    zeno_window: float = 1.0,
    zeno_threshold: int = 100,
) -> ArcClassification:
    """Budget-relative completeness label.

    ``zeno_suspect`` when ``zeno_threshold`` jumps land inside some window of
    ``zeno_window`` seconds; ``complete_budget_truncated`` when the simulation
    stopped on budget while still able to flow or jump;
    ``compact_maximal_candidate`` otherwise (a label, not a maximality proof).
    """
    jumps = arc.domain.jump_times
    if zeno_threshold >= 1 and len(jumps) >= zeno_threshold:
        for k in range(len(jumps) - zeno_threshold + 1):
            if jumps[k + zeno_threshold - 1] - jumps[k] <= zeno_window:
                return ArcClassification(ArcKind.ZENO_SUSPECT, budget)
    if arc.budget_exhausted:
        return ArcClassification(ArcKind.COMPLETE_BUDGET_TRUNCATED, budget)
    return ArcClassification(ArcKind.COMPACT_MAXIMAL_CANDIDATE, budget)


def to_csv(arc: HybridArc) -> str:
    """Trajectory CSV: header ``t,j,w_1..w_m,x_1..x_n,y_1..y_p``, one row per
    grid point, jump rows duplicated at equal ``t`` with incremented ``j``."""
    m, n, p = arc.dims
    header = (
        ["t", "j"]
        + [f"w_{i+1}" for i in range(m)]
        + [f"x_{i+1}" for i in range(n)]
        + [f"y_{i+1}" for i in range(p)]
    )
    lines = [",".join(header)]
    for t, j, w, x, y in arc.grid_points():
        cells = [repr(float(t)), str(j)]
        cells += [repr(float(v)) for v in w]
        cells += [repr(float(v)) for v in x]
        cells += [repr(float(v)) for v in y]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
