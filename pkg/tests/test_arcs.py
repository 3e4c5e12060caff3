"""Hybrid arcs: sampling, evaluation, reparametrization, CSV."""

import math

import numpy as np
import pytest

from hybridcontracts.arcs import (
    ArcKind,
    ArcSegment,
    HybridArc,
    arc_from_segments,
    classify,
    max_jump_variation,
    reparametrize,
    sample_arc,
    to_csv,
)
from hybridcontracts.hybrid_time import HybridTimeDomain, shared_domain


def _ramp_arc(dt=0.25):
    """w = 0, x = t before the jump at 1 and t - 1 after, y = x."""
    domain = HybridTimeDomain((0.0, 1.0, 2.0))
    x = lambda t, j: [t if j == 0 else t - 1.0]
    return sample_arc(domain, dt, lambda t, j: [0.0], x, x, (1, 1, 1))


def test_segment_validation():
    with pytest.raises(ValueError):
        ArcSegment(np.array([0.0, 1.0]), np.zeros((1, 1)), np.zeros((2, 1)),
                   np.zeros((2, 1)))
    with pytest.raises(ValueError):
        ArcSegment(np.array([0.0, 0.0]), np.zeros((2, 1)), np.zeros((2, 1)),
                   np.zeros((2, 1)))


def test_segments_are_read_only():
    arc = _ramp_arc()
    with pytest.raises(ValueError):
        arc.segments[0].x[0, 0] = 5.0


def test_arc_validates_against_domain():
    seg = ArcSegment(np.array([0.0, 1.0]), np.zeros((2, 1)), np.zeros((2, 1)),
                     np.zeros((2, 1)))
    with pytest.raises(ValueError):
        HybridArc(HybridTimeDomain((0.0, 2.0)), (seg,), (1, 1, 1))
    with pytest.raises(ValueError):
        HybridArc(HybridTimeDomain((0.0, 1.0, 2.0)), (seg,), (1, 1, 1))


def test_eval_exact_at_grid_points():
    arc = _ramp_arc()
    w, x, y = arc.eval(0.5, 0)
    assert x == (0.5,)
    assert y == (0.5,)
    assert w == (0.0,)


def test_eval_interpolates_between_grid_points():
    arc = _ramp_arc(dt=0.5)
    _, x, _ = arc.eval(0.3, 0)
    assert x == pytest.approx((0.3,))


def test_eval_two_sided_at_jump():
    arc = _ramp_arc()
    assert arc.eval(1.0, 0)[1] == (1.0,)
    assert arc.eval(1.0, 1)[1] == (0.0,)


def test_eval_outside_domain():
    arc = _ramp_arc()
    with pytest.raises(ValueError):
        arc.eval(0.5, 1)
    with pytest.raises(ValueError):
        arc.eval(3.0, 1)


def test_grid_points_order():
    arc = _ramp_arc(dt=0.5)
    pts = [(t, j) for t, j, *_ in arc.grid_points()]
    assert pts == [(0.0, 0), (0.5, 0), (1.0, 0), (1.0, 1), (1.5, 1), (2.0, 1)]


def test_sample_arc_includes_endpoints_exactly():
    domain = HybridTimeDomain((0.0, 0.3, 1.0))
    arc = sample_arc(domain, 0.07, lambda t, j: [0.0], lambda t, j: [t],
                     lambda t, j: [t], (1, 1, 1))
    assert arc.segments[0].times[0] == 0.0
    assert arc.segments[0].times[-1] == 0.3
    assert arc.segments[1].times[-1] == 1.0


def test_sample_arc_zero_length_interval():
    domain = HybridTimeDomain((0.0, 1.0, 1.0, 2.0))
    arc = sample_arc(domain, 0.25, lambda t, j: [0.0], lambda t, j: [float(j)],
                     lambda t, j: [0.0], (1, 1, 1))
    assert arc.segments[1].times.shape == (1,)
    assert arc.eval(1.0, 1)[1] == (1.0,)


def test_arc_from_segments_derives_domain():
    seg0 = ArcSegment(np.array([0.0, 1.0]), np.zeros((2, 1)),
                      np.array([[0.0], [1.0]]), np.zeros((2, 1)))
    seg1 = ArcSegment(np.array([1.0, 2.0]), np.zeros((2, 1)),
                      np.array([[5.0], [6.0]]), np.zeros((2, 1)))
    arc = arc_from_segments([seg0, seg1], (1, 1, 1))
    assert arc.domain.breaks == (0.0, 1.0, 2.0)
    assert arc.eval(1.0, 1)[1] == (5.0,)


def test_reparametrize_holds_value_across_foreign_jumps():
    arc = _ramp_arc(dt=0.5)
    other = HybridTimeDomain((0.0, 0.4, 2.0))
    merged = shared_domain(arc.domain, other)
    assert merged.jump_times == (0.4, 1.0)
    re = reparametrize(arc, merged)
    # foreign jump at 0.4: value held on both sides
    assert re.eval(0.4, 0)[1] == pytest.approx((0.4,))
    assert re.eval(0.4, 1)[1] == pytest.approx((0.4,))
    # native jump at 1.0 still discontinuous
    assert re.eval(1.0, 1)[1] == pytest.approx((1.0,))
    assert re.eval(1.0, 2)[1] == pytest.approx((0.0,))
    # native samples preserved exactly
    assert re.eval(1.5, 2)[1] == (0.5,)


def test_reparametrize_preserves_values_everywhere():
    arc = _ramp_arc(dt=0.25)
    merged = shared_domain(arc.domain, HybridTimeDomain((0.0, 0.1, 0.7, 2.0)))
    re = reparametrize(arc, merged)
    for t in (0.0, 0.05, 0.3, 0.65, 0.99):
        assert re.eval(t, 0 if t <= 0.1 else (1 if t <= 0.7 else 2))[1] == \
            pytest.approx(arc.eval(t, 0)[1])


def test_max_jump_variation():
    assert max_jump_variation(_ramp_arc()) == pytest.approx(1.0)
    flow_only = sample_arc(HybridTimeDomain((0.0, 1.0)), 0.5,
                           lambda t, j: [0.0], lambda t, j: [t],
                           lambda t, j: [t], (1, 1, 1))
    assert max_jump_variation(flow_only) == 0.0


def test_classify():
    arc = _ramp_arc()
    budget = (10.0, 5)
    assert classify(arc, budget).kind is ArcKind.COMPACT_MAXIMAL_CANDIDATE

    arc.budget_exhausted = True
    assert classify(arc, budget).kind is ArcKind.COMPLETE_BUDGET_TRUNCATED

    # many jumps crammed into a short window
    breaks = (0.0,) + tuple(0.5 + 0.001 * k for k in range(120)) + (1.0,)
    zeno = sample_arc(HybridTimeDomain(breaks), 0.1, lambda t, j: [0.0],
                      lambda t, j: [0.0], lambda t, j: [0.0], (1, 1, 1))
    assert classify(zeno, budget, zeno_threshold=100).kind is ArcKind.ZENO_SUSPECT


def test_csv_layout():
    arc = _ramp_arc(dt=0.5)
    text = to_csv(arc)
    lines = text.strip().split("\n")
    assert lines[0] == "t,j,w_1,x_1,y_1"
    assert lines[1] == "0.0,0,0.0,0.0,0.0"
    # jump: duplicated t with incremented j and the reset state
    assert "1.0,0,0.0,1.0,1.0" in lines
    assert "1.0,1,0.0,0.0,0.0" in lines
    assert text.endswith("\n")


def test_csv_is_deterministic():
    assert to_csv(_ramp_arc()) == to_csv(_ramp_arc())


def test_csv_floats_round_trip():
    arc = sample_arc(HybridTimeDomain((0.0, 1.0)), 1 / 3, lambda t, j: [0.0],
                     lambda t, j: [math.exp(t)], lambda t, j: [math.exp(t)],
                     (1, 1, 1))
    rows = to_csv(arc).strip().split("\n")[1:]
    for row, (t, j, w, x, y) in zip(rows, arc.grid_points()):
        cells = row.split(",")
        assert float(cells[0]) == t
        assert float(cells[3]) == x[0]
