"""Hybrid time domains: construction, truncation, merging."""

import random

import pytest

from hybridcontracts.hybrid_time import (
    HybridTimeDomain,
    embed_map,
    make_domain,
    shared_domain,
    sup_and_length,
    to_triples,
    truncate,
)

from oracles import E1_BREAKS, E2_BREAKS, E12_BREAKS, E12_JUMP_TIMES


def test_breaks_encode_intervals_and_jumps():
    e = HybridTimeDomain((0.0, 1.0, 1.5, 1.5, 2.0))
    assert e.sup_t == 2.0
    assert e.sup_j == 3
    assert e.num_intervals == 4
    assert e.jump_times == (1.0, 1.5, 1.5)
    assert e.interval(0) == (0.0, 1.0)
    assert e.interval(2) == (1.5, 1.5)  # instantaneous double jump


def test_domain_validation():
    with pytest.raises(ValueError):
        HybridTimeDomain((0.0,))
    with pytest.raises(ValueError):
        HybridTimeDomain((1.0, 2.0))  # must start at 0
    with pytest.raises(ValueError):
        HybridTimeDomain((0.0, 2.0, 1.0))  # decreasing


def test_contains():
    e = HybridTimeDomain((0.0, 1.0, 2.0))
    assert e.contains(0.5, 0)
    assert e.contains(1.0, 0)
    assert e.contains(1.0, 1)  # jump instant belongs to both intervals
    assert not e.contains(0.5, 1)
    assert not e.contains(2.5, 1)
    assert not e.contains(0.5, 2)


def test_make_domain_prepends_zero():
    e = make_domain([1.0, 2.0])
    assert e.breaks == (0.0, 1.0, 2.0)


def test_make_domain_with_horizon_reads_jump_times():
    e = make_domain([0.5, 1.5], horizon=3.0)
    assert e.breaks == (0.0, 0.5, 1.5, 3.0)
    assert e.jump_times == (0.5, 1.5)
    with pytest.raises(ValueError):
        make_domain([2.0], horizon=1.0)


def test_sup_and_length():
    e = HybridTimeDomain(tuple(E1_BREAKS))
    assert sup_and_length(e) == (2.0, 3, 5.0)


def test_truncate():
    e = HybridTimeDomain((0.0, 1.0, 1.5, 1.5, 2.0))
    cut = truncate(e, 1.2, 1)
    assert cut.breaks == (0.0, 1.0, 1.2)
    with pytest.raises(ValueError):
        truncate(e, 1.2, 0)  # (1.2, 0) is not a point of the domain


def test_truncate_at_jump_keeps_requested_index():
    e = HybridTimeDomain((0.0, 1.0, 2.0))
    assert truncate(e, 1.0, 0).breaks == (0.0, 1.0)
    assert truncate(e, 1.0, 1).breaks == (0.0, 1.0, 1.0)


def test_shared_domain_frozen_example():
    e1 = HybridTimeDomain(tuple(E1_BREAKS))
    e2 = HybridTimeDomain(tuple(E2_BREAKS))
    merged = shared_domain(e1, e2)
    assert merged.breaks == tuple(E12_BREAKS)
    assert merged.jump_times == tuple(E12_JUMP_TIMES)
    assert (merged.sup_t, merged.sup_j) == (2.0, 4)


def test_shared_domain_is_idempotent_on_equal_inputs():
    e = HybridTimeDomain((0.0, 0.5, 0.5, 1.0, 3.0))
    assert shared_domain(e, e) == e


def test_shared_domain_truncates_to_common_horizon():
    e1 = HybridTimeDomain((0.0, 1.0, 5.0))
    e2 = HybridTimeDomain((0.0, 2.0))
    merged = shared_domain(e1, e2)
    assert merged.sup_t == 2.0
    assert merged.jump_times == (1.0,)


def test_shared_domain_align_coincident():
    e1 = HybridTimeDomain((0.0, 1.0, 1.0, 2.0))  # double jump at 1
    e2 = HybridTimeDomain((0.0, 1.0, 2.0))  # single jump at 1
    merged = shared_domain(e1, e2)
    assert merged.jump_times == (1.0, 1.0, 1.0)  # independent: 2 + 1
    aligned = shared_domain(e1, e2, align_coincident_jumps=True)
    assert aligned.jump_times == (1.0, 1.0)  # max(2, 1)


def test_embed_map_holds_across_foreign_jumps():
    native = HybridTimeDomain((0.0, 1.0, 2.0))
    merged = HybridTimeDomain((0.0, 0.5, 1.0, 1.5, 2.0))
    assert embed_map(native, merged) == (0, 0, 1, 1)


def test_embed_map_rejects_missing_native_jumps():
    native = HybridTimeDomain((0.0, 1.0, 2.0))
    with pytest.raises(ValueError):
        embed_map(native, HybridTimeDomain((0.0, 0.5, 2.0)))
    with pytest.raises(ValueError):
        embed_map(native, HybridTimeDomain((0.0, 1.0, 3.0)))


def test_to_triples():
    e = HybridTimeDomain((0.0, 0.5, 2.0))
    assert to_triples(e) == [[0.0, 0.5, 0], [0.5, 2.0, 1]]


def _random_domain(rng):
    jumps = sorted(round(rng.uniform(0, 4), 3) for _ in range(rng.randrange(4)))
    horizon = round(max([4.0] + jumps) + rng.uniform(0, 2), 3)
    return make_domain(jumps, horizon=horizon)


def test_merge_laws_randomized():
    """shared_domain is commutative, idempotent, and embeds both inputs."""
    rng = random.Random(7)
    for _ in range(200):
        e1, e2 = _random_domain(rng), _random_domain(rng)
        merged = shared_domain(e1, e2)
        assert merged == shared_domain(e2, e1)
        assert shared_domain(merged, merged) == merged
        t = min(e1.sup_t, e2.sup_t)
        assert merged.sup_t == t
        # every native jump time survives into the merge
        for e in (e1, e2):
            jumps = [u for u in e.jump_times if u <= t]
            merged_jumps = list(merged.jump_times)
            for u in jumps:
                assert u in merged_jumps
                merged_jumps.remove(u)
        # both truncated inputs embed: the map is monotone and surjective
        for e in (e1, e2):
            cut = shared_domain(e, e) if e.sup_t == t else None
            native = cut if cut is not None else _prefix(e, t)
            m = embed_map(native, merged)
            assert m[0] == 0
            assert m[-1] == native.sup_j
            assert all(b - a in (0, 1) for a, b in zip(m, m[1:]))


def _prefix(e, t):
    jumps = [u for u in e.jump_times if u <= t]
    return make_domain(jumps, horizon=t)
