"""Hybrid time domains.

A (compact) hybrid time domain is a union of intervals

    E = [t_0, t_1] x {0}  u  [t_1, t_2] x {1}  u ... u  [t_J, t_{J+1}] x {J}

with 0 = t_0 <= t_1 <= ... <= t_{J+1}.  The internal representation is the
break sequence ``(t_0, ..., t_{J+1})``: interval ``j`` spans
``[breaks[j], breaks[j+1]]``, jumps happen at ``breaks[1:-1]``, and
zero-length intervals encode instantaneous multiple jumps.  ``final_open``
marks domains cut off by a simulation budget rather than ended by a jump or
a genuine stop.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class HybridTimeDomain:
    breaks: tuple[float, ...]
    final_open: bool = False

    def __post_init__(self) -> None:
        if len(self.breaks) < 2:
            raise ValueError("a domain needs at least one interval")
        if self.breaks[0] != 0.0:
            raise ValueError("hybrid time starts at t=0")
        for a, b in zip(self.breaks, self.breaks[1:]):
            if b < a:
                raise ValueError(f"break times must be nondecreasing: {a} > {b}")

    @property
    def sup_t(self) -> float:
        return self.breaks[-1]

    @property
    def sup_j(self) -> int:
        return len(self.breaks) - 2

    @property
    def num_intervals(self) -> int:
        return len(self.breaks) - 1

    @property
    def jump_times(self) -> tuple[float, ...]:
        return self.breaks[1:-1]

    def interval(self, j: int) -> tuple[float, float]:
        """Endpoints of interval ``j``."""
        if not 0 <= j <= self.sup_j:
            raise IndexError(f"interval {j} outside domain (sup_j={self.sup_j})")
        return self.breaks[j], self.breaks[j + 1]

    def contains(self, t: float, j: int) -> bool:
        if not 0 <= j <= self.sup_j:
            return False
        lo, hi = self.interval(j)
        return lo <= t <= hi


def make_domain(
    times, horizon: float | None = None, final_open: bool = False
) -> HybridTimeDomain:
    """Build a domain from a nondecreasing time sequence.

    Without ``horizon``, ``times`` is the full break sequence (a leading
    ``t_0 = 0`` is prepended when missing).  With ``horizon``, ``times`` is
    read as the jump times and ``horizon`` is appended as the end of the last
    interval; it must not precede the last jump.
    """
    seq = [float(t) for t in times]
    if not seq or seq[0] != 0.0:
        seq.insert(0, 0.0)
    for t in seq:
        if t < 0:
            raise ValueError("negative hybrid time")
    if horizon is not None:
        if seq and horizon < seq[-1]:
            raise ValueError("horizon precedes the last jump time")
        seq.append(float(horizon))
    return HybridTimeDomain(tuple(seq), final_open=final_open)


def sup_and_length(E: HybridTimeDomain) -> tuple[float, int, float]:
    """``(sup_t, sup_j, length)`` with ``length = sup_t + sup_j``."""
    return E.sup_t, E.sup_j, E.sup_t + E.sup_j


def truncate(E: HybridTimeDomain, T: float, J: int) -> HybridTimeDomain:
    """Compact prefix ``E n ([0,T] x {0..J})``; ``(T, J)`` must lie in ``E``."""
    if not E.contains(T, J):
        raise ValueError(f"({T}, {J}) not in the domain")
    return HybridTimeDomain(E.breaks[: J + 1] + (float(T),), final_open=False)


def _max_prefix(E: HybridTimeDomain, T: float) -> HybridTimeDomain:
    """Largest truncation of ``E`` at time horizon ``T <= sup_t``."""
    J = E.sup_j
    while E.breaks[J] > T:
        J -= 1
    open_tail = E.final_open and T == E.sup_t
    cut = truncate(E, T, J)
    return HybridTimeDomain(cut.breaks, final_open=open_tail)


def shared_domain(
    E1: HybridTimeDomain,
    E2: HybridTimeDomain,
    align_coincident_jumps: bool = False,
) -> HybridTimeDomain:
    """Merged domain both inputs reparametrize into.

    Both domains are first truncated to the common horizon
    ``min(sup_t E1, sup_t E2)``.  Per distinct jump time with multiplicities
    ``(m1, m2)`` across the inputs, the merge contributes ``max(m1, m2)``
    jumps under ``align_coincident_jumps``, and otherwise (independent
    default) ``m1 + m2`` when the multiplicities differ but ``m1`` when they
    coincide — so that ``shared_domain(E, E) == E``.
    """
    T = min(E1.sup_t, E2.sup_t)
    A, B = _max_prefix(E1, T), _max_prefix(E2, T)

    def _mults(dom: HybridTimeDomain) -> dict[float, int]:
        out: dict[float, int] = {}
        for t in dom.jump_times:
            out[t] = out.get(t, 0) + 1
        return out

    m1, m2 = _mults(A), _mults(B)
    merged: list[float] = []
    for t in sorted(set(m1) | set(m2)):
        a, b = m1.get(t, 0), m2.get(t, 0)
        if align_coincident_jumps:
            count = max(a, b)
        else:
            count = a if a == b else a + b
        merged.extend([t] * count)
    return HybridTimeDomain(
        (0.0, *merged, T), final_open=A.final_open or B.final_open
    )


def embed_map(native: HybridTimeDomain, merged: HybridTimeDomain) -> tuple[int, ...]:
    """Native interval index carrying each merged interval.

    ``merged`` must contain the native jump times as a sub-multiset and share
    the native horizon.  Jumps of ``merged`` are matched left-to-right against
    the native jumps; unmatched (foreign) jumps leave the native index
    unchanged, which is exactly the "hold the value across foreign jumps"
    reparametrization rule.
    """
    if merged.sup_t != native.sup_t:
        raise ValueError("domains disagree on the time horizon")
    native_jumps = list(native.jump_times)
    out = [0]
    k = 0  # native jumps consumed so far
    for t in merged.jump_times:
        if k < len(native_jumps) and native_jumps[k] == t:
            k += 1
        out.append(k)
    if k != len(native_jumps):
        raise ValueError("merged domain is missing native jump times")
    return tuple(out)


def to_triples(E: HybridTimeDomain) -> list[list[float]]:
    """Report serialization: one ``[t_j, t_{j+1}, j]`` triple per interval."""
    return [[E.breaks[j], E.breaks[j + 1], j] for j in range(E.num_intervals)]
