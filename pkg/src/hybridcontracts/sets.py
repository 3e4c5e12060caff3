"""Box-based set algebra with open/closed faces.

Sets are finite unions of axis-aligned boxes.  Each box carries per-dimension
faces ``(lo, hi)`` with independent strictness flags, so intervals such as
``[-1, 1]``, ``(-2, 2)`` and half-open mixes are all representable, as are
degenerate singletons ``[0, 0]`` and unbounded faces (``lo = -inf`` or
``hi = +inf``).

Membership is three-valued: ``IN``, ``OUT``, or ``BORDER`` when the query
point sits within the face tolerance of a non-degenerate bound.  Downstream
monitors map ``BORDER`` hits on guarantee sets to ``unknown`` verdicts instead
of hard violations.  Degenerate faces (``lo == hi``) are decided with the
tolerance but never report ``BORDER``; without that rule every verdict against
a singleton guarantee like ``{0}`` would be indeterminate.

epsilon-expansion ``B_eps(S)`` and epsilon-contraction are exact for
one-dimensional boxes; in higher dimensions the per-axis widening/narrowing is
an outer/inner approximation of the Euclidean ball operation and the result is
flagged accordingly (``outer_approx`` / ``inner_approx``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

#: Absolute tolerance for face comparisons (double-precision headroom over
#: integration error).
FACE_TOL = 1e-9

_INF = math.inf


class Membership(Enum):
    """Three-valued membership verdict."""

    OUT = 0
    BORDER = 1
    IN = 2


class SignConstraint(Enum):
    """Per-dimension constraint of a tangent cone at a box boundary point."""

    FREE = "free"
    NONNEG = "nonneg"
    NONPOS = "nonpos"
    ZERO = "zero"


@dataclass(frozen=True, slots=True)
class Face:
    """One dimension of a box: ``lo <relation> x <relation> hi``.

    ``lo_strict``/``hi_strict`` select ``<`` over ``<=`` for the respective
    bound.  ``lo`` may be ``-inf`` and ``hi`` may be ``+inf`` (an infinite
    bound is treated as strict-irrelevant: no point attains it).
    """

    lo: float
    hi: float
    lo_strict: bool = False
    hi_strict: bool = False

    def __post_init__(self) -> None:
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise ValueError("face bounds must not be NaN")
        if self.lo > self.hi:
            raise ValueError(f"face requires lo <= hi, got ({self.lo}, {self.hi})")
        if self.lo == _INF or self.hi == -_INF:
            raise ValueError("face bounds out of order at infinity")

    @property
    def degenerate(self) -> bool:
        return self.lo == self.hi

    @property
    def is_empty(self) -> bool:
        return self.degenerate and (self.lo_strict or self.hi_strict)

    @property
    def closed(self) -> bool:
        return not (self.lo_strict or self.hi_strict)

    @property
    def bounded(self) -> bool:
        return not math.isinf(self.lo) and not math.isinf(self.hi)


@dataclass(frozen=True, slots=True)
class Box:
    """A single axis-aligned box: the product of its faces."""

    faces: tuple[Face, ...]

    def __post_init__(self) -> None:
        if not self.faces:
            raise ValueError("a box needs at least one dimension")

    @property
    def dims(self) -> int:
        return len(self.faces)

    @property
    def is_empty(self) -> bool:
        return any(f.is_empty for f in self.faces)

    @property
    def closed(self) -> bool:
        return all(f.closed for f in self.faces)

    @property
    def bounded(self) -> bool:
        return all(f.bounded for f in self.faces)


@dataclass(frozen=True, slots=True)
class BoxSet:
    """A finite union of boxes of common dimension.

    ``pieces == ()`` is the empty set.  ``outer_approx``/``inner_approx``
    record that the value was produced by an n-D expansion/contraction and
    therefore over-/under-approximates the exact Euclidean result.
    """

    dims: int
    pieces: tuple[Box, ...] = ()
    outer_approx: bool = False
    inner_approx: bool = False

    def __post_init__(self) -> None:
        if self.dims < 1:
            raise ValueError("dims must be positive")
        for piece in self.pieces:
            if piece.dims != self.dims:
                raise ValueError(
                    f"piece has {piece.dims} dims, set has {self.dims}"
                )

    @property
    def is_empty(self) -> bool:
        return all(p.is_empty for p in self.pieces)

    @property
    def closed(self) -> bool:
        """True iff every face of every (nonempty) piece is non-strict."""
        return all(p.closed for p in self.pieces if not p.is_empty)

    @property
    def bounded(self) -> bool:
        return all(p.bounded for p in self.pieces if not p.is_empty)


@dataclass(frozen=True, slots=True)
class SignCone:
    """Tangent (contingent) cone to a closed box at a point, one sign
    constraint per dimension."""

    constraints: tuple[SignConstraint, ...]

    @property
    def dims(self) -> int:
        return len(self.constraints)


# ---------------------------------------------------------------------------
# Constructors


def interval(
    lo: float, hi: float, lo_strict: bool = False, hi_strict: bool = False
) -> BoxSet:
    """One-dimensional box set ``{x : lo <rel> x <rel> hi}``."""
    return BoxSet(1, (Box((Face(lo, hi, lo_strict, hi_strict),)),))


def box(*bounds: tuple[float, float]) -> BoxSet:
    """Closed box from ``(lo, hi)`` pairs, one per dimension."""
    return BoxSet(len(bounds), (Box(tuple(Face(lo, hi) for lo, hi in bounds)),))


def point(*coords: float) -> BoxSet:
    """Degenerate singleton box ``{coords}``."""
    return BoxSet(len(coords), (Box(tuple(Face(c, c) for c in coords)),))


def empty(dims: int) -> BoxSet:
    return BoxSet(dims, ())


def whole(dims: int) -> BoxSet:
    """All of R^dims."""
    return BoxSet(dims, (Box(tuple(Face(-_INF, _INF) for _ in range(dims))),))


def union(*sets: BoxSet) -> BoxSet:
    dims = sets[0].dims
    pieces: list[Box] = []
    for s in sets:
        if s.dims != dims:
            raise ValueError("union over mismatched dimensions")
        pieces.extend(s.pieces)
    return BoxSet(
        dims,
        tuple(pieces),
        outer_approx=any(s.outer_approx for s in sets),
        inner_approx=any(s.inner_approx for s in sets),
    )


# ---------------------------------------------------------------------------
# Membership


def _face_membership(f: Face, x: float, tol: float) -> Membership:
    if f.is_empty:
        return Membership.OUT
    if f.degenerate:
        # Singleton face: decisive within tolerance, never BORDER.
        return Membership.IN if abs(x - f.lo) <= tol else Membership.OUT
    lo_side = Membership.IN
    if not math.isinf(f.lo):
        if f.lo_strict:
            if x <= f.lo:
                return Membership.OUT
            lo_side = Membership.IN if x > f.lo + tol else Membership.BORDER
        else:
            if x < f.lo - tol:
                return Membership.OUT
            lo_side = Membership.IN if x >= f.lo else Membership.BORDER
    hi_side = Membership.IN
    if not math.isinf(f.hi):
        if f.hi_strict:
            if x >= f.hi:
                return Membership.OUT
            hi_side = Membership.IN if x < f.hi - tol else Membership.BORDER
        else:
            if x > f.hi + tol:
                return Membership.OUT
            hi_side = Membership.IN if x <= f.hi else Membership.BORDER
    if lo_side is Membership.BORDER or hi_side is Membership.BORDER:
        return Membership.BORDER
    return Membership.IN


def membership(S: BoxSet, x: Sequence[float], tol: float = FACE_TOL) -> Membership:
    """Three-valued membership of point ``x`` in ``S``.

    The union takes the most favourable verdict over pieces
    (``IN > BORDER > OUT``).
    """
    if len(x) != S.dims:
        raise ValueError(f"point has {len(x)} dims, set has {S.dims}")
    best = Membership.OUT
    for piece in S.pieces:
        verdict = Membership.IN
        for f, xi in zip(piece.faces, x):
            m = _face_membership(f, xi, tol)
            if m is Membership.OUT:
                verdict = Membership.OUT
                break
            if m is Membership.BORDER:
                verdict = Membership.BORDER
        if verdict is Membership.IN:
            return Membership.IN
        if verdict is Membership.BORDER:
            best = Membership.BORDER
    return best


def contains(S: BoxSet, x: Sequence[float], tol: float = FACE_TOL) -> bool:
    """True iff ``x`` lies in some piece (border-tolerant: ``BORDER`` counts).

    Strict faces exclude their bound exactly: ``contains((-2,2), 2)`` is
    False even though 2 is within tolerance of the bound.
    """
    return membership(S, x, tol) is not Membership.OUT


# ---------------------------------------------------------------------------
# Closure / expansion / contraction / distance


def closure(S: BoxSet) -> BoxSet:
    """All faces made non-strict; empty pieces dropped."""
    pieces = tuple(
        Box(tuple(Face(f.lo, f.hi) for f in p.faces))
        for p in S.pieces
        if not p.is_empty
    )
    return BoxSet(S.dims, pieces, S.outer_approx, S.inner_approx)


def expand(S: BoxSet, eps: float) -> BoxSet:
    """Closed eps-expansion ``{y : exists x in S, |x - y| <= eps}``.

    Exact for 1-D boxes; per-axis widening (an outer approximation of the
    Euclidean expansion, flagged ``outer_approx``) in higher dimensions.
    ``expand(S, 0)`` equals the closure of ``S``.
    """
    if eps < 0:
        raise ValueError("expansion radius must be nonnegative")
    pieces = []
    for p in S.pieces:
        if p.is_empty:
            continue
        faces = tuple(
            Face(
                p_f.lo - eps if not math.isinf(p_f.lo) else p_f.lo,
                p_f.hi + eps if not math.isinf(p_f.hi) else p_f.hi,
            )
            for p_f in p.faces
        )
        pieces.append(Box(faces))
    outer = S.outer_approx or (S.dims > 1 and eps > 0)
    return BoxSet(S.dims, tuple(pieces), outer_approx=outer,
                  inner_approx=S.inner_approx)


def contract(S: BoxSet, eps: float) -> BoxSet:
    """eps-contraction ``{y : B_eps(y) subseteq S}`` by per-axis narrowing.

    Exact for a single 1-D box (strictness is preserved: the closed ball
    around a point at distance eps from an open bound pokes out).  Flagged
    ``inner_approx`` for multi-dimensional or multi-piece sets, where the
    per-piece narrowing under-approximates the exact contraction.
    """
    if eps <= 0:
        raise ValueError("contraction radius must be positive")
    pieces = []
    for p in S.pieces:
        if p.is_empty:
            continue
        faces = []
        dead = False
        for f in p.faces:
            lo = f.lo + eps if not math.isinf(f.lo) else f.lo
            hi = f.hi - eps if not math.isinf(f.hi) else f.hi
            if lo > hi or (lo == hi and (f.lo_strict or f.hi_strict)):
                dead = True
                break
            faces.append(Face(lo, hi, f.lo_strict, f.hi_strict))
        if not dead:
            pieces.append(Box(tuple(faces)))
    inner = S.inner_approx or S.dims > 1 or len(S.pieces) > 1
    return BoxSet(S.dims, tuple(pieces), outer_approx=S.outer_approx,
                  inner_approx=inner)


def distance(x: Sequence[float], S: BoxSet) -> float:
    """Euclidean distance from ``x`` to the closure of ``S`` (0 iff inside).

    Raises on the empty set, whose distance is undefined.
    """
    if len(x) != S.dims:
        raise ValueError(f"point has {len(x)} dims, set has {S.dims}")
    best = _INF
    for p in S.pieces:
        if p.is_empty:
            continue
        acc = 0.0
        for f, xi in zip(p.faces, x):
            if xi < f.lo:
                acc += (f.lo - xi) ** 2
            elif xi > f.hi:
                acc += (xi - f.hi) ** 2
        best = min(best, math.sqrt(acc))
    if best == _INF:
        raise ValueError("distance to the empty set is undefined")
    return best


# ---------------------------------------------------------------------------
# Tangent cones


def tangent_cone(K: BoxSet, x: Sequence[float], tol: float = FACE_TOL) -> SignCone:
    """Contingent cone to a single closed box at ``x``.

    Per dimension: ``zero`` if the bounds coincide, ``nonneg`` at the lower
    bound, ``nonpos`` at the upper bound, ``free`` strictly inside.  Unions
    and points outside the closure are rejected.
    """
    if len(K.pieces) != 1:
        raise ValueError("tangent cone requires a single box (unions unsupported)")
    if not K.closed:
        raise ValueError("tangent cone requires a closed box")
    (piece,) = K.pieces
    if len(x) != K.dims:
        raise ValueError(f"point has {len(x)} dims, set has {K.dims}")
    constraints = []
    for f, xi in zip(piece.faces, x):
        if xi < f.lo - tol or xi > f.hi + tol:
            raise ValueError(f"point {tuple(x)} lies outside the box closure")
        if f.degenerate:
            constraints.append(SignConstraint.ZERO)
        elif not math.isinf(f.lo) and abs(xi - f.lo) <= tol:
            constraints.append(SignConstraint.NONNEG)
        elif not math.isinf(f.hi) and abs(xi - f.hi) <= tol:
            constraints.append(SignConstraint.NONPOS)
        else:
            constraints.append(SignConstraint.FREE)
    return SignCone(tuple(constraints))


def in_cone(c: SignCone, v: Sequence[float], tol: float = 0.0) -> bool:
    """True iff every component of ``v`` meets its sign constraint within
    ``tol``."""
    if len(v) != c.dims:
        raise ValueError("vector/cone dimension mismatch")
    for constraint, vi in zip(c.constraints, v):
        if constraint is SignConstraint.NONNEG and vi < -tol:
            return False
        if constraint is SignConstraint.NONPOS and vi > tol:
            return False
        if constraint is SignConstraint.ZERO and abs(vi) > tol:
            return False
    return True


def sample_boundary(K: BoxSet, resolution: int) -> list[tuple[float, ...]]:
    """Deterministic grid over the boundary of a single bounded box.

    Each axis carries ``max(resolution, 2)`` equispaced points including both
    endpoints; the boundary keeps exactly the grid points with at least one
    non-degenerate coordinate pinned to its bound.  In 1-D this is the two
    endpoints; a fully degenerate box yields its single point.
    """
    if len(K.pieces) != 1:
        raise ValueError("boundary sampling requires a single box")
    (piece,) = K.pieces
    if not piece.bounded:
        raise ValueError("boundary sampling requires a bounded box")
    if resolution < 1:
        raise ValueError("resolution must be positive")
    r = max(resolution, 2)
    axes: list[list[float]] = []
    for f in piece.faces:
        if f.degenerate:
            axes.append([f.lo])
        else:
            step = (f.hi - f.lo) / (r - 1)
            pts = [f.lo + i * step for i in range(r - 1)] + [f.hi]
            axes.append(pts)
    out: list[tuple[float, ...]] = []
    idx = [0] * len(axes)
    while True:
        pt = tuple(axes[d][idx[d]] for d in range(len(axes)))
        on_boundary = False
        for d, f in enumerate(piece.faces):
            if f.degenerate:
                continue
            if idx[d] == 0 or idx[d] == len(axes[d]) - 1:
                on_boundary = True
                break
        if on_boundary or all(f.degenerate for f in piece.faces):
            out.append(pt)
        # lexicographic increment
        d = len(axes) - 1
        while d >= 0:
            idx[d] += 1
            if idx[d] < len(axes[d]):
                break
            idx[d] = 0
            d -= 1
        if d < 0:
            return out


# ---------------------------------------------------------------------------
# Relations and combinations


def _face_subset(a: Face, b: Face) -> bool:
    """Every point admitted by a is admitted by b."""
    if a.is_empty:
        return True
    if a.lo < b.lo or (a.lo == b.lo and b.lo_strict and not a.lo_strict):
        if not (math.isinf(a.lo) and math.isinf(b.lo) and a.lo == b.lo):
            return False
    if a.hi > b.hi or (a.hi == b.hi and b.hi_strict and not a.hi_strict):
        if not (math.isinf(a.hi) and math.isinf(b.hi) and a.hi == b.hi):
            return False
    return True


def _box_in_box(a: Box, b: Box) -> bool:
    return all(_face_subset(fa, fb) for fa, fb in zip(a.faces, b.faces))


def _interval_cover_1d(a: Face, pieces: Iterable[Face]) -> bool:
    """1-D sweep: is the interval ``a`` covered by the union of ``pieces``?

    Invariant: every point of ``a`` strictly below ``covered_to`` is covered,
    and ``pending`` flags that the point ``covered_to`` itself is still
    required but uncovered.  A piece whose open left end sits exactly on a
    pending point cannot connect (the point would stay uncovered).
    """
    remaining = sorted(
        (f for f in pieces if not f.is_empty), key=lambda f: (f.lo, f.hi)
    )
    covered_to = a.lo
    pending = not a.lo_strict and not math.isinf(a.lo)
    while True:
        progressed = False
        for f in remaining:
            if f.lo > covered_to or (
                f.lo == covered_to and f.lo_strict and pending
            ):
                continue
            if f.hi > covered_to:
                covered_to = f.hi
                pending = f.hi_strict and not math.isinf(f.hi)
                progressed = True
            elif f.hi == covered_to and pending and not f.hi_strict:
                pending = False
                progressed = True
        if covered_to > a.hi:
            return True
        if covered_to == a.hi and (a.hi_strict or not pending):
            return True
        if not progressed:
            return False


def subset(A: BoxSet, B: BoxSet) -> bool:
    """Exact inclusion check where decidable; conservative ``False`` otherwise.

    Decides exactly when every piece of ``A`` fits inside a single piece of
    ``B`` (face dominance) and, for 1-D sets, via an interval sweep across
    ``B``'s union.  Multi-dimensional unions that genuinely require piece
    splitting report ``False``.
    """
    if A.dims != B.dims:
        raise ValueError("subset over mismatched dimensions")
    for a in A.pieces:
        if a.is_empty:
            continue
        if any(_box_in_box(a, b) for b in B.pieces if not b.is_empty):
            continue
        if A.dims == 1:
            faces = [b.faces[0] for b in B.pieces if not b.is_empty]
            if _interval_cover_1d(a.faces[0], faces):
                continue
        return False
    return True


def _face_intersect(a: Face, b: Face) -> Face | None:
    if a.lo > b.lo or (a.lo == b.lo and a.lo_strict):
        lo, lo_strict = a.lo, a.lo_strict
    else:
        lo, lo_strict = b.lo, b.lo_strict
    if a.hi < b.hi or (a.hi == b.hi and a.hi_strict):
        hi, hi_strict = a.hi, a.hi_strict
    else:
        hi, hi_strict = b.hi, b.hi_strict
    if lo > hi:
        return None
    f = Face(lo, hi, lo_strict, hi_strict)
    return None if f.is_empty else f


def intersect(A: BoxSet, B: BoxSet) -> BoxSet:
    """Exact intersection (pairwise over pieces)."""
    if A.dims != B.dims:
        raise ValueError("intersect over mismatched dimensions")
    pieces = []
    for a in A.pieces:
        if a.is_empty:
            continue
        for b in B.pieces:
            if b.is_empty:
                continue
            faces = []
            dead = False
            for fa, fb in zip(a.faces, b.faces):
                f = _face_intersect(fa, fb)
                if f is None:
                    dead = True
                    break
                faces.append(f)
            if not dead:
                pieces.append(Box(tuple(faces)))
    return BoxSet(
        A.dims,
        tuple(pieces),
        outer_approx=A.outer_approx or B.outer_approx,
        inner_approx=A.inner_approx or B.inner_approx,
    )


def product(A: BoxSet, B: BoxSet) -> BoxSet:
    """Cartesian product; the union distributes over pieces."""
    pieces = []
    for a in A.pieces:
        for b in B.pieces:
            pieces.append(Box(a.faces + b.faces))
    return BoxSet(
        A.dims + B.dims,
        tuple(pieces),
        outer_approx=A.outer_approx or B.outer_approx,
        inner_approx=A.inner_approx or B.inner_approx,
    )


# ---------------------------------------------------------------------------
# Literal syntax: "[lo, hi]", "(lo, hi)", mixes, "a x b" products,
# "union of P1, P2", "inf"/"-inf" bounds.


def _parse_number(tok: str) -> float:
    tok = tok.strip()
    if tok in ("inf", "+inf"):
        return _INF
    if tok == "-inf":
        return -_INF
    return float(tok)


def _parse_interval(text: str) -> Face:
    text = text.strip()
    if len(text) < 2 or text[0] not in "[(" or text[-1] not in "])":
        raise ValueError(f"malformed interval literal: {text!r}")
    lo_strict = text[0] == "("
    hi_strict = text[-1] == ")"
    body = text[1:-1].split(",")
    if len(body) != 2:
        raise ValueError(f"interval literal needs two bounds: {text!r}")
    return Face(_parse_number(body[0]), _parse_number(body[1]),
                lo_strict, hi_strict)


def _parse_box(text: str) -> Box:
    parts = [p for p in text.split(" x ") if p.strip()]
    if not parts:
        raise ValueError(f"malformed box literal: {text!r}")
    return Box(tuple(_parse_interval(p) for p in parts))


def _split_top_level(text: str) -> list[str]:
    """Split on commas that sit outside bracket pairs."""
    out, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch in "[(":
            depth += 1
        elif ch in "])":
            depth -= 1
        elif ch == "," and depth == 0:
            out.append(text[start:i])
            start = i + 1
    out.append(text[start:])
    return out


def parse_box_literal(text: str, dims: int | None = None) -> BoxSet:
    """Parse the scenario-file box syntax into a :class:`BoxSet`."""
    text = text.strip()
    if text.lower() in ("empty", "{}"):
        if dims is None:
            raise ValueError("empty literal needs an explicit dimension")
        return empty(dims)
    if text.lower().startswith("union of"):
        parts = _split_top_level(text[len("union of"):])
        boxes = tuple(_parse_box(p) for p in parts)
    else:
        boxes = (_parse_box(text),)
    got = boxes[0].dims
    for b in boxes:
        if b.dims != got:
            raise ValueError("union members disagree on dimension")
    if dims is not None and got != dims:
        raise ValueError(f"literal has {got} dims, expected {dims}")
    return BoxSet(got, boxes)


def _format_number(v: float) -> str:
    if v == _INF:
        return "inf"
    if v == -_INF:
        return "-inf"
    return repr(v)


def format_box_literal(S: BoxSet) -> str:
    """Inverse of :func:`parse_box_literal` (round-trips exactly)."""
    if not S.pieces:
        return "empty"
    rendered = []
    for p in S.pieces:
        parts = []
        for f in p.faces:
            open_b = "(" if f.lo_strict else "["
            close_b = ")" if f.hi_strict else "]"
            parts.append(
                f"{open_b}{_format_number(f.lo)}, {_format_number(f.hi)}{close_b}"
            )
        rendered.append(" x ".join(parts))
    if len(rendered) == 1:
        return rendered[0]
    return "union of " + ", ".join(rendered)
