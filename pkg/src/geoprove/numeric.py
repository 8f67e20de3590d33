"""Numerical model: coordinate constructions and the two predicate bands.

All geometry here is plain float arithmetic over value types.  Angles are
measured in half-turn units (1.0 == pi radians), so line directions live in
[0, 1) and rational angle constants stay rational.

Predicates come in two flavours with deliberately different thresholds:

* exact checks accept when the deviation is at most ``eps_exact`` (scaled
  by the session scale for quantities with length units),
* coexact (margin) checks accept only when the separating quantity exceeds
  the much larger ``margin_coexact``.

Between the two bands sits a dead zone where neither check accepts; a
margin check is never the plain negation of an exact check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateInput

__all__ = [
    "PointVal", "LineVal", "CircleVal", "AngleNum", "RatioNum", "Tolerances",
    "line_through", "circumcircle_num", "foot_num", "point_on_circle",
    "direction_num", "midpoint_num", "intersect_ll_num", "intersect_lc_num",
    "distance", "angle_dist_mod1", "check_exact", "check_margin",
]


def _require_finite(*vals):
    for v in vals:
        if not math.isfinite(v):
            raise DegenerateInput(f"non-finite coordinate {v!r}")


@dataclass(frozen=True)
class PointVal:
    x: float
    y: float

    def __post_init__(self):
        _require_finite(self.x, self.y)


@dataclass(frozen=True)
class LineVal:
    """Line as unit normal plus offset: nx*x + ny*y = c.

    Canonical form: the first nonzero component of (nx, ny) is positive.
    """

    nx: float
    ny: float
    c: float

    def __post_init__(self):
        _require_finite(self.nx, self.ny, self.c)
        n2 = self.nx * self.nx + self.ny * self.ny
        if abs(n2 - 1.0) > 1e-12:
            raise DegenerateInput(f"normal not unit length: {n2}")


@dataclass(frozen=True)
class CircleVal:
    cx: float
    cy: float
    r: float

    def __post_init__(self):
        _require_finite(self.cx, self.cy, self.r)
        if self.r <= 0:
            raise DegenerateInput(f"non-positive radius {self.r}")


@dataclass(frozen=True)
class AngleNum:
    """Angle value in half-turn units, reduced into [0, 1)."""

    value: float

    def __post_init__(self):
        _require_finite(self.value)
        if not 0.0 <= self.value < 1.0:
            raise DegenerateInput(f"angle {self.value} not reduced mod 1")


@dataclass(frozen=True)
class RatioNum:
    """Positive ratio / length value."""

    value: float

    def __post_init__(self):
        _require_finite(self.value)
        if self.value <= 0:
            raise DegenerateInput(f"non-positive ratio {self.value}")


@dataclass
class Tolerances:
    """Session tolerances.  ``scale`` follows the bounding-box diameter of
    the free points (at least 1); length-unit checks multiply by it."""

    eps_exact: float = 1e-7
    margin_coexact: float = 1e-4
    scale: float = 1.0

    def __post_init__(self):
        if not 0 < self.eps_exact < self.margin_coexact:
            raise ValueError("need 0 < eps_exact < margin_coexact")


# ---------------------------------------------------------------------------
# small vector helpers

def distance(p: PointVal, q: PointVal) -> float:
    return math.hypot(p.x - q.x, p.y - q.y)


def _canonical_normal(nx, ny):
    # first nonzero of (nx, ny) positive; +0.0 folds away negative zeros
    if nx < 0 or (nx == 0 and ny < 0):
        nx, ny = -nx, -ny
    return nx + 0.0, ny + 0.0


def angle_dist_mod1(a: float, b: float) -> float:
    """Distance between two angle values on the circle R/Z."""
    d = (a - b) % 1.0
    return min(d, 1.0 - d)


def _signed_area2(a: PointVal, b: PointVal, c: PointVal) -> float:
    # twice the signed triangle area
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)


# ---------------------------------------------------------------------------
# constructions

def line_through(p: PointVal, q: PointVal, tol: Tolerances) -> LineVal:
    """Line through two distinct points, in canonical normal form."""
    if distance(p, q) <= tol.eps_exact * tol.scale:
        raise DegenerateInput("line through coinciding points")
    dx, dy = q.x - p.x, q.y - p.y
    ln = math.hypot(dx, dy)
    nx, ny = _canonical_normal(-dy / ln, dx / ln)
    return LineVal(nx, ny, nx * p.x + ny * p.y)


def circumcircle_num(a: PointVal, b: PointVal, c: PointVal,
                     tol: Tolerances) -> CircleVal:
    """Circle through three non-collinear points (perpendicular-bisector
    intersection, solved in closed form)."""
    if abs(_signed_area2(a, b, c)) <= tol.margin_coexact * tol.scale ** 2:
        raise DegenerateInput("circumcircle of (nearly) collinear points")
    d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y))
    a2, b2, c2 = (a.x ** 2 + a.y ** 2, b.x ** 2 + b.y ** 2, c.x ** 2 + c.y ** 2)
    ux = (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d
    uy = (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d
    center = PointVal(ux, uy)
    return CircleVal(ux, uy, distance(center, a))


def foot_num(p: PointVal, l: LineVal) -> PointVal:
    """Orthogonal projection of ``p`` onto ``l``."""
    d = l.nx * p.x + l.ny * p.y - l.c
    return PointVal(p.x - d * l.nx, p.y - d * l.ny)


def point_on_circle(t: float, c: CircleVal) -> PointVal:
    """Point at parameter ``t`` (radians) on the standard parameterization
    center + r (cos t, sin t)."""
    return PointVal(c.cx + c.r * math.cos(t), c.cy + c.r * math.sin(t))


def direction_num(l: LineVal) -> AngleNum:
    """Direction of a line in half-turn units, in [0, 1)."""
    # tangent vector perpendicular to the normal
    tx, ty = -l.ny, l.nx
    v = (math.atan2(ty, tx) / math.pi) % 1.0
    if v >= 1.0:  # guard the 0.9999...->1.0 rounding edge
        v = 0.0
    return AngleNum(v)


def midpoint_num(p: PointVal, q: PointVal) -> PointVal:
    return PointVal(0.5 * (p.x + q.x), 0.5 * (p.y + q.y))


def intersect_ll_num(l0: LineVal, l1: LineVal, tol: Tolerances) -> PointVal:
    """Intersection of two lines; fails when they are close to parallel."""
    det = l0.nx * l1.ny - l0.ny * l1.nx
    if abs(det) <= tol.margin_coexact:
        raise DegenerateInput("lines are (nearly) parallel")
    x = (l0.c * l1.ny - l1.c * l0.ny) / det
    y = (l0.nx * l1.c - l1.nx * l0.c) / det
    return PointVal(x, y)


def intersect_lc_num(l: LineVal, w: CircleVal, side: int,
                     tol: Tolerances) -> PointVal:
    """Intersection of a secant line with a circle.

    ``side`` 0/1 selects the solution at the smaller/larger parameter along
    the line's tangent direction.  Tangent or missing configurations fail.
    """
    center = PointVal(w.cx, w.cy)
    f = foot_num(center, l)
    d = distance(center, f)
    if w.r - d <= tol.eps_exact * tol.scale:
        raise DegenerateInput("line does not cross the circle by a clear margin")
    h = math.sqrt(w.r * w.r - d * d)
    tx, ty = -l.ny, l.nx
    if side == 0:
        return PointVal(f.x - h * tx, f.y - h * ty)
    return PointVal(f.x + h * tx, f.y + h * ty)


# ---------------------------------------------------------------------------
# predicate checks
#
# Facts are plain tuples headed by a kind tag, e.g. ("lies_on_line", p, l).

def _exact_deviations(fact, tol):
    """Yield (deviation, threshold) pairs; the fact holds exactly when every
    deviation is within its threshold."""
    kind = fact[0]
    eps = tol.eps_exact
    eps_len = eps * tol.scale
    if kind == "point_eq":
        _, p, q = fact
        yield distance(p, q), eps_len
    elif kind == "lies_on_line":
        _, p, l = fact
        yield abs(l.nx * p.x + l.ny * p.y - l.c), eps_len
    elif kind == "lies_on_circle":
        _, p, w = fact
        yield abs(distance(p, PointVal(w.cx, w.cy)) - w.r), eps_len
    elif kind == "angle_eq":
        _, a, b = fact
        yield angle_dist_mod1(a.value, b.value), eps
    elif kind == "ratio_eq":
        _, r, s = fact
        yield abs(math.log(r.value) - math.log(s.value)), eps
    elif kind == "line_eq":
        _, l, m = fact
        yield math.hypot(l.nx - m.nx, l.ny - m.ny), eps
        yield abs(l.c - m.c), eps_len
    elif kind == "circle_eq":
        _, v, w = fact
        yield distance(PointVal(v.cx, v.cy), PointVal(w.cx, w.cy)), eps_len
        yield abs(v.r - w.r), eps_len
    else:
        raise ValueError(f"unknown exact fact kind {kind!r}")


def check_exact(fact, tol: Tolerances) -> bool:
    """True iff the exact fact holds within ``eps_exact`` (scaled)."""
    return all(dev <= thr for dev, thr in _exact_deviations(fact, tol))


def check_margin(fact, tol: Tolerances) -> bool:
    """True iff the coexact fact is satisfied by a clear margin.

    Not the negation of :func:`check_exact`: between ``eps_exact`` and
    ``margin_coexact`` both checks reject.
    """
    kind = fact[0]
    margin_len = tol.margin_coexact * tol.scale
    margin_area = tol.margin_coexact * tol.scale ** 2
    if kind == "not_eq":
        _, p, q = fact
        return distance(p, q) > margin_len
    if kind == "not_on":
        _, p, carrier = fact
        if isinstance(carrier, LineVal):
            sep = abs(carrier.nx * p.x + carrier.ny * p.y - carrier.c)
        else:
            sep = abs(distance(p, PointVal(carrier.cx, carrier.cy)) - carrier.r)
        return sep > margin_len
    if kind == "not_collinear":
        _, a, b, c = fact
        return abs(_signed_area2(a, b, c)) > margin_area
    if kind == "oriented_as":
        _, a, b, c, sign = fact
        return sign * _signed_area2(a, b, c) > margin_area
    raise ValueError(f"unknown coexact fact kind {kind!r}")
