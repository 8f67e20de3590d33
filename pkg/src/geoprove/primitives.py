"""Built-in primitive tools and the shipped base registry.

Construction primitives compute coordinates and allocate objects; they
behave the same in both modes and fail only on degenerate input.  The
memoized exact predicates (``lies_on``) record themselves in the lookup
table when postulated and otherwise fail under check; the angle/ratio
equality predicates are backed by the exact equation systems instead.
Coexact predicates (``not_eq``, ``not_on``, ``not_collinear``) check the
numerical margin in both modes and are not memoized.

``prim__line`` and ``prim__circumcircle`` first look for a carrier already
known (through memoized incidences) to pass through the given points and
return it instead of allocating a twin object; this is the uniqueness
axiom 'distinct points determine their carrier' in executable form.
"""

from __future__ import annotations

import math
from fractions import Fraction
from importlib import resources

from . import numeric
from .dsl import parse_toolfile
from .errors import (DegenerateInput, NUMERIC_MISFIT, ToolFailure,
                     UNKNOWN_FACT)
from .numeric import AngleNum, PointVal, RatioNum
from .toolset import Mode, Primitive, Registry, resolve_ast

__all__ = ["primitives_registry", "base_registry", "base_toolfile_text",
           "BASE_TOOLS_RESOURCE"]

BASE_TOOLS_RESOURCE = "tools/base.glt"


def _vals(core, refs):
    return [core.value_of(r) for r in refs]


# ---------------------------------------------------------------------------
# constructions

def _free_point(core, refs, hypers, mode):
    x, y = hypers
    return (core.add_object(PointVal(x, y), seed=True),)


def _line(core, refs, hypers, mode):
    a, b = refs
    va, vb = _vals(core, refs)
    val = numeric.line_through(va, vb, core.tol)  # degeneracy gate
    known = core.carrier_through("L", (a, b))
    if known is not None:
        return (known,)
    return (core.add_object(val),)


def _circumcircle(core, refs, hypers, mode):
    va, vb, vc = _vals(core, refs)
    val = numeric.circumcircle_num(va, vb, vc, core.tol)
    known = core.carrier_through("C", refs)
    if known is not None:
        return (known,)
    return (core.add_object(val),)


def _foot(core, refs, hypers, mode):
    vp, vl = _vals(core, refs)
    return (core.add_object(numeric.foot_num(vp, vl)),)


def _m_point_on(core, refs, hypers, mode):
    (vw,) = _vals(core, refs)
    (t,) = hypers
    return (core.add_object(numeric.point_on_circle(t, vw)),)


def _direction_of(core, refs, hypers, mode):
    (vl,) = _vals(core, refs)
    return (core.add_object(numeric.direction_num(vl)),)


def _midpoint(core, refs, hypers, mode):
    va, vb = _vals(core, refs)
    return (core.add_object(numeric.midpoint_num(va, vb)),)


def _intersect_ll(core, refs, hypers, mode):
    v0, v1 = _vals(core, refs)
    return (core.add_object(numeric.intersect_ll_num(v0, v1, core.tol)),)


def _intersect_lc(core, refs, hypers, mode):
    vl, vw = _vals(core, refs)
    (side,) = hypers
    if side not in (0, 1):
        raise DegenerateInput(f"side selector must be 0 or 1, got {side}")
    return (core.add_object(numeric.intersect_lc_num(vl, vw, side, core.tol)),)


def _dist(core, refs, hypers, mode):
    va, vb = _vals(core, refs)
    d = numeric.distance(va, vb)
    if d <= core.tol.eps_exact * core.tol.scale:
        raise DegenerateInput("distance of coinciding points")
    return (core.add_object(RatioNum(d)),)


def _angle_compute(core, refs, hypers, mode):
    """Fresh angle defined as a rational linear combination:
    ``a <- angle_compute c x1 q1 x2 q2 ...`` gives a = c + sum qi*xi."""
    const, coefs = hypers[0], hypers[1:]
    value = (float(const)
             + math.fsum(float(q) * core.value_of(r).value
                         for q, r in zip(coefs, refs))) % 1.0
    if value >= 1.0:  # tiny negatives wrap to exactly 1.0 in float mod
        value = 0.0
    alpha = core.add_object(AngleNum(value))
    combo = [(Fraction(1), alpha)] + [(-q, r) for q, r in zip(coefs, refs)]
    core.angle_postulate(combo, const)
    return (alpha,)


# ---------------------------------------------------------------------------
# exact predicates

def _lies_on(fact_kind):
    def fn(core, refs, hypers, mode):
        # memo hits are handled by the engine; reaching here means unknown
        if mode is Mode.CHECK:
            raise ToolFailure(UNKNOWN_FACT, "lies_on",
                              "incidence not in the knowledge database")
        p, carrier = _vals(core, refs)
        if not numeric.check_exact((fact_kind, p, carrier), core.tol):
            raise ToolFailure(NUMERIC_MISFIT, "lies_on",
                              "point does not lie on the carrier")
        return ()
    return fn


def _eq_angle(core, refs, hypers, mode):
    a, b = refs
    combo = [(1, a), (-1, b)]
    if core.angle_query(combo, 0):
        return ()
    if mode is Mode.CHECK:
        raise ToolFailure(UNKNOWN_FACT, "eq_angle",
                          "angle equality not derivable")
    core.angle_postulate(combo, 0)
    return ()


def _eq_ratio2(core, refs, hypers, mode):
    x, y = refs
    combo = [(1, x), (-1, y)]
    if core.ratio_query(combo, 1):
        return ()
    if mode is Mode.CHECK:
        raise ToolFailure(UNKNOWN_FACT, "eq_ratio",
                          "ratio equality not derivable")
    core.ratio_postulate(combo, 1)
    return ()


def _eq_ratio4(core, refs, hypers, mode):
    x, y, z, w = refs
    combo = [(1, x), (-1, y), (-1, z), (1, w)]
    if core.ratio_query(combo, 1):
        return ()
    if mode is Mode.CHECK:
        raise ToolFailure(UNKNOWN_FACT, "eq_ratio",
                          "ratio proportion not derivable")
    core.ratio_postulate(combo, 1)
    return ()


# ---------------------------------------------------------------------------
# coexact predicates (margin checks, both modes alike)

def _coexact(name, fact_builder):
    def fn(core, refs, hypers, mode):
        fact = fact_builder(*_vals(core, refs))
        if not numeric.check_margin(fact, core.tol):
            raise ToolFailure(NUMERIC_MISFIT, name,
                              "coexact margin not satisfied")
        return ()
    return fn


_not_eq = _coexact("not_eq", lambda p, q: ("not_eq", p, q))
_not_on = _coexact("not_on", lambda p, c: ("not_on", p, c))
_not_collinear = _coexact("not_collinear",
                          lambda a, b, c: ("not_collinear", a, b, c))


# ---------------------------------------------------------------------------
# registry assembly

def _primitive_defs():
    P = Primitive
    return [
        P("free_point", (), ("f", "f"), ("P",), _free_point),
        P("prim__line", ("P", "P"), (), ("L",), _line, symmetric=True),
        P("prim__circumcircle", ("P", "P", "P"), (), ("C",), _circumcircle,
          symmetric=True),
        P("prim__foot", ("P", "L"), (), ("P",), _foot),
        P("prim__m_point_on", ("C",), ("f",), ("P",), _m_point_on),
        P("prim__direction_of", ("L",), (), ("A",), _direction_of),
        P("prim__midpoint", ("P", "P"), (), ("P",), _midpoint, symmetric=True),
        P("prim__intersect_ll", ("L", "L"), (), ("P",), _intersect_ll,
          symmetric=True),
        P("prim__intersect_lc", ("L", "C"), ("i",), ("P",), _intersect_lc),
        P("dist", ("P", "P"), (), ("D",), _dist, symmetric=True),
        P("angle_compute", None, None, ("A",), _angle_compute, variadic=True),
        P("lies_on", ("P", "L"), (), (), _lies_on("lies_on_line")),
        P("lies_on", ("P", "C"), (), (), _lies_on("lies_on_circle")),
        P("eq_angle", ("A", "A"), (), (), _eq_angle, memoized=False),
        P("eq_ratio", ("D", "D"), (), (), _eq_ratio2, memoized=False),
        P("eq_ratio", ("D", "D", "D", "D"), (), (), _eq_ratio4,
          memoized=False),
        P("not_eq", ("P", "P"), (), (), _not_eq, memoized=False),
        P("not_on", ("P", "L"), (), (), _not_on, memoized=False),
        P("not_on", ("P", "C"), (), (), _not_on, memoized=False),
        P("not_collinear", ("P", "P", "P"), (), (), _not_collinear,
          memoized=False),
    ]


def primitives_registry() -> Registry:
    reg = Registry()
    for prim in _primitive_defs():
        reg.add(prim)
    return reg


def base_toolfile_text() -> str:
    return (resources.files("geoprove") / BASE_TOOLS_RESOURCE).read_text()


_BASE_CACHE = {}


def base_registry(fresh=False) -> Registry:
    """Primitives plus the shipped base tool library.

    The result is cached (lemma proof checks run once per process); callers
    that mutate the registry should ``copy()`` it first or pass
    ``fresh=True``.
    """
    if fresh or "base" not in _BASE_CACHE:
        reg = primitives_registry()
        resolve_ast(parse_toolfile(base_toolfile_text()), reg)
        if fresh:
            return reg
        _BASE_CACHE["base"] = reg
    return _BASE_CACHE["base"]
