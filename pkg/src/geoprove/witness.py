"""Witness synthesis for registration-time lemma proof checks.

A lemma is proof-checked against concrete numerical inputs.  Plain random
sampling cannot satisfy exact-predicate assumptions (an angle equality
holds on a measure-zero set), so we trace the assumption steps purely
numerically, collect one smooth residual per exact predicate, and project
a random seed onto the constraint manifold with least squares.  Seeds are
retried when the projection lands on a degenerate or margin-violating
configuration.
"""

from __future__ import annotations

import math
import zlib
from fractions import Fraction

import numpy as np
from scipy.optimize import least_squares

from . import numeric
from .dsl import OBJECT_KINDS
from .errors import DegenerateInput, GeoproveError
from .numeric import (AngleNum, CircleVal, LineVal, PointVal, RatioNum,
                      Tolerances)
from .toolset import CompositeTool, Primitive

MAX_SEEDS = 20
_N_PARAMS = {"P": 2, "L": 2, "C": 3, "A": 1, "D": 1}


def _value_from_params(kind, a):
    if kind == "P":
        return PointVal(a[0], a[1])
    if kind == "L":
        nx, ny = math.cos(a[0]), math.sin(a[0])
        c = a[1]
        if nx < 0 or (nx == 0 and ny < 0):
            nx, ny, c = -nx, -ny, -c
        return LineVal(nx, ny, c)
    if kind == "C":
        return CircleVal(a[0], a[1], math.exp(min(a[2], 30.0)))
    if kind == "A":
        v = a[0] % 1.0
        return AngleNum(v if v < 1.0 else 0.0)
    return RatioNum(math.exp(min(max(a[0], -30.0), 30.0)))


def _sample_hyper(kind, rng):
    if kind == "i":
        return int(rng.integers(0, 2))
    if kind == "f":
        return float(rng.uniform(0.0, 2.0 * math.pi))
    return Fraction(int(rng.integers(1, 4)))


class _Trace:
    """Numeric-only execution of resolved steps, collecting one residual
    per exact predicate encountered."""

    def __init__(self, tol: Tolerances):
        self.tol = tol
        self.residuals = []

    def run_tool(self, tool, obj_vals, hypers):
        if isinstance(tool, Primitive):
            return self._primitive(tool, list(obj_vals), list(hypers))
        env = [None] * tool.n_slots
        oi = hi = 0
        for slot, (_, kind) in enumerate(tool.input_slots):
            if kind in OBJECT_KINDS:
                env[slot] = obj_vals[oi]
                oi += 1
            else:
                env[slot] = hypers[hi]
                hi += 1
        end = tool.proof_index if tool.proof_index is not None \
            else len(tool.steps)
        for idx in range(end):
            self.exec_step(env, tool.steps[idx])
        return tuple(env[s] for s in tool.out_slots)

    def exec_step(self, env, step):
        objs = [env[i] for i in step.obj_args]
        hypers = [env[val] if tag == "slot" else val
                  for tag, val in step.hyper_args]
        outs = self.run_tool(step.tool, objs, hypers)
        for slot, val in zip(step.out_slots, outs):
            if slot >= 0:
                env[slot] = val

    def _primitive(self, tool, vals, hypers):
        name = tool.name
        tol = self.tol
        if name == "free_point":
            return (PointVal(hypers[0], hypers[1]),)
        if name == "prim__line":
            return (numeric.line_through(vals[0], vals[1], tol),)
        if name == "prim__circumcircle":
            return (numeric.circumcircle_num(vals[0], vals[1], vals[2], tol),)
        if name == "prim__foot":
            return (numeric.foot_num(vals[0], vals[1]),)
        if name == "prim__m_point_on":
            return (numeric.point_on_circle(hypers[0], vals[0]),)
        if name == "prim__direction_of":
            return (numeric.direction_num(vals[0]),)
        if name == "prim__midpoint":
            return (numeric.midpoint_num(vals[0], vals[1]),)
        if name == "prim__intersect_ll":
            return (numeric.intersect_ll_num(vals[0], vals[1], tol),)
        if name == "prim__intersect_lc":
            return (numeric.intersect_lc_num(vals[0], vals[1], hypers[0], tol),)
        if name == "dist":
            d = numeric.distance(vals[0], vals[1])
            if d <= tol.eps_exact:
                raise DegenerateInput("coinciding points")
            return (RatioNum(d),)
        if name == "angle_compute":
            value = (float(hypers[0]) + math.fsum(
                float(q) * v.value for q, v in zip(hypers[1:], vals))) % 1.0
            return (AngleNum(value % 1.0 if value < 1.0 else 0.0),)
        if name == "lies_on":
            p, carrier = vals
            if isinstance(carrier, LineVal):
                self.residuals.append(
                    carrier.nx * p.x + carrier.ny * p.y - carrier.c)
            else:
                center = PointVal(carrier.cx, carrier.cy)
                self.residuals.append(numeric.distance(p, center) - carrier.r)
            return ()
        if name == "eq_angle":
            a, b = vals
            self.residuals.append(math.sin(math.pi * ((a.value - b.value) % 1.0)))
            return ()
        if name == "eq_ratio":
            logs = [math.log(v.value) for v in vals]
            if len(logs) == 2:
                self.residuals.append(logs[0] - logs[1])
            else:
                self.residuals.append(logs[0] - logs[1] - logs[2] + logs[3])
            return ()
        if name in ("not_eq", "not_on", "not_collinear"):
            return ()  # margins are enforced by the real proof run
        raise GeoproveError(f"no numeric trace rule for primitive {name!r}")


def _trace_assumptions(lemma: CompositeTool, witness, tol):
    tr = _Trace(tol)
    env = list(witness)
    env += [None] * (lemma.n_slots - len(env))
    for idx in range(lemma.then_index):
        tr.exec_step(env, lemma.steps[idx])
    return tr.residuals


def synthesize_witness(lemma: CompositeTool, proof_check_fn):
    """Find input values for ``lemma`` that satisfy its assumptions, then
    run the proof check on them.

    Returns ``(witness, report)``; witness is None when no seed produced a
    configuration the assumptions accept.  A witness whose proof or
    implications stage fails is returned as-is: that is a genuine proof
    failure, not a sampling artefact.
    """
    tol = Tolerances()
    slots = lemma.input_slots
    base_seed = zlib.crc32(lemma.name.encode())
    last_report = None
    for attempt in range(MAX_SEEDS):
        rng = np.random.default_rng(base_seed + 7919 * attempt)
        spans = []
        params0 = []
        hyper_fixed = {}
        for i, (_, kind) in enumerate(slots):
            if kind in OBJECT_KINDS:
                lo = len(params0)
                if kind == "P":
                    params0 += list(rng.uniform(-10, 10, 2))
                elif kind == "L":
                    params0 += [rng.uniform(0, math.pi), rng.uniform(-10, 10)]
                elif kind == "C":
                    params0 += list(rng.uniform(-10, 10, 2)) + [rng.uniform(0, 1.5)]
                elif kind == "A":
                    params0 += [rng.uniform(0, 1)]
                else:
                    params0 += [rng.uniform(-1.5, 1.5)]
                spans.append((i, kind, lo, len(params0)))
            else:
                hyper_fixed[i] = _sample_hyper(kind, rng)
        params0 = np.array(params0, dtype=float)

        def build(params):
            witness = [None] * len(slots)
            for i, kind, lo, hi in spans:
                witness[i] = _value_from_params(kind, params[lo:hi])
            for i, v in hyper_fixed.items():
                witness[i] = v
            return witness

        def residual(params):
            try:
                return _trace_assumptions(lemma, build(params), tol)
            except (DegenerateInput, ValueError, ZeroDivisionError,
                    OverflowError):
                return None

        r0 = residual(params0)
        if r0 is None:
            continue
        n = len(r0)
        params = params0
        if n and params0.size and any(abs(r) > 1e-12 for r in r0):
            def fn(p):
                r = residual(p)
                if r is None:
                    return np.full(n, 1e3)
                return np.asarray(r)
            sol = least_squares(fn, params0, xtol=1e-15, ftol=1e-15,
                                gtol=1e-15, max_nfev=4000)
            params = sol.x
        try:
            witness = build(params)
        except DegenerateInput:
            continue
        report = proof_check_fn(lemma, witness)
        last_report = report
        if report.ok or report.stage != "assumptions":
            return witness, report
    return None, last_report
