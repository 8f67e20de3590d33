"""Proof scripts (``.gls``): a flat sequence of construction/reasoning
steps over a single core, plus goal lines.

Every step runs in check mode -- that is the user-facing contract of the
whole system; postulation happens only inside axiom implications.  Goal
lines are marked ``?<-`` and pass iff the tool they name succeeds in check
mode.  Failures are transactional: a failing step leaves the session
exactly as it was, and the failure report (step index, tool, reason,
labels) is the primary diagnostic artifact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import CoreState, Ref
from .dsl import Hyperliteral, RawStep, parse_step_line
from .errors import (DuplicateLabel, GeoproveError, OutOfRange,
                     ToolFailure, ToolFileSyntaxError, UnknownLabelKind,
                     UnresolvedLabel)
from .numeric import Tolerances
from .toolset import Mode, Registry, run_tool

__all__ = [
    "ScriptStep", "Script", "parse_script", "serialize_script",
    "FailureReport", "ScriptError", "StepResult", "SessionState",
    "execute_script", "check_goal", "FactRecord", "enumerate_facts",
]


@dataclass(frozen=True)
class ScriptStep:
    raw: RawStep
    goal: bool = False

    @property
    def line(self):
        return self.raw.line

    def render(self):
        return ("?" if self.goal else "") + self.raw.render()


@dataclass(frozen=True)
class Script:
    steps: tuple

    def render(self):
        return serialize_script(self)


def parse_script(text: str) -> Script:
    steps = []
    bound = set()
    for lineno, raw_line in enumerate(text.splitlines(), 1):
        line = raw_line.rstrip("\r\n")
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        goal = stripped.startswith("?")
        if goal:
            stripped = stripped[1:].lstrip()
            if not stripped.startswith("<-"):
                raise ToolFileSyntaxError("goal lines start with '?<-'", lineno)
        raw = parse_step_line(stripped, lineno)
        if goal and raw.outputs:
            raise ToolFileSyntaxError("goal lines cannot bind outputs", lineno)
        for arg in raw.args:
            if isinstance(arg, Hyperliteral):
                continue
            if arg not in bound:
                raise UnresolvedLabel(f"unknown label {arg!r}", lineno)
        for out in raw.outputs:
            if out == "_":
                continue
            if out in bound:
                raise DuplicateLabel(f"duplicate label {out!r}", lineno)
            bound.add(out)
        steps.append(ScriptStep(raw, goal))
    return Script(tuple(steps))


def serialize_script(script: Script) -> str:
    return "".join(step.render() + "\n" for step in script.steps)


def parse_session_line(text: str) -> ScriptStep:
    """Parse one interactive step line against an existing session; label
    resolution happens at apply time, not here."""
    stripped = text.strip()
    goal = stripped.startswith("?")
    if goal:
        stripped = stripped[1:].lstrip()
    raw = parse_step_line(stripped, 0)
    if goal and raw.outputs:
        raise ToolFileSyntaxError("goal lines cannot bind outputs")
    return ScriptStep(raw, goal)


# ---------------------------------------------------------------------------
# failure reports

@dataclass
class FailureReport:
    step: int              # 0-based index into the script
    tool: str
    reason: str
    labels: list
    message: str = ""
    line: int = 0

    def to_json(self):
        return {"step": self.step, "tool": self.tool, "reason": self.reason,
                "labels": list(self.labels), "message": self.message,
                "line": self.line}

    def __str__(self):
        labels = " ".join(self.labels)
        return (f"step {self.step} (line {self.line}): {self.tool} {labels} "
                f"failed: {self.reason}"
                + (f" -- {self.message}" if self.message else ""))


class ScriptError(GeoproveError):
    def __init__(self, report: FailureReport):
        self.report = report
        super().__init__(str(report))


@dataclass
class StepResult:
    index: int
    step: ScriptStep
    outputs: list          # (label, Ref) pairs actually bound
    merges: list           # (kept, gone) Ref pairs this step caused
    new_facts: list        # FactRecords first checkable after this step


# ---------------------------------------------------------------------------
# fact enumeration

@dataclass(frozen=True)
class FactRecord:
    kind: str      # lies_on / eq_angle / eq_dist / eq_ratio / *_eq
    refs: tuple    # involved canonical refs (eq_dist: point endpoints)
    step: object = field(default=None, compare=False)   # provenance


def _equality_classes(variables, proves_equal):
    classes = []
    for v in sorted(variables):
        for cls in classes:
            if proves_equal(cls[0], v):
                cls.append(v)
                break
        else:
            classes.append([v])
    return [tuple(cls) for cls in classes]


def enumerate_facts(core: CoreState):
    """All facts currently checkable in check mode, deterministically
    ordered; provenance is filled in by the session."""
    facts = []
    for point, carrier in core.incidence_entries():
        facts.append(FactRecord("lies_on", (point, carrier)))
    avars = {core.find(v) for v in core.angles.variables()}
    for cls in _equality_classes(avars, core.angles.proves_equal):
        if len(cls) > 1:
            facts.append(FactRecord("eq_angle", cls))
    # ratio objects coming from dist() carry their endpoints for display;
    # one canonical ref can own several endpoint pairs after merges
    dist_ends = {}
    for (uid, refs, _), outs in core.table.items():
        if uid == "dist:PP":
            d = core.find(outs[0])
            dist_ends.setdefault(d, set()).add(
                tuple(core.find(r) for r in refs))
    dvars = {core.find(v) for v in core.ratios.variables()} | set(dist_ends)
    for cls in _equality_classes(dvars, core.ratios.proves_equal):
        ends = sorted(pair for v in cls for pair in dist_ends.get(v, ()))
        if len(ends) > 1:
            facts.append(FactRecord("eq_dist", sum(ends, ())))
        elif len(cls) > 1:
            facts.append(FactRecord("eq_ratio", cls))
    eq_kind = {"P": "point_eq", "L": "line_eq", "C": "circle_eq",
               "A": "angle_eq", "D": "ratio_eq"}
    for rep, members in sorted(core.equivalence_classes().items()):
        if rep.kind in ("P", "L", "C"):
            facts.append(FactRecord(eq_kind[rep.kind], tuple(sorted(members))))
    facts.sort(key=lambda f: (f.kind, tuple((r.id, r.kind) for r in f.refs)))
    return facts


# ---------------------------------------------------------------------------
# sessions

class SessionState:
    """One interactive proving session: a core, the label bindings, and the
    journal of applied steps (replayed for undo and point dragging)."""

    def __init__(self, registry: Registry, tol: Tolerances | None = None):
        self.registry = registry
        self.core = CoreState(tol)
        self.bindings = {}
        self.journal = []
        self.fact_first_step = {}
        self.trace_log = []

    # -- resolution against runtime bindings ---------------------------

    def _resolve_args(self, raw: RawStep):
        objs, hypers, labels = [], [], []
        for arg in raw.args:
            if isinstance(arg, Hyperliteral):
                hypers.append(arg.value)
            else:
                ref = self.bindings.get(arg)
                if ref is None:
                    raise UnresolvedLabel(f"unknown label {arg!r}", raw.line)
                objs.append(ref)
                labels.append(arg)
        kinds = tuple(self.core.find(r).kind for r in objs)
        tool = self.registry.lookup(raw.tool, kinds, line=raw.line)
        return tool, objs, hypers, labels

    def _report(self, index, step, exc):
        labels = [a for a in step.raw.args if not isinstance(a, Hyperliteral)]
        if isinstance(exc, ToolFailure):
            return FailureReport(index, step.raw.tool, exc.reason, labels,
                                 str(exc), step.line)
        return FailureReport(index, step.raw.tool, type(exc).__name__,
                             labels, str(exc), step.line)

    def apply(self, step: ScriptStep, index=None) -> StepResult:
        """Run one step in check mode; transactional on failure."""
        if index is None:
            index = len(self.journal)
        snapshot = self.core.clone()
        old_bindings = dict(self.bindings)
        self.core.drain_merge_events()
        try:
            tool, objs, hypers, _ = self._resolve_args(step.raw)
            outs = run_tool(self.core, tool, objs, hypers, Mode.CHECK)
            bound = []
            if not step.goal:
                if len(step.raw.outputs) not in (0, len(outs)):
                    raise ToolFileSyntaxError(
                        f"{step.raw.tool} returns {len(outs)} objects, step "
                        f"binds {len(step.raw.outputs)}", step.line)
                for label, ref in zip(step.raw.outputs, outs):
                    if label == "_":
                        continue
                    if label in old_bindings:
                        raise DuplicateLabel(
                            f"label {label!r} already bound", step.line)
                    self.bindings[label] = ref
                    bound.append((label, ref))
        except GeoproveError as exc:
            self.core = snapshot
            self.bindings = old_bindings
            raise ScriptError(self._report(index, step, exc)) from exc
        merges = self.core.drain_merge_events()
        new_facts = self._absorb_facts(index)
        self.journal.append(step)
        result = StepResult(index, step, bound, merges, new_facts)
        self.trace_log.append(result)
        return result

    def _absorb_facts(self, index):
        new = []
        for fact in enumerate_facts(self.core):
            key = (fact.kind, fact.refs)
            if key not in self.fact_first_step:
                self.fact_first_step[key] = index
                new.append(FactRecord(fact.kind, fact.refs, index))
        return new

    def facts(self):
        """Current fact records with provenance."""
        out = []
        for fact in enumerate_facts(self.core):
            step = self.fact_first_step.get((fact.kind, fact.refs))
            out.append(FactRecord(fact.kind, fact.refs, step))
        return out

    def labels_of(self, ref: Ref):
        canon = self.core.find(ref)
        return sorted(label for label, r in self.bindings.items()
                      if self.core.find(r) == canon)

    def display_name(self, ref: Ref):
        """Label for a ref, preferring one bound to it directly (so both
        sides of a merge keep their own names)."""
        exact = sorted(l for l, r in self.bindings.items() if r == ref)
        if exact:
            return exact[0]
        labels = self.labels_of(ref)
        return labels[0] if labels else f"{ref.kind}#{ref.id}"

    def scene(self):
        """Canonical objects with values and display labels."""
        out = []
        for ref, value in self.core.objects():
            out.append({"id": ref.id, "kind": ref.kind,
                        "labels": self.labels_of(ref),
                        "value": _value_payload(value)})
        return out

    # -- journal-replay operations --------------------------------------

    def replay(self, steps) -> "SessionState":
        fresh = SessionState(self.registry)
        for i, step in enumerate(steps):
            fresh.apply(step, i)
        return fresh

    def undo(self, k: int) -> "SessionState":
        """State equal to replaying all but the last ``k`` steps."""
        if not 0 <= k <= len(self.journal):
            raise OutOfRange(f"cannot undo {k} of {len(self.journal)} steps")
        return self.replay(self.journal[:len(self.journal) - k])

    def move_free_point(self, label, x, y) -> "SessionState":
        """Re-run the whole journal with one free point moved; fails (and
        leaves self untouched) if any step's numeric check breaks."""
        target = None
        for i, step in enumerate(self.journal):
            if step.raw.tool == "free_point" and label in step.raw.outputs:
                target = i
                break
        if target is None:
            raise UnknownLabelKind(f"{label!r} is not a free point")
        moved = ScriptStep(RawStep(
            self.journal[target].raw.outputs, "free_point",
            (Hyperliteral("f", float(x)), Hyperliteral("f", float(y))),
            self.journal[target].raw.line))
        steps = list(self.journal)
        steps[target] = moved
        return self.replay(steps)

    def export_script(self) -> str:
        return serialize_script(Script(tuple(self.journal)))


def execute_script(script: Script, registry: Registry,
                   tol: Tolerances | None = None) -> SessionState:
    """Run a whole script in check mode; raises ScriptError (with report)
    at the first failing step or goal."""
    session = SessionState(registry, tol)
    for i, step in enumerate(script.steps):
        session.apply(step, i)
    return session


def check_goal(session: SessionState, goal_line: str):
    """Evaluate one goal against the session; returns (ok, report-or-None).
    The journal is not touched; memoization effects of a successful check
    stay in the core.  Accepts '?<- tool args', '<- tool args' or bare
    'tool args'."""
    text = goal_line.strip().removeprefix("?").lstrip()
    if not text.startswith("<-"):
        text = "<- " + text
    raw = parse_step_line(text, 0)
    step = ScriptStep(raw, goal=True)
    snapshot = session.core.clone()
    try:
        tool, objs, hypers, _ = session._resolve_args(raw)
        run_tool(session.core, tool, objs, hypers, Mode.CHECK)
        return True, None
    except GeoproveError as exc:
        session.core = snapshot
        return False, session._report(len(session.journal), step, exc)


def _value_payload(value):
    from .numeric import AngleNum, CircleVal, LineVal, PointVal, RatioNum
    if isinstance(value, PointVal):
        return {"x": value.x, "y": value.y}
    if isinstance(value, LineVal):
        return {"nx": value.nx, "ny": value.ny, "c": value.c}
    if isinstance(value, CircleVal):
        return {"cx": value.cx, "cy": value.cy, "r": value.r}
    if isinstance(value, (AngleNum, RatioNum)):
        return {"value": value.value}
    return {}
