"""Tools: the uniform abstraction over constructions, predicates and
inference rules, plus the engine that executes them against a core.

A tool takes geometric references (and possibly numeric hyperparameters),
may add objects and knowledge to the core, and returns references -- or
fails.  Every tool can run in check mode or postulate mode; check mode
additionally fails whenever a required fact is not already known.

Composite tools come in three flavours:

* macro -- steps run in the caller's mode;
* axiom -- steps after ``THEN`` (the implications) always run in postulate
  mode, even under check;
* lemma -- an axiom with a ``PROOF`` section, validated by a five-step
  proof check in a fresh core (done once, at registration).

Memoized tools consult the core's lookup table first and never fail on a
hit, returning the stored references.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

from .core import CoreState, Ref
from .dsl import (HYPER_KINDS, OBJECT_KINDS, Hyperliteral, RawDef, RawStep,
                  ToolFileAST)
from .errors import (ArityMismatch, DEGENERATE, DegenerateInput,
                     DuplicateSignature, GeoproveError, KindMismatch,
                     LemmaProofFailed, NUMERIC_MISFIT, NumericMismatch,
                     OutputKindMismatch, OverloadAmbiguity, ToolFailure,
                     UnresolvedLabel, UnresolvedToolName)

__all__ = [
    "Mode", "Primitive", "CompositeTool", "ResolvedStep", "Registry",
    "run_tool", "proof_check", "ProofCheckReport", "register_tool",
    "resolve_ast", "inline_macro",
]


class Mode(enum.Enum):
    CHECK = "check"
    POSTULATE = "postulate"


# ---------------------------------------------------------------------------
# tool flavours

@dataclass
class Primitive:
    """Built-in tool.  ``fn(core, refs, hypers, mode) -> tuple[Ref]``.

    ``symmetric`` primitives sort their object inputs for the memo key, so
    e.g. the line through (A, B) and through (B, A) share one table entry.
    A ``variadic`` primitive accepts any number of angle refs interleaved
    with fraction hyperparameters (the linear-combination tool).
    """

    name: str
    obj_kinds: tuple
    hyper_kinds: tuple
    out_kinds: tuple
    fn: object
    memoized: bool = True
    symmetric: bool = False
    variadic: bool = False

    @property
    def uid(self):
        kinds = "*" if self.variadic else "".join(self.obj_kinds)
        return f"{self.name}:{kinds}"


@dataclass
class ResolvedStep:
    tool: object
    obj_args: tuple        # env slot indices, in object-argument order
    hyper_args: tuple      # ("slot", idx) / ("lit", value), in hyper order
    out_slots: tuple       # env slot per output; -1 discards
    raw: RawStep


@dataclass
class CompositeTool:
    name: str
    input_slots: tuple     # (label, kind) in declared order; kinds PLCAD+ifq
    out_kinds: tuple
    out_slots: tuple
    steps: tuple
    then_index: object     # int or None
    proof_index: object
    n_slots: int
    raw: RawDef
    proof_ok: bool = False
    memoized: bool = field(default=False, repr=False)
    symmetric: bool = field(default=False, repr=False)
    variadic: bool = field(default=False, repr=False)

    @property
    def obj_kinds(self):
        return tuple(k for _, k in self.input_slots if k in OBJECT_KINDS)

    @property
    def hyper_kinds(self):
        return tuple(k for _, k in self.input_slots if k in HYPER_KINDS)

    @property
    def uid(self):
        return f"{self.name}:{''.join(self.obj_kinds)}"

    @property
    def flavour(self):
        if self.proof_index is not None:
            return "lemma"
        if self.then_index is not None:
            return "axiom"
        return "macro"


# ---------------------------------------------------------------------------
# registry

class Registry:
    """Tool lookup by name and object-input kinds; overloading is allowed
    as long as the input kinds differ."""

    def __init__(self):
        self._tools = {}  # name -> list of tools

    def overloads(self, name):
        return list(self._tools.get(name, ()))

    def names(self):
        return sorted(self._tools)

    def all_tools(self):
        for name in sorted(self._tools):
            yield from self._tools[name]

    def copy(self):
        dup = Registry()
        dup._tools = {k: list(v) for k, v in self._tools.items()}
        return dup

    def add(self, tool, shadow=False):
        bucket = self._tools.setdefault(tool.name, [])
        for i, existing in enumerate(bucket):
            clash = (existing.variadic or tool.variadic
                     or existing.obj_kinds == tool.obj_kinds)
            if not clash:
                continue
            replaceable = (shadow and isinstance(existing, CompositeTool)
                           and not tool.variadic
                           and existing.obj_kinds == tool.obj_kinds)
            if replaceable:
                bucket[i] = tool
                return
            raise DuplicateSignature(
                f"tool {tool.name}({','.join(tool.obj_kinds or '*')}) "
                "already registered")
        bucket.append(tool)

    def lookup(self, name, obj_kinds, line=None):
        bucket = self._tools.get(name)
        if not bucket:
            raise UnresolvedToolName(f"unknown tool {name!r}", line)
        kinds = tuple(obj_kinds)
        matches = [t for t in bucket if not t.variadic and t.obj_kinds == kinds]
        matches += [t for t in bucket
                    if t.variadic and all(k == "A" for k in kinds)]
        if not matches:
            have = ", ".join(f"({','.join(t.obj_kinds)})"
                             for t in bucket if not t.variadic)
            raise UnresolvedToolName(
                f"no overload {name}({','.join(kinds)}); have {have}", line)
        if len(matches) > 1:
            raise OverloadAmbiguity(
                f"ambiguous overloads for {name}({','.join(kinds)})", line)
        return matches[0]


# ---------------------------------------------------------------------------
# execution

def _check_input_kinds(tool, refs):
    if tool.variadic:
        bad = [r for r in refs if r.kind != "A"]
        if bad:
            raise KindMismatch(f"{tool.name} takes angle refs only")
        return
    kinds = tuple(r.kind for r in refs)
    if kinds != tuple(tool.obj_kinds):
        raise KindMismatch(
            f"{tool.name} expects ({','.join(tool.obj_kinds)}), "
            f"got ({','.join(kinds)})")


def _coerce_hyper(value, kind, tool_name):
    if kind == "i":
        if isinstance(value, int) and not isinstance(value, bool):
            return value
    elif kind == "f":
        if isinstance(value, float):
            return value
        if isinstance(value, int):
            return float(value)
    elif kind == "q":
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int):
            return Fraction(value)
    raise ArityMismatch(
        f"{tool_name}: hyperparameter {value!r} does not fit slot type {kind!r}")


def _check_hypers(tool, hypers):
    if tool.variadic:
        return tuple(_coerce_hyper(v, "q", tool.name) for v in hypers)
    expected = tool.hyper_kinds
    if len(hypers) != len(expected):
        raise ArityMismatch(
            f"{tool.name} takes {len(expected)} hyperparameters, "
            f"got {len(hypers)}")
    return tuple(_coerce_hyper(v, k, tool.name)
                 for v, k in zip(hypers, expected))


def run_tool(core: CoreState, tool, obj_refs, hypers=(), mode=Mode.CHECK):
    """Execute a tool against a core.  Returns the output refs; raises
    ToolFailure when the tool fails, other GeoproveErrors on misuse."""
    refs = tuple(core.find(r) for r in obj_refs)
    _check_input_kinds(tool, refs)
    hypers = _check_hypers(tool, hypers)
    if tool.variadic and len(hypers) != len(refs) + 1:
        raise ArityMismatch(
            f"{tool.name} wants a constant plus one coefficient per angle")
    key_refs = tuple(sorted(refs)) if tool.symmetric else refs
    if tool.memoized:
        hit = core.lookup_get(tool.uid, key_refs, hypers)
        if hit is not None:
            return hit
    if isinstance(tool, Primitive):
        try:
            outs = tuple(tool.fn(core, refs, hypers, mode))
        except DegenerateInput as e:
            raise ToolFailure(DEGENERATE, tool.name, str(e)) from e
        except NumericMismatch as e:
            raise ToolFailure(NUMERIC_MISFIT, tool.name, str(e)) from e
    else:
        outs = _run_composite(core, tool, refs, hypers, mode)
    outs = tuple(core.find(o) for o in outs)
    if tool.memoized:
        core.lookup_store(tool.uid, key_refs, hypers, outs)
        outs = tuple(core.find(o) for o in outs)
    return outs


def _bind_inputs(tool: CompositeTool, refs, hypers):
    env = [None] * tool.n_slots
    oi = hi = 0
    for slot, (_, kind) in enumerate(tool.input_slots):
        if kind in OBJECT_KINDS:
            env[slot] = refs[oi]
            oi += 1
        else:
            env[slot] = hypers[hi]
            hi += 1
    return env


def _exec_step(core, env, step: ResolvedStep, mode, owner, index):
    objs = tuple(env[i] for i in step.obj_args)
    hypers = tuple(env[val] if tag == "slot" else val
                   for tag, val in step.hyper_args)
    try:
        outs = run_tool(core, step.tool, objs, hypers, mode)
    except ToolFailure as f:
        raise f.at_step(owner, index) from None
    for slot, ref in zip(step.out_slots, outs):
        if slot >= 0:
            env[slot] = ref


def _run_composite(core, tool: CompositeTool, refs, hypers, mode):
    env = _bind_inputs(tool, refs, hypers)
    end = tool.proof_index if tool.proof_index is not None else len(tool.steps)
    for idx in range(end):
        step_mode = mode
        if tool.then_index is not None and idx >= tool.then_index:
            step_mode = Mode.POSTULATE
        _exec_step(core, env, tool.steps[idx], step_mode, tool.name, idx)
    return tuple(env[s] for s in tool.out_slots)


# ---------------------------------------------------------------------------
# lemma proof check

@dataclass
class ProofCheckReport:
    ok: bool
    stage: str = ""
    step: object = None
    reason: str = ""
    message: str = ""

    def __str__(self):
        if self.ok:
            return "proof check passed"
        return (f"proof check failed at {self.stage} step {self.step}: "
                f"{self.reason} ({self.message})")


def proof_check(lemma: CompositeTool, witness_values) -> ProofCheckReport:
    """Run the five-step proof check of a lemma:

    1. open a fresh logical core,
    2. add the witness numerical values as the initial objects,
    3. run the assumptions in postulate mode,
    4. run the proof in check mode,
    5. run the implications in check mode.
    """
    if lemma.proof_index is None:
        raise ValueError(f"{lemma.name} has no proof section")
    core = CoreState()
    env = [None] * lemma.n_slots
    vi = 0
    for slot, (_, kind) in enumerate(lemma.input_slots):
        value = witness_values[vi]
        vi += 1
        if kind in OBJECT_KINDS:
            env[slot] = core.add_object(value, kind=kind, seed=(kind == "P"))
        else:
            env[slot] = value
    then, proof = lemma.then_index, lemma.proof_index
    stages = [
        ("assumptions", range(0, then), Mode.POSTULATE),
        ("proof", range(proof, len(lemma.steps)), Mode.CHECK),
        ("implications", range(then, proof), Mode.CHECK),
    ]
    for stage, indices, mode in stages:
        for idx in indices:
            try:
                _exec_step(core, env, lemma.steps[idx], mode, lemma.name, idx)
            except ToolFailure as f:
                return ProofCheckReport(False, stage, idx, f.reason, str(f))
            except GeoproveError as e:
                return ProofCheckReport(False, stage, idx,
                                        type(e).__name__, str(e))
    return ProofCheckReport(True)


def register_tool(registry: Registry, tool, shadow=False):
    """Add a tool to a registry.  Lemmas are proof-checked right here,
    against a synthesized witness configuration; a failing proof refuses
    registration."""
    if isinstance(tool, CompositeTool) and tool.flavour == "lemma" \
            and not tool.proof_ok:
        from .witness import synthesize_witness  # deferred: scipy import
        witness, report = synthesize_witness(tool, proof_check)
        if witness is None:
            raise LemmaProofFailed(
                f"lemma {tool.name}: could not find a witness configuration "
                f"satisfying the assumptions ({report})", report)
        if not report.ok:
            raise LemmaProofFailed(f"lemma {tool.name}: {report}", report)
        tool.proof_ok = True
    registry.add(tool, shadow=shadow)


# ---------------------------------------------------------------------------
# resolution of parsed definitions

def _resolve_steps(raw_steps, slots, registry, owner_name,
                   implication_range=None):
    """Resolve raw steps against label slots; returns (resolved, n_slots).

    ``slots``: label -> (slot index, kind); mutated as outputs bind.
    ``implication_range``: (lo, hi) step indices whose outputs must not be
    referenced from later proof-section steps."""
    resolved = []
    n_slots = len(slots)
    slot_birth = {}  # slot index -> step index that bound it (inputs: -1)
    for label, (idx, kind) in slots.items():
        slot_birth[idx] = -1
    for sidx, step in enumerate(raw_steps):
        obj_args, obj_kinds, hyper_args = [], [], []
        for arg in step.args:
            if isinstance(arg, Hyperliteral):
                hyper_args.append(("lit", arg))
                continue
            if arg not in slots:
                raise UnresolvedLabel(f"unknown label {arg!r}", step.line)
            slot, kind = slots[arg]
            if implication_range is not None:
                lo, hi = implication_range
                if sidx >= hi and lo <= slot_birth.get(slot, -1) < hi:
                    raise UnresolvedLabel(
                        f"label {arg!r} is bound in the implications and is "
                        "not visible to the proof section", step.line)
            if kind in OBJECT_KINDS:
                obj_args.append(slot)
                obj_kinds.append(kind)
            else:
                hyper_args.append(("slot", slot))
        tool = registry.lookup(step.tool, obj_kinds, line=step.line)
        _validate_static_hypers(tool, hyper_args, len(obj_args), step)
        if len(step.outputs) != len(tool.out_kinds):
            raise ArityMismatch(
                f"{tool.name} returns {len(tool.out_kinds)} objects, step "
                f"binds {len(step.outputs)}", step.line)
        out_slots = []
        for label, kind in zip(step.outputs, tool.out_kinds):
            if label == "_":
                out_slots.append(-1)
                continue
            slots[label] = (n_slots, kind)
            slot_birth[n_slots] = sidx
            out_slots.append(n_slots)
            n_slots += 1
        resolved.append(ResolvedStep(tool, tuple(obj_args),
                                     tuple(_coerced_hyper_args(tool, hyper_args)),
                                     tuple(out_slots), step))
    return resolved, n_slots


def _validate_static_hypers(tool, hyper_args, n_obj, step):
    if tool.variadic:
        if len(hyper_args) != n_obj + 1:
            raise ArityMismatch(
                f"{tool.name} wants a constant plus one coefficient per "
                f"angle, got {len(hyper_args)} hyperparameters for {n_obj} "
                "angles", step.line)
        return
    if len(hyper_args) != len(tool.hyper_kinds):
        raise ArityMismatch(
            f"{tool.name} takes {len(tool.hyper_kinds)} hyperparameters, "
            f"got {len(hyper_args)}", step.line)


def _coerced_hyper_args(tool, hyper_args):
    kinds = (["q"] * len(hyper_args)) if tool.variadic else tool.hyper_kinds
    out = []
    for (tag, val), kind in zip(hyper_args, kinds):
        if tag == "lit":
            lit_kind, value = val.kind, val.value
            if lit_kind == kind:
                out.append(("lit", value))
            elif lit_kind == "i" and kind == "q":
                out.append(("lit", Fraction(value)))
            elif lit_kind == "i" and kind == "f":
                out.append(("lit", float(value)))
            else:
                raise ArityMismatch(
                    f"{tool.name}: literal {render(val)} does not fit slot "
                    f"type {kind!r}")
        else:
            out.append((tag, val))
    return out


def render(lit):
    return lit.render() if isinstance(lit, Hyperliteral) else repr(lit)


def resolve_def(raw: RawDef, registry: Registry) -> CompositeTool:
    slots = {}
    for i, (label, kind) in enumerate(raw.inputs):
        slots[label] = (i, kind)
    implication_range = None
    if raw.proof_index is not None:
        implication_range = (raw.then_index, raw.proof_index)
    steps, n_slots = _resolve_steps(raw.steps, slots, registry, raw.name,
                                    implication_range)
    out_slots, out_kinds = [], []
    for label, declared in raw.outputs:
        if label not in slots:
            raise UnresolvedLabel(
                f"output {label!r} of {raw.name} is never bound", raw.line)
        slot, kind = slots[label]
        if kind != declared:
            raise OutputKindMismatch(
                f"output {label!r} of {raw.name} is declared {declared} "
                f"but inferred {kind}", raw.line)
        out_slots.append(slot)
        out_kinds.append(kind)
    return CompositeTool(
        name=raw.name, input_slots=tuple(raw.inputs),
        out_kinds=tuple(out_kinds), out_slots=tuple(out_slots),
        steps=tuple(steps), then_index=raw.then_index,
        proof_index=raw.proof_index, n_slots=n_slots, raw=raw)


def resolve_ast(ast: ToolFileAST, registry: Registry, shadow=False):
    """Resolve and register every definition of a parsed tool file, in
    order.  Returns the registered CompositeTools.

    With ``shadow=True`` a definition may replace an identically-signed
    composite from an earlier file, but duplicates within this same file
    still error."""
    registered = []
    seen_here = set()
    for raw in ast.definitions:
        tool = resolve_def(raw, registry)
        sig = (tool.name, tool.obj_kinds)
        register_tool(registry, tool,
                      shadow=shadow and sig not in seen_here)
        seen_here.add(sig)
        registered.append(tool)
    return registered


# ---------------------------------------------------------------------------
# macro inlining (conservative-extension tooling)

def expand_steps(steps, kinds, registry, macro_name, fresh):
    """Expand every call of macros named ``macro_name`` inside a raw step
    list, renaming macro-local labels apart.

    ``kinds``: label -> kind for labels bound so far (mutated as outputs
    bind).  ``fresh``: one-element counter list used for renaming.  Nested
    calls are handled by re-scanning the substituted steps."""
    work = list(steps)
    out = []
    budget = 10000
    while work:
        budget -= 1
        if budget < 0:
            raise GeoproveError("macro expansion does not terminate")
        step = work.pop(0)
        obj_kinds = []
        for arg in step.args:
            if isinstance(arg, Hyperliteral):
                continue
            kind = kinds.get(arg)
            if kind is None:
                raise UnresolvedLabel(f"unknown label {arg!r}", step.line)
            if kind in OBJECT_KINDS:
                obj_kinds.append(kind)
        tool = registry.lookup(step.tool, obj_kinds, line=step.line)
        if not (isinstance(tool, CompositeTool) and tool.flavour == "macro"
                and tool.name == macro_name):
            for label, kind in zip(step.outputs, tool.out_kinds):
                if label != "_":
                    kinds[label] = kind
            out.append(step)
            continue
        fresh[0] += 1
        tag = fresh[0]
        mapping = {}
        arg_iter = iter(step.args)
        for label, _ in tool.raw.inputs:
            mapping[label] = next(arg_iter)
        site_name = {}
        for site_label, (mlabel, _) in zip(step.outputs, tool.raw.outputs):
            if mlabel in mapping:
                raise GeoproveError(
                    f"cannot inline {macro_name}: output {mlabel!r} is a "
                    "pass-through of an input")
            if site_label != "_":
                site_name[mlabel] = site_label
        body = []
        for mstep in tool.raw.steps:
            new_outs = []
            for label in mstep.outputs:
                if label == "_":
                    new_outs.append("_")
                    continue
                renamed = site_name.get(label, f"{label}__x{tag}")
                mapping[label] = renamed
                new_outs.append(renamed)
            new_args = tuple(
                arg if isinstance(arg, Hyperliteral) else mapping[arg]
                for arg in mstep.args)
            body.append(RawStep(tuple(new_outs), mstep.tool, new_args,
                                step.line))
        work = body + work
    return out


def inline_macro(ast: ToolFileAST, primitives_registry: Registry,
                 macro_name: str) -> ToolFileAST:
    """Mechanically inline every call of macro ``macro_name`` throughout a
    tool file; the result proves exactly the same facts (conservative
    extension)."""
    scratch = primitives_registry.copy()
    fresh = [0]
    new_defs = []
    for raw in ast.definitions:
        kinds = {label: kind for label, kind in raw.inputs}
        then, proof = raw.then_index, raw.proof_index
        n = len(raw.steps)
        a_end = then if then is not None else n
        b_end = proof if proof is not None else n
        # expand each section separately so THEN/PROOF boundaries survive
        part_a = expand_steps(raw.steps[:a_end], kinds, scratch,
                              macro_name, fresh)
        part_b = expand_steps(raw.steps[a_end:b_end], kinds, scratch,
                              macro_name, fresh)
        part_c = expand_steps(raw.steps[b_end:], kinds, scratch,
                              macro_name, fresh)
        new_then = len(part_a) if then is not None else None
        new_proof = len(part_a) + len(part_b) if proof is not None else None
        new_defs.append(RawDef(raw.name, raw.inputs, raw.outputs,
                               tuple(part_a + part_b + part_c), new_then,
                               new_proof, raw.line))
        # register the original definition so later lookups resolve the same
        tool = resolve_def(raw, scratch)
        tool.proof_ok = True  # scratch registry: skip proof re-checking
        scratch.add(tool)
    return ToolFileAST(tuple(new_defs))
