"""Parser and serializer for the composite-tool file format (``.glt``).

A tool file is a sequence of definitions separated by blank lines.  Each
definition starts with an unindented header::

    name in0:P in1:L -> out0:A

followed by indented step lines::

    d0 <- direction_of l0
    alpha <- angle_compute 0 d0 -1 d1 1
    <- lies_on A p

Types are single letters: P (point), L (line), C (circle), A (angle),
D (ratio), plus the hyperparameter slots i (integer), f (float) and
q (fraction) so that wrapper tools can forward hyperparameters.  A single
``THEN`` line splits an axiom into assumptions and implications; a
``PROOF`` line after it opens a lemma's proof section.  Step arguments are
labels (starting with a letter) or hyperliterals (``-3``, ``2.5``,
``1/2``).  Lines whose first non-blank character is ``#`` are comments.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (DuplicateLabel, ToolFileSyntaxError, UnknownType)

__all__ = [
    "Hyperliteral", "RawStep", "RawDef", "ToolFileAST",
    "parse_toolfile", "serialize_toolfile", "render_literal",
    "OBJECT_KINDS", "HYPER_KINDS",
]

OBJECT_KINDS = "PLCAD"
HYPER_KINDS = "ifq"

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
_INT_RE = re.compile(r"-?\d+\Z")
_FRAC_RE = re.compile(r"-?\d+/\d+\Z")
_FLOAT_RE = re.compile(r"-?(?:\d+\.\d*|\.\d+|\d+(?=[eE]))(?:[eE][+-]?\d+)?\Z")


@dataclass(frozen=True)
class Hyperliteral:
    """Numeric literal argument: kind 'i', 'f' or 'q'."""

    kind: str
    value: object

    def render(self):
        return render_literal(self)


def render_literal(lit: Hyperliteral) -> str:
    if lit.kind == "q":
        return f"{lit.value.numerator}/{lit.value.denominator}"
    if lit.kind == "f":
        return repr(lit.value)
    return str(lit.value)


@dataclass(frozen=True)
class RawStep:
    outputs: tuple      # labels; "_" marks an anonymous output
    tool: str
    args: tuple         # str labels and Hyperliterals, in written order
    line: int = field(default=0, compare=False)

    def render(self):
        parts = list(self.outputs) + ["<-", self.tool]
        parts += [a.render() if isinstance(a, Hyperliteral) else a
                  for a in self.args]
        return " ".join(parts)


@dataclass(frozen=True)
class RawDef:
    name: str
    inputs: tuple       # (label, kind) pairs
    outputs: tuple      # (label, kind) pairs
    steps: tuple        # RawStep
    then_index: object = None    # int index into steps, or None
    proof_index: object = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ToolFileAST:
    definitions: tuple


def parse_literal_token(tok):
    """Return a Hyperliteral for a numeric token, else None."""
    if _INT_RE.match(tok):
        return Hyperliteral("i", int(tok))
    if _FRAC_RE.match(tok):
        num, den = tok.split("/")
        if int(den) == 0:
            raise ToolFileSyntaxError("fraction with zero denominator")
        return Hyperliteral("q", Fraction(int(num), int(den)))
    if _FLOAT_RE.match(tok):
        return Hyperliteral("f", float(tok))
    return None


def _tokens_with_cols(line):
    return [(m.group(0), m.start() + 1) for m in re.finditer(r"\S+", line)]


def _parse_header(line, lineno):
    toks = _tokens_with_cols(line)
    name, col = toks[0]
    if not _NAME_RE.match(name):
        raise ToolFileSyntaxError(f"bad tool name {name!r}", lineno, col)
    try:
        arrow = next(i for i, (t, _) in enumerate(toks) if t == "->")
    except StopIteration:
        raise ToolFileSyntaxError("header missing '->'", lineno) from None

    def parse_typed(items):
        out = []
        for tok, c in items:
            if ":" not in tok:
                raise ToolFileSyntaxError(
                    f"expected label:TYPE, got {tok!r}", lineno, c)
            label, _, kind = tok.partition(":")
            if not _NAME_RE.match(label):
                raise ToolFileSyntaxError(f"bad label {label!r}", lineno, c)
            if kind not in OBJECT_KINDS and kind not in HYPER_KINDS:
                raise UnknownType(f"unknown type {kind!r}", lineno, c)
            out.append((label, kind))
        return tuple(out)

    inputs = parse_typed(toks[1:arrow])
    outputs = parse_typed(toks[arrow + 1:])
    seen = set()
    for label, _ in inputs:
        if label in seen:
            raise DuplicateLabel(f"duplicate input label {label!r}", lineno)
        seen.add(label)
    seen = set()
    for label, _ in outputs:
        if label in seen:
            raise DuplicateLabel(f"duplicate output label {label!r}", lineno)
        seen.add(label)
    return name, inputs, outputs


def _parse_step(line, lineno):
    toks = _tokens_with_cols(line)
    try:
        arrow = next(i for i, (t, _) in enumerate(toks) if t == "<-")
    except StopIteration:
        raise ToolFileSyntaxError("step missing '<-'", lineno,
                                  toks[0][1]) from None
    outputs = []
    for tok, c in toks[:arrow]:
        if tok != "_" and not _NAME_RE.match(tok):
            raise ToolFileSyntaxError(f"bad output label {tok!r}", lineno, c)
        outputs.append(tok)
    if arrow + 1 >= len(toks):
        raise ToolFileSyntaxError("step missing tool name", lineno)
    tool, c = toks[arrow + 1]
    if not _NAME_RE.match(tool):
        raise ToolFileSyntaxError(f"bad tool name {tool!r}", lineno, c)
    args = []
    for tok, c in toks[arrow + 2:]:
        lit = parse_literal_token(tok)
        if lit is not None:
            args.append(lit)
        elif _NAME_RE.match(tok):
            args.append(tok)
        else:
            raise ToolFileSyntaxError(
                f"expected label or numeric literal, got {tok!r}", lineno, c)
    return RawStep(tuple(outputs), tool, tuple(args), lineno)


def parse_step_line(line: str, lineno: int = 0) -> RawStep:
    """Parse a single step line (used by the proof-script parser too)."""
    return _parse_step(line, lineno)


class _DefBuilder:
    def __init__(self, name, inputs, outputs, lineno):
        self.name = name
        self.inputs = inputs
        self.outputs = outputs
        self.line = lineno
        self.steps = []
        self.then_index = None
        self.proof_index = None
        self._labels = {label for label, _ in inputs}

    def add_marker(self, marker, lineno):
        if marker == "THEN":
            if self.then_index is not None:
                raise ToolFileSyntaxError("duplicate THEN", lineno)
            if self.proof_index is not None:
                raise ToolFileSyntaxError("THEN after PROOF", lineno)
            self.then_index = len(self.steps)
        else:
            if self.then_index is None:
                raise ToolFileSyntaxError("PROOF requires a THEN before it",
                                          lineno)
            if self.proof_index is not None:
                raise ToolFileSyntaxError("duplicate PROOF", lineno)
            self.proof_index = len(self.steps)

    def add_step(self, step):
        for label in step.outputs:
            if label == "_":
                continue
            if label in self._labels:
                raise DuplicateLabel(f"duplicate label {label!r}", step.line)
            self._labels.add(label)
        self.steps.append(step)

    def finish(self):
        return RawDef(self.name, self.inputs, self.outputs,
                      tuple(self.steps), self.then_index, self.proof_index,
                      self.line)


def parse_toolfile(text: str) -> ToolFileAST:
    defs = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip("\r\n")
        stripped = line.strip()
        if stripped.startswith("#"):
            continue
        if not stripped:
            if current is not None:
                defs.append(current.finish())
                current = None
            continue
        if not line[0].isspace():
            if current is not None:
                defs.append(current.finish())
            current = _DefBuilder(*_parse_header(line, lineno), lineno)
            continue
        # indented: step or section marker
        if current is None:
            raise ToolFileSyntaxError("step outside a tool definition", lineno)
        if stripped in ("THEN", "PROOF"):
            current.add_marker(stripped, lineno)
        else:
            current.add_step(_parse_step(line, lineno))
    if current is not None:
        defs.append(current.finish())
    return ToolFileAST(tuple(defs))


def serialize_toolfile(ast: ToolFileAST) -> str:
    chunks = []
    for d in ast.definitions:
        sig = " ".join([d.name] + [f"{l}:{k}" for l, k in d.inputs] + ["->"]
                       + [f"{l}:{k}" for l, k in d.outputs])
        lines = [sig]
        for i, step in enumerate(d.steps):
            if d.then_index == i:
                lines.append("  THEN")
            if d.proof_index == i:
                lines.append("  PROOF")
            lines.append("  " + step.render())
        n = len(d.steps)
        if d.then_index == n:
            lines.append("  THEN")
        if d.proof_index == n:
            lines.append("  PROOF")
        chunks.append("\n".join(lines))
    return "\n\n".join(chunks) + ("\n" if chunks else "")
