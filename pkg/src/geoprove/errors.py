"""Exception taxonomy shared by the whole kernel.

Two families live here: hard errors (bad input, kernel-level
inconsistency) that abort an operation, and :class:`ToolFailure`, which is
the ordinary "this tool did not go through" outcome that callers are
expected to catch and report.
"""

from __future__ import annotations


class GeoproveError(Exception):
    """Base class for every error raised by this package."""


class DegenerateInput(GeoproveError):
    """A numeric construction received inputs it cannot handle
    (coincident points, collinear circumcircle inputs, ...)."""


class KindMismatch(GeoproveError):
    """An object of the wrong geometric kind was supplied."""


class NumericMismatch(GeoproveError):
    """A fact was asserted whose numerical data do not fit."""


class InconsistencyDetected(GeoproveError):
    """The knowledge database derived something that contradicts the
    numerical model; usually the footprint of an earlier numerical-error
    induced postulate.  The offending operation is rolled back."""


class OutOfRange(GeoproveError):
    """Index argument outside the valid range (undo depth etc.)."""


class UnknownLabelKind(GeoproveError):
    """A session operation addressed a label of the wrong provenance,
    e.g. dragging a point that is not a free point."""


# ---------------------------------------------------------------------------
# tool execution failures

NUMERIC_MISFIT = "NumericMisfit"
UNKNOWN_FACT = "UnknownFact"
DEGENERATE = "Degenerate"


class ToolFailure(GeoproveError):
    """A tool run failed.

    ``reason`` is one of ``NumericMisfit`` / ``UnknownFact`` /
    ``Degenerate``; ``steps`` records the path of (tool name, step index)
    pairs through composite tools, outermost first.
    """

    def __init__(self, reason, tool, message="", steps=None):
        self.reason = reason
        self.tool = tool
        self.message = message
        self.steps = list(steps) if steps else []
        super().__init__(str(self))

    def at_step(self, tool_name, index):
        """Return a copy with one more composite frame prepended."""
        return ToolFailure(self.reason, self.tool, self.message,
                           [(tool_name, index)] + self.steps)

    def __str__(self):
        where = "".join(f"{name}[{i}] -> " for name, i in self.steps)
        msg = f": {self.message}" if self.message else ""
        return f"{self.reason} in {where}{self.tool}{msg}"


# ---------------------------------------------------------------------------
# tool file / script language errors

class ToolFileError(GeoproveError):
    """Base for parser and resolution diagnostics; carries 1-based
    line/column where available."""

    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f"line {line}" + (f", col {col}" if col is not None else "")
            where = f" ({where})"
        super().__init__(message + where)


class ToolFileSyntaxError(ToolFileError):
    pass


class DuplicateLabel(ToolFileError):
    pass


class UnknownType(ToolFileError):
    pass


class UnresolvedToolName(ToolFileError):
    pass


class UnresolvedLabel(ToolFileError):
    pass


class OverloadAmbiguity(ToolFileError):
    pass


class ArityMismatch(ToolFileError):
    pass


class OutputKindMismatch(ToolFileError):
    pass


class DuplicateSignature(ToolFileError):
    pass


class LemmaProofFailed(ToolFileError):
    """Registration-time proof check of a lemma did not pass."""

    def __init__(self, message, report=None, line=None):
        self.report = report
        super().__init__(message, line=line)
