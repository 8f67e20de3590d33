"""geoprove: a semi-formal interactive prover for Euclidean geometry.

A numerical model (coordinates, tolerance and margin checks) is coupled to
a logic kernel (union-find equalities, exact rational angle/ratio equation
systems, memoized tool lookup table).  Tools -- constructions, predicates
and inference rules -- execute against the kernel in check or postulate
mode; composite tools are loaded from ``.glt`` files and proof scripts
from ``.gls`` files.
"""

from .core import CoreState, Ref
from .dsl import parse_toolfile, serialize_toolfile
from .errors import (DegenerateInput, GeoproveError, InconsistencyDetected,
                     KindMismatch, NumericMismatch, ToolFailure)
from .numeric import (AngleNum, CircleVal, LineVal, PointVal, RatioNum,
                      Tolerances)
from .primitives import base_registry, primitives_registry
from .script import (FactRecord, ScriptError, SessionState, check_goal,
                     execute_script, parse_script)
from .toolset import Mode, Registry, proof_check, resolve_ast, run_tool

__version__ = "0.1.0"

__all__ = [
    "AngleNum", "CircleVal", "CoreState", "DegenerateInput", "FactRecord",
    "GeoproveError", "InconsistencyDetected", "KindMismatch", "LineVal",
    "Mode", "NumericMismatch", "PointVal", "RatioNum", "Ref", "Registry",
    "ScriptError", "SessionState", "ToolFailure", "Tolerances",
    "base_registry", "check_goal", "execute_script", "parse_script",
    "parse_toolfile", "primitives_registry", "proof_check", "resolve_ast",
    "run_tool", "serialize_toolfile",
]
