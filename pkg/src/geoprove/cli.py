"""Command-line interface: batch proof checking, tool-file linting,
step-by-step tracing and the session service.

Exit codes: 0 success, 1 proof/lint failure, 2 IO or parse errors.
The default tool library is the packaged ``tools/base.glt``; override it
with ``--tools`` or the ``GEOPROVE_TOOLS`` environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import primitives
from .dsl import parse_toolfile
from .errors import GeoproveError, LemmaProofFailed, ToolFileError
from .script import ScriptError, execute_script, parse_script
from .toolset import Registry, resolve_ast, resolve_def

TOOLS_ENV = "GEOPROVE_TOOLS"


def _tools_path(args):
    return getattr(args, "tools", None) or os.environ.get(TOOLS_ENV)


def _load_registry(tools_path=None) -> Registry:
    """Primitives plus one tools file (the packaged base by default)."""
    if tools_path is None:
        return primitives.base_registry().copy()
    reg = primitives.primitives_registry()
    with open(tools_path, encoding="utf-8") as fh:
        resolve_ast(parse_toolfile(fh.read()), reg)
    return reg


def _read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _print_failure(report, as_json):
    if as_json:
        print(json.dumps(report.to_json()))
    print(f"FAIL: {report}", file=sys.stderr)


def cmd_check(args) -> int:
    try:
        registry = _load_registry(_tools_path(args))
        script = parse_script(_read(args.script))
    except (OSError, ToolFileError, GeoproveError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    try:
        session = execute_script(script, registry)
    except ScriptError as e:
        _print_failure(e.report, args.report == "json")
        return 1
    goals = sum(1 for s in script.steps if s.goal)
    print(f"ok: {len(script.steps)} steps, {goals} goals, "
          f"{len(session.facts())} facts known")
    return 0


def cmd_lint(args) -> int:
    try:
        text = _read(args.tools_file)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    try:
        ast = parse_toolfile(text)
    except ToolFileError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    try:
        registry = _load_registry(_tools_path(args))
    except (OSError, GeoproveError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    diagnostics = []
    from .toolset import register_tool
    seen_here = set()
    for raw in ast.definitions:
        try:
            tool = resolve_def(raw, registry)
            sig = (tool.name, tool.obj_kinds)
            register_tool(registry, tool, shadow=sig not in seen_here)
            seen_here.add(sig)
        except LemmaProofFailed as e:
            diagnostics.append(f"{raw.name}: {e}")
        except (GeoproveError, ToolFileError) as e:
            diagnostics.append(f"{raw.name}: {e}")
    for diag in diagnostics:
        print(f"lint: {diag}", file=sys.stderr)
    if diagnostics:
        return 1
    print(f"ok: {len(ast.definitions)} definitions lint clean")
    return 0


def cmd_trace(args) -> int:
    try:
        registry = _load_registry(_tools_path(args))
        script = parse_script(_read(args.script))
    except (OSError, ToolFileError, GeoproveError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    from .script import SessionState
    session = SessionState(registry)
    for i, step in enumerate(script.steps):
        try:
            result = session.apply(step, i)
        except ScriptError as e:
            print(f"[{i:3}] {step.render()}")
            print(f"      FAILED: {e.report.reason} -- {e.report.message}")
            return 1
        print(f"[{i:3}] {step.render()}")
        for label, ref in result.outputs:
            print(f"      -> {label} = {ref.kind}#{ref.id}")
        for kept, gone in result.merges:
            print(f"      merge: {_show(session, kept)} == {_show(session, gone)}")
        for fact in result.new_facts:
            names = ", ".join(_show(session, r) for r in fact.refs)
            print(f"      + {fact.kind}({names})")
    return 0


def _show(session, ref):
    return session.display_name(ref)


def cmd_serve(args) -> int:
    from .server import serve
    serve(args.port)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="geoprove",
        description="check, lint and trace geometry proof scripts")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="run a proof script and its goals")
    p.add_argument("script")
    p.add_argument("--tools", help="tools file (default: packaged base)")
    p.add_argument("--report", choices=["text", "json"], default="text")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("lint", help="parse, resolve and proof-check a tools file")
    p.add_argument("tools_file")
    p.add_argument("--tools", help="context tools file (default: packaged base)")
    p.set_defaults(fn=cmd_lint)

    p = sub.add_parser("trace", help="run a script printing per-step outcomes")
    p.add_argument("script")
    p.add_argument("--tools", help="tools file (default: packaged base)")
    p.set_defaults(fn=cmd_trace)

    p = sub.add_parser("serve", help="NDJSON session service on a local socket")
    p.add_argument("--port", type=int, default=8649)
    p.set_defaults(fn=cmd_serve)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
