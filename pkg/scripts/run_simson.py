#!/usr/bin/env python3
"""Run the bundled Simson's-line session step by step and show what the
kernel learns along the way: new objects, merges, and newly checkable
facts.  Ends by querying the collinearity goal."""

import pathlib
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from geoprove import base_registry, check_goal, parse_script
from geoprove.script import SessionState

CORPUS = pathlib.Path(__file__).resolve().parent.parent / "corpus"


def main():
    registry = base_registry()
    script = parse_script((CORPUS / "simson.gls").read_text())
    session = SessionState(registry)
    t0 = time.perf_counter()
    for i, step in enumerate(script.steps):
        result = session.apply(step, i)
        line = f"[{i:2}] {step.render()}"
        notes = []
        for label, ref in result.outputs:
            notes.append(f"{label}:{ref.kind}#{ref.id}")
        for kept, gone in result.merges:
            notes.append(f"merge {session.display_name(kept)}"
                         f"~{session.display_name(gone)}")
        if result.new_facts:
            notes.append(f"+{len(result.new_facts)} facts")
        print(line + ("   " + " ".join(notes) if notes else ""))
    elapsed = time.perf_counter() - t0
    ok, report = check_goal(session, "lies_on Fb d")
    print(f"\ngoal lies_on Fb d: {'PASS' if ok else f'FAIL ({report})'}")
    print(f"{len(session.facts())} facts known, {elapsed * 1e3:.1f} ms")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
