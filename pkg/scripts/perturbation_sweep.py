#!/usr/bin/env python3
"""Perturbation robustness experiment: jitter the free points of the
Simson session and measure how often the construction and the proof
survive, as a function of the jitter radius (relative to session scale).

Usage: python scripts/perturbation_sweep.py [n_samples_per_radius]
"""

import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from geoprove import base_registry, check_goal, execute_script, parse_script
from geoprove.script import ScriptError

CORPUS = pathlib.Path(__file__).resolve().parent.parent / "corpus"

FREE = {"A": (-79.20758056640625, -119.095947265625),
        "B": (-126.97052001953125, 23.91351318359375),
        "C": (108.5352783203125, 19.20867919921875)}


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 50
    registry = base_registry()
    script = parse_script((CORPUS / "simson.gls").read_text())
    session = execute_script(script, registry)
    scale = session.core.tol.scale
    rng = np.random.default_rng(11)
    print(f"scale = {scale:.2f}; {n} samples per radius")
    print(f"{'radius':>8} {'constructed':>12} {'goal holds':>11}")
    for radius in (0.01, 0.05, 0.1, 0.2, 0.4, 0.8):
        built = holds = 0
        for _ in range(n):
            state = session
            try:
                for label, (x, y) in FREE.items():
                    dx, dy = rng.uniform(-radius, radius, 2) * scale
                    state = state.move_free_point(label, x + dx, y + dy)
            except ScriptError:
                continue
            built += 1
            ok, _ = check_goal(state, "lies_on Fb d")
            holds += ok
        print(f"{radius:8.2f} {built:>9}/{n} {holds:>8}/{built}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
