"""Regenerate every data set (CSV + SVG) through the CLI into one directory.

usage: python3 scripts/reproduce.py [output_dir]
"""
import sys
import time

from latticetopo.cli import main

RUNS = [
    ("bands1d_trivial", ["bands1d", "--delta", "0.2", "--n", "400"]),
    ("bands1d_topological", ["bands1d", "--delta", "0.8", "--n", "400"]),
    ("winding", ["winding", "--delta-sweep", "0.05:0.95:0.05"]),
    ("winding_trajectories", ["winding", "--delta", "0.8", "--trajectory"]),
    ("edge1d", ["edge1d"]),
    ("edge1d_real_energy", ["edge1d", "--alpha-eval", "2.4"]),
    ("bands2d_gapless", ["bands2d", "--t2", "0"]),
    ("bands2d_haldane", ["bands2d"]),
    ("chern", ["chern"]),
    ("phase_diagram", ["phase-diagram"]),
    ("edge2d", ["edge2d"]),
    ("bench", ["bench"]),
]


def run_all(root: str) -> int:
    worst = 0
    for name, args in RUNS:
        t0 = time.perf_counter()
        code = main([*args, "--svg", "--output-dir", f"{root}/{name}"])
        print(f"{name}: exit {code} in {time.perf_counter() - t0:.1f}s")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(run_all(sys.argv[1] if len(sys.argv) > 1 else "out"))
