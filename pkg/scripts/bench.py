"""Time-to-accuracy of the Ewald route against the damped direct sum.

usage: python3 scripts/bench.py [alpha] [u v]
beta = u b1 + v b2 in reduced reciprocal coordinates (default 0.3 0.15).
"""
import sys

from latticetopo.cli import bench_rows
from latticetopo.latsum2d import HONEYCOMB


def main(argv):
    alpha = complex(argv[0]) if argv else 2.4
    u, v = (float(argv[1]), float(argv[2])) if len(argv) >= 3 else (0.3, 0.15)
    rows, speedup, t_ewald, t_direct = bench_rows(alpha, HONEYCOMB.to_cartesian(u, v))
    print(f"{'method':<8} {'setting':<28} {'terms':>9} {'seconds':>10} {'abs_error':>10}")
    for method, setting, terms, seconds, err in rows:
        print(f"{method:<8} {setting:<28} {terms:>9} {seconds:>10.4g} {err:>10.3g}")
    print(f"time to 1e-6: Ewald {t_ewald * 1e3:.2f} ms, direct {t_direct * 1e3:.0f} ms, speed-up {speedup:.0f}x")


if __name__ == "__main__":
    main(sys.argv[1:])
