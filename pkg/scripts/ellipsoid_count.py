"""Count brake orbit classes on ellipsoids and compare with the axis librations.

    python3 scripts/ellipsoid_count.py --grid 64 --dims 2 3
"""

import argparse
import time

import numpy as np

from brake_index.orbits import classify_symmetry, enumerate_brake_orbits, quadratic_hamiltonian


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--grid", type=int, default=64)
    ap.add_argument("--dims", type=int, nargs="+", default=[2, 3])
    args = ap.parse_args()
    for n in args.dims:
        a = np.sqrt(np.arange(1, n + 1))
        t0 = time.perf_counter()
        en = enumerate_brake_orbits(quadratic_hamiltonian(weights=a), grid_density=args.grid)
        dt = time.perf_counter() - t0
        want = np.sort(2 * np.pi / (np.sqrt(2) * a))
        print(f"n={n} weights={np.round(a, 4).tolist()} classes={en.count} "
              f"unconverged={len(en.unconverged)} time={dt:.1f}s")
        for c, m in sorted(zip(en.classes, en.multiplicity), key=lambda t: t[0].period):
            err = np.min(np.abs(want - c.period))
            print(f"  period={c.period:.12f} err={err:.1e} shots={m} {classify_symmetry(c)}")


if __name__ == "__main__":
    main()
