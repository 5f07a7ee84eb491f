"""Run every property suite at full size and write one JSON report per suite.

    python3 scripts/run_suites.py --seed 20261018 --jobs 4 --out results/
"""

import argparse
import json
import time
from pathlib import Path

from brake_index.io import dumps
from brake_index.suites import SUITES, SuiteConfig, run_suite


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--suites", nargs="+", default=list(SUITES), choices=SUITES)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    summary = {}
    for name in args.suites:
        t0 = time.perf_counter()
        rep, _ = run_suite(SuiteConfig(name, seed=args.seed), jobs=args.jobs)
        dt = time.perf_counter() - t0
        (args.out / f"{name}.json").write_text(dumps(rep) + "\n")
        summary[name] = rep["counts"]
        print(f"{name:10s} {rep['counts']} {dt:.1f}s", flush=True)
    (args.out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
