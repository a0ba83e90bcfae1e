"""Run every worked example and print one line per check.

    python3 scripts/run_examples.py [--only 3 5]
"""
from __future__ import annotations

import argparse
import sys
import time

from dilation_lab.scenarios import BUILDERS, build_example, run_scenario


def main() -> int:
    ap = argparse.ArgumentParser(description="Run the worked examples.")
    ap.add_argument("--only", nargs="*", help="example keys to run (default: all)")
    args = ap.parse_args()
    keys = [k for k in BUILDERS if args.only is None or str(k) in args.only]
    bad = 0
    for key in keys:
        t0 = time.perf_counter()
        rep = run_scenario(build_example(key))
        dt = time.perf_counter() - t0
        print(f"== {rep.name} ({dt:.2f}s)")
        for c in rep.all_checks():
            mark = "ok" if c.ok is not False else "MISMATCH"
            tag = " (expected failure)" if c.expected_failure else ""
            res = "" if c.residual is None else f" residual={c.residual:.3e}"
            print(f"  {mark:8s} {c.name}{res}{tag}")
        bad += not rep.passed
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
