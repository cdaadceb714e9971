#!/usr/bin/env python3
"""Run every verification suite and print one summary line per suite.

Exit status 0 when everything passes, 3 otherwise (matching the CLI).
"""

import argparse
import sys
import time

from qedist.verify import SUITES, run_repro_suite


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--jobs", type=int, default=1, help="parallel worker count")
    parser.add_argument("--d", type=int, help="override the per-suite default dimension")
    parser.add_argument("--verbose", action="store_true", help="print every failing case")
    args = parser.parse_args()

    all_ok = True
    for suite in SUITES:
        start = time.perf_counter()
        report = run_repro_suite(suite, d=args.d, seed=args.seed, jobs=args.jobs)
        elapsed = time.perf_counter() - start
        n_pass = len(report.cases) - len(report.failures)
        tag = "ok" if report.passed else "FAIL"
        print(f"{suite:10s} {n_pass:3d}/{len(report.cases):3d} cases  {elapsed:6.1f}s  {tag}")
        if args.verbose or not report.passed:
            for case in report.failures:
                print(f"    FAIL {case.description}: expected {case.expected:.8g} "
                      f"({case.kind}), computed {case.computed:.8g}")
        all_ok = all_ok and report.passed
    return 0 if all_ok else 3


if __name__ == "__main__":
    sys.exit(main())
