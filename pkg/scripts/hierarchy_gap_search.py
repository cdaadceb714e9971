#!/usr/bin/env python3
"""Search seeded random states for a strict fidelity gap between classes.

The witness hierarchy forces F_PPT <= F_RainsPres <= F_PPTplusPres, but for
generic NPT states the first and last members differ strictly.  This scans
Ginibre states over a seed range and reports the largest observed gaps.
"""

import argparse
import sys

from qedist.bipartite import random_state
from qedist.distill import OperationClass, fidelity


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--d", type=int, default=3, help="local dimension")
    parser.add_argument("--m", type=int, default=2, help="target maximally entangled rank")
    parser.add_argument("--rank", type=int, default=2, help="state rank (low rank gaps more)")
    parser.add_argument("--seeds", type=int, default=30, help="number of seeds to scan")
    parser.add_argument("--threshold", type=float, default=1e-3)
    args = parser.parse_args()

    best: list[tuple[float, int]] = []
    for seed in range(args.seeds):
        rho = random_state("ginibre_mixed", (args.d, args.d), seed=seed, rank=args.rank)
        low = fidelity(rho, OperationClass.PPT, args.m).value
        high = fidelity(rho, OperationClass.PPT_PLUS_PRESERVING, args.m).value
        gap = high - low
        best.append((gap, seed))
        marker = "  <-- strict" if gap > args.threshold else ""
        print(f"seed {seed:3d}  F_ppt {low:.6f}  F_ppt+pres {high:.6f}  gap {gap:+.2e}{marker}")

    best.sort(reverse=True)
    print("\ntop gaps:")
    for gap, seed in best[:5]:
        print(f"  seed {seed:3d}  gap {gap:.6e}")
    return 0 if best and best[0][0] > args.threshold else 1


if __name__ == "__main__":
    sys.exit(main())
