"""Randomized inequality suite over several seeds, summarised per inequality.

Usage: python3 scripts/inequality_sweep.py --seeds 0 1 2 --draws 500
"""

import argparse
import time
from collections import defaultdict

from qgt.suites import inequality_suite


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    p.add_argument("--draws", type=int, default=500)
    args = p.parse_args(argv)

    by_name = defaultdict(list)
    failed = 0
    t0 = time.perf_counter()
    for seed in args.seeds:
        reports, summary = inequality_suite(seed, args.draws)
        failed += summary.n_failed
        for r in reports:
            by_name[r.name].append(r.residual / max(1.0, abs(r.lhs), abs(r.rhs)))
    print(f"{'inequality':<22} {'reports':>8} {'min scaled residual':>20} {'max':>10}")
    for name, res in sorted(by_name.items()):
        print(f"{name:<22} {len(res):8d} {min(res):20.3e} {max(res):10.3e}")
    print(f"{failed} failed, {len(args.seeds)} seeds x {args.draws} draws in {time.perf_counter() - t0:.1f} s")
    return 0 if failed == 0 else 1


if __name__ == "__main__":
    raise SystemExit(main())
