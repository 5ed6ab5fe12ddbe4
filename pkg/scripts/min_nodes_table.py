#!/usr/bin/env python3
"""Print the minimum-problem-size table over the (separation, margin) grid.

Usage: python3 scripts/min_nodes_table.py
"""

from msbm.experiments import TABLE1_DELTAS, TABLE1_MARGINS
from msbm.theory_bounds import min_nodes_k2


def main() -> int:
    header = "delta \\ c0".ljust(12) + "".join(f"{c0:>7}" for c0 in TABLE1_MARGINS)
    print(header)
    for d in TABLE1_DELTAS:
        cells = "".join(f"{min_nodes_k2(c0, d):>7}" for c0 in TABLE1_MARGINS)
        print(f"{d:<12}" + cells)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
